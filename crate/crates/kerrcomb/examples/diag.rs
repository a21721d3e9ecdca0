use kerrcomb::*;
use nalgebra::DMatrix;

fn main() {
    // quartic c=0.3 companion eigenvalues
    let companion = DMatrix::from_row_slice(
        4, 4,
        &[0.0, 0.0, 0.0, -0.3, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
    );
    match nalgebra::linalg::Schur::try_new(companion.clone(), 1e-14, 100_000) {
        Some(s) => println!("schur ok: {:?}", s.complex_eigenvalues().iter().collect::<Vec<_>>()),
        None => println!("schur FAILED for c=0.3 companion"),
    }
    match quartic_roots(0.0, 0.3) {
        Ok(r) => println!("quartic c=0.3 unexpectedly ok: {:?}", r.zeta),
        Err(e) => println!("quartic c=0.3 err: {e}"),
    }
    match quartic_roots(0.0, -0.01) {
        Ok(r) => println!("quartic c=-0.01 unexpectedly ok: {:?}", r.zeta),
        Err(e) => println!("quartic c=-0.01 err: {e}"),
    }

    // identities values
    let (a1, a2, a3) = identities::inner_products_via_inverse(0.5, 256).unwrap();
    println!("ant1={a1:.15e} ant2={a2:.3e} ant3={a3:.3e}");
    println!("ant1 closed = {:.15e}", identities::closed_form_ant1(0.5).unwrap());
    println!("rel ant1 diff = {:.3e}", (a1 - identities::closed_form_ant1(0.5).unwrap()).abs() / a1.abs());

    // expansion internals
    let r = first_order_correction(0.5, 0.7, -1, 256).unwrap();
    println!("d2_0 = {:.12}", r.d2_0);
    let w = base_wave(0.5, 256).unwrap();
    println!("psi1.phi0 = {:.3e}", w.grid.inner(&r.psi1_0, &w.phi1));
    println!("sigma_trans = {:.3e}", r.sigma_trans_slope);
    println!("lambda_h = {:.10}", r.lambda_h_coeff);

    // newton residual history
    let grid = w.grid.clone();
    let seed = profile::expansion_seed(&grid, &r, 1e-3);
    let (_, rep) = newton_solve(&grid, &seed, 1e-3, 0.7).unwrap();
    println!("newton steps={} residuals={:?} sigma_min={:.3e}", rep.steps, rep.residuals, rep.jacobian_sigma_min);

    // h=0 spectrum near-zero structure at n=64
    let w64 = base_wave(0.5, 64).unwrap();
    let (lh, jlh) = assemble_full_linearization(&w64.grid.clone(), &w64).unwrap();
    let _ = lh;
    let mut mus: Vec<_> = {
        let s = nalgebra::linalg::Schur::try_new(jlh.entries.clone(), 1e-14, 100_000).unwrap();
        s.complex_eigenvalues().iter().cloned().collect()
    };
    mus.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    println!("smallest |mu|: {:?}", &mus[..6].iter().map(|z| (z.re, z.im)).collect::<Vec<_>>());
    let worst_re = mus.iter().filter(|z| z.norm() >= 5e-5).map(|z| z.re.abs()).fold(0.0, f64::max);
    println!("worst |Re| outside 5e-5 cluster: {:.3e}", worst_re);

    // noise norm
    let mut run = EvolutionRun::from_profile(&w, 1e-3).unwrap();
    run.perturb_with_noise(1e-4, 42).unwrap();
    println!("noise norm residual: {:.6e} (target 1e-4), diff {:.3e}", run.residual_norm(), (run.residual_norm()-1e-4).abs());
}
