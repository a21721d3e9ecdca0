use kerrcomb::*;

fn main() {
    let w = base_wave(0.5, 256).unwrap();
    let g = w.grid.clone();
    let lplus = assemble_scalar_operator(&g, &w.phi1, OperatorKind::LPlus, 0.0).unwrap();
    let m = lplus.entries.clone();
    let eig = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()));
    println!("L+ smallest |eigenvalues|:");
    let phi = nalgebra::DVector::from_column_slice(&w.phi1);
    for &i in idx.iter().take(8) {
        let q = eig.eigenvectors.column(i);
        let overlap = q.dot(&phi);
        println!("  lambda = {:+.6e}   <q,phi0>_l2 = {:+.4e}  contribution <q,phi0>^2/lambda (quad-scaled) = {:+.4e}",
            eig.eigenvalues[i], overlap, g.quad_weight()*overlap*overlap/eig.eigenvalues[i]);
    }
    // solve and residual
    let x = solve_on_complement(&lplus, &g, &w.phi1, &[&g.spectral_derivative(&w.phi1)]).unwrap();
    let lx = lplus.apply(&x);
    let res: f64 = lx.iter().zip(&w.phi1).map(|(a,b)| (a-b).abs()).fold(0.0, f64::max);
    println!("solve residual inf: {res:.3e}");
    println!("ant1 = {:.10}", g.inner(&x, &w.phi1));

    // Newton seed distance
    let r = first_order_correction(0.5, 0.7, -1, 256).unwrap();
    let seed = profile::expansion_seed(&g, &r, 1e-3);
    let (p, rep) = newton_solve(&g, &seed, 1e-3, 0.7).unwrap();
    let dist: f64 = p.phi1.iter().zip(&seed.phi1).chain(p.phi2.iter().zip(&seed.phi2))
        .map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("newton seed dist = {dist:.3e} (h^2 = 1e-6), steps={}, residuals={:?}", rep.steps, rep.residuals);
}
