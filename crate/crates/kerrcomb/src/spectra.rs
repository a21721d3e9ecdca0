//! Dense eigenanalysis of the linearized operators: spectrum classification
//! against the {0} u {-2 alpha} u {Re lambda = -alpha} decomposition, Krein
//! signatures of imaginary pairs, and negative-index counts per parity
//! subspace.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{KerrError, Result};
use crate::grid::{LinearOperatorMatrix, PeriodicGrid};
use crate::linalg;

/// Classification of one stability eigenvalue lambda = mu - alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenClass {
    /// The matched special eigenvalue nearest 0 (translational).
    Zero,
    /// The matched special eigenvalue nearest -2 alpha.
    MinusTwoAlpha,
    /// On the vertical line Re lambda = -alpha (within reporting tolerance).
    Line,
    /// Real part above the instability tolerance.
    UnstableReal,
    /// Anything else (off-line without positive real part).
    Other,
}

impl EigenClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            EigenClass::Zero => "zero",
            EigenClass::MinusTwoAlpha => "minus_two_alpha",
            EigenClass::Line => "line",
            EigenClass::UnstableReal => "unstable",
            EigenClass::Other => "other",
        }
    }
}

/// Eigenvalues lambda with Re lambda above this are counted unstable.
pub const UNSTABLE_TOL: f64 = 1e-6;
/// Reporting threshold for the two special eigenvalues.
pub const SPECIAL_LAMBDA_TOL: f64 = 1e-5;
/// Line-membership threshold used only for the per-eigenvalue class tag.
pub const LINE_CLASS_TOL: f64 = 1e-5;

fn cluster_tol(mu: Complex64) -> f64 {
    1e-6 * (1.0 + mu.norm())
}

/// Full spectrum of J L_h with the Theorem-style classification.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub h: f64,
    pub alpha: f64,
    /// Spectrum of J L_h (mu variables), sorted by descending Re lambda then
    /// ascending Im.
    pub eigenvalues_mu: Vec<Complex64>,
    /// lambda = mu - alpha.
    pub eigenvalues_lambda: Vec<Complex64>,
    pub classes: Vec<EigenClass>,
    /// Negative eigenvalue counts of the symmetric block L_h.
    pub n_lh: usize,
    pub n_even: usize,
    pub n_odd: usize,
    /// Re lambda of eigenvalues with Re lambda > UNSTABLE_TOL (specials excluded).
    pub unstable_real: Vec<f64>,
    /// max |Re lambda + alpha| over the vertical-line cluster (specials excluded).
    pub line_deviation: f64,
    /// Distance of the nearest eigenvalue to lambda = 0.
    pub special_zero_dist: f64,
    /// Distance of the nearest remaining eigenvalue to lambda = -2 alpha.
    pub special_minus_two_alpha_dist: f64,
    pub special_zero: bool,
    pub special_minus_two_alpha: bool,
    /// Krein sign for the lowest simple purely-imaginary mu pairs.
    pub krein: Vec<(Complex64, i8)>,
    /// Worst defect of the mu -> -mu and mu -> conj(mu) pairing symmetries.
    pub pairing_defect: f64,
}

/// Eigenvalues, classification and Krein data of the assembled linearization.
///
/// `krein_pairs` bounds how many low-frequency imaginary pairs get a Krein
/// signature (each one costs a complex LU solve).
pub fn full_spectrum(
    jlh: &LinearOperatorMatrix,
    lh: &LinearOperatorMatrix,
    grid: &PeriodicGrid,
    alpha: f64,
    krein_pairs: usize,
) -> Result<SpectrumReport> {
    let mut mus = linalg::eigenvalues(&jlh.entries)?;
    // Deterministic order: descending Re lambda, then ascending Im.
    mus.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let lambdas: Vec<Complex64> = mus.iter().map(|&m| m - alpha).collect();
    let m = lambdas.len();

    let scale = mus.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let mut pairing_defect = 0.0_f64;
    for &mu in &mus {
        for target in [-mu, mu.conj()] {
            let nearest = mus
                .iter()
                .map(|&z| (z - target).norm())
                .fold(f64::INFINITY, f64::min);
            pairing_defect = pairing_defect.max(nearest);
        }
    }

    let mut classes = vec![EigenClass::Other; m];
    let nearest_to = |target: Complex64, taken: &[Option<usize>]| -> usize {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (i, &l) in lambdas.iter().enumerate() {
            if taken.iter().flatten().any(|&t| t == i) {
                continue;
            }
            let d = (l - target).norm();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    };
    // Specials are matched before the vertical-line test.
    let i_zero = nearest_to(Complex64::new(0.0, 0.0), &[]);
    let i_neg2a = nearest_to(Complex64::new(-2.0 * alpha, 0.0), &[Some(i_zero)]);
    let special_zero_dist = lambdas[i_zero].norm();
    let special_minus_two_alpha_dist = (lambdas[i_neg2a] + 2.0 * alpha).norm();
    classes[i_zero] = EigenClass::Zero;
    classes[i_neg2a] = EigenClass::MinusTwoAlpha;

    let mut unstable_real = Vec::new();
    let mut line_deviation = 0.0_f64;
    for i in 0..m {
        if i == i_zero || i == i_neg2a {
            continue;
        }
        let l = lambdas[i];
        line_deviation = line_deviation.max((l.re + alpha).abs());
        if l.re > UNSTABLE_TOL {
            classes[i] = EigenClass::UnstableReal;
            unstable_real.push(l.re);
        } else if (l.re + alpha).abs() < LINE_CLASS_TOL {
            classes[i] = EigenClass::Line;
        }
    }
    unstable_real.sort_by(|a, b| b.total_cmp(a));

    // Krein signatures of the lowest simple purely-imaginary pairs.
    let mut krein = Vec::new();
    let mut candidates: Vec<Complex64> = mus
        .iter()
        .copied()
        .filter(|z| z.im > cluster_tol(*z) && z.re.abs() < cluster_tol(*z))
        .collect();
    candidates.sort_by(|a, b| a.im.total_cmp(&b.im));
    for &mu in candidates.iter() {
        if krein.len() >= krein_pairs {
            break;
        }
        match krein_signature(jlh, lh, grid, mu, &mus) {
            Ok(sign) => krein.push((mu, sign)),
            Err(KerrError::Multiplicity { .. }) => continue,
            Err(e) => return Err(e),
        }
    }

    let (n_lh, n_even, n_odd) = index_counts(lh, grid)?;

    Ok(SpectrumReport {
        h: jlh.h,
        alpha,
        eigenvalues_mu: mus,
        eigenvalues_lambda: lambdas,
        classes,
        n_lh,
        n_even,
        n_odd,
        unstable_real,
        line_deviation,
        special_zero_dist,
        special_minus_two_alpha_dist,
        special_zero: special_zero_dist < SPECIAL_LAMBDA_TOL,
        special_minus_two_alpha: special_minus_two_alpha_dist < SPECIAL_LAMBDA_TOL,
        krein,
        pairing_defect: if scale > 0.0 { pairing_defect / scale } else { 0.0 },
    })
}

/// Eigenvector of J L_h for the eigenvalue nearest mu, with its relative
/// residual. The complex phase is fixed by maximizing ||Re z||.
pub fn eigenvector_for(
    jlh: &LinearOperatorMatrix,
    mu: Complex64,
) -> Result<(DVector<Complex64>, f64)> {
    // Detune the shift slightly so the shifted LU stays comfortably regular.
    let shift = mu + Complex64::new(1e-9 * (1.0 + mu.norm()), 0.0);
    let (z, _, residual) = linalg::inverse_iteration(&jlh.entries, shift, 3)?;
    if residual > 1e-6 {
        return Err(KerrError::EigenFailure(format!(
            "inverse iteration residual {residual:.3e} for shift {mu}"
        )));
    }
    Ok((fix_phase(&z), residual))
}

/// Rotate a complex eigenvector so that ||Re z|| is maximal.
fn fix_phase(z: &DVector<Complex64>) -> DVector<Complex64> {
    let rr: f64 = z.iter().map(|c| c.re * c.re).sum();
    let ii: f64 = z.iter().map(|c| c.im * c.im).sum();
    let ri: f64 = z.iter().map(|c| c.re * c.im).sum();
    // ||Re(e^{i t} z)||^2 = cos^2 rr - 2 sin cos ri + sin^2 ii; stationary at
    // tan(2t) = -2 ri / (rr - ii).
    let theta = 0.5 * (-2.0 * ri).atan2(rr - ii);
    let rot = Complex64::from_polar(1.0, theta);
    let a = z * rot;
    let b = z * (rot * Complex64::new(0.0, 1.0));
    let na: f64 = a.iter().map(|c| c.re * c.re).sum();
    let nb: f64 = b.iter().map(|c| c.re * c.re).sum();
    if na >= nb {
        a
    } else {
        b
    }
}

/// Krein signature of a purely imaginary eigenvalue of J L_h: the sign of
/// <Re z, L_h Re z> for its eigenvector z.
///
/// A simple eigenvalue uses the phase-fixed eigenvector directly. A
/// numerically double one (the cos/sin degeneracy of high wavenumbers) is
/// accepted when the energy form is definite on the whole invariant
/// subspace; defective or indefinite clusters raise the multiplicity error.
pub fn krein_signature(
    jlh: &LinearOperatorMatrix,
    lh: &LinearOperatorMatrix,
    grid: &PeriodicGrid,
    mu: Complex64,
    spectrum: &[Complex64],
) -> Result<i8> {
    let tol = cluster_tol(mu);
    if mu.re.abs() > tol {
        return Err(KerrError::InvalidArgument(format!(
            "mu = {mu} is not purely imaginary at tolerance {tol:.3e}"
        )));
    }
    let within = spectrum.iter().filter(|z| (**z - mu).norm() < tol).count();
    if within == 0 {
        return Err(KerrError::InvalidArgument(format!(
            "mu = {mu} is not in the supplied spectrum"
        )));
    }
    if within > 2 {
        return Err(KerrError::Multiplicity {
            mu: mu.to_string(),
            count: within,
        });
    }
    let w = grid.quad_weight();
    let form = |a: &[f64], b: &[f64]| -> f64 {
        // Block vectors live on two copies of the grid; same quadrature weight.
        let lb = lh.apply(b);
        w * a.iter().zip(&lb).map(|(x, y)| x * y).sum::<f64>()
    };
    if within == 1 {
        let (z, _) = eigenvector_for(jlh, mu)?;
        let re: Vec<f64> = z.iter().map(|c| c.re).collect();
        let q = form(&re, &re);
        return Ok(if q >= 0.0 { 1 } else { -1 });
    }
    // Double eigenvalue: two deflated eigenvectors, then the energy form on
    // the real invariant subspace spanned by their real and imaginary parts.
    let shift = mu + Complex64::new(1e-9 * (1.0 + mu.norm()), 0.0);
    let (z1, _, r1) = linalg::inverse_iteration(&jlh.entries, shift, 3)?;
    let (z2, _, r2) = linalg::inverse_iteration_deflated(&jlh.entries, shift, 4, &[&z1])?;
    if r1 > 1e-6 || r2 > 1e-6 {
        return Err(KerrError::Multiplicity {
            mu: mu.to_string(),
            count: within,
        });
    }
    let basis: Vec<Vec<f64>> = [&z1, &z2]
        .into_iter()
        .flat_map(|z| {
            let re: Vec<f64> = z.iter().map(|c| c.re).collect();
            let im: Vec<f64> = z.iter().map(|c| c.im).collect();
            [re, im]
        })
        .collect();
    let mut gram = nalgebra::DMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            gram[(i, j)] = form(&basis[i], &basis[j]);
        }
    }
    let gram = 0.5 * (&gram + gram.transpose());
    let (vals, _) = linalg::symmetric_eigen_sorted(&gram);
    let max = vals.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    if max > 0.0 && vals[0] > 1e-8 * max {
        Ok(1)
    } else if max > 0.0 && vals[3] < -1e-8 * max {
        Ok(-1)
    } else {
        // Indefinite or degenerate energy form: genuinely not a signed pair.
        Err(KerrError::Multiplicity {
            mu: mu.to_string(),
            count: within,
        })
    }
}

/// Counts of negative eigenvalues of a symmetric operator on the full space
/// and on the even/odd parity subspaces. Works for both scalar (n x n) and
/// block (2n x 2n) operators.
pub fn index_counts(
    op: &LinearOperatorMatrix,
    grid: &PeriodicGrid,
) -> Result<(usize, usize, usize)> {
    let size = op.entries.nrows();
    let n = grid.n;
    if size != n && size != 2 * n {
        return Err(KerrError::GridMismatch(format!(
            "operator size {size} does not match grid size {n}"
        )));
    }
    let asym = op.max_asymmetry();
    if asym > 1e-10 * op.entries.amax().max(1.0) {
        return Err(KerrError::ContractViolation(format!(
            "index counts need a symmetric operator (asymmetry {asym:.3e})"
        )));
    }
    let count_neg = |m: &DMatrix<f64>| -> usize {
        let (vals, _) = linalg::symmetric_eigen_sorted(m);
        vals.iter().filter(|&&v| v < -1e-8).count()
    };
    let blockify = |b: &DMatrix<f64>| -> DMatrix<f64> {
        let (r, c) = (b.nrows(), b.ncols());
        let mut bb = DMatrix::zeros(2 * r, 2 * c);
        bb.view_mut((0, 0), (r, c)).copy_from(b);
        bb.view_mut((r, c), (r, c)).copy_from(b);
        bb
    };
    let be = grid.even_basis();
    let bo = grid.odd_basis();
    let (be, bo) = if size == 2 * n {
        (blockify(&be), blockify(&bo))
    } else {
        (be, bo)
    };
    let total = count_neg(&op.entries);
    let even = count_neg(&(be.transpose() * &op.entries * &be));
    let odd = count_neg(&(bo.transpose() * &op.entries * &bo));
    Ok((total, even, odd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnoidal::base_wave;
    use crate::grid::{assemble_full_linearization, assemble_scalar_operator, OperatorKind};

    #[test]
    fn kernel_structure_of_base_operators() {
        let w = base_wave(0.5, 128).unwrap();
        let g = &w.grid;
        let lminus = assemble_scalar_operator(g, &w.phi1, OperatorKind::LMinus, 0.0).unwrap();
        let (vals, vecs) = linalg::symmetric_eigen_sorted(&lminus.entries);
        assert!(vals[0].abs() < 1e-8, "lambda0(L-) = {:.3e}", vals[0]);
        // Eigenvector proportional to phi0.
        let v = vecs.column(0);
        let phi = DVector::from_column_slice(&w.phi1);
        let overlap = v.dot(&phi).abs() / (v.norm() * phi.norm());
        assert!(overlap > 1.0 - 1e-10, "overlap {overlap}");

        let lplus = assemble_scalar_operator(g, &w.phi1, OperatorKind::LPlus, 0.0).unwrap();
        let (vals, vecs) = linalg::symmetric_eigen_sorted(&lplus.entries);
        assert!(vals[0] < -1e-3, "ground state should be negative");
        assert!(vals[1].abs() < 1e-8, "zero eigenvalue {:.3e}", vals[1]);
        assert!(vals[2] > 1e-3, "exactly one negative eigenvalue");
        let dphi = DVector::from_column_slice(&g.spectral_derivative(&w.phi1));
        let v = vecs.column(1);
        let overlap = v.dot(&dphi).abs() / (v.norm() * dphi.norm());
        assert!(overlap > 1.0 - 1e-6, "phi0' overlap {overlap}");
    }

    #[test]
    fn real_wave_block_diagonal_decoupling() {
        // phi2 = 0: L_h is exactly block-diagonal (L_+, L_-).
        let w = base_wave(0.5, 64).unwrap();
        let g = &w.grid;
        let (lh, _) = assemble_full_linearization(g, &w).unwrap();
        let lplus = assemble_scalar_operator(g, &w.phi1, OperatorKind::LPlus, 0.0).unwrap();
        let lminus = assemble_scalar_operator(g, &w.phi1, OperatorKind::LMinus, 0.0).unwrap();
        let n = g.n;
        for i in 0..n {
            for j in 0..n {
                assert_eq!(lh.entries[(i, j)], lplus.entries[(i, j)]);
                assert_eq!(lh.entries[(n + i, n + j)], lminus.entries[(i, j)]);
                assert_eq!(lh.entries[(i, n + j)], 0.0);
            }
        }
    }

    #[test]
    fn index_counts_at_h_zero() {
        let w = base_wave(0.5, 128).unwrap();
        let g = &w.grid;
        let lplus = assemble_scalar_operator(g, &w.phi1, OperatorKind::LPlus, 0.0).unwrap();
        let lminus = assemble_scalar_operator(g, &w.phi1, OperatorKind::LMinus, 0.0).unwrap();
        let (np, ne, no) = index_counts(&lplus, g).unwrap();
        assert_eq!((np, ne, no), (1, 1, 0));
        let (nm, _, _) = index_counts(&lminus, g).unwrap();
        assert_eq!(nm, 0);
        // Block operator at h = 0 has n(L_h) = n(L_+) + n(L_-) = 1.
        let (lh, _) = assemble_full_linearization(g, &w).unwrap();
        let (nt, nev, nod) = index_counts(&lh, g).unwrap();
        assert_eq!(nt, 1);
        assert_eq!(nt, nev + nod);
    }

    #[test]
    fn h_zero_spectrum_structure() {
        // Four eigenvalues within 1e-6 of zero (two kernel directions with
        // generalized vectors), everything else purely imaginary.
        let w = base_wave(0.5, 64).unwrap();
        let g = w.grid.clone();
        let (lh, jlh) = assemble_full_linearization(&g, &w).unwrap();
        let report = full_spectrum(&jlh, &lh, &g, 0.0, 2).unwrap();
        let near_zero = report
            .eigenvalues_mu
            .iter()
            .filter(|z| z.norm() < 1e-6)
            .count();
        assert_eq!(near_zero, 4, "zero cluster size");
        for z in &report.eigenvalues_mu {
            if z.norm() >= 1e-6 {
                assert!(z.re.abs() < 1e-7, "non-imaginary eigenvalue {z}");
            }
        }
        assert!(report.pairing_defect < 1e-6);
        assert_eq!(report.n_lh, 1);
    }

    #[test]
    fn krein_rejects_the_zero_cluster() {
        let w = base_wave(0.5, 64).unwrap();
        let g = w.grid.clone();
        let (lh, jlh) = assemble_full_linearization(&g, &w).unwrap();
        let mus = linalg::eigenvalues(&jlh.entries).unwrap();
        // Find a member of the zero cluster and ask for its signature.
        let mu0 = *mus.iter().min_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        let err = krein_signature(&jlh, &lh, &g, mu0, &mus).unwrap_err();
        assert!(matches!(err, KerrError::Multiplicity { .. }), "{err}");
    }

    #[test]
    fn high_wavenumber_pair_has_positive_signature() {
        let w = base_wave(0.5, 64).unwrap();
        let g = w.grid.clone();
        let (lh, jlh) = assemble_full_linearization(&g, &w).unwrap();
        let mus = linalg::eigenvalues(&jlh.entries).unwrap();
        // Imaginary eigenvalue nearest the j = n/4 free-operator frequency.
        let k = g.wavenumbers[g.n / 4];
        let target = Complex64::new(0.0, k * k + 1.0);
        let mu = *mus
            .iter()
            .filter(|z| z.im > 1.0)
            .min_by(|a, b| (**a - target).norm().total_cmp(&(**b - target).norm()))
            .unwrap();
        let sign = krein_signature(&jlh, &lh, &g, mu, &mus).unwrap();
        assert_eq!(sign, 1);
    }

    #[test]
    fn translational_eigenvector_of_jlh() {
        // J L_h (phi1', phi2') = alpha (phi1', phi2') for the continued wave.
        let grid = base_wave(0.5, 128).unwrap().grid;
        let profiles =
            crate::profile::continue_branch(&grid, 0.5, 0.7, -1, &[1e-3]).unwrap();
        let p = &profiles[0];
        let (d1, d2) = p.derivative();
        let (_, jlh) = assemble_full_linearization(&grid, p).unwrap();
        let mut v = Vec::with_capacity(2 * grid.n);
        v.extend_from_slice(&d1);
        v.extend_from_slice(&d2);
        let jv = jlh.apply(&v);
        let scale = v.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        let mut worst = 0.0_f64;
        for i in 0..v.len() {
            worst = worst.max((jv[i] - p.alpha * v[i]).abs());
        }
        assert!(worst / scale < 1e-6, "residual {:.3e}", worst / scale);
    }
}
