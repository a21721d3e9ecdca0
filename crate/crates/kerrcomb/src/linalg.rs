//! Thin wrappers around the dense decompositions used across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{KerrError, Result};

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn symmetric_eigen_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// All eigenvalues of a real (generally nonsymmetric) matrix via the real
/// Schur form.
///
/// Spectra symmetric about both axes (the Hamiltonian quadruples, or
/// biquadratic companion matrices) can make the Francis iteration cycle; a
/// retry under a fixed orthogonal similarity breaks the symmetry the shifts
/// keep reproducing.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if let Some(schur) = nalgebra::linalg::Schur::try_new(m.clone(), 1e-14, 100_000) {
        let ev = schur.complex_eigenvalues();
        return Ok(ev.iter().map(|z| Complex64::new(z.re, z.im)).collect());
    }
    let n = m.nrows();
    let q = deterministic_orthogonal(n);
    let rotated = q.transpose() * m * &q;
    let schur = nalgebra::linalg::Schur::try_new(rotated, 1e-14, 100_000).ok_or_else(|| {
        KerrError::EigenFailure(format!(
            "Schur iteration did not converge (n = {}, max entry {:.3e})",
            n,
            m.amax()
        ))
    })?;
    let ev = schur.complex_eigenvalues();
    Ok(ev.iter().map(|z| Complex64::new(z.re, z.im)).collect())
}

/// Fixed full orthogonal matrix (QR of a deterministic dense matrix).
fn deterministic_orthogonal(n: usize) -> DMatrix<f64> {
    let seedy = DMatrix::from_fn(n, n, |i, j| (1.0 + (i * n + j) as f64 * 0.7391).sin());
    seedy.qr().q()
}

/// Eigenvector of `m` for the eigenvalue nearest `shift`, by shifted inverse
/// iteration with a complex LU factorization.
///
/// Returns the (unit l2 norm) eigenvector together with the relative residual
/// ||m v - mu v|| / ||m||_inf where mu is the Rayleigh quotient.
pub fn inverse_iteration(
    m: &DMatrix<f64>,
    shift: Complex64,
    iters: usize,
) -> Result<(DVector<Complex64>, Complex64, f64)> {
    inverse_iteration_deflated(m, shift, iters, &[])
}

/// Inverse iteration kept orthogonal to the supplied vectors, for digging
/// out further eigenvectors of a clustered eigenvalue.
pub fn inverse_iteration_deflated(
    m: &DMatrix<f64>,
    shift: Complex64,
    iters: usize,
    against: &[&DVector<Complex64>],
) -> Result<(DVector<Complex64>, Complex64, f64)> {
    let n = m.nrows();
    let mc: DMatrix<Complex64> = m.map(|x| Complex64::new(x, 0.0));
    let mut shifted = mc.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let lu = shifted.lu();

    // Deterministic, unstructured start vector (offset by the deflation
    // count so successive calls start independently).
    let off = 0.91 * against.len() as f64;
    let mut v = DVector::from_fn(n, |i, _| {
        Complex64::new(
            (0.37 + off + 0.61 * i as f64).sin(),
            (1.17 - off + 0.23 * i as f64).cos(),
        )
    });
    let orthogonalize = |v: &mut DVector<Complex64>| {
        for u in against {
            let c = u.dotc(v);
            *v -= *u * c;
        }
    };
    orthogonalize(&mut v);
    v /= Complex64::from(v.norm());
    for _ in 0..iters.max(1) {
        let Some(mut w) = lu.solve(&v) else {
            return Err(KerrError::EigenFailure(
                "singular shift in inverse iteration".into(),
            ));
        };
        orthogonalize(&mut w);
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(KerrError::EigenFailure(
                "inverse iteration produced a non-finite vector".into(),
            ));
        }
        v = w / Complex64::new(norm, 0.0);
    }
    let mv = &mc * &v;
    let mu = v.dotc(&mv); // Rayleigh quotient, v has unit norm
    let residual = (&mv - &v * mu).norm();
    let scale = m.amax().max(1.0);
    Ok((v, mu, residual / scale))
}

/// Estimate of the smallest singular value of `m` by power iteration on
/// (m^T m)^{-1}. Good to a few percent, which is all the continuation
/// heuristic needs.
pub fn smallest_singular_value_estimate(m: &DMatrix<f64>) -> f64 {
    let lu = m.clone().lu();
    let lut = m.transpose().lu();
    let n = m.nrows();
    let mut v = DVector::from_fn(n, |i, _| (0.73 + 1.31 * i as f64).sin());
    v /= v.norm();
    let mut growth = 0.0;
    for _ in 0..8 {
        let Some(w) = lut.solve(&v) else { return 0.0 };
        let Some(w2) = lu.solve(&w) else { return 0.0 };
        growth = w2.norm();
        if !growth.is_finite() {
            return 0.0;
        }
        v = w2 / growth;
    }
    if growth > 0.0 {
        growth.powf(-0.5)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_eigen() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 0.0, 0.0, 0.0, -1.0]);
        let (vals, vecs) = symmetric_eigen_sorted(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..3 {
            let v = vecs.column(k);
            let r = &m * v - v * vals[k];
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn schur_eigenvalues_of_rotation() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn inverse_iteration_finds_eigenvector() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 0.0, 2.0, 0.5, 0.0, 0.0, -1.0]);
        let (_, mu, res) = inverse_iteration(&m, Complex64::new(3.999, 0.0), 5).unwrap();
        assert!((mu.re - 4.0).abs() < 1e-10);
        assert!(res < 1e-10);
    }

    #[test]
    fn sigma_min_estimate() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 0.02]);
        let s = smallest_singular_value_estimate(&m);
        assert!((s - 0.02).abs() < 2e-3, "estimate {s}");
    }
}
