//! Periodic Fourier collocation grid, spectral differentiation matrices, and
//! assembly of the linearized operators about a wave.
//!
//! Everything is dense: at desk scale (n <= 1024) the eigenproblems and
//! constrained solves dominate, and a dense symmetric eigendecomposition is
//! the simplest correct tool.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{KerrError, Result};
use crate::linalg;
use crate::profile::WaveProfile;

/// Uniform periodic collocation grid on [-T, T).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGrid {
    pub n: usize,
    pub half_period: f64,
    pub nodes: Vec<f64>,
    /// Wavenumbers k_j = pi j / T in FFT layout: j = 0, 1, ..., n/2, -(n/2-1), ..., -1.
    pub wavenumbers: Vec<f64>,
}

impl PeriodicGrid {
    pub fn new(n: usize, half_period: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(KerrError::InvalidArgument(format!(
                "grid size must be even and >= 4, got {n}"
            )));
        }
        if !(half_period > 0.0) {
            return Err(KerrError::InvalidArgument(format!(
                "half period must be positive, got {half_period}"
            )));
        }
        let t = half_period;
        let nodes = (0..n)
            .map(|j| -t + 2.0 * t * j as f64 / n as f64)
            .collect();
        let scale = std::f64::consts::PI / t;
        let wavenumbers = (0..n)
            .map(|j| {
                let idx = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
                scale * idx as f64
            })
            .collect();
        Ok(Self {
            n,
            half_period: t,
            nodes,
            wavenumbers,
        })
    }

    /// Quadrature weight of the trapezoid rule on the periodic grid
    /// (spectrally accurate for smooth periodic integrands).
    pub fn quad_weight(&self) -> f64 {
        2.0 * self.half_period / self.n as f64
    }

    /// L2 inner product by trapezoid quadrature.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), self.n);
        debug_assert_eq!(b.len(), self.n);
        self.quad_weight() * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn norm_sq(&self, a: &[f64]) -> f64 {
        self.inner(a, a)
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.norm_sq(a).sqrt()
    }

    /// Spectral second-derivative matrix (symmetric, negative semidefinite,
    /// annihilates constants). Closed collocation form for even n.
    pub fn second_derivative_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let scale = (std::f64::consts::PI / self.half_period).powi(2);
        let diag = -(n as f64 * n as f64 / 12.0 + 1.0 / 6.0);
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                scale * diag
            } else {
                let d = i as i64 - j as i64;
                let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
                let s = (d as f64 * std::f64::consts::PI / n as f64).sin();
                scale * (-sign / (2.0 * s * s))
            }
        })
    }

    /// Spectral first-derivative matrix (antisymmetric).
    pub fn first_derivative_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let scale = std::f64::consts::PI / self.half_period;
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                let d = i as i64 - j as i64;
                let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
                let t = (d as f64 * std::f64::consts::PI / n as f64).tan();
                scale * sign * 0.5 / t
            }
        })
    }

    /// Spectral derivative of grid samples.
    pub fn spectral_derivative(&self, f: &[f64]) -> Vec<f64> {
        let d1 = self.first_derivative_matrix();
        let v = DVector::from_column_slice(f);
        (d1 * v).iter().copied().collect()
    }

    /// Index of the reflection x -> -x on the grid.
    pub fn reflect(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Largest normalized Fourier coefficient in the upper half of the
    /// resolved band (|index| >= n/4); a proxy for unresolved content.
    pub fn fourier_tail(&self, f: &[f64]) -> f64 {
        let n = self.n;
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let lo = n / 4;
        let hi = n - n / 4;
        (lo..=hi)
            .map(|j| buf[j].norm() / n as f64)
            .fold(0.0, f64::max)
    }

    /// Even part (u(x) + u(-x))/2 of grid samples.
    pub fn even_part(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| 0.5 * (f[j] + f[self.reflect(j)]))
            .collect()
    }

    /// Max norm of the odd part of grid samples.
    pub fn max_odd_part(&self, f: &[f64]) -> f64 {
        (0..self.n)
            .map(|j| 0.5 * (f[j] - f[self.reflect(j)]).abs())
            .fold(0.0, f64::max)
    }

    /// Orthonormal basis of the even subspace (n x (n/2 + 1)).
    pub fn even_basis(&self) -> DMatrix<f64> {
        let n = self.n;
        let ne = n / 2 + 1;
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut b = DMatrix::zeros(n, ne);
        b[(0, 0)] = 1.0;
        b[(n / 2, n / 2)] = 1.0;
        for i in 1..n / 2 {
            b[(i, i)] = inv_sqrt2;
            b[(n - i, i)] = inv_sqrt2;
        }
        b
    }

    /// Orthonormal basis of the odd subspace (n x (n/2 - 1)).
    pub fn odd_basis(&self) -> DMatrix<f64> {
        let n = self.n;
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut b = DMatrix::zeros(n, n / 2 - 1);
        for i in 1..n / 2 {
            b[(i, i - 1)] = inv_sqrt2;
            b[(n - i, i - 1)] = -inv_sqrt2;
        }
        b
    }
}

/// Which operator a dense matrix realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// L_{+,h} = -d_xx + 1 - 6 phi^2 (input samples: phi).
    LPlus,
    /// L_{-,h} = -d_xx + 1 - 2 phi^2 (input samples: phi).
    LMinus,
    /// Ltilde = -d_xx + 1 - 2 |phi|^2 (input samples: phi1^2 + phi2^2).
    LTilde,
    /// 2n x 2n symmetric block linearization about a complex wave.
    LhBlock,
    /// Rotated block operator S^T L_h S.
    MhBlock,
    /// J L_h with J = [[0, I], [-I, 0]].
    JLh,
}

/// Dense realization of a differential operator on the periodic grid, with
/// the (h, alpha) provenance of the wave it was linearized about.
#[derive(Debug, Clone)]
pub struct LinearOperatorMatrix {
    pub entries: DMatrix<f64>,
    pub kind: OperatorKind,
    pub h: f64,
    pub alpha: f64,
}

impl LinearOperatorMatrix {
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(v);
        (&self.entries * x).iter().copied().collect()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let m = &self.entries;
        let mut worst = 0.0_f64;
        for i in 0..m.nrows() {
            for j in (i + 1)..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        worst
    }
}

/// Scalar operator -d_xx + 1 - V on the grid. The potential V is derived
/// from `samples` according to `kind` (see [`OperatorKind`]).
pub fn assemble_scalar_operator(
    grid: &PeriodicGrid,
    samples: &[f64],
    kind: OperatorKind,
    h: f64,
) -> Result<LinearOperatorMatrix> {
    if samples.len() != grid.n {
        return Err(KerrError::GridMismatch(format!(
            "potential has {} samples, grid has {}",
            samples.len(),
            grid.n
        )));
    }
    let potential: Vec<f64> = match kind {
        OperatorKind::LPlus => samples.iter().map(|&p| 6.0 * p * p).collect(),
        OperatorKind::LMinus => samples.iter().map(|&p| 2.0 * p * p).collect(),
        OperatorKind::LTilde => samples.iter().map(|&m2| 2.0 * m2).collect(),
        other => {
            return Err(KerrError::InvalidArgument(format!(
                "assemble_scalar_operator cannot build {other:?}"
            )))
        }
    };
    let mut m = -grid.second_derivative_matrix();
    for i in 0..grid.n {
        m[(i, i)] += 1.0 - potential[i];
    }
    Ok(LinearOperatorMatrix {
        entries: m,
        kind,
        h,
        alpha: 0.0,
    })
}

/// Full 2n x 2n linearization about a (phi1, phi2) profile: the symmetric
/// block operator L_h and its Hamiltonian companion J L_h. Stability
/// eigenvalues are recovered from spec(J L_h) as lambda = mu - alpha.
pub fn assemble_full_linearization(
    grid: &PeriodicGrid,
    profile: &WaveProfile,
) -> Result<(LinearOperatorMatrix, LinearOperatorMatrix)> {
    if profile.grid.n != grid.n || (profile.grid.half_period - grid.half_period).abs() > 1e-12 {
        return Err(KerrError::GridMismatch(
            "profile grid does not match target grid".into(),
        ));
    }
    let n = grid.n;
    let d2 = grid.second_derivative_matrix();
    let mut lh = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            lh[(i, j)] = -d2[(i, j)];
            lh[(n + i, n + j)] = -d2[(i, j)];
        }
        let p1 = profile.phi1[i];
        let p2 = profile.phi2[i];
        lh[(i, i)] += 1.0 - (6.0 * p1 * p1 + 2.0 * p2 * p2);
        lh[(n + i, n + i)] += 1.0 - (2.0 * p1 * p1 + 6.0 * p2 * p2);
        lh[(i, n + i)] = -4.0 * p1 * p2;
        lh[(n + i, i)] = -4.0 * p1 * p2;
    }
    // J L_h with J = [[0, I], [-I, 0]] applied blockwise.
    let mut jlh = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..2 * n {
            jlh[(i, j)] = lh[(n + i, j)];
            jlh[(n + i, j)] = -lh[(i, j)];
        }
    }
    let lh = LinearOperatorMatrix {
        entries: lh,
        kind: OperatorKind::LhBlock,
        h: profile.h,
        alpha: profile.alpha,
    };
    let jlh = LinearOperatorMatrix {
        entries: jlh,
        kind: OperatorKind::JLh,
        h: profile.h,
        alpha: profile.alpha,
    };
    Ok((lh, jlh))
}

/// Conjugate a 2n x 2n block operator by the pointwise rotation
/// S = [[a0 I, -b0 I], [b0 I, a0 I]], giving the M_h form in which the h -> 0
/// limit is block-diagonal (L_+, L_-).
pub fn conjugate_by_rotation(
    op: &LinearOperatorMatrix,
    a0: f64,
    b0: f64,
) -> Result<LinearOperatorMatrix> {
    let two_n = op.entries.nrows();
    if two_n % 2 != 0 {
        return Err(KerrError::InvalidArgument(
            "rotation conjugation needs a block operator".into(),
        ));
    }
    let n = two_n / 2;
    let mut s = DMatrix::zeros(two_n, two_n);
    for i in 0..n {
        s[(i, i)] = a0;
        s[(i, n + i)] = -b0;
        s[(n + i, i)] = b0;
        s[(n + i, n + i)] = a0;
    }
    let m = s.transpose() * &op.entries * &s;
    Ok(LinearOperatorMatrix {
        entries: m,
        kind: OperatorKind::MhBlock,
        h: op.h,
        alpha: op.alpha,
    })
}

/// Constrained inverse of a self-adjoint operator on the orthogonal
/// complement of its kernel.
///
/// The eigendecomposition is computed once; `solve` can then be called for
/// many right-hand sides.
pub struct ComplementSolver {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    kernel_cut: f64,
    op: DMatrix<f64>,
    quad_weight: f64,
}

impl ComplementSolver {
    pub fn new(op: &LinearOperatorMatrix, grid: &PeriodicGrid) -> Result<Self> {
        let asym = op.max_asymmetry();
        let scale = op.entries.amax().max(1.0);
        if asym > 1e-10 * scale {
            return Err(KerrError::ContractViolation(format!(
                "operator not symmetric: max asymmetry {asym:.3e} at scale {scale:.3e}"
            )));
        }
        let (eigenvalues, eigenvectors) = linalg::symmetric_eigen_sorted(&op.entries);
        let op_norm = eigenvalues
            .iter()
            .fold(0.0_f64, |acc, &v| acc.max(v.abs()));
        Ok(Self {
            eigenvalues,
            eigenvectors,
            // Numerical kernel threshold. The spectral norm of the discrete
            // operator is dominated by the k_max^2 tail, so a purely
            // relative cut (1e-6 ||L||) would swallow genuine O(1e-2)
            // eigenvalues of L_+ at n = 256; the kernel eigenvalues sit at
            // roundoff (~1e-11) and stay far below this mixed threshold.
            kernel_cut: (1e-10 * op_norm).max(1e-6),
            op: op.entries.clone(),
            quad_weight: grid.quad_weight(),
        })
    }

    /// Solve L x = rhs for the unique solution orthogonal to `kernel_vecs`.
    ///
    /// rhs must be orthogonal to each kernel vector (checked, tolerance
    /// 1e-8 ||rhs||); the solve projects rhs and the solution rather than
    /// deflating the matrix.
    pub fn solve(&self, rhs: &[f64], kernel_vecs: &[&[f64]]) -> Result<Vec<f64>> {
        let n = self.eigenvalues.len();
        if rhs.len() != n {
            return Err(KerrError::GridMismatch(format!(
                "rhs has {} entries, operator is {n} x {n}",
                rhs.len()
            )));
        }
        let w = self.quad_weight;
        let rhs_norm = (w * rhs.iter().map(|x| x * x).sum::<f64>()).sqrt();
        for (idx, kv) in kernel_vecs.iter().enumerate() {
            let kv_norm = (w * kv.iter().map(|x| x * x).sum::<f64>()).sqrt();
            if kv_norm == 0.0 {
                continue;
            }
            let component =
                w * rhs.iter().zip(kv.iter()).map(|(a, b)| a * b).sum::<f64>() / kv_norm;
            if component.abs() > 1e-8 * rhs_norm.max(1e-300) {
                return Err(KerrError::Solvability {
                    index: idx,
                    component,
                });
            }
        }

        let b = DVector::from_column_slice(rhs);
        let mut x = DVector::zeros(n);
        for k in 0..n {
            if self.eigenvalues[k].abs() <= self.kernel_cut {
                continue;
            }
            let q = self.eigenvectors.column(k);
            let coef = q.dot(&b) / self.eigenvalues[k];
            x += q * coef;
        }
        // Remove residual components along the supplied kernel vectors (they
        // differ from the numerical kernel eigenvectors by O(solver noise)).
        for kv in kernel_vecs {
            let kvv = DVector::from_column_slice(kv);
            let nsq = kvv.dot(&kvv);
            if nsq > 0.0 {
                let c = x.dot(&kvv) / nsq;
                x -= kvv * c;
            }
        }
        // Residual against the kernel-projected rhs.
        let mut b_proj = b.clone();
        for k in 0..n {
            if self.eigenvalues[k].abs() <= self.kernel_cut {
                let q = self.eigenvectors.column(k);
                let c = q.dot(&b_proj);
                b_proj -= q * c;
            }
        }
        let residual = (w.sqrt()) * (&self.op * &x - &b_proj).norm();
        let limit = 1e-8 * rhs_norm.max(1e-300);
        if residual > limit {
            return Err(KerrError::SolveResidual { residual, limit });
        }
        Ok(x.iter().copied().collect())
    }
}

/// One-shot constrained solve; see [`ComplementSolver`].
pub fn solve_on_complement(
    op: &LinearOperatorMatrix,
    grid: &PeriodicGrid,
    rhs: &[f64],
    kernel_vecs: &[&[f64]],
) -> Result<Vec<f64>> {
    ComplementSolver::new(op, grid)?.solve(rhs, kernel_vecs)
}
