//! Steady states of the damped-driven profile system and their Newton
//! continuation in the pump strength h at fixed alpha0 = alpha/h.
//!
//! Newton runs in the even subspace only: the waves are even by
//! construction, the translational kernel phi' is odd and thereby excluded,
//! and the even-restricted Jacobian is invertible without a phase condition.

use nalgebra::{DMatrix, DVector};

use crate::cnoidal::BaseWaveParams;
use crate::error::{KerrError, Result};
use crate::grid::{self, OperatorKind, PeriodicGrid};
use crate::linalg;
use crate::perturbation::ExpansionReport;

/// Which solution family a profile belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The exact h = 0 cnoidal wave.
    Base,
    /// O(1) branch with sigma0 < 0.
    Stable,
    /// O(1) branch with sigma0 > 0.
    Unstable,
    /// The O(h) branch of small solutions.
    Small,
}

/// Grid samples of a (possibly complex) steady state phi1 + i phi2 with its
/// parameters.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub grid: PeriodicGrid,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub h: f64,
    pub alpha: f64,
    pub branch: Branch,
    /// Modulus of the underlying base wave, when the profile descends from
    /// one (None for the small branch).
    pub kappa: Option<f64>,
    /// Set when the constructor saw non-negligible Fourier content in the
    /// upper half of the resolved band.
    pub resolution_warning: bool,
}

impl WaveProfile {
    /// Pointwise residual of the stationary system at (h, alpha).
    pub fn residual(&self) -> (Vec<f64>, Vec<f64>) {
        let d2 = self.grid.second_derivative_matrix();
        let p1 = DVector::from_column_slice(&self.phi1);
        let p2 = DVector::from_column_slice(&self.phi2);
        let d2p1 = &d2 * &p1;
        let d2p2 = &d2 * &p2;
        let n = self.grid.n;
        let mut r1 = vec![0.0; n];
        let mut r2 = vec![0.0; n];
        for i in 0..n {
            let m2 = self.phi1[i] * self.phi1[i] + self.phi2[i] * self.phi2[i];
            r1[i] = d2p1[i] - self.phi1[i] + 2.0 * m2 * self.phi1[i] - self.alpha * self.phi2[i]
                + self.h;
            r2[i] = d2p2[i] - self.phi2[i] + 2.0 * m2 * self.phi2[i] + self.alpha * self.phi1[i];
        }
        (r1, r2)
    }

    pub fn residual_inf(&self) -> f64 {
        let (r1, r2) = self.residual();
        r1.iter()
            .chain(r2.iter())
            .fold(0.0_f64, |acc, &v| acc.max(v.abs()))
    }

    /// Samples of phi1^2 + phi2^2.
    pub fn modulus_sq(&self) -> Vec<f64> {
        self.phi1
            .iter()
            .zip(&self.phi2)
            .map(|(a, b)| a * a + b * b)
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.modulus_sq()
            .iter()
            .fold(0.0_f64, |acc, &v| acc.max(v))
            .sqrt()
    }

    pub fn max_odd_part(&self) -> f64 {
        self.grid
            .max_odd_part(&self.phi1)
            .max(self.grid.max_odd_part(&self.phi2))
    }

    /// Spectral x-derivatives (phi1', phi2').
    pub fn derivative(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.grid.spectral_derivative(&self.phi1),
            self.grid.spectral_derivative(&self.phi2),
        )
    }
}

/// Per-solve diagnostics of the even-subspace Newton iteration.
#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub steps: usize,
    /// Max-norm residual before each step, plus the final one.
    pub residuals: Vec<f64>,
    /// Estimated smallest singular value of the final even-subspace Jacobian.
    pub jacobian_sigma_min: f64,
}

/// Upper admissibility bound <1, phi0>/||phi0||^2 = pi / (2 amp E(kappa)) for
/// the O(1) branch at modulus kappa.
pub fn admissibility_bound(kappa: f64) -> Result<f64> {
    let params = BaseWaveParams::new(kappa)?;
    Ok(std::f64::consts::PI / (2.0 * params.amp * params.modulus.e_complete))
}

const NEWTON_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 25;

/// Even-subspace Newton iteration on the representative values
/// v_k = phi(x_k), k = 0..n/2.
fn newton_even(
    grid: &PeriodicGrid,
    phi1_init: &[f64],
    phi2_init: &[f64],
    h: f64,
    alpha: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, Vec<f64>, NewtonReport)> {
    let n = grid.n;
    let ne = n / 2 + 1;
    let d2 = grid.second_derivative_matrix();
    // Restriction of D2 to even functions in the representative-value
    // parametrization: column l and its mirror n-l act on the same unknown.
    let mut d2e = DMatrix::zeros(ne, ne);
    for k in 0..ne {
        for l in 0..ne {
            let mut v = d2[(k, l)];
            if l != 0 && l != n / 2 {
                v += d2[(k, n - l)];
            }
            d2e[(k, l)] = v;
        }
    }

    let mut v1 = DVector::from_fn(ne, |k, _| phi1_init[k]);
    let mut v2 = DVector::from_fn(ne, |k, _| phi2_init[k]);

    let eval_residual = |v1: &DVector<f64>, v2: &DVector<f64>| -> (DVector<f64>, f64) {
        let d2v1 = &d2e * v1;
        let d2v2 = &d2e * v2;
        let mut f = DVector::zeros(2 * ne);
        let mut inf = 0.0_f64;
        for k in 0..ne {
            let m2 = v1[k] * v1[k] + v2[k] * v2[k];
            let f1 = d2v1[k] - v1[k] + 2.0 * m2 * v1[k] - alpha * v2[k] + h;
            let f2 = d2v2[k] - v2[k] + 2.0 * m2 * v2[k] + alpha * v1[k];
            f[k] = f1;
            f[ne + k] = f2;
            inf = inf.max(f1.abs()).max(f2.abs());
        }
        (f, inf)
    };

    let build_jacobian = |v1: &DVector<f64>, v2: &DVector<f64>| -> DMatrix<f64> {
        let mut j = DMatrix::zeros(2 * ne, 2 * ne);
        for k in 0..ne {
            for l in 0..ne {
                j[(k, l)] = d2e[(k, l)];
                j[(ne + k, ne + l)] = d2e[(k, l)];
            }
            let a = v1[k];
            let b = v2[k];
            j[(k, k)] += -1.0 + 6.0 * a * a + 2.0 * b * b;
            j[(ne + k, ne + k)] += -1.0 + 2.0 * a * a + 6.0 * b * b;
            j[(k, ne + k)] = 4.0 * a * b - alpha;
            j[(ne + k, k)] = 4.0 * a * b + alpha;
        }
        j
    };

    let mut residuals = Vec::new();
    let mut steps = 0;
    let mut converged = false;
    for _ in 0..max_iter {
        let (f, inf) = eval_residual(&v1, &v2);
        residuals.push(inf);
        if inf < NEWTON_TOL {
            converged = true;
            break;
        }
        let j = build_jacobian(&v1, &v2);
        let lu = j.lu();
        let Some(delta) = lu.solve(&(-f)) else {
            return Err(KerrError::NonConvergence {
                iterations: steps,
                residual: inf,
            });
        };
        for k in 0..ne {
            v1[k] += delta[k];
            v2[k] += delta[ne + k];
        }
        steps += 1;
    }
    if !converged {
        let (_, inf) = eval_residual(&v1, &v2);
        residuals.push(inf);
        if inf >= NEWTON_TOL {
            return Err(KerrError::NonConvergence {
                iterations: steps,
                residual: inf,
            });
        }
    }

    let j_final = build_jacobian(&v1, &v2);
    let sigma_min = linalg::smallest_singular_value_estimate(&j_final);

    // Reconstruct full-grid samples; mirror symmetry is exact by construction.
    let expand = |v: &DVector<f64>| -> Vec<f64> {
        (0..n).map(|j| v[j.min(n - j)]).collect()
    };
    Ok((
        expand(&v1),
        expand(&v2),
        NewtonReport {
            steps,
            residuals,
            jacobian_sigma_min: sigma_min,
        },
    ))
}

/// Solve the stationary system at (h, alpha = alpha0 h) starting from
/// `initial`, staying in the even subspace.
pub fn newton_solve(
    grid: &PeriodicGrid,
    initial: &WaveProfile,
    h: f64,
    alpha0: f64,
) -> Result<(WaveProfile, NewtonReport)> {
    if alpha0 < 0.0 || h < 0.0 {
        return Err(KerrError::InvalidArgument(format!(
            "h and alpha0 must be nonnegative, got h = {h}, alpha0 = {alpha0}"
        )));
    }
    if let Some(kappa) = initial.kappa {
        if alpha0 > 0.0 {
            let bound = admissibility_bound(kappa)?;
            if alpha0 >= bound {
                return Err(KerrError::Admissibility { alpha0, bound });
            }
        }
    }
    if initial.grid.n != grid.n {
        return Err(KerrError::GridMismatch(
            "initial profile grid does not match".into(),
        ));
    }
    let phi1 = grid.even_part(&initial.phi1);
    let phi2 = grid.even_part(&initial.phi2);
    let alpha = alpha0 * h;
    let (phi1, phi2, report) = newton_even(grid, &phi1, &phi2, h, alpha, NEWTON_MAX_ITER)?;
    Ok((
        WaveProfile {
            grid: grid.clone(),
            phi1,
            phi2,
            h,
            alpha,
            branch: initial.branch,
            kappa: initial.kappa,
            resolution_warning: initial.resolution_warning,
        },
        report,
    ))
}

/// First-order Theorem-type seed profile at pump h from an expansion report.
pub fn expansion_seed(grid: &PeriodicGrid, report: &ExpansionReport, h: f64) -> WaveProfile {
    let n = grid.n;
    let mut phi1 = vec![0.0; n];
    let mut phi2 = vec![0.0; n];
    let c1 = report.a0 + 0.5 * h * report.b0 * report.d2_0;
    let c2 = report.b0 - 0.5 * h * report.a0 * report.d2_0;
    for i in 0..n {
        phi1[i] = c1 * report.phi0[i] + h * report.psi1_0[i];
        phi2[i] = c2 * report.phi0[i] + h * report.psi2_0[i];
    }
    WaveProfile {
        grid: grid.clone(),
        phi1,
        phi2,
        h,
        alpha: report.alpha0 * h,
        branch: if report.sigma0 < 0.0 {
            Branch::Stable
        } else {
            Branch::Unstable
        },
        kappa: Some(report.kappa),
        resolution_warning: false,
    }
}

/// Continue the O(1) branch selected by `branch_sign` through the increasing
/// pump values `h_targets`, seeding each solve from the previous profile
/// (the first from the first-order expansion).
pub fn continue_branch(
    grid: &PeriodicGrid,
    kappa: f64,
    alpha0: f64,
    branch_sign: i32,
    h_targets: &[f64],
) -> Result<Vec<WaveProfile>> {
    if branch_sign != 1 && branch_sign != -1 {
        return Err(KerrError::InvalidArgument(format!(
            "branch sign must be +1 or -1, got {branch_sign}"
        )));
    }
    if h_targets.is_empty() {
        return Ok(Vec::new());
    }
    if h_targets.windows(2).any(|w| w[1] <= w[0]) || h_targets[0] <= 0.0 {
        return Err(KerrError::InvalidArgument(
            "h targets must be positive and strictly increasing".into(),
        ));
    }
    let bound = admissibility_bound(kappa)?;
    if !(0.0 < alpha0 && alpha0 < bound) {
        return Err(KerrError::Admissibility { alpha0, bound });
    }
    let report = crate::perturbation::first_order_correction_on(grid, kappa, alpha0, branch_sign)?;

    let mut profiles: Vec<WaveProfile> = Vec::with_capacity(h_targets.len());
    let mut seed = expansion_seed(grid, &report, h_targets[0]);
    for &h in h_targets {
        seed.h = h;
        seed.alpha = alpha0 * h;
        match newton_solve(grid, &seed, h, alpha0) {
            Ok((profile, rep)) => {
                // Continuation ceiling heuristic: the neighborhood of the
                // expansion has been left when Newton labors or the
                // even-subspace Jacobian approaches singularity.
                if rep.steps > 8 || rep.jacobian_sigma_min < 1e-6 {
                    return Err(KerrError::ContinuationBreakdown {
                        at_h: h,
                        last_good: profiles
                            .last()
                            .map(|p| p.h.to_string())
                            .unwrap_or_else(|| "none".into()),
                        reason: format!(
                            "Newton steps {} / sigma_min {:.3e}",
                            rep.steps, rep.jacobian_sigma_min
                        ),
                    });
                }
                seed = profile.clone();
                profiles.push(profile);
            }
            Err(e) => {
                return Err(KerrError::ContinuationBreakdown {
                    at_h: h,
                    last_good: profiles
                        .last()
                        .map(|p| p.h.to_string())
                        .unwrap_or_else(|| "none".into()),
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok(profiles)
}

/// The real wave of the alpha = 0 problem at pump h, Newton-polished from
/// the first-order seed phi0 + h L_+^{-1}[1].
pub fn real_wave(grid: &PeriodicGrid, kappa: f64, h: f64) -> Result<WaveProfile> {
    let lemma = crate::perturbation::lemma_expansions(kappa, h, grid.n)?;
    let seed = WaveProfile {
        grid: grid.clone(),
        phi1: lemma.phi_h,
        phi2: vec![0.0; grid.n],
        h,
        alpha: 0.0,
        branch: if h == 0.0 { Branch::Base } else { Branch::Unstable },
        kappa: Some(kappa),
        resolution_warning: false,
    };
    let (profile, _) = newton_solve(grid, &seed, h, 0.0)?;
    Ok(profile)
}

/// The O(h) small-solution branch: phi1 ~ h, phi2 ~ alpha h (the inverse of
/// -d_xx + 1 acts as the identity on constants), Newton-polished.
pub fn small_branch(grid: &PeriodicGrid, h: f64, alpha: f64) -> Result<WaveProfile> {
    if h < 0.0 {
        return Err(KerrError::InvalidArgument(format!("h must be >= 0, got {h}")));
    }
    let n = grid.n;
    if h == 0.0 {
        return Ok(WaveProfile {
            grid: grid.clone(),
            phi1: vec![0.0; n],
            phi2: vec![0.0; n],
            h: 0.0,
            alpha,
            branch: Branch::Small,
            kappa: None,
            resolution_warning: false,
        });
    }
    let phi1 = vec![h; n];
    let phi2 = vec![alpha * h; n];
    let (phi1, phi2, _) = newton_even(grid, &phi1, &phi2, h, alpha, NEWTON_MAX_ITER)?;
    Ok(WaveProfile {
        grid: grid.clone(),
        phi1,
        phi2,
        h,
        alpha,
        branch: Branch::Small,
        kappa: None,
        resolution_warning: false,
    })
}

/// Newton at raw (h, alpha) from an arbitrary even seed; used for the
/// randomized nonexistence sweeps where alpha is not tied to h.
pub fn newton_from_seed(
    grid: &PeriodicGrid,
    phi1: &[f64],
    phi2: &[f64],
    h: f64,
    alpha: f64,
) -> Result<WaveProfile> {
    let p1 = grid.even_part(phi1);
    let p2 = grid.even_part(phi2);
    let (phi1, phi2, _) = newton_even(grid, &p1, &p2, h, alpha, NEWTON_MAX_ITER)?;
    Ok(WaveProfile {
        grid: grid.clone(),
        phi1,
        phi2,
        h,
        alpha,
        branch: Branch::Small,
        kappa: None,
        resolution_warning: false,
    })
}

/// The quantity ||Ltilde phi1||^2 + alpha^2 ||phi1||^2 whose vanishing forces
/// phi = 0 in the h = 0 nonexistence argument. Diagnostic only.
pub fn nonexistence_certificate(profile: &WaveProfile) -> Result<f64> {
    let ltilde = grid::assemble_scalar_operator(
        &profile.grid,
        &profile.modulus_sq(),
        OperatorKind::LTilde,
        profile.h,
    )?;
    let y = ltilde.apply(&profile.phi1);
    Ok(profile.grid.norm_sq(&y) + profile.alpha * profile.alpha * profile.grid.norm_sq(&profile.phi1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnoidal::base_wave;

    #[test]
    fn base_wave_is_fixed_point_at_h_zero() {
        let phi0 = base_wave(0.5, 128).unwrap();
        let (solved, report) = newton_solve(&phi0.grid.clone(), &phi0, 0.0, 0.0).unwrap();
        assert!(report.steps <= 1, "steps {}", report.steps);
        let diff: f64 = solved
            .phi1
            .iter()
            .zip(&phi0.phi1)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-9, "base wave moved by {diff}");
        assert!(solved.residual_inf() < 1e-10);
    }

    #[test]
    fn admissibility_rejection() {
        let phi0 = base_wave(0.5, 64).unwrap();
        let err = newton_solve(&phi0.grid.clone(), &phi0, 1e-3, 1.5).unwrap_err();
        match err {
            KerrError::Admissibility { bound, .. } => {
                assert!((bound - 1.4160284382736577).abs() < 1e-10)
            }
            other => panic!("expected admissibility error, got {other}"),
        }
    }

    #[test]
    fn stable_branch_solve_from_expansion_seed() {
        let grid = base_wave(0.5, 128).unwrap().grid;
        let report =
            crate::perturbation::first_order_correction_on(&grid, 0.5, 0.7, -1).unwrap();
        let h = 1e-3;
        let seed = expansion_seed(&grid, &report, h);
        let (profile, rep) = newton_solve(&grid, &seed, h, 0.7).unwrap();
        assert!(rep.steps <= 5, "took {} steps", rep.steps);
        assert!(profile.residual_inf() < 1e-10);
        assert!(profile.max_odd_part() < 1e-12);
        // Newton only polishes the O(h^2) remainder of the seed.
        let dist: f64 = profile
            .phi1
            .iter()
            .zip(&seed.phi1)
            .chain(profile.phi2.iter().zip(&seed.phi2))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(dist < 50.0 * h * h, "seed distance {dist}");
        // Quadratic convergence once inside the asymptotic regime: the
        // contraction constant is set by the O(1/sigma_min) Jacobian inverse.
        for w in rep.residuals.windows(2).skip(1) {
            assert!(w[1] < 500.0 * w[0] * w[0] + 1e-11, "{:?}", rep.residuals);
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let grid = base_wave(0.5, 128).unwrap().grid;
        let profiles = continue_branch(&grid, 0.5, 0.7, -1, &[5e-4, 1e-3]).unwrap();
        let p = &profiles[1];
        let flipped = WaveProfile {
            phi2: p.phi2.iter().map(|v| -v).collect(),
            alpha: -p.alpha,
            ..p.clone()
        };
        assert!(flipped.residual_inf() < 1e-10);
    }

    #[test]
    fn alpha_is_order_h_inequality() {
        // alpha ||phi||^2 <= h sqrt(2T) ||phi|| for any converged profile.
        let grid = base_wave(0.5, 128).unwrap().grid;
        let profiles = continue_branch(&grid, 0.5, 0.7, -1, &[1e-3]).unwrap();
        let p = &profiles[0];
        let norm = p.grid.norm_sq(&p.modulus_sq().iter().map(|v| v.sqrt()).collect::<Vec<_>>());
        let norm = norm.sqrt();
        let lhs = p.alpha * norm * norm;
        let rhs = p.h * (2.0 * p.grid.half_period).sqrt() * norm;
        assert!(lhs <= rhs + 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn empty_continuation_targets() {
        let grid = base_wave(0.5, 64).unwrap().grid;
        assert!(continue_branch(&grid, 0.5, 0.7, -1, &[]).unwrap().is_empty());
    }

    #[test]
    fn small_branch_examples() {
        let grid = base_wave(0.5, 128).unwrap().grid;
        let p = small_branch(&grid, 1e-3, 0.1).unwrap();
        let d1: f64 = p.phi1.iter().map(|v| (v - 1e-3).abs()).fold(0.0, f64::max);
        let d2: f64 = p
            .phi2
            .iter()
            .map(|v| (v - 0.1e-3).abs())
            .fold(0.0, f64::max);
        assert!(d1 < 1e-5, "phi1 off by {d1}");
        assert!(d2 < 1e-5, "phi2 off by {d2}");

        let z = small_branch(&grid, 0.0, 0.1).unwrap();
        assert!(z.max_abs() == 0.0);

        let p = small_branch(&grid, 1e-2, 1.0).unwrap();
        assert!(p.max_abs() < 2e-2);
        assert!(p.residual_inf() < 1e-10);
    }

    #[test]
    fn certificate_values() {
        let grid = base_wave(0.5, 128).unwrap().grid;
        let zero = WaveProfile {
            grid: grid.clone(),
            phi1: vec![0.0; grid.n],
            phi2: vec![0.0; grid.n],
            h: 0.0,
            alpha: 0.1,
            branch: Branch::Small,
            kappa: None,
            resolution_warning: false,
        };
        assert_eq!(nonexistence_certificate(&zero).unwrap(), 0.0);

        // phi0 is not a solution at alpha = 0.1: certificate strictly
        // positive and residual O(alpha).
        let mut phi0 = base_wave(0.5, 128).unwrap();
        phi0.alpha = 0.1;
        let cert = nonexistence_certificate(&phi0).unwrap();
        assert!(cert > 1e-4, "certificate {cert}");
        let res = phi0.residual_inf();
        assert!(res > 0.01 && res < 0.2, "residual {res}");
    }
}
