//! Closed-form expansion coefficients: the first-order wave expansion, the
//! eigenvalue slopes of both linearized operators, and the unstable-eigenvalue
//! coefficients. All inner products use trapezoid quadrature on the uniform
//! periodic grid, matching the collocation discretization.

use num_complex::Complex64;

use crate::cnoidal::BaseWaveParams;
use crate::error::{KerrError, Result};
use crate::grid::{assemble_scalar_operator, ComplementSolver, OperatorKind, PeriodicGrid};

/// Everything the expansions need about the base wave at one (grid, kappa).
pub(crate) struct BaseContext {
    pub grid: PeriodicGrid,
    pub phi0: Vec<f64>,
    pub dphi0: Vec<f64>,
    /// <1, phi0> (equals pi for every modulus).
    pub mass: f64,
    /// ||phi0||^2 = 2 amp E(kappa).
    pub norm_sq: f64,
    /// Admissibility bound <1,phi0>/||phi0||^2.
    pub bound: f64,
    lminus: ComplementSolver,
    /// L_+^{-1}[1].
    pub w1: Vec<f64>,
    /// L_+^{-1}[phi0].
    pub lplus_inv_phi0: Vec<f64>,
}

impl BaseContext {
    pub fn new(grid: &PeriodicGrid, kappa: f64) -> Result<Self> {
        let params = BaseWaveParams::new(kappa)?;
        if (grid.half_period - params.half_period).abs() > 1e-9 {
            return Err(KerrError::GridMismatch(format!(
                "grid half-period {} is not the fundamental half-period {} of kappa = {kappa}",
                grid.half_period, params.half_period
            )));
        }
        let phi0 = params.sample(grid);
        let dphi0 = params.sample_derivative(grid);
        let ones = vec![1.0; grid.n];
        let mass = grid.inner(&ones, &phi0);
        let norm_sq = grid.norm_sq(&phi0);
        let bound = mass / norm_sq;

        let lplus_op = assemble_scalar_operator(grid, &phi0, OperatorKind::LPlus, 0.0)?;
        let lminus_op = assemble_scalar_operator(grid, &phi0, OperatorKind::LMinus, 0.0)?;
        let lplus = ComplementSolver::new(&lplus_op, grid)?;
        let lminus = ComplementSolver::new(&lminus_op, grid)?;

        let w1 = lplus.solve(&ones, &[&dphi0])?;
        let lplus_inv_phi0 = lplus.solve(&phi0, &[&dphi0])?;
        Ok(Self {
            grid: grid.clone(),
            phi0,
            dphi0,
            mass,
            norm_sq,
            bound,
            lminus,
            w1,
            lplus_inv_phi0,
        })
    }

    pub fn from_kappa(kappa: f64, n_grid: usize) -> Result<Self> {
        let params = BaseWaveParams::new(kappa)?;
        let grid = PeriodicGrid::new(n_grid, params.half_period)?;
        Self::new(&grid, kappa)
    }

    /// L_-^{-1}[rhs] on the complement of span(phi0).
    pub fn lminus_inv(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.lminus.solve(rhs, &[&self.phi0])
    }

    fn check_admissible(&self, alpha0: f64, allow_zero: bool) -> Result<()> {
        let ok = if allow_zero {
            (0.0..self.bound).contains(&alpha0)
        } else {
            alpha0 > 0.0 && alpha0 < self.bound
        };
        if ok {
            Ok(())
        } else {
            Err(KerrError::Admissibility {
                alpha0,
                bound: self.bound,
            })
        }
    }

    fn leading(&self, alpha0: f64, branch_sign: i32) -> (f64, f64, f64, Complex64) {
        let sigma0 =
            branch_sign as f64 * (self.bound * self.bound - alpha0 * alpha0).max(0.0).sqrt();
        let a0 = sigma0 * self.norm_sq / self.mass;
        let b0 = alpha0 * self.norm_sq / self.mass;
        let c0 = Complex64::new(a0 - b0, a0 + b0);
        (a0, b0, sigma0, c0)
    }
}

/// Leading coefficients (a0, b0, sigma0, c0) of the O(1) branch.
#[derive(Debug, Clone, Copy)]
pub struct LeadingCoefficients {
    pub a0: f64,
    pub b0: f64,
    pub sigma0: f64,
    pub c0: Complex64,
}

pub fn leading_coefficients(
    kappa: f64,
    alpha0: f64,
    branch_sign: i32,
    n_grid: usize,
) -> Result<LeadingCoefficients> {
    check_branch_sign(branch_sign)?;
    let ctx = BaseContext::from_kappa(kappa, n_grid)?;
    ctx.check_admissible(alpha0, false)?;
    let (a0, b0, sigma0, c0) = ctx.leading(alpha0, branch_sign);
    Ok(LeadingCoefficients { a0, b0, sigma0, c0 })
}

fn check_branch_sign(branch_sign: i32) -> Result<()> {
    if branch_sign == 1 || branch_sign == -1 {
        Ok(())
    } else {
        Err(KerrError::InvalidArgument(format!(
            "branch sign must be +1 or -1, got {branch_sign}"
        )))
    }
}

/// All first-order expansion data at one (kappa, alpha0, branch).
#[derive(Debug, Clone)]
pub struct ExpansionReport {
    pub kappa: f64,
    pub alpha0: f64,
    pub branch_sign: i32,
    pub n_grid: usize,
    pub sigma0: f64,
    pub a0: f64,
    pub b0: f64,
    pub c0: Complex64,
    /// Zero by construction.
    pub d1_0: f64,
    pub d2_0: f64,
    pub psi0: Vec<Complex64>,
    pub psi1_0: Vec<f64>,
    pub psi2_0: Vec<f64>,
    /// Slope of the lowest eigenvalue of L_{-,h} in h (alpha = 0 problem).
    pub lambda_minus_slope: f64,
    /// Leading coefficient of the former modulational eigenvalue of J L_h:
    /// mu = mu0 sqrt(h); real for the unstable branch, imaginary for the
    /// stable one.
    pub mu0: Complex64,
    /// sqrt(h) coefficient of the single unstable eigenvalue at alpha = 0.
    pub lambda_h_coeff: f64,
    /// First-order slope of the translational eigenvalue of L_h; vanishes.
    pub sigma_trans_slope: f64,
    /// Modulational eigenvalue slope of L_h itself.
    pub sigma0_modulational: f64,
    /// Base wave samples on the report grid (for seeding solvers).
    pub phi0: Vec<f64>,
    pub mass: f64,
    pub norm_sq: f64,
    pub bound: f64,
}

/// First-order correction on a caller-supplied grid (must be the fundamental
/// grid of the modulus).
pub fn first_order_correction_on(
    grid: &PeriodicGrid,
    kappa: f64,
    alpha0: f64,
    branch_sign: i32,
) -> Result<ExpansionReport> {
    check_branch_sign(branch_sign)?;
    let ctx = BaseContext::new(grid, kappa)?;
    ctx.check_admissible(alpha0, false)?;
    expansion_from_context(&ctx, kappa, alpha0, branch_sign)
}

/// First-order correction on the fundamental grid with n_grid points.
pub fn first_order_correction(
    kappa: f64,
    alpha0: f64,
    branch_sign: i32,
    n_grid: usize,
) -> Result<ExpansionReport> {
    check_branch_sign(branch_sign)?;
    let ctx = BaseContext::from_kappa(kappa, n_grid)?;
    ctx.check_admissible(alpha0, false)?;
    expansion_from_context(&ctx, kappa, alpha0, branch_sign)
}

fn expansion_from_context(
    ctx: &BaseContext,
    kappa: f64,
    alpha0: f64,
    branch_sign: i32,
) -> Result<ExpansionReport> {
    let n = ctx.grid.n;
    let (a0, b0, sigma0, c0) = ctx.leading(alpha0, branch_sign);

    // w2 = L_-^{-1}[b0 - alpha0 phi0]; solvability <b0 - alpha0 phi0, phi0> = 0
    // is forced by the definition of b0.
    let rhs2: Vec<f64> = ctx.phi0.iter().map(|&p| b0 - alpha0 * p).collect();
    let w2 = ctx.lminus_inv(&rhs2)?;
    let w1 = &ctx.w1;

    let phi0_sq_w1: Vec<f64> = ctx
        .phi0
        .iter()
        .zip(w1)
        .map(|(&p, &w)| p * p * w)
        .collect();
    let d2_0 = 8.0 * ctx.grid.inner(&phi0_sq_w1, &w2) / ctx.mass;

    let mut psi1_0 = vec![0.0; n];
    let mut psi2_0 = vec![0.0; n];
    let mut psi0 = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        psi1_0[i] = a0 * a0 * w1[i] + b0 * w2[i];
        psi2_0[i] = a0 * b0 * w1[i] - a0 * w2[i];
        psi0[i] = c0 * a0 * w1[i] - Complex64::i() * c0 * w2[i];
    }

    let predicted = predicted_from_context(ctx, a0)?;

    Ok(ExpansionReport {
        kappa,
        alpha0,
        branch_sign,
        n_grid: n,
        sigma0,
        a0,
        b0,
        c0,
        d1_0: 0.0,
        d2_0,
        psi0,
        psi1_0,
        psi2_0,
        lambda_minus_slope: predicted.lambda_minus_slope,
        mu0: predicted.mu0,
        lambda_h_coeff: predicted.lambda_h_coeff,
        sigma_trans_slope: predicted.sigma_trans_slope,
        sigma0_modulational: predicted.sigma0_modulational,
        phi0: ctx.phi0.clone(),
        mass: ctx.mass,
        norm_sq: ctx.norm_sq,
        bound: ctx.bound,
    })
}

/// Eigenvalue predictions derived from the expansion coefficients.
#[derive(Debug, Clone, Copy)]
pub struct PredictedEigenvalues {
    /// Modulational eigenvalue slope of L_h: a0 <1,phi0>/||phi0||^2.
    pub sigma0_modulational: f64,
    /// mu0 with mu0^2 = -a0 <phi0,1>/<L_+^{-1} phi0, phi0>; real when a0 > 0
    /// (instability), imaginary when a0 < 0.
    pub mu0: Complex64,
    /// Slope <1,phi0>/||phi0||^2 of the lowest L_{-,h} eigenvalue.
    pub lambda_minus_slope: f64,
    /// sqrt(<1,phi0>/(-<L_+^{-1} phi0, phi0>)).
    pub lambda_h_coeff: f64,
    /// -12 a0 <L_+^{-1}[1], phi0 (phi0')^2>/||phi0'||^2; vanishes.
    pub sigma_trans_slope: f64,
}

pub fn predicted_eigenvalues(
    kappa: f64,
    alpha0: f64,
    branch_sign: i32,
    n_grid: usize,
) -> Result<PredictedEigenvalues> {
    check_branch_sign(branch_sign)?;
    let ctx = BaseContext::from_kappa(kappa, n_grid)?;
    ctx.check_admissible(alpha0, true)?;
    let (a0, _, _, _) = ctx.leading(alpha0, branch_sign);
    predicted_from_context(&ctx, a0)
}

fn predicted_from_context(ctx: &BaseContext, a0: f64) -> Result<PredictedEigenvalues> {
    let ant1 = ctx.grid.inner(&ctx.lplus_inv_phi0, &ctx.phi0);
    let sigma0_modulational = a0 * ctx.mass / ctx.norm_sq;
    let mu0_sq = -a0 * ctx.mass / ant1;
    let mu0 = if mu0_sq >= 0.0 {
        Complex64::new(mu0_sq.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-mu0_sq).sqrt())
    };
    let lambda_minus_slope = ctx.mass / ctx.norm_sq;
    let lambda_h_coeff = (ctx.mass / (-ant1)).sqrt();

    let weighted: Vec<f64> = ctx
        .phi0
        .iter()
        .zip(&ctx.dphi0)
        .map(|(&p, &dp)| p * dp * dp)
        .collect();
    let dphi_norm_sq = ctx.grid.norm_sq(&ctx.dphi0);
    let sigma_trans_slope = -12.0 * a0 * ctx.grid.inner(&ctx.w1, &weighted) / dphi_norm_sq;

    Ok(PredictedEigenvalues {
        sigma0_modulational,
        mu0,
        lambda_minus_slope,
        lambda_h_coeff,
        sigma_trans_slope,
    })
}

/// First-order formulas of the alpha = 0 lemma: the wave, the lowest
/// eigenvalue of L_{-,h}, and its ground state.
#[derive(Debug, Clone)]
pub struct LemmaExpansions {
    pub phi_h: Vec<f64>,
    pub lambda0: f64,
    pub ground_state: Vec<f64>,
}

pub fn lemma_expansions(kappa: f64, h: f64, n_grid: usize) -> Result<LemmaExpansions> {
    let ctx = BaseContext::from_kappa(kappa, n_grid)?;
    let slope = ctx.mass / ctx.norm_sq;
    let phi_h: Vec<f64> = ctx
        .phi0
        .iter()
        .zip(&ctx.w1)
        .map(|(&p, &w)| p + h * w)
        .collect();
    let rhs: Vec<f64> = ctx
        .phi0
        .iter()
        .zip(&ctx.w1)
        .map(|(&p, &w)| 4.0 * p * p * w + slope * p)
        .collect();
    let z = ctx.lminus_inv(&rhs)?;
    let ground_state: Vec<f64> = ctx
        .phi0
        .iter()
        .zip(&z)
        .map(|(&p, &zi)| p + h * zi)
        .collect();
    Ok(LemmaExpansions {
        phi_h,
        lambda0: slope * h,
        ground_state,
    })
}
