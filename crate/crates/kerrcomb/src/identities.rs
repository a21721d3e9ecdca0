//! Numerical verification of the closed elliptic-integral identities behind
//! the inverse-operator inner products: the Green's-function construction of
//! L_+^{-1}, the four inner-product identities, the reduction-of-order second
//! solution, and the Rofe-Beketov kernel candidate.

use crate::cnoidal::BaseWaveParams;
use crate::elliptic::{complete_integrals, jacobi_sn_cn_dn};
use crate::error::{KerrError, Result};
use crate::perturbation::BaseContext;
use crate::quad;

/// Gauss-Legendre node count for the half-period integrals (the integrands
/// are smooth on [0, T] but not periodic across T).
const GL_NODES: usize = 64;

/// Per-modulus record of the identity checks.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub kappa: f64,
    pub n_grid: usize,
    /// <L_+^{-1} phi0, phi0>, constrained solve + quadrature.
    pub ant1_numeric: f64,
    /// Closed form (E^2 - (1-k^2) K^2) / (2 [2 (1-k^2) K - (2-k^2) E]).
    pub ant1_closed: f64,
    /// <L_+^{-1}[1], phi0> (vanishes).
    pub ant2_numeric: f64,
    /// <L_+^{-1}[1], phi0 (phi0')^2> (vanishes).
    pub ant3_numeric: f64,
    /// Scaled quadrature of the Rofe-Beketov integral.
    pub ant4_numeric: f64,
    /// Closed form 2K - (2-k^2)/(1-k^2) E.
    pub ant4_closed: f64,
    /// Unit-Wronskian second solution of L_+ psi = 0 on the grid.
    pub psi_second_solution: Vec<f64>,
    /// Rofe-Beketov second kernel candidate g on the grid.
    pub rofe_beketov_g: Vec<f64>,
}

/// The three inverse-operator inner products (ant1, ant2, ant3) by
/// constrained solve and grid quadrature.
pub fn inner_products_via_inverse(kappa: f64, n_grid: usize) -> Result<(f64, f64, f64)> {
    let ctx = BaseContext::from_kappa(kappa, n_grid)?;
    let ant1 = ctx.grid.inner(&ctx.lplus_inv_phi0, &ctx.phi0);
    let ant2 = ctx.grid.inner(&ctx.w1, &ctx.phi0);
    let weighted: Vec<f64> = ctx
        .phi0
        .iter()
        .zip(&ctx.dphi0)
        .map(|(&p, &dp)| p * dp * dp)
        .collect();
    let ant3 = ctx.grid.inner(&ctx.w1, &weighted);
    Ok((ant1, ant2, ant3))
}

/// Closed form of <L_+^{-1} phi0, phi0>.
pub fn closed_form_ant1(kappa: f64) -> Result<f64> {
    let (k, e) = complete_integrals(kappa)?;
    if kappa == 0.0 {
        return Err(KerrError::Domain {
            what: "ant1 closed form",
            details: "kappa must be in (0, 1)".into(),
        });
    }
    let kp2 = 1.0 - kappa * kappa;
    let denom = 2.0 * (2.0 * kp2 * k - (2.0 - kappa * kappa) * e);
    if denom.abs() < 1e-14 {
        return Err(KerrError::Degenerate(format!(
            "ant1 denominator vanished at kappa = {kappa}"
        )));
    }
    Ok((e * e - kp2 * k * k) / denom)
}

/// The true x-space Rofe-Beketov integrand
/// (2 - 6 phi0^2)((phi0')^2 - (phi0'')^2) / ((phi0')^2 + (phi0'')^2)^2.
fn rb_integrand(params: &BaseWaveParams, x: f64) -> f64 {
    let p = params.eval(x);
    let dp = params.eval_derivative(x);
    let ddp = p - 2.0 * p * p * p;
    let num = (2.0 - 6.0 * p * p) * (dp * dp - ddp * ddp);
    let den = dp * dp + ddp * ddp;
    num / (den * den)
}

/// Quadrature and closed form of the Rofe-Beketov integral.
///
/// The closed form 2K - (2-k^2)/(1-k^2) E corresponds to the substituted
/// y = amp x display, which absorbs an amp^5 kappa^4 prefactor relative to
/// the raw x-space integral; the numeric value is scaled accordingly so the
/// two columns are directly comparable.
pub fn rofe_beketov_integral(kappa: f64, n_grid: usize) -> Result<(f64, f64)> {
    let params = BaseWaveParams::new(kappa)?;
    let grid = crate::grid::PeriodicGrid::new(n_grid, params.half_period)?;
    // Degeneracy guard: the denominator (phi0')^2 + (phi0'')^2 collapses as
    // kappa -> 0 where phi0 becomes the constant 1/sqrt(2).
    let min_den = grid
        .nodes
        .iter()
        .map(|&x| {
            let dp = params.eval_derivative(x);
            let ddp = params.eval_second_derivative(x);
            dp * dp + ddp * ddp
        })
        .fold(f64::INFINITY, f64::min);
    if min_den < 1e-10 {
        return Err(KerrError::Degenerate(format!(
            "(phi0')^2 + (phi0'')^2 reaches {min_den:.3e}; kappa = {kappa} too close to the constant wave"
        )));
    }
    let raw = quad::integrate(
        |x| rb_integrand(&params, x),
        0.0,
        params.half_period,
        GL_NODES,
    );
    let scale = params.amp.powi(5) * kappa.powi(4);
    let (k, e) = complete_integrals(kappa)?;
    let closed = 2.0 * k - (2.0 - kappa * kappa) / (1.0 - kappa * kappa) * e;
    Ok((scale * raw, closed))
}

/// Pointwise evaluator for the second solution psi of L_+ psi = 0 and its
/// derivative, normalized to unit Wronskian phi0' psi' - phi0'' psi = 1.
pub struct PsiEvaluator {
    params: BaseWaveParams,
}

impl PsiEvaluator {
    pub fn new(kappa: f64) -> Result<Self> {
        Ok(Self {
            params: BaseWaveParams::new(kappa)?,
        })
    }

    /// int_0^x (1 - 2 sn^2(amp s)) / dn^2(amp s) ds (odd in x).
    fn landen_integral(&self, x: f64) -> f64 {
        let a = self.params.amp;
        let kappa = self.params.modulus.kappa;
        quad::integrate(
            |s| {
                let (sn, _, dn) = jacobi_sn_cn_dn(a * s, kappa).expect("valid modulus");
                (1.0 - 2.0 * sn * sn) / (dn * dn)
            },
            0.0,
            x,
            GL_NODES,
        )
    }

    /// (psi, psi') at x.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        self.eval_with_integral(x, self.landen_integral(x))
    }

    fn eval_with_integral(&self, x: f64, integral: f64) -> (f64, f64) {
        let a = self.params.amp;
        let kappa = self.params.modulus.kappa;
        let k2 = kappa * kappa;
        let (s, c, d) = jacobi_sn_cn_dn(a * x, kappa).expect("valid modulus");
        // The explicit bracketed display carries Wronskian amp; divide it out.
        let psi = ((1.0 - 2.0 * s * s) / d - a * k2 * s * c * integral) / (a * a * a * k2);
        let dpsi = -4.0 * s * c / (a * a * k2) - d * (c * c - s * s) * integral / a;
        (psi, dpsi)
    }

    /// Sample psi on all grid nodes, sharing one cumulative integral.
    pub fn sample(&self, grid: &crate::grid::PeriodicGrid) -> Vec<f64> {
        let cumulative = self.cumulative_on(grid);
        grid.nodes
            .iter()
            .zip(&cumulative)
            .map(|(&x, &i)| self.eval_with_integral(x, i).0)
            .collect()
    }

    /// Cumulative Landen integral at every node, using oddness for x < 0.
    fn cumulative_on(&self, grid: &crate::grid::PeriodicGrid) -> Vec<f64> {
        let a = self.params.amp;
        let kappa = self.params.modulus.kappa;
        let f = move |s: f64| {
            let (sn, _, dn) = jacobi_sn_cn_dn(a * s, kappa).expect("valid modulus");
            (1.0 - 2.0 * sn * sn) / (dn * dn)
        };
        cumulative_odd(grid, &f)
    }
}

/// Cumulative integral int_0^{x_j} f for every grid node, for even f
/// (the integral is odd; negative nodes come from mirroring).
fn cumulative_odd<F: Fn(f64) -> f64>(grid: &crate::grid::PeriodicGrid, f: &F) -> Vec<f64> {
    let n = grid.n;
    // Positive abscissas 2Tk/n for k = 1..=n/2 in ascending order.
    let pos: Vec<f64> = (1..=n / 2)
        .map(|k| 2.0 * grid.half_period * k as f64 / n as f64)
        .collect();
    let cum = quad::cumulative(f, 0.0, &pos, 8);
    let mut out = vec![0.0; n];
    for j in 0..n {
        let x = grid.nodes[j];
        if x == 0.0 {
            out[j] = 0.0;
        } else {
            let k = ((x.abs() * n as f64) / (2.0 * grid.half_period)).round() as usize;
            out[j] = cum[k - 1] * x.signum();
        }
    }
    out
}

/// Unit-Wronskian second solution of L_+ psi = 0 sampled on the grid.
pub fn second_solution_psi(kappa: f64, n_grid: usize) -> Result<Vec<f64>> {
    let eval = PsiEvaluator::new(kappa)?;
    let grid = crate::grid::PeriodicGrid::new(n_grid, eval.params.half_period)?;
    Ok(eval.sample(&grid))
}

/// The globally defined Rofe-Beketov solution g of L_+ g = 0 on the grid:
/// g = phi0' int_0^x F - phi0'' / ((phi0')^2 + (phi0'')^2) with F the
/// x-space integrand of the nonvanishing integral.
pub fn rofe_beketov_g(kappa: f64, n_grid: usize) -> Result<Vec<f64>> {
    let params = BaseWaveParams::new(kappa)?;
    let grid = crate::grid::PeriodicGrid::new(n_grid, params.half_period)?;
    let f = |x: f64| rb_integrand(&params, x);
    let cumulative = cumulative_odd(&grid, &f);
    Ok(grid
        .nodes
        .iter()
        .zip(&cumulative)
        .map(|(&x, &cum)| {
            let dp = params.eval_derivative(x);
            let ddp = params.eval_second_derivative(x);
            dp * cum - ddp / (dp * dp + ddp * ddp)
        })
        .collect())
}

/// Assemble the full identity record at one modulus.
pub fn identity_report(kappa: f64, n_grid: usize) -> Result<IdentityReport> {
    let (ant1_numeric, ant2_numeric, ant3_numeric) = inner_products_via_inverse(kappa, n_grid)?;
    let ant1_closed = closed_form_ant1(kappa)?;
    let (ant4_numeric, ant4_closed) = rofe_beketov_integral(kappa, n_grid)?;
    let psi_second_solution = second_solution_psi(kappa, n_grid)?;
    let rofe_beketov_g = rofe_beketov_g(kappa, n_grid)?;
    Ok(IdentityReport {
        kappa,
        n_grid,
        ant1_numeric,
        ant1_closed,
        ant2_numeric,
        ant3_numeric,
        ant4_numeric,
        ant4_closed,
        psi_second_solution,
        rofe_beketov_g,
    })
}
