//! The exact h = 0 cnoidal wave phi0 = amp dn(amp x, kappa) and the
//! quartic-root parametrization of the h != 0 first integral.

use nalgebra::DMatrix;

use crate::elliptic::{jacobi_sn_cn_dn, EllipticModulus};
use crate::error::{KerrError, Result};
use crate::grid::PeriodicGrid;
use crate::linalg;
use crate::profile::{Branch, WaveProfile};

/// Parameters of the dn-form base wave.
///
/// The domain half-length T is not free: T = K(kappa)/amp is the fundamental
/// half-period of phi0, and every downstream module inherits it.
#[derive(Debug, Clone, Copy)]
pub struct BaseWaveParams {
    pub modulus: EllipticModulus,
    /// Amplitude scale, amp^2 = 1/(2 - kappa^2); this is the "alpha" of the
    /// closed-form wave, renamed to avoid clashing with the detuning.
    pub amp: f64,
    pub half_period: f64,
    /// Minimum of phi0, equal to amp sqrt(1 - kappa^2).
    pub m_min: f64,
}

impl BaseWaveParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(KerrError::Domain {
                what: "base wave modulus",
                details: format!("kappa = {kappa} not in (0, 1)"),
            });
        }
        let modulus = EllipticModulus::new(kappa)?;
        let amp = 1.0 / (2.0 - kappa * kappa).sqrt();
        Ok(Self {
            modulus,
            amp,
            half_period: modulus.k_complete / amp,
            m_min: amp * modulus.complementary(),
        })
    }

    /// phi0 at a single point.
    pub fn eval(&self, x: f64) -> f64 {
        let (_, _, dn) = jacobi_sn_cn_dn(self.amp * x, self.modulus.kappa).expect("valid modulus");
        self.amp * dn
    }

    /// phi0' at a single point (analytic, d/du dn = -kappa^2 sn cn).
    pub fn eval_derivative(&self, x: f64) -> f64 {
        let k = self.modulus.kappa;
        let (sn, cn, _) = jacobi_sn_cn_dn(self.amp * x, k).expect("valid modulus");
        -self.amp * self.amp * k * k * sn * cn
    }

    /// phi0'' at a single point, via the profile equation phi'' = phi - 2 phi^3.
    pub fn eval_second_derivative(&self, x: f64) -> f64 {
        let p = self.eval(x);
        p - 2.0 * p * p * p
    }

    pub fn sample(&self, grid: &PeriodicGrid) -> Vec<f64> {
        grid.nodes.iter().map(|&x| self.eval(x)).collect()
    }

    pub fn sample_derivative(&self, grid: &PeriodicGrid) -> Vec<f64> {
        grid.nodes.iter().map(|&x| self.eval_derivative(x)).collect()
    }
}

fn check_power_of_two_grid(n: usize) -> Result<()> {
    if !n.is_power_of_two() || n < 32 {
        return Err(KerrError::InvalidArgument(format!(
            "grid size must be a power of two >= 32, got {n}"
        )));
    }
    Ok(())
}

/// The exact h = 0 wave sampled on its fundamental periodic grid.
pub fn base_wave(kappa: f64, n_grid: usize) -> Result<WaveProfile> {
    check_power_of_two_grid(n_grid)?;
    let params = BaseWaveParams::new(kappa)?;
    let grid = PeriodicGrid::new(n_grid, params.half_period)?;
    let phi1 = params.sample(&grid);
    let resolution_warning = grid.fourier_tail(&phi1) > 1e-12;
    Ok(WaveProfile {
        phi2: vec![0.0; grid.n],
        grid,
        phi1,
        h: 0.0,
        alpha: 0.0,
        branch: Branch::Base,
        kappa: Some(kappa),
        resolution_warning,
    })
}

/// Ordered real roots zeta1 < zeta2 < zeta3 < zeta4 of z^4 - z^2 + 2hz + c.
#[derive(Debug, Clone, Copy)]
pub struct QuarticRoots {
    pub zeta: [f64; 4],
    pub h: f64,
    pub c: f64,
}

impl QuarticRoots {
    /// Max Vieta residual: e1, e2 + 1, e3 + 2h, e4 - c.
    pub fn vieta_residual(&self) -> f64 {
        let [z1, z2, z3, z4] = self.zeta;
        let e1 = z1 + z2 + z3 + z4;
        let e2 = z1 * z2 + z1 * z3 + z1 * z4 + z2 * z3 + z2 * z4 + z3 * z4;
        let e3 = z1 * z2 * z3 + z1 * z2 * z4 + z1 * z3 * z4 + z2 * z3 * z4;
        let e4 = z1 * z2 * z3 * z4;
        e1.abs()
            .max((e2 + 1.0).abs())
            .max((e3 + 2.0 * self.h).abs())
            .max((e4 - self.c).abs())
    }
}

/// Real roots of z^4 - z^2 + 2hz + c by companion-matrix eigenvalues
/// (robust near double roots), Newton-polished.
///
/// The four-real-roots regime is certified first through the discriminant of
/// the depressed quartic, so the failure modes name the condition that broke.
pub fn quartic_roots(h: f64, c: f64) -> Result<QuarticRoots> {
    let p = |z: f64| ((z * z - 1.0) * z + 2.0 * h) * z + c;
    let dp = |z: f64| (4.0 * z * z - 2.0) * z + 2.0 * h;

    // Depressed quartic z^4 + P z^2 + Q z + R with P = -1, Q = 2h, R = c.
    // All roots are real and distinct iff disc > 0, P < 0 and P^2 - 4R > 0.
    let (pp, q, r) = (-1.0, 2.0 * h, c);
    let disc = 256.0 * r.powi(3) - 128.0 * pp * pp * r * r + 144.0 * pp * q * q * r
        - 27.0 * q.powi(4)
        + 16.0 * pp.powi(4) * r
        - 4.0 * pp.powi(3) * q * q;
    if disc < 0.0 {
        return Err(KerrError::RootRegime(format!(
            "discriminant {disc:.3e} < 0: one complex pair (c = {c} outside the window c in (0, 1/4) + O(h))"
        )));
    }
    if disc == 0.0 {
        return Err(KerrError::RootRegime(format!(
            "discriminant vanishes: repeated root at the regime boundary (h = {h}, c = {c})"
        )));
    }
    if pp * pp - 4.0 * r <= 0.0 {
        return Err(KerrError::RootRegime(format!(
            "P^2 - 4R = {:.3e} <= 0 with positive discriminant: two complex pairs (c = {c} >= 1/4)",
            pp * pp - 4.0 * r
        )));
    }

    let companion = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, 0.0, -c, //
            1.0, 0.0, 0.0, -2.0 * h, //
            0.0, 1.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    );
    let mut roots = [0.0_f64; 4];
    match linalg::eigenvalues(&companion) {
        Ok(eigs) => {
            for (i, z) in eigs.iter().enumerate() {
                if z.im.abs() > 1e-8 * (1.0 + z.norm()) {
                    return Err(KerrError::RootRegime(format!(
                        "companion eigenvalue {z} is not real despite positive discriminant"
                    )));
                }
                roots[i] = z.re;
            }
        }
        Err(_) => {
            // The biquadratic symmetry at h = 0 can cycle the QR shifts.
            // The regime is already certified real, so polish the exact
            // h = 0 roots into place instead.
            let s = (1.0 - 4.0 * c).max(0.0).sqrt();
            let inner = ((1.0 - s) / 2.0).max(0.0).sqrt();
            let outer = ((1.0 + s) / 2.0).sqrt();
            roots = [-outer, -inner, inner, outer];
            for z in &mut roots {
                for _ in 0..20 {
                    let d = dp(*z);
                    if d.abs() < 1e-14 {
                        break;
                    }
                    let step = p(*z) / d;
                    *z -= step;
                    if step.abs() < 1e-15 {
                        break;
                    }
                }
            }
        }
    }
    for r in &mut roots {
        for _ in 0..2 {
            let d = dp(*r);
            if d.abs() > 1e-12 {
                *r -= p(*r) / d;
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    if roots.windows(2).any(|w| w[0] >= w[1]) {
        return Err(KerrError::RootRegime(format!(
            "roots are not simple: {roots:?}"
        )));
    }
    let out = QuarticRoots { zeta: roots, h, c };
    let vr = out.vieta_residual();
    if vr > 1e-9 {
        return Err(KerrError::RootRegime(format!(
            "Vieta residual {vr:.3e} after polish"
        )));
    }
    Ok(out)
}

/// Evaluate the quartic-root wave on its own fundamental grid.
///
/// The wave oscillates in [zeta3, zeta4] with effective modulus
/// kt^2 = (z4-z3)(z2-z1)/((z4-z2)(z3-z1)) and argument scale
/// g = 2/sqrt((z4-z2)(z3-z1)); its half-period is K(kt) g.
pub fn wave_from_roots(roots: &QuarticRoots, n_grid: usize) -> Result<WaveProfile> {
    check_power_of_two_grid(n_grid)?;
    let [z1, z2, z3, z4] = roots.zeta;
    let kt_sq = (z4 - z3) * (z2 - z1) / ((z4 - z2) * (z3 - z1));
    if !(0.0..1.0).contains(&kt_sq) {
        return Err(KerrError::RootRegime(format!(
            "effective modulus squared {kt_sq} out of range"
        )));
    }
    let kt = kt_sq.sqrt();
    let g = 2.0 / ((z4 - z2) * (z3 - z1)).sqrt();
    let modulus = EllipticModulus::new(kt)?;
    let half_period = modulus.k_complete * g;
    let grid = PeriodicGrid::new(n_grid, half_period)?;
    let phi1: Vec<f64> = grid
        .nodes
        .iter()
        .map(|&x| {
            let (sn, _, _) = jacobi_sn_cn_dn(x / g, kt).expect("valid modulus");
            let s2 = sn * sn;
            (z4 * (z3 - z1) + z1 * (z4 - z3) * s2) / ((z3 - z1) + (z4 - z3) * s2)
        })
        .collect();
    let resolution_warning = grid.fourier_tail(&phi1) > 1e-12;
    Ok(WaveProfile {
        phi2: vec![0.0; grid.n],
        grid,
        phi1,
        h: roots.h,
        alpha: 0.0,
        branch: Branch::Base,
        kappa: None,
        resolution_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn params_invariants() {
        for kappa in [0.3, 0.5, 0.7, 0.9] {
            let p = BaseWaveParams::new(kappa).unwrap();
            assert!((p.amp * p.amp - 1.0 / (2.0 - kappa * kappa)).abs() < 1e-15);
            assert!(p.amp > std::f64::consts::FRAC_1_SQRT_2 && p.amp < 1.0);
            // Two derivations of the minimum agree.
            let alt = (1.0 - p.amp * p.amp).sqrt();
            assert!((p.m_min - alt).abs() < 1e-12);
            assert!((p.half_period - p.modulus.k_complete / p.amp).abs() < 1e-14);
        }
    }

    #[test]
    fn base_wave_kappa_half() {
        let w = base_wave(0.5, 256).unwrap();
        let max = w.phi1.iter().fold(f64::MIN, |a, &b| a.max(b));
        let min = w.phi1.iter().fold(f64::MAX, |a, &b| a.min(b));
        assert!((max - 0.75592894601845445).abs() < 1e-12);
        assert!((min - 0.65465367070797714).abs() < 1e-12);
        assert!((w.grid.half_period - 2.2300381056865124).abs() < 1e-12);
        assert!(!w.resolution_warning);
        // Spot values from the 40-digit oracle.
        let p = BaseWaveParams::new(0.5).unwrap();
        assert!((p.eval(0.37) - 0.748738494827576032).abs() < 1e-14);
        assert!((p.eval(1.1) - 0.704541905667484272).abs() < 1e-14);
    }

    #[test]
    fn base_wave_profile_equation_residual() {
        for kappa in [0.3, 0.5, 0.7, 0.9] {
            let w = base_wave(kappa, 256).unwrap();
            assert!(w.residual_inf() < 1e-8, "kappa = {kappa}: {}", w.residual_inf());
        }
    }

    #[test]
    fn base_wave_mass_is_pi_and_norm_closed_form() {
        for kappa in [0.3, 0.5, 0.9] {
            let w = base_wave(kappa, 256).unwrap();
            let ones = vec![1.0; w.grid.n];
            let mass = w.grid.inner(&ones, &w.phi1);
            assert!((mass - std::f64::consts::PI).abs() < 1e-10, "kappa {kappa}: {mass}");
            let p = BaseWaveParams::new(kappa).unwrap();
            let nsq = w.grid.norm_sq(&w.phi1);
            let closed = 2.0 * p.amp * p.modulus.e_complete;
            assert!((nsq - closed).abs() < 1e-10 * closed);
        }
    }

    #[test]
    fn base_wave_degenerates_to_constant() {
        let w = base_wave(1e-8, 32).unwrap();
        let c = std::f64::consts::FRAC_1_SQRT_2;
        for v in &w.phi1 {
            assert!((v - c).abs() < 1e-8);
        }
        assert!((w.grid.half_period - std::f64::consts::PI / 2.0_f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn base_wave_rejects_bad_grids() {
        assert!(base_wave(0.5, 24).is_err());
        assert!(base_wave(0.5, 48).is_err());
        assert!(base_wave(1.2, 64).is_err());
    }

    #[test]
    fn quartic_h_zero_paper_values() {
        let r = quartic_roots(0.0, 0.1875).unwrap();
        let expect = [-0.8660254037844386, -0.5, 0.5, 0.8660254037844386];
        for (a, b) in r.zeta.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn quartic_frozen_oracle_values() {
        // mpmath polyroots at 40 digits.
        let cases: [(f64, f64, [f64; 4]); 3] = [
            (
                0.001,
                0.1875,
                [
                    -0.868013983029550361,
                    -0.498011873748805266,
                    0.502012129804117393,
                    0.864013726974238234,
                ],
            ),
            (
                0.0,
                0.249999,
                [
                    -0.707813534767455545,
                    -0.706399320497974432,
                    0.706399320497974432,
                    0.707813534767455545,
                ],
            ),
            (
                0.0001,
                0.24,
                [
                    -0.775094906515037713,
                    -0.63195729842393832,
                    0.632957323426113575,
                    0.774094881512862458,
                ],
            ),
        ];
        for (h, c, expect) in cases {
            let r = quartic_roots(h, c).unwrap();
            for (a, b) in r.zeta.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12, "h={h} c={c}: {a} vs {b}");
            }
            assert!(r.vieta_residual() < 1e-10);
        }
    }

    #[test]
    fn quartic_perturbation_stays_near_h_zero_roots() {
        let r0 = quartic_roots(0.0, 0.1875).unwrap();
        let r = quartic_roots(1e-3, 0.1875).unwrap();
        for (a, b) in r.zeta.iter().zip(&r0.zeta) {
            assert!((a - b).abs() < 5e-3);
        }
    }

    #[test]
    fn quartic_regime_errors() {
        assert!(matches!(quartic_roots(0.0, 0.3), Err(KerrError::RootRegime(_))));
        assert!(matches!(quartic_roots(0.0, -0.01), Err(KerrError::RootRegime(_))));
    }

    #[test]
    fn wave_from_roots_matches_dn_form() {
        // Two independent constructions of the kappa = 0.5 wave.
        let p = BaseWaveParams::new(0.5).unwrap();
        let m = p.m_min;
        let c = m * m - m.powi(4);
        let roots = quartic_roots(0.0, c).unwrap();
        let w = wave_from_roots(&roots, 256).unwrap();
        let base = base_wave(0.5, 256).unwrap();
        assert!((w.grid.half_period - base.grid.half_period).abs() < 1e-12);
        for (a, b) in w.phi1.iter().zip(&base.phi1) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn wave_from_roots_range() {
        let roots = quartic_roots(1e-3, 0.1875).unwrap();
        let w = wave_from_roots(&roots, 128).unwrap();
        let max = w.phi1.iter().fold(f64::MIN, |a, &b| a.max(b));
        let min = w.phi1.iter().fold(f64::MAX, |a, &b| a.min(b));
        // Max is attained at the grid point x = 0; min at x = -T exactly.
        assert!((max - roots.zeta[3]).abs() < 1e-10);
        assert!((min - roots.zeta[2]).abs() < 1e-10);
    }

    #[test]
    fn wave_from_roots_first_integral() {
        // (phi')^2 + phi^4 - phi^2 + 2 h phi + c = 0 pointwise.
        for (h, c) in [(0.0, 0.1875), (1e-3, 0.1875)] {
            let roots = quartic_roots(h, c).unwrap();
            let w = wave_from_roots(&roots, 256).unwrap();
            let dphi = w.grid.spectral_derivative(&w.phi1);
            for (p, dp) in w.phi1.iter().zip(&dphi) {
                let r = dp * dp + p.powi(4) - p * p + 2.0 * h * p + c;
                assert!(r.abs() < 1e-8, "h={h}: residual {r}");
            }
        }
    }

    #[test]
    fn wave_from_roots_degenerate_constant() {
        let m = std::f64::consts::FRAC_1_SQRT_2 - 1e-7;
        let c = m * m - m.powi(4);
        let roots = quartic_roots(0.0, c).unwrap();
        let w = wave_from_roots(&roots, 64).unwrap();
        let max = w.phi1.iter().fold(f64::MIN, |a, &b| a.max(b));
        let min = w.phi1.iter().fold(f64::MAX, |a, &b| a.min(b));
        assert!(max - min < 1e-6);
        assert!((max - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn vieta_invariants_hold(h in 0.0f64..4e-3, c in 0.02f64..0.23) {
            let r = quartic_roots(h, c).unwrap();
            prop_assert!(r.vieta_residual() < 1e-10);
            prop_assert!(r.zeta.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
