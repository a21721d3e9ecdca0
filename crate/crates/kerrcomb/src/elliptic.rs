//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! Everything here is parametrized by the *modulus* kappa (the `sn(., kappa)`
//! convention), not by the parameter m = kappa^2 used by scipy. K and E come
//! from arithmetic-geometric mean iteration; sn, cn, dn from the descending
//! Landen transformation with a circular-limit fallback for tiny kappa.

use crate::error::{KerrError, Result};

/// Below this modulus the Jacobi functions are evaluated in their circular
/// limit sn = sin, cn = cos, dn = 1.
const KAPPA_CIRCULAR_THRESHOLD: f64 = 1e-10;

/// The modulus kappa together with the complete integrals K(kappa), E(kappa).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    pub kappa: f64,
    pub k_complete: f64,
    pub e_complete: f64,
}

impl EllipticModulus {
    pub fn new(kappa: f64) -> Result<Self> {
        let (k, e) = complete_integrals(kappa)?;
        Ok(Self {
            kappa,
            k_complete: k,
            e_complete: e,
        })
    }

    /// Complementary modulus kappa' = sqrt(1 - kappa^2).
    pub fn complementary(&self) -> f64 {
        (1.0 - self.kappa * self.kappa).sqrt()
    }
}

fn check_modulus(kappa: f64) -> Result<()> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(KerrError::Domain {
            what: "elliptic modulus",
            details: format!("kappa = {kappa} not in [0, 1)"),
        });
    }
    Ok(())
}

/// Complete elliptic integrals (K(kappa), E(kappa)) by AGM iteration.
///
/// K = pi/(2 a_N) for the AGM limit a_N of (1, kappa'); E picks up the
/// c_n = (a_n - b_n)/2 sequence through E = K (1 - sum 2^(n-1) c_n^2).
pub fn complete_integrals(kappa: f64) -> Result<(f64, f64)> {
    check_modulus(kappa)?;
    if kappa == 0.0 {
        return Ok((std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2));
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - kappa * kappa).sqrt();
    let mut c_sum = 0.5 * kappa * kappa; // 2^(-1) c_0^2 with c_0 = kappa
    let mut pow2 = 1.0;
    for _ in 0..24 {
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        c_sum += pow2 * c * c;
        pow2 *= 2.0;
        if c.abs() < 1e-17 * a {
            break;
        }
    }
    let k = std::f64::consts::FRAC_PI_2 / a;
    let e = k * (1.0 - c_sum);
    Ok((k, e))
}

/// Jacobi elliptic functions (sn, cn, dn) at (u, kappa).
///
/// The argument is reduced modulo the full period 4K before the Landen
/// recursion, so periodicity holds for large |u| as well.
pub fn jacobi_sn_cn_dn(u: f64, kappa: f64) -> Result<(f64, f64, f64)> {
    check_modulus(kappa)?;
    if kappa < KAPPA_CIRCULAR_THRESHOLD {
        return Ok((u.sin(), u.cos(), 1.0));
    }

    let (k_complete, _) = complete_integrals(kappa)?;
    let period = 4.0 * k_complete;
    let u = u - period * (u / period).round();

    // Descending Landen (Abramowitz & Stegun 16.12, the classic sncndn
    // scheme): drive the modulus to zero, evaluate circular functions,
    // then recurse back up.
    let mut emc = 1.0 - kappa * kappa;
    let mut a = 1.0_f64;
    let mut c;
    let mut am = [0.0_f64; 16];
    let mut en = [0.0_f64; 16];
    let mut l = 0;
    loop {
        am[l] = a;
        emc = emc.sqrt();
        en[l] = emc;
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= 1e-15 * a || l == 15 {
            break;
        }
        emc *= a;
        a = c;
        l += 1;
    }

    let phi = c * u;
    let mut sn = phi.sin();
    let cn_raw = phi.cos();
    let mut dn = 1.0;
    if sn == 0.0 {
        return Ok((0.0, cn_raw.signum(), 1.0));
    }
    let mut aa = cn_raw / sn;
    c *= aa;
    for i in (0..=l).rev() {
        let b = am[i];
        aa *= c;
        c *= dn;
        dn = (en[i] + aa) / (b + aa);
        aa = c / b;
    }
    let inv = 1.0 / (c * c + 1.0).sqrt();
    sn = if sn >= 0.0 { inv } else { -inv };
    let cn = c * sn;
    Ok((sn, cn, dn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    // Frozen reference values from a 40-digit AGM/Landen evaluation.
    const K_REF: [(f64, f64, f64); 5] = [
        (0.3, 1.6080486199305128, 1.5348334649232490),
        (0.5, 1.6857503548125960, 1.4674622093394272),
        (0.7, 1.8456939983747235, 1.3556611355719555),
        (0.8, 1.9953027776647294, 1.2763499431699064),
        (0.9, 2.2805491384227702, 1.1716970527816141),
    ];

    #[test]
    fn complete_integrals_at_zero() {
        let (k, e) = complete_integrals(0.0).unwrap();
        assert_eq!(k, FRAC_PI_2);
        assert_eq!(e, FRAC_PI_2);
    }

    #[test]
    fn complete_integrals_reference() {
        for &(kappa, k_ref, e_ref) in &K_REF {
            let (k, e) = complete_integrals(kappa).unwrap();
            assert!((k - k_ref).abs() < 1e-13 * k_ref, "K({kappa}) = {k}");
            assert!((e - e_ref).abs() < 1e-13 * e_ref, "E({kappa}) = {e}");
        }
    }

    #[test]
    fn e_tends_to_one_at_unit_modulus() {
        let (_, e) = complete_integrals(1.0 - 1e-7).unwrap();
        assert!((e - 1.0).abs() < 1e-5, "E(1-) = {e}");
    }

    #[test]
    fn modulus_out_of_range() {
        assert!(complete_integrals(1.0).is_err());
        assert!(complete_integrals(-0.1).is_err());
        assert!(jacobi_sn_cn_dn(0.3, 1.2).is_err());
    }

    #[test]
    fn jacobi_origin() {
        for kappa in [0.0, 0.4, 0.9] {
            let (sn, cn, dn) = jacobi_sn_cn_dn(0.0, kappa).unwrap();
            assert_eq!(sn, 0.0);
            assert_eq!(cn, 1.0);
            assert_eq!(dn, 1.0);
        }
    }

    #[test]
    fn jacobi_circular_limit() {
        let u = std::f64::consts::PI / 3.0;
        let (sn, cn, dn) = jacobi_sn_cn_dn(u, 0.0).unwrap();
        assert!((sn - u.sin()).abs() < 1e-15);
        assert!((cn - u.cos()).abs() < 1e-15);
        assert_eq!(dn, 1.0);
    }

    #[test]
    fn jacobi_at_quarter_period() {
        let m = EllipticModulus::new(0.5).unwrap();
        let (sn, cn, dn) = jacobi_sn_cn_dn(m.k_complete, 0.5).unwrap();
        assert!((sn - 1.0).abs() < 1e-12);
        assert!(cn.abs() < 1e-12);
        assert!((dn - m.complementary()).abs() < 1e-12, "dn(K) = {dn}");
    }

    #[test]
    fn jacobi_reference_points() {
        // mpmath ellipfun at 40 digits.
        let cases = [
            (0.7, 0.8, 0.618755648952545374, 0.785583507266614168, 0.868890399307738489),
            (1.3, 0.5, 0.944048567491220197, 0.329806461758673042, 0.881585546362032733),
            (-2.2, 0.95, -0.992250202486382566, 0.124255928090907584, 0.333817586322715851),
            (5.0, 0.3, -0.985949313235574785, 0.167044759661290888, 0.955254602530512207),
        ];
        for (u, kappa, sn_ref, cn_ref, dn_ref) in cases {
            let (sn, cn, dn) = jacobi_sn_cn_dn(u, kappa).unwrap();
            assert!((sn - sn_ref).abs() < 1e-13, "sn({u},{kappa}) = {sn}");
            assert!((cn - cn_ref).abs() < 1e-13, "cn({u},{kappa}) = {cn}");
            assert!((dn - dn_ref).abs() < 1e-13, "dn({u},{kappa}) = {dn}");
        }
    }

    #[test]
    fn periodicity() {
        let m = EllipticModulus::new(0.73).unwrap();
        for u in [-1.9, 0.0, 0.4, 2.7] {
            let (s0, c0, d0) = jacobi_sn_cn_dn(u, 0.73).unwrap();
            let (s1, c1, d1) = jacobi_sn_cn_dn(u + 4.0 * m.k_complete, 0.73).unwrap();
            assert!((s0 - s1).abs() < 1e-10);
            assert!((c0 - c1).abs() < 1e-10);
            assert!((d0 - d1).abs() < 1e-10);
        }
    }

    #[test]
    fn legendre_relation() {
        // E K' + E' K - K K' = pi/2.
        for i in 1..50 {
            let kappa = i as f64 / 50.0;
            let (k, e) = complete_integrals(kappa).unwrap();
            let kp = (1.0 - kappa * kappa).sqrt();
            let (kc, ec) = complete_integrals(kp).unwrap();
            let residual = e * kc + ec * k - k * kc - FRAC_PI_2;
            assert!(residual.abs() < 1e-12, "kappa = {kappa}: {residual:.3e}");
        }
    }

    #[test]
    fn dn_integrates_to_half_pi() {
        // int_0^K dn(u) du = pi/2 for every modulus.
        for kappa in [0.2, 0.5, 0.85] {
            let m = EllipticModulus::new(kappa).unwrap();
            let v = crate::quad::integrate(
                |u| jacobi_sn_cn_dn(u, kappa).unwrap().2,
                0.0,
                m.k_complete,
                64,
            );
            assert!((v - FRAC_PI_2).abs() < 1e-10, "kappa = {kappa}: {v}");
        }
    }

    #[test]
    fn dn_derivative_matches_central_difference() {
        let kappa = 0.6;
        let h = 1e-5;
        for u in [-1.1, 0.3, 0.9, 2.2] {
            let (sn, cn, _) = jacobi_sn_cn_dn(u, kappa).unwrap();
            let dp = jacobi_sn_cn_dn(u + h, kappa).unwrap().2;
            let dm = jacobi_sn_cn_dn(u - h, kappa).unwrap().2;
            let fd = (dp - dm) / (2.0 * h);
            let exact = -kappa * kappa * sn * cn;
            assert!(
                (fd - exact).abs() < 1e-8 * exact.abs().max(1e-3),
                "u = {u}: fd {fd} vs {exact}"
            );
        }
    }

    proptest! {
        #[test]
        fn pythagorean_identities(u in -30.0f64..30.0, kappa in 0.0f64..0.999) {
            let (sn, cn, dn) = jacobi_sn_cn_dn(u, kappa).unwrap();
            prop_assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
            prop_assert!((dn * dn + kappa * kappa * sn * sn - 1.0).abs() < 1e-12);
        }
    }
}
