//! Time integration of the full damped-driven equation
//! i u_t + u_xx - u + 2|u|^2 u = -i alpha u - h
//! by Strang splitting with exact substeps: the linear part (including
//! damping and the constant forcing) is integrated exactly in Fourier space,
//! the nonlinear part is an exact pointwise phase rotation.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::Fft;

use crate::error::{KerrError, Result};
use crate::grid::PeriodicGrid;

/// A split-step run with its sampled residual history.
pub struct EvolutionRun {
    pub grid: PeriodicGrid,
    pub state: Vec<Complex64>,
    /// Steady profile the residual norm is measured against.
    pub reference: Vec<Complex64>,
    pub h: f64,
    pub alpha: f64,
    pub dt: f64,
    pub t: f64,
    /// Sampled (t, ||u - reference||_2) pairs, one per `step` call.
    pub history: Vec<(f64, f64)>,
    /// dt (k_max^2 + 1); phase rotation per step of the stiffest mode. The
    /// exact exponential substeps are unconditionally stable, so this is an
    /// accuracy indicator, not a stability bound.
    pub stiffness_ratio: f64,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
    /// exp((-i(k^2+1) - alpha) dt) per FFT mode.
    lin_full: Vec<Complex64>,
    lin_half: Vec<Complex64>,
    /// Fixed point of the k = 0 linear mode, scaled for unnormalized FFT.
    forcing_fixed_point: Complex64,
    scratch: Vec<Complex64>,
}

impl EvolutionRun {
    pub fn new(
        grid: &PeriodicGrid,
        initial: Vec<Complex64>,
        reference: Vec<Complex64>,
        h: f64,
        alpha: f64,
        dt: f64,
    ) -> Result<Self> {
        let n = grid.n;
        if initial.len() != n || reference.len() != n {
            return Err(KerrError::GridMismatch(
                "state/reference length does not match grid".into(),
            ));
        }
        if !(dt > 0.0) {
            return Err(KerrError::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        let mut planner = rustfft::FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(n);
        let fft_inv = planner.plan_fft_inverse(n);
        let multiplier = |tau: f64| -> Vec<Complex64> {
            grid.wavenumbers
                .iter()
                .map(|&k| (Complex64::new(-alpha, -(k * k + 1.0)) * tau).exp())
                .collect()
        };
        let k_max = grid
            .wavenumbers
            .iter()
            .fold(0.0_f64, |acc, &k| acc.max(k.abs()));
        // Stationary point of d/dt u0 = (-i - alpha) u0 + i h, times n for the
        // unnormalized FFT convention.
        let forcing_fixed_point = if h == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, h * n as f64) / Complex64::new(alpha, 1.0)
        };
        Ok(Self {
            grid: grid.clone(),
            state: initial,
            reference,
            h,
            alpha,
            dt,
            t: 0.0,
            history: Vec::new(),
            stiffness_ratio: dt * (k_max * k_max + 1.0),
            fft_fwd,
            fft_inv,
            lin_full: multiplier(dt),
            lin_half: multiplier(0.5 * dt),
            forcing_fixed_point,
            scratch: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    /// Start a run from a steady profile (state = reference = profile).
    pub fn from_profile(profile: &crate::profile::WaveProfile, dt: f64) -> Result<Self> {
        let u: Vec<Complex64> = profile
            .phi1
            .iter()
            .zip(&profile.phi2)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        Self::new(&profile.grid.clone(), u.clone(), u, profile.h, profile.alpha, dt)
    }

    fn linear_substep(&mut self, multipliers: &[Complex64]) {
        let n = self.grid.n as f64;
        self.fft_fwd.process(&mut self.state);
        for (u, m) in self.state.iter_mut().zip(multipliers) {
            *u *= m;
        }
        // Exact constant-forcing update of the k = 0 mode: the homogeneous
        // decay is already applied, add the inhomogeneous part.
        self.state[0] += self.forcing_fixed_point * (Complex64::new(1.0, 0.0) - multipliers[0]);
        self.fft_inv.process(&mut self.state);
        for u in self.state.iter_mut() {
            *u /= n;
        }
    }

    fn nonlinear_substep(&mut self) {
        for u in self.state.iter_mut() {
            let theta = 2.0 * u.norm_sqr() * self.dt;
            let (s, c) = theta.sin_cos();
            *u *= Complex64::new(c, s);
        }
    }

    /// Advance `n_steps` Strang steps (adjacent half-steps merged) and record
    /// one history sample at the end.
    pub fn step(&mut self, n_steps: usize) -> Result<()> {
        if n_steps == 0 {
            self.record();
            return Ok(());
        }
        let t_before = self.t;
        let lin_half = std::mem::take(&mut self.lin_half);
        let lin_full = std::mem::take(&mut self.lin_full);
        self.linear_substep(&lin_half);
        for i in 0..n_steps {
            self.nonlinear_substep();
            if i + 1 < n_steps {
                self.linear_substep(&lin_full);
            }
        }
        self.linear_substep(&lin_half);
        self.lin_half = lin_half;
        self.lin_full = lin_full;
        self.t = t_before + n_steps as f64 * self.dt;
        if self.state.iter().any(|u| !u.re.is_finite() || !u.im.is_finite()) {
            return Err(KerrError::BlowUp {
                last_finite_t: t_before,
            });
        }
        self.record();
        Ok(())
    }

    fn record(&mut self) {
        self.history.push((self.t, self.residual_norm()));
    }

    /// ||u - reference||_2 by grid quadrature.
    pub fn residual_norm(&self) -> f64 {
        let w = self.grid.quad_weight();
        (w * self
            .state
            .iter()
            .zip(&self.reference)
            .map(|(u, r)| (u - r).norm_sqr())
            .sum::<f64>())
        .sqrt()
    }

    pub fn residual_inf(&self) -> f64 {
        self.state
            .iter()
            .zip(&self.reference)
            .map(|(u, r)| (u - r).norm())
            .fold(0.0, f64::max)
    }

    /// ||u||_2 (conserved exactly at h = alpha = 0).
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.quad_weight();
        (w * self.state.iter().map(|u| u.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// NLS Hamiltonian int |u_x|^2 + |u|^2 - |u|^4 dx (conserved at
    /// h = alpha = 0 up to the splitting error).
    pub fn hamiltonian(&mut self) -> f64 {
        let n = self.grid.n;
        self.scratch.copy_from_slice(&self.state);
        self.fft_fwd.process(&mut self.scratch);
        let two_t = 2.0 * self.grid.half_period;
        let mut grad = 0.0;
        for (c, &k) in self.scratch.iter().zip(&self.grid.wavenumbers) {
            grad += k * k * c.norm_sqr();
        }
        grad *= two_t / (n as f64 * n as f64);
        let w = self.grid.quad_weight();
        let local: f64 = self
            .state
            .iter()
            .map(|u| {
                let m2 = u.norm_sqr();
                m2 - m2 * m2
            })
            .sum::<f64>()
            * w;
        grad + local
    }

    /// Add eps * delta to the state (delta given as a complex field).
    pub fn perturb(&mut self, delta: &[Complex64], eps: f64) -> Result<()> {
        if delta.len() != self.grid.n {
            return Err(KerrError::GridMismatch("perturbation length mismatch".into()));
        }
        for (u, d) in self.state.iter_mut().zip(delta) {
            *u += eps * d;
        }
        Ok(())
    }

    /// Add low-pass, even-in-x complex noise of L2 norm eps (modes with
    /// |index| <= n/8, coefficients mirrored so the field is even).
    pub fn perturb_with_noise(&mut self, eps: f64, seed: u64) -> Result<()> {
        let n = self.grid.n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        let cutoff = (n / 8).max(2);
        for j in 0..=cutoff {
            let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            coeffs[j] = c;
            if j != 0 {
                coeffs[n - j] = c; // c_{-j} = c_j makes the field even in x
            }
        }
        self.fft_inv.process(&mut coeffs);
        let w = self.grid.quad_weight();
        let norm = (w * coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
        if norm == 0.0 {
            return Err(KerrError::InvalidArgument("noise came out empty".into()));
        }
        for (u, c) in self.state.iter_mut().zip(&coeffs) {
            *u += c * (eps / norm);
        }
        Ok(())
    }
}

/// Turn a 2n-component linearization eigenvector (z1; z2) into the complex
/// field perturbation Re z1 + i Re z2.
pub fn eigenvector_to_field(z: &nalgebra::DVector<Complex64>, n: usize) -> Result<Vec<Complex64>> {
    if z.len() != 2 * n {
        return Err(KerrError::GridMismatch(format!(
            "eigenvector length {} != 2n = {}",
            z.len(),
            2 * n
        )));
    }
    Ok((0..n)
        .map(|i| Complex64::new(z[i].re, z[n + i].re))
        .collect())
}

/// Least-squares slope of log ||u - phi|| over the middle 60% of the record.
///
/// Preconditions: the history must cover at least two decades of residual
/// change, or (when the expected rate is supplied) a time span of at least
/// 5 / |expected rate|.
pub fn measure_growth_rate(history: &[(f64, f64)], expected_rate: Option<f64>) -> Result<f64> {
    let valid: Vec<(f64, f64)> = history
        .iter()
        .filter(|(_, r)| *r > 1e-300)
        .copied()
        .collect();
    if valid.len() < 8 {
        return Err(KerrError::InsufficientRange(format!(
            "only {} usable samples",
            valid.len()
        )));
    }
    let (min_r, max_r) = valid
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &(_, r)| {
            (lo.min(r), hi.max(r))
        });
    let span = valid.last().unwrap().0 - valid[0].0;
    let decades = (max_r / min_r).log10();
    let span_ok = expected_rate
        .map(|r| r != 0.0 && span >= 5.0 / r.abs())
        .unwrap_or(false);
    if decades < 2.0 && !span_ok {
        return Err(KerrError::InsufficientRange(format!(
            "{decades:.2} decades over t-span {span:.2}"
        )));
    }
    let lo = valid.len() / 5;
    let hi = valid.len() - valid.len() / 5;
    let window = &valid[lo..hi];
    let m = window.len() as f64;
    let mean_t = window.iter().map(|(t, _)| t).sum::<f64>() / m;
    let mean_y = window.iter().map(|(_, r)| r.ln()).sum::<f64>() / m;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(t, r) in window {
        num += (t - mean_t) * (r.ln() - mean_y);
        den += (t - mean_t) * (t - mean_t);
    }
    if den == 0.0 {
        return Err(KerrError::InsufficientRange("degenerate time axis".into()));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnoidal::base_wave;

    #[test]
    fn synthetic_growth_rate() {
        let history: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.1;
                (t, 1e-6 * (0.3 * t).exp())
            })
            .collect();
        let rate = measure_growth_rate(&history, None).unwrap();
        assert!((rate - 0.3).abs() < 1e-6, "rate {rate}");
    }

    #[test]
    fn insufficient_range_is_rejected() {
        let history: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 1.0 + 1e-6 * i as f64)).collect();
        assert!(matches!(
            measure_growth_rate(&history, None),
            Err(KerrError::InsufficientRange(_))
        ));
        // Supplying the expected rate relaxes to the t >= 5/|rate| window.
        assert!(measure_growth_rate(&history, Some(1.0)).is_ok());
    }

    #[test]
    fn steady_state_short_run() {
        let w = base_wave(0.5, 128).unwrap();
        let mut run = EvolutionRun::from_profile(&w, 1e-3).unwrap();
        run.step(1000).unwrap();
        let newton_residual = w.residual_inf();
        assert!(
            run.residual_inf() < 10.0 * newton_residual + 1e-6,
            "drift {:.3e}",
            run.residual_inf()
        );
    }

    #[test]
    fn nls_invariants_short_run() {
        let w = base_wave(0.5, 128).unwrap();
        let mut run = EvolutionRun::from_profile(&w, 1e-3).unwrap();
        let mass0 = run.l2_norm();
        let h0 = run.hamiltonian();
        run.step(2000).unwrap();
        assert!((run.l2_norm() - mass0).abs() < 1e-12, "mass drift");
        assert!((run.hamiltonian() - h0).abs() < 1e-8, "H drift");
    }

    #[test]
    fn splitting_second_order() {
        // Non-steady initial state; compare against a dt/8 reference at t = 0.5.
        let w = base_wave(0.5, 128).unwrap();
        let grid = w.grid.clone();
        let u0: Vec<Complex64> = w
            .phi1
            .iter()
            .zip(&grid.nodes)
            .map(|(&p, &x)| {
                Complex64::new(
                    p * (1.0 + 0.05 * (std::f64::consts::PI * x / grid.half_period).cos()),
                    0.0,
                )
            })
            .collect();
        let run_to = |dt: f64| -> Vec<Complex64> {
            let steps = (0.5 / dt).round() as usize;
            let mut run =
                EvolutionRun::new(&grid, u0.clone(), u0.clone(), 0.0, 0.0, dt).unwrap();
            run.step(steps).unwrap();
            run.state
        };
        let reference = run_to(2e-3 / 8.0);
        let err = |state: &[Complex64]| -> f64 {
            state
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        };
        let e1 = err(&run_to(2e-3));
        let e2 = err(&run_to(1e-3));
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "order ratio {ratio} (e1 {e1:.3e}, e2 {e2:.3e})");
    }

    #[test]
    fn noise_perturbation_is_even_and_sized() {
        let w = base_wave(0.5, 128).unwrap();
        let mut run = EvolutionRun::from_profile(&w, 1e-3).unwrap();
        run.perturb_with_noise(1e-4, 42).unwrap();
        assert!((run.residual_norm() - 1e-4).abs() < 1e-16);
        // Even in x: u(x_j) = u(x_{n-j}).
        let n = run.grid.n;
        for j in 1..n {
            let d = (run.state[j] - run.state[n - j]).norm();
            assert!(d < 1e-15, "odd component at j = {j}");
        }
        // Determinism.
        let mut run2 = EvolutionRun::from_profile(&w, 1e-3).unwrap();
        run2.perturb_with_noise(1e-4, 42).unwrap();
        assert_eq!(run.state, run2.state);
    }
}
