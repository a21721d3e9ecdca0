//! Steady-state Kerr frequency combs of the Lugiato-Lefever equation
//! i u_t + u_xx - u + 2|u|^2 u = -i alpha u - h on a periodic domain.
//!
//! The crate constructs the O(1) comb branches bifurcating from the cnoidal
//! wave of the undriven problem, verifies the first-order expansions of the
//! profiles and of both linearized operators, classifies the stability
//! spectrum (the two real eigenvalues 0 and -2 alpha plus the vertical line
//! Re lambda = -alpha on the stable branch, a single sqrt(h) unstable
//! eigenvalue on the other), reproduces the elliptic-integral identities
//! behind the inverse-operator inner products, and integrates the full
//! time-dependent equation to confirm the spectral verdicts dynamically.

pub mod cnoidal;
pub mod elliptic;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod identities;
mod linalg;
pub mod perturbation;
pub mod profile;
pub mod quad;
pub mod spectra;

pub use cnoidal::{base_wave, quartic_roots, wave_from_roots, BaseWaveParams, QuarticRoots};
pub use elliptic::{complete_integrals, jacobi_sn_cn_dn, EllipticModulus};
pub use error::{KerrError, Result};
pub use evolve::{measure_growth_rate, EvolutionRun};
pub use grid::{
    assemble_full_linearization, assemble_scalar_operator, solve_on_complement,
    LinearOperatorMatrix, OperatorKind, PeriodicGrid,
};
pub use identities::{identity_report, IdentityReport};
pub use perturbation::{
    first_order_correction, lemma_expansions, predicted_eigenvalues, ExpansionReport,
};
pub use profile::{
    continue_branch, newton_solve, nonexistence_certificate, small_branch, Branch, WaveProfile,
};
pub use spectra::{full_spectrum, index_counts, krein_signature, SpectrumReport};
