//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum KerrError {
    /// An argument fell outside the domain of a special function or wave family.
    #[error("domain error in {what}: {details}")]
    Domain { what: &'static str, details: String },

    /// Grid and sample vector (or two grids) do not match.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The quartic z^4 - z^2 + 2hz + c left the four-real-roots regime.
    #[error("root regime error: {0}")]
    RootRegime(String),

    /// A constrained solve was asked for a right-hand side with a component
    /// along the operator kernel.
    #[error("solvability error: rhs has component {component:.3e} along kernel vector {index}")]
    Solvability { index: usize, component: f64 },

    /// An operator handed to a routine that requires self-adjointness was not
    /// symmetric.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A constrained solve finished with residual above its contract.
    #[error("constrained solve residual {residual:.3e} exceeds {limit:.3e}")]
    SolveResidual { residual: f64, limit: f64 },

    /// Newton iteration failed to converge.
    #[error("Newton did not converge after {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// alpha0 outside the admissible window of the O(1) branch.
    #[error("admissibility violation: alpha0 = {alpha0} not in (0, {bound})")]
    Admissibility { alpha0: f64, bound: f64 },

    /// Branch continuation stopped before reaching all targets.
    #[error("continuation breakdown at h = {at_h}: {reason} (last good h: {last_good})")]
    ContinuationBreakdown {
        at_h: f64,
        last_good: String,
        reason: String,
    },

    /// The dense eigensolver did not converge.
    #[error("eigensolver failed: {0}")]
    EigenFailure(String),

    /// A Krein signature was requested for an eigenvalue that is not simple.
    #[error("eigenvalue {mu} is not simple: {count} spectrum points within cluster tolerance")]
    Multiplicity { mu: String, count: usize },

    /// Time integration produced a non-finite state.
    #[error("blow-up detected: state became non-finite at t = {last_finite_t}")]
    BlowUp { last_finite_t: f64 },

    /// A rate fit was requested on a history without enough dynamic range.
    #[error("insufficient dynamic range for rate fit: {0}")]
    InsufficientRange(String),

    /// A quadrature integrand degenerated (e.g. phi0' vanishes identically).
    #[error("degenerate integrand: {0}")]
    Degenerate(String),

    /// Invalid argument outside the scenarios above.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, KerrError>;
