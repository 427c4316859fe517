//! Error type shared across the core modules.

use alloc::string::String;
use core::fmt;

/// Errors produced by model ingestion, synthesis, and the solvers.
///
/// Subsystem indices in messages are 1-based, matching the labels used in
/// config files.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Config text failed to parse. Carries the serde message with location.
    Parse(String),
    /// A block matrix has dimensions inconsistent with the declared
    /// subsystem sizes; `(i, j)` are 1-based subsystem labels.
    DimensionMismatch { i: usize, j: usize, detail: String },
    /// A covariance (or weight) matrix is not symmetric positive
    /// semidefinite where required.
    NotPsd { what: String, min_eig: f64 },
    /// A constraint polytope does not contain the origin in its interior,
    /// has mismatched row counts, or has a zero facet row.
    BadPolytope { subsystem: usize, detail: String },
    /// Vector length does not match the expected dimension.
    LengthMismatch { expected: usize, got: usize },
    /// Eigendecomposition could not run (non-finite entries).
    NonFinite(String),
    /// A spectral-radius precondition (`rho < 1`) is violated.
    SpectralRadius { rho: f64, context: String },
    /// An SDP-backed synthesis problem was reported infeasible.
    SynthesisInfeasible { what: String, detail: String },
    /// Riccati fixed-point iteration did not converge within its cap.
    RiccatiDiverged { residual: f64 },
    /// Constraint tightening emptied a set; names the offending facet.
    EmptyTightening { subsystem: usize, facet: usize, offset: f64 },
    /// The MPC problem is infeasible at `k = 0`, where Mode 2 has no
    /// fallback solution.
    InitialInfeasible,
    /// Lipschitz estimation found too few feasible sample pairs.
    TooFewSamples { found: usize, requested: usize },
    /// Catch-all for solver-internal failures (singular KKT systems and the
    /// like) that indicate a malformed problem rather than infeasibility.
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(msg) => write!(f, "config parse error: {msg}"),
            Error::DimensionMismatch { i, j, detail } => {
                write!(f, "dimension mismatch in block ({i}, {j}): {detail}")
            }
            Error::NotPsd { what, min_eig } => {
                write!(f, "{what} is not positive semidefinite (min eigenvalue {min_eig:.3e})")
            }
            Error::BadPolytope { subsystem, detail } => {
                write!(f, "invalid polytope for subsystem {subsystem}: {detail}")
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "vector length mismatch: expected {expected}, got {got}")
            }
            Error::NonFinite(what) => write!(f, "non-finite entries in {what}"),
            Error::SpectralRadius { rho, context } => {
                write!(f, "spectral radius precondition violated ({context}: rho = {rho:.6})")
            }
            Error::SynthesisInfeasible { what, detail } => {
                write!(f, "{what} synthesis infeasible: {detail}")
            }
            Error::RiccatiDiverged { residual } => {
                write!(f, "Riccati iteration did not converge (residual {residual:.3e})")
            }
            Error::EmptyTightening { subsystem, facet, offset } => {
                write!(
                    f,
                    "tightened constraint set of subsystem {subsystem} is empty: \
                     facet {facet} offset became {offset:.6}"
                )
            }
            Error::InitialInfeasible => {
                write!(f, "MPC problem infeasible at k = 0 (no Mode-2 fallback exists)")
            }
            Error::TooFewSamples { found, requested } => {
                write!(f, "too few feasible samples: {found} of {requested} requested")
            }
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
