//! Numerical potential theory on the d-sphere for Riesz and logarithmic kernels.
//!
//! The crate computes, with closed forms validated against independent
//! quadrature oracles:
//!
//! * the Riesz s-potential and s-energy of the uniform (normalized) surface
//!   measure on the unit sphere in R^{d+1}, together with derivative and
//!   convexity diagnostics ([`potential`]);
//! * the signed equilibrium on the full sphere under the external field of a
//!   point charge, the four Gonchar functions, and the critical distance at
//!   which the equilibrium first fails to be a positive measure, for every
//!   combination of charge sign, source side and kernel regime, including the
//!   logarithmic kernel ([`sphere`]);
//! * the four Gonchar polynomial families with exact rational coefficients,
//!   their complex zeros, structural identities and trinomial/force-field
//!   analysis ([`poly`]);
//! * signed and extremal equilibria on spherical caps for a negative charge
//!   below the South Pole: balayage densities and norms, the Mhaskar-Saff type
//!   functional, the critical cap, and the exceptional kernel s = d-2 with its
//!   uniform boundary charge ([`cap`]).
//!
//! All operations are pure functions; grids may be swept concurrently.

pub mod cap;
pub mod config;
pub mod poly;
pub mod potential;
pub mod quad;
pub mod specfun;
pub mod sphere;
pub mod verify;

pub use cap::{CapConfig, CapState};
pub use config::Tolerances;
pub use poly::{RationalPoly, RootSet};
pub use potential::{EvalMethod, EvalReport, Regime, RieszParams, SParam};
pub use sphere::{CriticalKind, CriticalResult, FieldConfig, GoncharKind, Side};

/// Errors shared by the numerical modules.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An argument is outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The lower hypergeometric parameter hits a non-positive integer before
    /// the series terminates.
    #[error("hypergeometric pole: c = {0} is a non-positive integer reached by the series")]
    PoleAtC(f64),
    /// A series or iteration failed to converge within its budget.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// A bracketing root solver could not locate a sign change.
    #[error("solver failure: {0}")]
    SolverFailure(String),
    /// Family/charge/side combination does not match the requested kind.
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    /// Sign change absent on the requested interval.
    #[error("no sign change on [{0}, {1}]")]
    NoSignChange(f64, f64),
    /// An exact identity failed at a sample point.
    #[error("identity violation: {0}")]
    IdentityViolation(String),
    /// A zero-inclusion sector does not contain the expected root count.
    #[error("inclusion violation: {0}")]
    InclusionViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
