//! Tolerance configuration.
//!
//! Every tolerance used by the numerical kernels and by the verification
//! suite lives in one record, so the whole crate has a single tuning point.
//! The defaults reproduce the verification suite; overriding a field (for
//! example from a TOML file passed to the CLI) tightens or loosens the
//! corresponding checks.

use serde::Deserialize;

/// Relative tolerance for hypergeometric-type series summation.
pub const SERIES_TOL: f64 = 1e-14;
/// Absolute/relative tolerance for adaptive quadrature.
pub const QUAD_TOL: f64 = 1e-10;
/// Interval width at which bracketing bisection stops.
pub const BISECT_TOL: f64 = 1e-13;

/// All tolerances in one place.
///
/// The first three fields tune the numerical kernels; the rest are the
/// acceptance thresholds of the verification suite.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Series summation, relative (default `1e-14`).
    pub series: f64,
    /// Adaptive quadrature, absolute and relative (default `1e-10`).
    pub quadrature: f64,
    /// Bisection interval width (default `1e-13`).
    pub bisection: f64,

    /// Closed form vs quadrature agreement for the sphere potential.
    pub closed_vs_quadrature: f64,
    /// Hard-coded special forms vs the generic evaluator.
    pub special_forms: f64,
    /// Critical-distance checks against exact constants.
    pub critical_distance: f64,
    /// Cap balayage norms: closed form vs quadrature.
    pub cap_norms: f64,
    /// Total mass of cap equilibria.
    pub cap_mass: f64,
    /// Spread of the double-quadrature weighted potential on the cap.
    pub constancy: f64,
    /// Boundary-exponent slope fits.
    pub exponent_fit: f64,
    /// Polynomial root residual checks.
    pub root_residual: f64,
    /// Agreement of the s -> 0 limit with the logarithmic kernel.
    pub log_limit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            series: SERIES_TOL,
            quadrature: QUAD_TOL,
            bisection: BISECT_TOL,
            closed_vs_quadrature: 1e-8,
            special_forms: 1e-10,
            critical_distance: 1e-10,
            cap_norms: 1e-9,
            cap_mass: 1e-8,
            constancy: 1e-6,
            exponent_fit: 1e-2,
            root_residual: 1e-12,
            log_limit: 1e-4,
        }
    }
}
