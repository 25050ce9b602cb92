//! The Riesz s-potential and s-energy of the uniform measure on the unit
//! d-sphere, logarithmic analogues, derivatives and convexity diagnostics.
//!
//! Conventions: the sphere is the unit sphere in R^{d+1} carrying the
//! normalized surface measure; `R` is the distance of the evaluation point
//! from the center. The kernel is 1/r^s with 0 < s < d (potential-theoretic
//! regime) or log(1/r). The potential is radial, so everything reduces to
//! functions of R.

use crate::config::{QUAD_TOL, SERIES_TOL};
use crate::quad::{adaptive_gk_split, QuadResult};
use crate::specfun::{digamma, elliptic_e, elliptic_k, gauss_2f1_tol, ln_gamma, HyperParams};
use crate::{Error, Result};
use serde::Serialize;

/// Kernel parameter: Riesz exponent in (0, d) or the logarithmic marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SParam {
    Riesz(f64),
    Log,
}

/// Monotonicity regime of the kernel on the ball, governed by s vs d-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Superharmonic,
    Harmonic,
    Subharmonic,
}

/// Dimension and kernel parameter of a potential problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszParams {
    pub d: u32,
    pub s: SParam,
}

impl RieszParams {
    /// Riesz kernel with 0 < s < d, d >= 2.
    pub fn new(d: u32, s: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension d = {d} must be >= 2")));
        }
        if !(s > 0.0 && s < d as f64) {
            return Err(Error::Domain(format!(
                "Riesz parameter s = {s} outside (0, {d})"
            )));
        }
        Ok(RieszParams {
            d,
            s: SParam::Riesz(s),
        })
    }

    /// Logarithmic kernel marker.
    pub fn log(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension d = {d} must be >= 2")));
        }
        Ok(RieszParams { d, s: SParam::Log })
    }

    /// The Riesz exponent, or an error for the logarithmic marker.
    pub fn riesz_s(&self) -> Result<f64> {
        match self.s {
            SParam::Riesz(s) => Ok(s),
            SParam::Log => Err(Error::Domain(
                "operation requires a Riesz exponent, got the logarithmic kernel".into(),
            )),
        }
    }

    pub fn regime(&self) -> Regime {
        match self.s {
            SParam::Log => Regime::Superharmonic,
            SParam::Riesz(s) => {
                let h = self.d as f64 - 1.0;
                if (s - h).abs() < 1e-12 {
                    Regime::Harmonic
                } else if s < h {
                    Regime::Superharmonic
                } else {
                    Regime::Subharmonic
                }
            }
        }
    }
}

/// How a potential value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EvalMethod {
    ClosedForm,
    Series,
    Quadrature,
    EllipticForm,
    LogSeries,
}

/// Numeric caveat attached to an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EvalWarning {
    /// Series argument close to 1; many terms were needed.
    SlowConvergence,
    /// Quadrature near the R = 1 singularity; accuracy degraded.
    AccuracyLoss,
}

/// Value plus provenance: the method tag reflects the code path taken.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvalReport {
    pub value: f64,
    pub method: EvalMethod,
    pub err_estimate: f64,
    pub warning: Option<EvalWarning>,
}

impl EvalReport {
    fn new(value: f64, method: EvalMethod, err_estimate: f64) -> Self {
        EvalReport {
            value,
            method,
            err_estimate,
            warning: None,
        }
    }

    fn with_warning(mut self, w: EvalWarning) -> Self {
        self.warning = Some(w);
        self
    }
}

/// Points within this distance of R = 1 evaluate on the sphere itself,
/// where both hypergeometric branches degrade.
const R_ONE_BAND: f64 = 1e-12;

/// The s-energy of the unit d-sphere:
/// `W_s = Gamma(d) Gamma((d-s)/2) / (2^s Gamma(d/2) Gamma(d - s/2))`.
pub fn riesz_energy(p: &RieszParams) -> Result<f64> {
    let d = p.d as f64;
    let s = p.riesz_s()?;
    let ln = ln_gamma(d)? + ln_gamma((d - s) / 2.0)?
        - s * std::f64::consts::LN_2
        - ln_gamma(d / 2.0)?
        - ln_gamma(d - s / 2.0)?;
    Ok(ln.exp())
}

/// The logarithmic energy of the unit d-sphere:
/// `-log 2 + [psi(d) - psi(d/2)] / 2`.
pub fn log_energy(d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension d = {d} must be >= 2")));
    }
    let df = d as f64;
    Ok(-std::f64::consts::LN_2 + (digamma(df)? - digamma(df / 2.0)?) / 2.0)
}

/// Surface-measure weight ratio `omega_{d-1}/omega_d = Gamma((d+1)/2) /
/// (sqrt(pi) Gamma(d/2))`, kept in log-gamma form to survive large d.
pub fn omega_ratio(d: u32) -> f64 {
    let df = d as f64;
    (ln_gamma((df + 1.0) / 2.0).unwrap()
        - 0.5 * std::f64::consts::PI.ln()
        - ln_gamma(df / 2.0).unwrap())
    .exp()
}

/// The hypergeometric factor of the symmetric potential representation,
/// `2F1(s/2, d/2; d; 4R/(R+1)^2)`; invariant under R -> 1/R.
pub fn sigma_hypergeometric_factor(p: &RieszParams, r: f64) -> Result<f64> {
    let d = p.d as f64;
    let s = p.riesz_s()?;
    let z = 4.0 * r / ((r + 1.0) * (r + 1.0));
    gauss_2f1_tol(HyperParams::new(s / 2.0, d / 2.0, d, z), SERIES_TOL)
}

/// `U_s(R)`: the s-potential of the uniform sphere measure at distance R
/// from the center, via the quadratic-transform branch forms
/// `2F1(-(d-1-s)/2, s/2; (d+1)/2; R^2)` inside and `R^{-s} 2F1(...; R^{-2})`
/// outside, with the sphere energy on the branch point.
pub fn potential_sigma(p: &RieszParams, r: f64) -> Result<EvalReport> {
    let d = p.d as f64;
    let s = p.riesz_s()?;
    if r < 0.0 {
        return Err(Error::Domain(format!("radius R = {r} must be >= 0")));
    }
    if (r - 1.0).abs() < R_ONE_BAND {
        return Ok(EvalReport::new(
            riesz_energy(p)?,
            EvalMethod::ClosedForm,
            1e-15,
        ));
    }
    let a = -(d - 1.0 - s) / 2.0;
    let b = s / 2.0;
    let c = (d + 1.0) / 2.0;
    let terminating = a <= 0.0 && a == a.floor();
    let method = if terminating || (s - (d - 1.0)).abs() < 1e-12 {
        EvalMethod::ClosedForm
    } else {
        EvalMethod::Series
    };
    let value = if r < 1.0 {
        gauss_2f1_tol(HyperParams::new(a, b, c, r * r), SERIES_TOL)?
    } else {
        r.powf(-s) * gauss_2f1_tol(HyperParams::new(a, b, c, 1.0 / (r * r)), SERIES_TOL)?
    };
    Ok(EvalReport::new(value, method, SERIES_TOL * value.abs()))
}

/// Logarithmic potential of the uniform sphere measure,
/// `log(1/(R+1)) + (1/2) sum_k (d/2)_k / ((d)_k k) (4R)^k / (R+1)^{2k}`.
pub fn potential_sigma_log(d: u32, r: f64) -> Result<EvalReport> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension d = {d} must be >= 2")));
    }
    if r < 0.0 {
        return Err(Error::Domain(format!("radius R = {r} must be >= 0")));
    }
    let df = d as f64;
    let x = 4.0 * r / ((r + 1.0) * (r + 1.0));
    let lead = (1.0 / (r + 1.0)).ln();
    if x == 0.0 {
        return Ok(EvalReport::new(lead, EvalMethod::LogSeries, 1e-16));
    }
    const MAX: usize = 1_000_000;
    // a_k = (d/2)_k / ((d)_k k) x^k; a_1 = (d/2)/d * x = x/2
    let mut a_k = x / 2.0;
    let mut sum = a_k;
    let mut k = 1usize;
    let mut slow = false;
    loop {
        let kf = k as f64;
        a_k *= x * (df / 2.0 + kf) / (df + kf) * kf / (kf + 1.0);
        sum += a_k;
        k += 1;
        if a_k.abs() <= SERIES_TOL * sum.abs().max(1e-300) {
            break;
        }
        if k >= MAX {
            slow = true;
            break;
        }
    }
    let value = lead + 0.5 * sum;
    let mut rep = EvalReport::new(
        value,
        EvalMethod::LogSeries,
        SERIES_TOL * value.abs().max(1.0),
    );
    if slow || x > 1.0 - 1e-6 {
        rep = rep.with_warning(EvalWarning::SlowConvergence);
    }
    Ok(rep)
}

/// Independent quadrature oracle for [`potential_sigma`]:
/// `(omega_{d-1}/omega_d) int_{-1}^1 (1-t^2)^{d/2-1} (R^2 - 2Rt + 1)^{-s/2} dt`
/// by adaptive Gauss-Kronrod bisection, split at the clipped kernel minimum.
pub fn potential_sigma_quadrature(p: &RieszParams, r: f64) -> Result<EvalReport> {
    potential_sigma_quadrature_tol(p, r, QUAD_TOL)
}

/// [`potential_sigma_quadrature`] with an explicit relative tolerance.
pub fn potential_sigma_quadrature_tol(p: &RieszParams, r: f64, tol: f64) -> Result<EvalReport> {
    let d = p.d as f64;
    let s = p.riesz_s()?;
    if r < 0.0 {
        return Err(Error::Domain(format!("radius R = {r} must be >= 0")));
    }
    let ratio = omega_ratio(p.d);
    let integrand = |t: f64| {
        let w = (1.0 - t * t).max(0.0).powf(d / 2.0 - 1.0);
        w * (r * r - 2.0 * r * t + 1.0).powf(-s / 2.0)
    };
    // kernel distance is minimal at t* = (R^2+1)/(2R) >= 1, clipped into range
    let mut points = vec![-1.0f64, 1.0];
    if r > 0.0 {
        let tstar = ((r * r + 1.0) / (2.0 * r)).min(1.0).max(-1.0);
        if tstar > -1.0 && tstar < 1.0 {
            points.insert(1, tstar);
        }
    }
    // pre-split near the upper endpoint where the integrand varies fastest
    if r > 0.5 && r < 2.0 && r != 1.0 {
        points.insert(1, 0.5);
        points.insert(2, 0.9);
        points.insert(3, 0.99);
    }
    // relative-only target: the potential decays like R^{-s}, and the
    // closed-form comparisons are relative
    let QuadResult {
        value,
        err_estimate,
        converged,
    } = adaptive_gk_split(integrand, &points, f64::MIN_POSITIVE, tol);
    let mut rep = EvalReport::new(ratio * value, EvalMethod::Quadrature, ratio * err_estimate);
    if !converged || (r - 1.0).abs() < 1e-6 {
        rep = rep.with_warning(EvalWarning::AccuracyLoss);
    }
    Ok(rep)
}

/// Quadrature route for the logarithmic potential:
/// `-(1/2) (omega_{d-1}/omega_d) int_{-1}^1 (1-t^2)^{d/2-1} ln(R^2 - 2Rt + 1) dt`.
pub fn potential_sigma_log_quadrature(d: u32, r: f64) -> Result<EvalReport> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension d = {d} must be >= 2")));
    }
    if r < 0.0 {
        return Err(Error::Domain(format!("radius R = {r} must be >= 0")));
    }
    let df = d as f64;
    let ratio = omega_ratio(d);
    let q = adaptive_gk_split(
        |t: f64| (1.0 - t * t).max(0.0).powf(df / 2.0 - 1.0) * (r * r - 2.0 * r * t + 1.0).ln(),
        &[-1.0, 0.5, 0.9, 0.99, 1.0],
        QUAD_TOL,
        QUAD_TOL,
    );
    let mut rep = EvalReport::new(
        -0.5 * ratio * q.value,
        EvalMethod::Quadrature,
        0.5 * ratio * q.err_estimate,
    );
    if !q.converged || (r - 1.0).abs() < 1e-6 {
        rep = rep.with_warning(EvalWarning::AccuracyLoss);
    }
    Ok(rep)
}

/// Hard-coded closed forms of the potential.
///
/// Available for the harmonic kernel (`R^{1-d}` outside, 1 inside), the
/// terminating family s = d-1-2m, the rational-plus-log forms at
/// (d, s) = (4, 2), (6, 4), (6, 2), and the interior elliptic-integral form
/// at (d, s) = (3, 1). Returns `None` elsewhere.
pub fn potential_closed_special(p: &RieszParams, r: f64) -> Result<Option<EvalReport>> {
    let d = p.d as f64;
    let s = p.riesz_s()?;
    if r < 0.0 {
        return Err(Error::Domain(format!("radius R = {r} must be >= 0")));
    }
    // harmonic: mean value / Faraday cage
    if (s - (d - 1.0)).abs() < 1e-12 {
        let value = if r <= 1.0 { 1.0 } else { r.powf(1.0 - d) };
        return Ok(Some(EvalReport::new(value, EvalMethod::ClosedForm, 1e-16)));
    }
    // rational + log forms for even d, even d - s
    let log_term = |r: f64| (((r - 1.0) * (r - 1.0)) / ((r + 1.0) * (r + 1.0))).ln();
    match (p.d, s) {
        (4, x) if x == 2.0 => {
            if (r - 1.0).abs() < R_ONE_BAND {
                return Ok(Some(EvalReport::new(
                    riesz_energy(p)?,
                    EvalMethod::ClosedForm,
                    1e-15,
                )));
            }
            let r2 = r * r;
            let value = 3.0 / 8.0 * (r2 + 1.0) / r2
                + 3.0 / 32.0 * (r2 - 1.0) * (r2 - 1.0) / (r2 * r) * log_term(r);
            return Ok(Some(EvalReport::new(value, EvalMethod::ClosedForm, 1e-14)));
        }
        (6, x) if x == 4.0 => {
            if (r - 1.0).abs() < R_ONE_BAND {
                return Ok(Some(EvalReport::new(
                    riesz_energy(p)?,
                    EvalMethod::ClosedForm,
                    1e-15,
                )));
            }
            let r2 = r * r;
            let value = 15.0 / 32.0 * (r2 * r2 - 2.0 / 3.0 * r2 + 1.0) / (r2 * r2)
                + 15.0 / 128.0 * (r2 + 1.0) * (r2 - 1.0) * (r2 - 1.0) / (r2 * r2 * r) * log_term(r);
            return Ok(Some(EvalReport::new(value, EvalMethod::ClosedForm, 1e-14)));
        }
        (6, x) if x == 2.0 => {
            if (r - 1.0).abs() < R_ONE_BAND {
                return Ok(Some(EvalReport::new(
                    riesz_energy(p)?,
                    EvalMethod::ClosedForm,
                    1e-15,
                )));
            }
            let r2 = r * r;
            let q = (r2 - 1.0) * (r2 - 1.0);
            let value = -15.0 / 128.0 * (r2 + 1.0) * (r2 * r2 - 14.0 / 3.0 * r2 + 1.0) / (r2 * r2)
                - 15.0 / 512.0 * q * q / (r2 * r2 * r) * log_term(r);
            return Ok(Some(EvalReport::new(value, EvalMethod::ClosedForm, 1e-14)));
        }
        (3, x) if x == 1.0 && r < 1.0 => {
            // interior elliptic form; limit 1 at the center
            if r == 0.0 {
                return Ok(Some(EvalReport::new(1.0, EvalMethod::EllipticForm, 1e-16)));
            }
            let m = r * r;
            let value = 4.0 / (3.0 * std::f64::consts::PI)
                * ((1.0 + m) / m * elliptic_e(m)? - (1.0 - m) / m * elliptic_k(m)?);
            return Ok(Some(EvalReport::new(
                value,
                EvalMethod::EllipticForm,
                1e-13,
            )));
        }
        _ => {}
    }
    // terminating polynomial family s = d - 1 - 2m
    let two_m = d - 1.0 - s;
    if two_m > 0.0 && (two_m / 2.0 - (two_m / 2.0).round()).abs() < 1e-12 {
        let m = (two_m / 2.0).round() as usize;
        let c = (d + 1.0) / 2.0;
        let x = if r <= 1.0 { r * r } else { 1.0 / (r * r) };
        // terminating 2F1(-m, s/2; (d+1)/2; x)
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..m {
            let kf = k as f64;
            term *= (-(m as f64) + kf) * (s / 2.0 + kf) / ((c + kf) * (kf + 1.0)) * x;
            sum += term;
        }
        let value = if r <= 1.0 { sum } else { r.powf(-s) * sum };
        return Ok(Some(EvalReport::new(value, EvalMethod::ClosedForm, 1e-15)));
    }
    Ok(None)
}

/// Radial derivative of the potential, for R > 0, R != 1.
///
/// Two differentiation formulas share the shape
/// `-s U/(R+1) - s (R-1) h(R)`; the hypergeometric factor that stays finite
/// depends on the regime: parameters (d - s/2, d/2; 1+d) for d-2 < s < d and
/// (1 + d/2, 1 + s/2; 1 + d) for 0 < s < d - 2 (at s = d-2 both are
/// zero-balanced and the series is summed directly).
pub fn potential_derivative(p: &RieszParams, r: f64) -> Result<f64> {
    let d = p.d as f64;
    let s = p.riesz_s()?;
    if r <= 0.0 {
        return Err(Error::Domain(format!("radius R = {r} must be > 0")));
    }
    if (r - 1.0).abs() < R_ONE_BAND {
        return Err(Error::Domain(
            "derivative not defined on the branch point R = 1".into(),
        ));
    }
    let u = potential_sigma(p, r)?.value;
    let z = 4.0 * r / ((r + 1.0) * (r + 1.0));
    if s >= d - 2.0 {
        let f = gauss_2f1_tol(
            HyperParams::new(d - s / 2.0, d / 2.0, 1.0 + d, z),
            SERIES_TOL,
        )?;
        let pw = (r - 1.0) * ((r - 1.0).abs()).powf(d - s - 2.0);
        Ok(-s * u / (r + 1.0) - s * pw / (r + 1.0).powf(d + 1.0) * f)
    } else {
        let f = gauss_2f1_tol(
            HyperParams::new(1.0 + d / 2.0, 1.0 + s / 2.0, 1.0 + d, z),
            SERIES_TOL,
        )?;
        Ok(-s * u / (r + 1.0) - s * (r - 1.0) / (r + 1.0).powf(s + 3.0) * f)
    }
}

/// Landscape checks of the potential on a radius grid.
///
/// Verifies the regime-dependent monotonicity on (0, 1), the universal decay
/// on (1, oo), the location/value of the maximum, the cusp in the strictly
/// subharmonic case, and (for 0 < s < d-2) the limit of the second
/// derivative at R = 1 against `(s/4)[s + 1 - d/(d-2-s)] W_s`.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub regime: Regime,
    pub cusp_detected: bool,
    pub second_derivative_limit: Option<(f64, f64)>,
    /// Violated properties with the offending grid point; empty means pass.
    pub violations: Vec<String>,
}

pub fn regime_diagnostics(p: &RieszParams, grid: &[f64]) -> Result<DiagnosticsReport> {
    let d = p.d as f64;
    let s = p.riesz_s()?;
    let regime = p.regime();
    let mut violations = Vec::new();
    let eval = |r: f64| potential_sigma(p, r).map(|e| e.value);

    let mut inside: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&r| r > 0.0 && r < 1.0)
        .collect();
    inside.sort_by(f64::total_cmp);
    let mut outside: Vec<f64> = grid.iter().copied().filter(|&r| r > 1.0).collect();
    outside.sort_by(f64::total_cmp);

    for w in outside.windows(2) {
        if eval(w[1])? >= eval(w[0])? {
            violations.push(format!("not decreasing on (1,inf) at R = {}", w[1]));
        }
    }
    for w in inside.windows(2) {
        let (u0, u1) = (eval(w[0])?, eval(w[1])?);
        match regime {
            Regime::Superharmonic => {
                if u1 >= u0 {
                    violations.push(format!("not decreasing on (0,1) at R = {}", w[1]));
                }
            }
            Regime::Harmonic => {
                if (u1 - 1.0).abs() > 1e-12 || (u0 - 1.0).abs() > 1e-12 {
                    violations.push(format!("not constant 1 on (0,1) at R = {}", w[1]));
                }
            }
            Regime::Subharmonic => {
                if u1 <= u0 {
                    violations.push(format!("not increasing on (0,1) at R = {}", w[1]));
                }
            }
        }
    }
    // maximum location and value
    match regime {
        Regime::Superharmonic => {
            let u0 = eval(0.0)?;
            if (u0 - 1.0).abs() > 1e-12 {
                violations.push(format!("U(0) = {u0}, expected 1"));
            }
            for &r in inside.iter().chain(outside.iter()) {
                if eval(r)? > 1.0 + 1e-12 {
                    violations.push(format!("U exceeds the central maximum at R = {r}"));
                }
            }
        }
        Regime::Subharmonic => {
            let w = riesz_energy(p)?;
            for &r in inside.iter().chain(outside.iter()) {
                if eval(r)? > w + 1e-12 {
                    violations.push(format!("U exceeds W_s at R = {r}"));
                }
            }
        }
        Regime::Harmonic => {}
    }
    // cusp in the strictly subharmonic case: derivative blows up with
    // opposite signs across R = 1
    let mut cusp_detected = false;
    if regime == Regime::Subharmonic {
        let dl = potential_derivative(p, 1.0 - 1e-6)?;
        let dr = potential_derivative(p, 1.0 + 1e-6)?;
        cusp_detected = dl > 1e2 && dr < -1e2;
        if !cusp_detected {
            violations.push(format!("no cusp at R = 1: U'(1-) = {dl}, U'(1+) = {dr}"));
        }
    }
    // second derivative limit at R = 1 for 0 < s < d - 2
    let mut second_derivative_limit = None;
    if s < d - 2.0 {
        let h = 1e-4;
        let numeric =
            (potential_derivative(p, 1.0 + h)? - potential_derivative(p, 1.0 - h)?) / (2.0 * h);
        let predicted = s / 4.0 * (s + 1.0 - d / (d - 2.0 - s)) * riesz_energy(p)?;
        second_derivative_limit = Some((numeric, predicted));
        if (numeric - predicted).abs() > 1e-4 * predicted.abs().max(1.0) {
            violations.push(format!(
                "second derivative at R = 1: numeric {numeric} vs predicted {predicted}"
            ));
        }
    }
    Ok(DiagnosticsReport {
        regime,
        cusp_detected,
        second_derivative_limit,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rp(d: u32, s: f64) -> RieszParams {
        RieszParams::new(d, s).unwrap()
    }

    #[test]
    fn energy_harmonic_equals_one() {
        assert_relative_eq!(riesz_energy(&rp(2, 1.0)).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(riesz_energy(&rp(4, 3.0)).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn energy_formula_vs_double_quadrature() {
        // low-precision oracle: W_s = int int |x-y|^{-s} dsigma dsigma reduces
        // to the radial integral of U_s over the sphere, i.e. U_s(1).
        let p = rp(3, 1.5);
        let w = riesz_energy(&p).unwrap();
        let ratio = omega_ratio(3);
        let oracle = crate::quad::tanh_sinh(
            |t, da, _| {
                let dist2 = 2.0 - 2.0 * t;
                let _ = da;
                (1.0 - t * t).max(0.0).powf(0.5) * dist2.powf(-0.75)
            },
            -1.0,
            1.0,
            1e-9,
        )
        .value
            * ratio;
        assert_relative_eq!(w, oracle, max_relative = 1e-7);
    }

    #[test]
    fn log_energy_values() {
        assert_relative_eq!(
            log_energy(2).unwrap(),
            0.5 - std::f64::consts::LN_2,
            epsilon = 1e-14
        );
        // psi(4) - psi(2) = 1/2 + 1/3 by the recurrence
        assert_relative_eq!(
            log_energy(4).unwrap(),
            -std::f64::consts::LN_2 + (0.5 + 1.0 / 3.0) / 2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn log_energy_is_s_derivative_of_riesz_energy() {
        // central difference of the gamma formula at s = +-1e-4
        for d in [2u32, 3, 5] {
            let df = d as f64;
            let w = |s: f64| -> f64 {
                (ln_gamma(df).unwrap() + ln_gamma((df - s) / 2.0).unwrap()
                    - s * std::f64::consts::LN_2
                    - ln_gamma(df / 2.0).unwrap()
                    - ln_gamma(df - s / 2.0).unwrap())
                .exp()
            };
            let h = 1e-4;
            let diff = (w(h) - w(-h)) / (2.0 * h);
            assert_relative_eq!(diff, log_energy(d).unwrap(), max_relative = 1e-6);
        }
    }

    #[test]
    fn potential_harmonic_closed_form() {
        let p = rp(3, 2.0);
        assert_relative_eq!(
            potential_sigma(&p, 2.0).unwrap().value,
            0.25,
            epsilon = 1e-13
        );
        // R = 0 for arbitrary parameters
        assert_relative_eq!(
            potential_sigma(&rp(5, 2.7), 0.0).unwrap().value,
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn potential_branch_continuity() {
        for &(d, s) in &[(2u32, 1.3f64), (3, 1.0), (4, 3.5), (5, 2.2)] {
            let p = rp(d, s);
            let w = riesz_energy(&p).unwrap();
            let mut prev_lo = f64::INFINITY;
            let mut prev_hi = f64::INFINITY;
            for &eps in &[1e-2, 1e-4, 1e-6] {
                let lo = (potential_sigma(&p, 1.0 - eps).unwrap().value - w).abs();
                let hi = (potential_sigma(&p, 1.0 + eps).unwrap().value - w).abs();
                assert!(lo < prev_lo && hi < prev_hi, "d={d} s={s} eps={eps}");
                prev_lo = lo;
                prev_hi = hi;
            }
        }
    }

    #[test]
    fn quadrature_matches_harmonic_value() {
        let p = rp(2, 1.0);
        let rep = potential_sigma_quadrature(&p, 2.0).unwrap();
        assert_relative_eq!(rep.value, 0.5, epsilon = 1e-10);
        assert_eq!(rep.method, EvalMethod::Quadrature);
    }

    #[test]
    fn quadrature_matches_d7_special_form() {
        // U_2 on S^7 at R = 2 equals (16 - 2 + 1/10)/64
        let p = rp(7, 2.0);
        let rep = potential_sigma_quadrature(&p, 2.0).unwrap();
        assert_relative_eq!(rep.value, 14.1 / 64.0, max_relative = 1e-9);
        assert_relative_eq!(
            potential_sigma_quadrature(&rp(4, 2.2), 0.0).unwrap().value,
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn log_potential_series_and_quadrature() {
        assert_eq!(potential_sigma_log(3, 0.0).unwrap().value, 0.0);
        for &(d, r) in &[(2u32, 3.0f64), (4, 0.5)] {
            let expected = potential_sigma_log_quadrature(d, r).unwrap().value;
            assert_relative_eq!(
                potential_sigma_log(d, r).unwrap().value,
                expected,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn special_forms_match_displayed_values() {
        // (4,2) at R = 2: (3/8)(5/4) + (3/32)(9/8) log(1/9)
        let rep = potential_closed_special(&rp(4, 2.0), 2.0).unwrap().unwrap();
        let expect = 3.0 / 8.0 * 1.25 + 3.0 / 32.0 * 9.0 / 8.0 * (1.0f64 / 9.0).ln();
        assert_relative_eq!(rep.value, expect, max_relative = 1e-14);
        // (3,1) at R = 1/2: elliptic combination with m = 1/4
        let rep = potential_closed_special(&rp(3, 1.0), 0.5).unwrap().unwrap();
        let expect = 4.0 / (3.0 * std::f64::consts::PI)
            * (1.25 / 0.25 * elliptic_e(0.25).unwrap() - 0.75 / 0.25 * elliptic_k(0.25).unwrap());
        assert_relative_eq!(rep.value, expect, max_relative = 1e-14);
        assert_eq!(rep.method, EvalMethod::EllipticForm);
        // (6,4) continuity at R = 1: the log term vanishes
        let rep = potential_closed_special(&rp(6, 4.0), 1.0).unwrap().unwrap();
        assert_relative_eq!(
            rep.value,
            riesz_energy(&rp(6, 4.0)).unwrap(),
            epsilon = 1e-14
        );
        // no special form available
        assert!(potential_closed_special(&rp(3, 1.7), 2.0)
            .unwrap()
            .is_none());
    }

    #[test]
    fn special_forms_agree_with_generic_evaluator() {
        let cases: &[(u32, f64, &[f64])] = &[
            (4, 2.0, &[0.5, 0.8, 1.25, 2.0, 5.0]),
            (6, 4.0, &[0.5, 0.8, 1.25, 2.0, 5.0]),
            (6, 2.0, &[0.5, 0.8, 1.25, 2.0, 5.0]),
            (3, 1.0, &[0.1, 0.3, 0.5, 0.7, 0.9]),
            (7, 2.0, &[0.5, 0.8, 1.25, 2.0, 5.0]),
            (3, 2.0, &[0.3, 0.8, 1.5, 2.0, 5.0]),
        ];
        for &(d, s, radii) in cases {
            let p = rp(d, s);
            for &r in radii {
                let special = potential_closed_special(&p, r).unwrap().unwrap().value;
                let generic = potential_sigma(&p, r).unwrap().value;
                assert_relative_eq!(special, generic, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn derivative_harmonic_and_finite_differences() {
        // s = d-1, R > 1: d/dR R^{1-d} = (1-d) R^{-d}
        let p = rp(3, 2.0);
        assert_relative_eq!(
            potential_derivative(&p, 2.0).unwrap(),
            -2.0 / 8.0,
            max_relative = 1e-12
        );
        // central differences at 50 random parameter draws
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let d = rng.gen_range(2u32..=7);
            let s = rng.gen_range(0.15..d as f64 - 0.1);
            let r = loop {
                let r = rng.gen_range(0.1..3.0);
                if (r - 1.0f64).abs() > 0.05 {
                    break r;
                }
            };
            let p = rp(d, s);
            let h = 1e-5;
            let fd = (potential_sigma(&p, r + h).unwrap().value
                - potential_sigma(&p, r - h).unwrap().value)
                / (2.0 * h);
            assert_relative_eq!(
                potential_derivative(&p, r).unwrap(),
                fd,
                max_relative = 1e-7
            );
        }
    }

    #[test]
    fn derivative_superharmonic_limit_at_one() {
        // U'(R) -> -(s/2) W_s as R -> 1 for 0 < s < d-1
        let p = rp(4, 1.5);
        let w = riesz_energy(&p).unwrap();
        for &r in &[1.0 - 1e-4, 1.0 + 1e-4] {
            assert_relative_eq!(
                potential_derivative(&p, r).unwrap(),
                -0.75 * w,
                max_relative = 1e-3
            );
        }
    }

    #[test]
    fn derivative_zero_balanced_kernel() {
        // s = d-2 makes both differentiation formulas zero-balanced; the
        // direct series must still match finite differences
        for &(d, r) in &[(4u32, 1.2f64), (4, 0.7), (5, 1.5), (6, 0.4)] {
            let p = rp(d, d as f64 - 2.0);
            let h = 1e-5;
            let fd = (potential_sigma(&p, r + h).unwrap().value
                - potential_sigma(&p, r - h).unwrap().value)
                / (2.0 * h);
            assert_relative_eq!(potential_derivative(&p, r).unwrap(), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn diagnostics_per_regime() {
        let grid: Vec<f64> = (1..100).map(|i| i as f64 * 0.05).collect();
        // subharmonic cusp
        let rep = regime_diagnostics(&rp(3, 2.5), &grid).unwrap();
        assert!(rep.cusp_detected, "{:?}", rep.violations);
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        // harmonic plateau
        let rep = regime_diagnostics(&rp(3, 2.0), &grid).unwrap();
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        // superharmonic with second-derivative limit (d=7, s=2 < d-2)
        let rep = regime_diagnostics(&rp(7, 2.0), &grid).unwrap();
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        let (num, pred) = rep.second_derivative_limit.unwrap();
        // for d=7, s=2 the limit is (1/2)(3 - 7/3) W = (1/3) W = 0.2
        assert_relative_eq!(pred, 0.2, max_relative = 1e-12);
        assert_relative_eq!(num, 0.2, max_relative = 1e-3);
    }

    #[test]
    fn d7_convexity_on_exterior() {
        // second differences of (R^4 - R^2/2 + 1/10)/R^6 are positive
        let f = |r: f64| (r.powi(4) - r * r / 2.0 + 0.1) / r.powi(6);
        let h = 1e-3;
        for i in 0..40 {
            let r = 1.05 + 0.25 * i as f64;
            let dd = f(r + h) - 2.0 * f(r) + f(r - h);
            assert!(dd > 0.0, "R = {r}");
            // matches the displayed second derivative 6((R^2-5/6)^2+1/180)/R^8
            let exact = 6.0 * ((r * r - 5.0 / 6.0).powi(2) + 1.0 / 180.0) / r.powi(8);
            assert_relative_eq!(dd / (h * h), exact, max_relative = 1e-4);
        }
    }

    #[test]
    fn inversion_invariance_of_hypergeometric_factor() {
        let p = rp(3, 1.7);
        for &r in &[0.2, 0.5, 0.9, 1.5, 4.0, 20.0] {
            let f1 = sigma_hypergeometric_factor(&p, r).unwrap();
            let f2 = sigma_hypergeometric_factor(&p, 1.0 / r).unwrap();
            assert_relative_eq!(f1, f2, max_relative = 1e-12);
        }
    }
}
