//! Signed and extremal equilibria on spherical caps under a negative point
//! charge below the South Pole.
//!
//! The cap is `Sigma_t = { x in S^d : x . p <= t }`; the source sits at
//! b = (0, -R), R > 1, with charge q < 0. The signed equilibrium on the cap
//! decomposes into the balayages of the uniform measure (nu_t) and of the
//! point charge (eps_t):
//! `eta_t = (Phi_s(t)/W_s) nu_t - q eps_t`, where
//! `Phi_s(t) = W_s (1 + q ||eps_t||) / ||nu_t||` is the Mhaskar-Saff type
//! functional whose unique minimizer t_c identifies the extremal support.
//! The kernel band is d-2 < s < d; at s = d-2 (d >= 3) both balayages
//! acquire a component uniformly distributed on the cap boundary, and the
//! extremal density stays positive at the rim instead of vanishing.

use crate::config::QUAD_TOL;
use crate::potential::{
    potential_sigma, riesz_energy, EvalMethod, EvalReport, EvalWarning, RieszParams,
};
use crate::quad::tanh_sinh;
use crate::specfun::{gauss_2f1_regularized, inc_beta_reg, ln_gamma, HyperParams};
use crate::{Error, Result};
use serde::Serialize;

/// Kernel selector for cap problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CapKernel {
    /// Riesz exponent in (d-2, d).
    Riesz(f64),
    /// The boundary-charge case s = d-2 (d >= 3).
    Exceptional,
}

/// A cap problem instance: kernel, source radius R > 1, charge q < 0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CapConfig {
    pub d: u32,
    pub s: CapKernel,
    pub r_src: f64,
    pub q: f64,
}

impl CapConfig {
    pub fn new(d: u32, s: f64, r_src: f64, q: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension d = {d} must be >= 2")));
        }
        let df = d as f64;
        if !(s > df - 2.0 && s < df) {
            return Err(Error::Domain(format!(
                "cap kernel s = {s} outside ({}, {d})",
                df - 2.0
            )));
        }
        Self::validate_field(r_src, q)?;
        Ok(CapConfig {
            d,
            s: CapKernel::Riesz(s),
            r_src,
            q,
        })
    }

    /// The s = d-2 case; requires d >= 3.
    pub fn exceptional(d: u32, r_src: f64, q: f64) -> Result<Self> {
        if d < 3 {
            return Err(Error::Domain(format!(
                "exceptional kernel s = d-2 requires d >= 3, got {d}"
            )));
        }
        Self::validate_field(r_src, q)?;
        Ok(CapConfig {
            d,
            s: CapKernel::Exceptional,
            r_src,
            q,
        })
    }

    fn validate_field(r_src: f64, q: f64) -> Result<()> {
        if !(r_src > 1.0) {
            return Err(Error::Domain(format!(
                "source radius R = {r_src} must be > 1"
            )));
        }
        if !(q < 0.0) {
            return Err(Error::Domain(format!("charge q = {q} must be < 0")));
        }
        Ok(())
    }

    pub fn riesz_s(&self) -> Result<f64> {
        match self.s {
            CapKernel::Riesz(s) => Ok(s),
            CapKernel::Exceptional => Err(Error::Domain(
                "operation requires d-2 < s < d, got the exceptional kernel".into(),
            )),
        }
    }

    /// The kernel exponent, with s = d-2 for the exceptional case.
    pub fn effective_s(&self) -> f64 {
        match self.s {
            CapKernel::Riesz(s) => s,
            CapKernel::Exceptional => self.d as f64 - 2.0,
        }
    }

    /// Squared chordal distance from the source to altitude u.
    fn dist2(&self, u: f64) -> f64 {
        self.r_src * self.r_src + 2.0 * self.r_src * u + 1.0
    }
}

/// Snapshot of the cap equilibrium at height t.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CapState {
    pub t: f64,
    /// Value of the functional Phi at t (the constant weighted potential).
    pub phi: f64,
    pub nu_norm: f64,
    pub eps_norm: f64,
    /// Uniform boundary charge; zero except in the exceptional kernel.
    pub boundary_charge: f64,
    /// Set when t is the critical height, so the state describes the
    /// extremal (nonnegative) measure.
    pub is_extremal: bool,
}

fn check_band(d: u32, s: f64) -> Result<()> {
    let df = d as f64;
    if !(s > df - 2.0 && s < df) {
        return Err(Error::Domain(format!(
            "balayage closed forms require d-2 < s < d, got d = {d}, s = {s}"
        )));
    }
    Ok(())
}

/// Norm of the balayage of the uniform measure onto the cap:
/// `||nu_t|| = 1 - I((1-t)/2; d - s/2, s/2)`.
pub fn nu_norm(d: u32, s: f64, t: f64) -> Result<f64> {
    check_band(d, s)?;
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("cap height t = {t} outside [-1, 1]")));
    }
    let df = d as f64;
    Ok(1.0 - inc_beta_reg((1.0 - t) / 2.0, df - s / 2.0, s / 2.0)?)
}

/// Quadrature route for the same norm:
/// `2^{1-d} G(d)/(G(d-s/2) G(s/2)) int_{-1}^t (1+u)^{s/2-1} (1-u)^{d-s/2-1} du`.
pub fn nu_norm_quadrature(d: u32, s: f64, t: f64) -> Result<EvalReport> {
    check_band(d, s)?;
    let df = d as f64;
    let pre = ((1.0 - df) * std::f64::consts::LN_2 + ln_gamma(df)?
        - ln_gamma(df - s / 2.0)?
        - ln_gamma(s / 2.0)?)
    .exp();
    let q = tanh_sinh(
        |_u, da, db| {
            let one_minus = 2.0 - da; // 1 - u, from the stable distance
            let _ = db;
            da.powf(s / 2.0 - 1.0) * one_minus.powf(df - s / 2.0 - 1.0)
        },
        -1.0,
        t,
        QUAD_TOL,
    );
    let mut rep = EvalReport {
        value: pre * q.value,
        method: EvalMethod::Quadrature,
        err_estimate: pre * q.err_estimate,
        warning: None,
    };
    if !q.converged {
        rep.warning = Some(EvalWarning::AccuracyLoss);
    }
    Ok(rep)
}

/// Density of nu_t at altitude u in [-1, t), with respect to the weighted
/// measure `(omega_{d-1}/omega_d) (1-u^2)^{d/2-1} du dsigma_{d-1}`.
pub fn nu_density(d: u32, s: f64, t: f64, u: f64) -> Result<f64> {
    nu_density_impl(d, s, t, u, t - u)
}

fn nu_density_impl(d: u32, s: f64, t: f64, u: f64, tmu: f64) -> Result<f64> {
    check_band(d, s)?;
    if !(u >= -1.0 && tmu > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!(
            "nu density requires -1 <= u < t < 1, got u = {u}, t = {t}"
        )));
    }
    let df = d as f64;
    let pre = (ln_gamma(df / 2.0)? - ln_gamma(df - s / 2.0)?).exp();
    let shape = ((1.0 - t) / (1.0 - u)).powf(df / 2.0) * (tmu / (1.0 - t)).powf((s - df) / 2.0);
    let f = gauss_2f1_regularized(HyperParams::new(
        1.0,
        df / 2.0,
        1.0 - (df - s) / 2.0,
        tmu / (1.0 - u),
    ))?;
    Ok(pre * shape * f)
}

/// Norm of the balayage of the unit point charge at b onto the cap, by
/// adaptive quadrature of its 1-D integral form (the Appell-function route
/// is not expanded).
pub fn eps_norm(cfg: &CapConfig, t: f64) -> Result<EvalReport> {
    let s = cfg.riesz_s()?;
    eps_norm_at(cfg, s, t)
}

fn eps_norm_at(cfg: &CapConfig, s: f64, t: f64) -> Result<EvalReport> {
    let d = cfg.d;
    check_band(d, s)?;
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("cap height t = {t} outside [-1, 1]")));
    }
    let df = d as f64;
    let r = cfg.r_src;
    let w = riesz_energy(&RieszParams::new(d, s)?)?;
    let pre = ((1.0 - df) * std::f64::consts::LN_2 + ln_gamma(df)?
        - ln_gamma(df - s / 2.0)?
        - ln_gamma(s / 2.0)?)
    .exp()
        * (r - 1.0).powf(df - s)
        / w;
    let q = tanh_sinh(
        |u, da, _db| {
            let one_minus = 2.0 - da;
            da.powf(s / 2.0 - 1.0)
                * one_minus.powf(df - s / 2.0 - 1.0)
                * cfg.dist2(u).powf(-df / 2.0)
        },
        -1.0,
        t,
        QUAD_TOL,
    );
    let mut rep = EvalReport {
        value: pre * q.value,
        method: EvalMethod::Quadrature,
        err_estimate: pre * q.err_estimate,
        warning: None,
    };
    if !q.converged || rep.err_estimate > 1e-9 {
        rep.warning = Some(EvalWarning::AccuracyLoss);
    }
    Ok(rep)
}

/// Density of eps_t at altitude u in [-1, t). Same reference measure as
/// [`nu_density`]; q-independent (the balayage of a unit charge).
pub fn eps_density(cfg: &CapConfig, t: f64, u: f64) -> Result<f64> {
    eps_density_impl(cfg, t, u, t - u)
}

/// [`eps_density`] addressed by the distance to the cap boundary, for
/// callers that hold `t - u` to full precision (quadrature near the rim).
pub fn eps_density_rim(cfg: &CapConfig, t: f64, rim_dist: f64) -> Result<f64> {
    eps_density_impl(cfg, t, t - rim_dist, rim_dist)
}

fn eps_density_impl(cfg: &CapConfig, t: f64, u: f64, tmu: f64) -> Result<f64> {
    let s = cfg.riesz_s()?;
    let d = cfg.d;
    if !(u >= -1.0 && tmu > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!(
            "eps density requires -1 <= u < t < 1, got u = {u}, t = {t}"
        )));
    }
    let df = d as f64;
    let r = cfg.r_src;
    let r2 = cfg.dist2(t);
    let w = riesz_energy(&RieszParams::new(d, s)?)?;
    let pre = (ln_gamma(df / 2.0)? - ln_gamma(df - s / 2.0)?).exp() / w * (r - 1.0).powf(df - s)
        / r2.powf(df / 2.0);
    let shape = ((1.0 - t) / (1.0 - u)).powf(df / 2.0) * (tmu / (1.0 - t)).powf((s - df) / 2.0);
    let f = gauss_2f1_regularized(HyperParams::new(
        1.0,
        df / 2.0,
        1.0 - (df - s) / 2.0,
        (r + 1.0) * (r + 1.0) / r2 * tmu / (1.0 - u),
    ))?;
    Ok(pre * shape * f)
}

/// The functional `Phi_s(t) = W_s (1 + q ||eps_t||) / ||nu_t||`.
pub fn phi(cfg: &CapConfig, t: f64) -> Result<f64> {
    Ok(cap_state(cfg, t)?.phi)
}

/// Richardson limit s -> (d-2)+ of a norm, sampled at offsets 1e-6, 1e-9.
fn richardson_limit<G: Fn(f64) -> Result<f64>>(g: G, base: f64) -> Result<f64> {
    let (h1, h2) = (1e-6, 1e-9);
    let v1 = g(base + h1)?;
    let v2 = g(base + h2)?;
    Ok((h1 * v2 - h2 * v1) / (h1 - h2))
}

/// Balayage norms, functional value and boundary charge at height t.
///
/// For the exceptional kernel the norms are the s -> (d-2)+ limits of the
/// closed forms (two-point Richardson refinement), which the weak-star
/// convergence of the balayages justifies.
pub fn cap_state(cfg: &CapConfig, t: f64) -> Result<CapState> {
    if !(-1.0 < t && t <= 1.0) {
        return Err(Error::Domain(format!("cap height t = {t} outside (-1, 1]")));
    }
    let d = cfg.d;
    let df = d as f64;
    match cfg.s {
        CapKernel::Riesz(s) => {
            if t == 1.0 {
                return full_sphere_state(cfg, s);
            }
            let w = riesz_energy(&RieszParams::new(d, s)?)?;
            let nu = nu_norm(d, s, t)?;
            let eps = eps_norm(cfg, t)?.value;
            let phi = w * (1.0 + cfg.q * eps) / nu;
            Ok(CapState {
                t,
                phi,
                nu_norm: nu,
                eps_norm: eps,
                boundary_charge: 0.0,
                is_extremal: false,
            })
        }
        CapKernel::Exceptional => {
            let s0 = df - 2.0;
            if t == 1.0 {
                return full_sphere_state(cfg, s0);
            }
            let w = riesz_energy(&RieszParams::new(d, s0)?)?;
            let nu = richardson_limit(|s| nu_norm(d, s, t), s0)?;
            let eps = richardson_limit(|s| Ok(eps_norm_at(cfg, s, t)?.value), s0)?;
            let phi = w * (1.0 + cfg.q * eps) / nu;
            let r = cfg.r_src;
            let bracket = phi - cfg.q * (r - 1.0).powi(2) / cfg.dist2(t).powf(df / 2.0);
            let boundary_charge = (1.0 - t) / 2.0 * (1.0 - t * t).powf(df / 2.0 - 1.0) * bracket;
            Ok(CapState {
                t,
                phi,
                nu_norm: nu,
                eps_norm: eps,
                boundary_charge,
                is_extremal: false,
            })
        }
    }
}

/// State when the cap is the whole sphere: the balayages are trivial and the
/// functional equals the full-sphere weighted-potential constant W + q U(R).
fn full_sphere_state(cfg: &CapConfig, s: f64) -> Result<CapState> {
    let p = RieszParams::new(cfg.d, s)?;
    let w = riesz_energy(&p)?;
    let upot = potential_sigma(&p, cfg.r_src)?.value;
    Ok(CapState {
        t: 1.0,
        phi: w + cfg.q * upot,
        nu_norm: 1.0,
        eps_norm: upot / w,
        boundary_charge: 0.0,
        is_extremal: false,
    })
}

/// Signed-equilibrium density at altitude u in [-1, t), given a precomputed
/// state (regular and exceptional kernels).
pub fn eta_density_with(cfg: &CapConfig, state: &CapState, u: f64) -> Result<f64> {
    eta_density_impl(cfg, state, u, state.t - u)
}

/// [`eta_density_with`] addressed by the distance to the cap boundary; use
/// this when integrating up to the rim, where forming `t - u` from u would
/// cancel catastrophically.
pub fn eta_density_rim(cfg: &CapConfig, state: &CapState, rim_dist: f64) -> Result<f64> {
    eta_density_impl(cfg, state, state.t - rim_dist, rim_dist)
}

fn eta_density_impl(cfg: &CapConfig, state: &CapState, u: f64, tmu: f64) -> Result<f64> {
    let t = state.t;
    let d = cfg.d;
    let df = d as f64;
    let r = cfg.r_src;
    match cfg.s {
        CapKernel::Riesz(s) => {
            if !(-1.0..1.0).contains(&u) || tmu <= 0.0 {
                return Err(Error::Domain(format!(
                    "eta density requires -1 <= u < t, got u = {u}, t = {t}"
                )));
            }
            let w = riesz_energy(&RieszParams::new(d, s)?)?;
            let r2 = cfg.dist2(t);
            let pre = (ln_gamma(df / 2.0)? - ln_gamma(df - s / 2.0)?).exp() / w;
            let shape =
                ((1.0 - t) / (1.0 - u)).powf(df / 2.0) * (tmu / (1.0 - t)).powf((s - df) / 2.0);
            let x = tmu / (1.0 - u);
            let c = 1.0 - (df - s) / 2.0;
            let f_nu = gauss_2f1_regularized(HyperParams::new(1.0, df / 2.0, c, x))?;
            let f_eps = gauss_2f1_regularized(HyperParams::new(
                1.0,
                df / 2.0,
                c,
                (r + 1.0) * (r + 1.0) / r2 * x,
            ))?;
            Ok(pre
                * shape
                * (state.phi * f_nu - cfg.q * (r - 1.0).powf(df - s) / r2.powf(df / 2.0) * f_eps))
        }
        CapKernel::Exceptional => {
            // smooth up to and including the rim
            if !(-1.0..1.0).contains(&u) || tmu < 0.0 {
                return Err(Error::Domain(format!(
                    "eta density requires -1 <= u <= t, got u = {u}, t = {t}"
                )));
            }
            let s0 = df - 2.0;
            let w = riesz_energy(&RieszParams::new(d, s0)?)?;
            let r2m1 = r * r - 1.0;
            Ok(state.phi / w - cfg.q / w * r2m1 * r2m1 / cfg.dist2(u).powf(df / 2.0 + 1.0))
        }
    }
}

/// Convenience wrapper computing the state at t first.
pub fn eta_density(cfg: &CapConfig, t: f64, u: f64) -> Result<f64> {
    let state = cap_state(cfg, t)?;
    eta_density_with(cfg, &state, u)
}

/// Exceptional-case density (explicit form, no state precomputation).
pub fn exceptional_density(cfg: &CapConfig, t: f64, u: f64) -> Result<f64> {
    if cfg.s != CapKernel::Exceptional {
        return Err(Error::Domain("config is not the exceptional kernel".into()));
    }
    eta_density(cfg, t, u)
}

/// Uniform boundary charge of the exceptional signed equilibrium at t.
pub fn boundary_charge(cfg: &CapConfig, t: f64) -> Result<f64> {
    if cfg.s != CapKernel::Exceptional {
        return Err(Error::Domain("config is not the exceptional kernel".into()));
    }
    Ok(cap_state(cfg, t)?.boundary_charge)
}

/// Exceptional-case state at a given height.
pub fn exceptional_state(cfg: &CapConfig, t: f64) -> Result<CapState> {
    if cfg.s != CapKernel::Exceptional {
        return Err(Error::Domain("config is not the exceptional kernel".into()));
    }
    cap_state(cfg, t)
}

/// Weighted potential of eta_t at altitude xi strictly above the cap.
///
/// Regular kernel:
/// `Phi + (q/rho^s) I((R-1)^2/r^2 (xi-t)/(1+xi); (d-s)/2, s/2)
///      - Phi I((xi-t)/(1+xi); (d-s)/2, s/2)`.
/// The exceptional kernel replaces the regularized Beta terms by their
/// elementary s = d-2 limits `I(x; 1, d/2-1) = 1 - (1-x)^{d/2-1}`.
pub fn weighted_potential_outside(cfg: &CapConfig, state: &CapState, xi: f64) -> Result<f64> {
    let t = state.t;
    if !(xi > t && xi <= 1.0) {
        return Err(Error::Domain(format!(
            "outside potential requires t < xi <= 1, got xi = {xi}, t = {t}"
        )));
    }
    let df = cfg.d as f64;
    let r = cfg.r_src;
    let rho2 = cfg.dist2(xi);
    let r2 = cfg.dist2(t);
    let x = (xi - t) / (1.0 + xi);
    let x_src = (r - 1.0) * (r - 1.0) / r2 * x;
    match cfg.s {
        CapKernel::Riesz(s) => {
            let ia = inc_beta_reg(x_src, (df - s) / 2.0, s / 2.0)?;
            let ib = inc_beta_reg(x, (df - s) / 2.0, s / 2.0)?;
            Ok(state.phi + cfg.q / rho2.powf(s / 2.0) * ia - state.phi * ib)
        }
        CapKernel::Exceptional => {
            let pw = df / 2.0 - 1.0;
            let ia = 1.0 - (1.0 - x_src).powf(pw);
            let ib = 1.0 - (1.0 - x).powf(pw);
            Ok(state.phi + cfg.q / rho2.powf(df / 2.0 - 1.0) * ia - state.phi * ib)
        }
    }
}

/// Outside potential computing the state on the fly.
pub fn weighted_potential_outside_at(cfg: &CapConfig, t: f64, xi: f64) -> Result<f64> {
    let state = cap_state(cfg, t)?;
    weighted_potential_outside(cfg, &state, xi)
}

/// Locate the critical cap height t_c: the unique zero in (-1, 1) of
/// `Delta(t) = Phi(t) - q (R-1)^{d-s} / r(t)^d`, or t_c = 1 when Delta
/// stays positive (full-sphere support). The returned state carries
/// `is_extremal = true` and describes the extremal measure.
pub fn solve_tc(cfg: &CapConfig) -> Result<CapState> {
    let df = cfg.d as f64;
    let s_eff = cfg.effective_s();
    let r = cfg.r_src;
    let delta = |t: f64| -> Result<f64> {
        let st = cap_state(cfg, t)?;
        Ok(st.phi - cfg.q * (r - 1.0).powf(df - s_eff) / cfg.dist2(t).powf(df / 2.0))
    };
    const SCAN: usize = 400;
    let lo = -1.0 + 1e-6;
    let hi = 1.0 - 1e-6;
    let mut prev_t = lo;
    let mut prev_v = delta(lo)?;
    let mut bracket = None;
    let mut scan_tail = Vec::new();
    for i in 1..=SCAN {
        let t = lo + (hi - lo) * i as f64 / SCAN as f64;
        let v = delta(t)?;
        if (prev_v > 0.0) != (v > 0.0) || v == 0.0 {
            bracket = Some((prev_t, t, prev_v));
            break;
        }
        if i % 50 == 0 {
            scan_tail.push((t, v));
        }
        prev_t = t;
        prev_v = v;
    }
    let Some((mut a, mut b, va)) = bracket else {
        if prev_v > 0.0 {
            // Delta > 0 across the scan: the equilibrium is positive up to
            // the full sphere
            let mut st = cap_state(cfg, 1.0)?;
            st.is_extremal = true;
            return Ok(st);
        }
        return Err(Error::SolverFailure(format!(
            "cap scan found no positive region; samples: {scan_tail:?}"
        )));
    };
    let mut fa = va;
    while b - a > 1e-13 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = delta(mid)?;
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let tc = 0.5 * (a + b);
    let mut st = cap_state(cfg, tc)?;
    st.is_extremal = true;
    Ok(st)
}

/// Explicit exceptional-kernel entry point for the critical cap.
pub fn solve_tc_exceptional(cfg: &CapConfig) -> Result<CapState> {
    if cfg.s != CapKernel::Exceptional {
        return Err(Error::Domain("config is not the exceptional kernel".into()));
    }
    solve_tc(cfg)
}
