//! Signed equilibrium on the full sphere under a point-charge field, the
//! four Gonchar functions, and critical-distance solvers.
//!
//! The field is `Q(x) = q / |x - a|^s` with the source at distance R from
//! the center on the polar axis (logarithmic variant `-q log|x - a|`). The
//! signed equilibrium has density
//! `1 + q U_s(R)/W_s - q |R^2-1|^{d-s} / (W_s |x-a|^{2d-s})`
//! with respect to the uniform measure; the critical distance is where the
//! minimal density value (attained at a pole) first hits zero. The case
//! analysis over charge sign, source side and kernel regime produces one,
//! two or no critical radii; each branch bottoms out in a bracketed
//! bisection of the matching Gonchar function.

use crate::config::BISECT_TOL;
use crate::potential::{
    potential_derivative, potential_sigma, riesz_energy, Regime, RieszParams, SParam,
};
use crate::{Error, Result};
use serde::Serialize;

/// Which side of the sphere the source sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Interior,
    Center,
    Exterior,
}

/// A point-charge external field instance: kernel, charge and source radius.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FieldConfig {
    pub params: RieszParams,
    /// Charge; nonzero, either sign.
    pub q: f64,
    /// Source distance from the center; >= 0 and != 1.
    pub r: f64,
}

impl FieldConfig {
    pub fn new(params: RieszParams, q: f64, r: f64) -> Result<Self> {
        if q == 0.0 || !q.is_finite() {
            return Err(Error::Domain(format!("charge q = {q} must be nonzero")));
        }
        if r < 0.0 || (r - 1.0).abs() < 1e-14 {
            return Err(Error::Domain(format!(
                "source radius R = {r} must be >= 0 and != 1"
            )));
        }
        Ok(FieldConfig { params, q, r })
    }

    pub fn side(&self) -> Side {
        if self.r == 0.0 {
            Side::Center
        } else if self.r < 1.0 {
            Side::Interior
        } else {
            Side::Exterior
        }
    }
}

/// The four characteristic functions whose zeros are critical radii:
/// First (exterior, q > 0), Second (interior, q > 0),
/// Third (exterior, q < 0), Fourth (interior, q < 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GoncharKind {
    First,
    Second,
    Third,
    Fourth,
}

/// Solution set of the critical-distance problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CriticalKind {
    /// The equilibrium stays positive at every admissible radius.
    NoCritical,
    One(f64),
    /// Two radii, ascending.
    Two(f64, f64),
    /// Tangency: the density minimum touches zero at exactly one radius.
    Degenerate(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalResult {
    pub kind: CriticalKind,
    /// Threshold charge of the superharmonic interior case, when computed.
    pub q_star: Option<f64>,
    pub notes: String,
}

impl CriticalResult {
    fn plain(kind: CriticalKind) -> Self {
        CriticalResult {
            kind,
            q_star: None,
            notes: String::new(),
        }
    }
}

/// Density of the signed equilibrium at altitude u = x . p (source on the
/// positive polar axis).
pub fn signed_density(cfg: &FieldConfig, u: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("altitude u = {u} outside [-1, 1]")));
    }
    let d = cfg.params.d as f64;
    let s = cfg.params.riesz_s()?;
    let (q, r) = (cfg.q, cfg.r);
    let w = riesz_energy(&cfg.params)?;
    let upot = potential_sigma(&cfg.params, r)?.value;
    let dist2 = r * r - 2.0 * r * u + 1.0;
    Ok(1.0 + q * upot / w
        - q * (r * r - 1.0).abs().powf(d - s) / (w * dist2.powf((2.0 * d - s) / 2.0)))
}

/// Logarithmic-kernel analogue of [`signed_density`]:
/// `1 + q - q |R^2-1|^d / |x-a|^{2d}`.
pub fn signed_density_log(cfg: &FieldConfig, u: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("altitude u = {u} outside [-1, 1]")));
    }
    if cfg.params.s != SParam::Log {
        return Err(Error::Domain(
            "signed_density_log requires the logarithmic kernel".into(),
        ));
    }
    let d = cfg.params.d as f64;
    let (q, r) = (cfg.q, cfg.r);
    let dist2 = r * r - 2.0 * r * u + 1.0;
    Ok(1.0 + q - q * (r * r - 1.0).abs().powf(d) / dist2.powf(d))
}

/// Density values at the two poles (North, South).
///
/// The minimum of the density over the sphere sits at the North Pole for
/// q > 0 and at the South Pole for q < 0.
pub fn pole_density(cfg: &FieldConfig) -> Result<(f64, f64)> {
    match cfg.params.s {
        SParam::Riesz(_) => Ok((signed_density(cfg, 1.0)?, signed_density(cfg, -1.0)?)),
        SParam::Log => Ok((
            signed_density_log(cfg, 1.0)?,
            signed_density_log(cfg, -1.0)?,
        )),
    }
}

/// The Gonchar function of the requested kind at the configured radius.
///
/// Each is proportional to the extremal pole density:
/// First:  `[W/q (R-1)^d - (R+1)^{d-s}] R^{d-1} + R^{d-1} (R-1)^d U(R)`,
/// Second: `W/q (1-R)^d - (1+R)^{d-s} + (1-R)^d U(R)`,
/// Third:  `[W/q (R+1)^d - (R-1)^{d-s}] R^{d-1} + R^{d-1} (R+1)^d U(R)`,
/// Fourth: `W/q (1+R)^d - (1-R)^{d-s} + (1+R)^d U(R)`.
pub fn gonchar_function(kind: GoncharKind, cfg: &FieldConfig) -> Result<f64> {
    let d = cfg.params.d as f64;
    let s = cfg.params.riesz_s()?;
    let (q, r) = (cfg.q, cfg.r);
    let side_ok = match kind {
        GoncharKind::First => r > 1.0 && q > 0.0,
        GoncharKind::Second => r < 1.0 && q > 0.0,
        GoncharKind::Third => r > 1.0 && q < 0.0,
        GoncharKind::Fourth => r < 1.0 && q < 0.0,
    };
    if !side_ok {
        return Err(Error::KindMismatch(format!(
            "{kind:?} requires ({}, {}), got R = {r}, q = {q}",
            match kind {
                GoncharKind::First | GoncharKind::Third => "R > 1",
                _ => "R < 1",
            },
            match kind {
                GoncharKind::First | GoncharKind::Second => "q > 0",
                _ => "q < 0",
            },
        )));
    }
    let w = riesz_energy(&cfg.params)?;
    let u = potential_sigma(&cfg.params, r)?.value;
    Ok(match kind {
        GoncharKind::First => {
            (w / q * (r - 1.0).powf(d) - (r + 1.0).powf(d - s)) * r.powf(d - 1.0)
                + r.powf(d - 1.0) * (r - 1.0).powf(d) * u
        }
        GoncharKind::Second => {
            w / q * (1.0 - r).powf(d) - (1.0 + r).powf(d - s) + (1.0 - r).powf(d) * u
        }
        GoncharKind::Third => {
            (w / q * (r + 1.0).powf(d) - (r - 1.0).powf(d - s)) * r.powf(d - 1.0)
                + r.powf(d - 1.0) * (r + 1.0).powf(d) * u
        }
        GoncharKind::Fourth => {
            w / q * (1.0 + r).powf(d) - (1.0 - r).powf(d - s) + (1.0 + r).powf(d) * u
        }
    })
}

/// Right-hand side of the positivity condition for positive fields:
/// `(R+1)^{d-s} / |R-1|^d - U(R)`.
fn rhs_positive(p: &RieszParams, r: f64) -> Result<f64> {
    let d = p.d as f64;
    let s = p.riesz_s()?;
    Ok((r + 1.0).powf(d - s) / (r - 1.0).abs().powf(d) - potential_sigma(p, r)?.value)
}

/// Right-hand side for negative fields: `f(R) = |R-1|^{d-s}/(R+1)^d - U(R)`.
fn rhs_negative(p: &RieszParams, r: f64) -> Result<f64> {
    let d = p.d as f64;
    let s = p.riesz_s()?;
    Ok((r - 1.0).abs().powf(d - s) / (r + 1.0).powf(d) - potential_sigma(p, r)?.value)
}

/// Bisection on a bracketing interval; assumes g(lo) and g(hi) have opposite
/// signs (zero counts as a sign).
fn bisect<G: Fn(f64) -> Result<f64> + ?Sized>(g: &G, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut glo = g(lo)?;
    let ghi = g(hi)?;
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if (glo > 0.0) == (ghi > 0.0) {
        return Err(Error::NoSignChange(lo, hi));
    }
    while hi - lo > BISECT_TOL * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sign-scan over a grid, then bisection in the first bracketing cell.
fn scan_and_bisect<G: Fn(f64) -> Result<f64>>(g: G, grid: &[f64]) -> Result<f64> {
    let mut prev: Option<(f64, f64)> = None;
    let mut table = Vec::new();
    for &r in grid {
        let v = g(r)?;
        if !v.is_finite() {
            prev = None;
            continue;
        }
        if let Some((rp, vp)) = prev {
            if (vp > 0.0) != (v > 0.0) || v == 0.0 {
                return bisect(&g, rp, r);
            }
        }
        table.push((r, v));
        prev = Some((r, v));
    }
    Err(Error::SolverFailure(format!(
        "no sign change over the scan grid; samples: {:?}",
        table
            .iter()
            .step_by((table.len() / 8).max(1))
            .collect::<Vec<_>>()
    )))
}

/// Log-spaced exterior scan grid 1 + 10^x.
fn exterior_grid() -> Vec<f64> {
    (0..=480)
        .map(|i| 1.0 + 10f64.powf(-8.0 + i as f64 * (16.0 / 480.0)))
        .collect()
}

/// Interior grid refined toward both endpoints.
fn interior_grid() -> Vec<f64> {
    // both halves reach to 1/2 = 10^{-log10 2}
    let top = 8.0 - std::f64::consts::LOG10_2;
    let mut g: Vec<f64> = (0..=200)
        .map(|i| 10f64.powf(-8.0 + i as f64 * top / 200.0))
        .collect();
    let upper: Vec<f64> = (0..=200)
        .map(|i| 1.0 - 10f64.powf(-8.0 + i as f64 * top / 200.0))
        .collect();
    g.extend(upper.into_iter().rev());
    g.sort_by(f64::total_cmp);
    g
}

/// Golden-section minimum of f on [lo, hi] (unimodal f), then derivative
/// bisection to solver precision.
fn minimize_unimodal<G: Fn(f64) -> Result<f64>>(
    f: &G,
    fprime: &dyn Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > 1e-6 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d)?;
        }
    }
    // refine on the derivative sign change around the golden-section cell
    let (mut lo, mut hi) = (a, b);
    // widen until the derivative brackets, guarding against a flat patch
    for _ in 0..40 {
        let (dl, dh) = (fprime(lo)?, fprime(hi)?);
        if dl < 0.0 && dh > 0.0 {
            return bisect(fprime, lo, hi);
        }
        lo = (lo - (hi - lo)).max(1e-12);
        hi = (hi + (hi - lo)).min(1.0 - 1e-12);
    }
    Ok(0.5 * (a + b))
}

/// Critical distance(s) for the Riesz kernel.
///
/// Case analysis: positive charges always have exactly one critical radius
/// on their side; negative exterior (and negative interior in the harmonic
/// and subharmonic regimes) have one for q < -1 and none for q in [-1, 0);
/// negative interior superharmonic splits on the threshold charge
/// q* = W_s / min f with none / tangency / two / one solutions.
pub fn critical_distance(params: &RieszParams, q: f64, side: Side) -> Result<CriticalResult> {
    if q == 0.0 || !q.is_finite() {
        return Err(Error::Domain(format!("charge q = {q} must be nonzero")));
    }
    if side == Side::Center {
        return Err(Error::Domain(
            "critical distances live strictly inside (0,1) or (1,oo)".into(),
        ));
    }
    let w = riesz_energy(params)?;
    match (q > 0.0, side) {
        (true, Side::Exterior) => {
            // rhs decreases from +oo to 0; W/q > 0 always brackets
            let g = |r: f64| Ok(rhs_positive(params, r)? - w / q);
            let r = scan_and_bisect(g, &exterior_grid())?;
            Ok(CriticalResult::plain(CriticalKind::One(r)))
        }
        (true, Side::Interior) => {
            let g = |r: f64| Ok(rhs_positive(params, r)? - w / q);
            let r = scan_and_bisect(g, &interior_grid())?;
            Ok(CriticalResult::plain(CriticalKind::One(r)))
        }
        (false, Side::Exterior) => {
            if q >= -1.0 {
                let mut res = CriticalResult::plain(CriticalKind::NoCritical);
                res.notes = if q == -1.0 {
                    "boundary charge q = -1: density vanishes only in the limit R -> 1".into()
                } else {
                    "weak negative field: positive on all of (1, oo)".into()
                };
                return Ok(res);
            }
            let g = |r: f64| Ok(rhs_negative(params, r)? - w / q);
            let r = scan_and_bisect(g, &exterior_grid())?;
            Ok(CriticalResult::plain(CriticalKind::One(r)))
        }
        (false, Side::Interior) => critical_negative_interior(params, q, w),
        (_, Side::Center) => unreachable!("rejected above"),
    }
}

fn critical_negative_interior(params: &RieszParams, q: f64, w: f64) -> Result<CriticalResult> {
    let d = params.d as f64;
    let s = params.riesz_s()?;
    if params.regime() != Regime::Superharmonic {
        // f decreases from 0 to -W_s: one solution iff q < -1
        if q >= -1.0 {
            let mut res = CriticalResult::plain(CriticalKind::NoCritical);
            res.notes = "harmonic/subharmonic interior: no solution for q in [-1, 0)".into();
            return Ok(res);
        }
        let g = |r: f64| Ok(rhs_negative(params, r)? - w / q);
        let r = scan_and_bisect(g, &interior_grid())?;
        return Ok(CriticalResult::plain(CriticalKind::One(r)));
    }
    // superharmonic: locate the single interior minimum of f
    let f = |r: f64| rhs_negative(params, r);
    let fp = |r: f64| -> Result<f64> {
        let g_prime =
            -(2.0 * d - s * (1.0 + r)) * (1.0 - r).powf(d - s - 1.0) / (1.0 + r).powf(d + 1.0);
        Ok(g_prime - potential_derivative(params, r)?)
    };
    let r_star = minimize_unimodal(&f, &fp, 1e-9, 1.0 - 1e-9)?;
    let f_star = f(r_star)?;
    let q_star = w / f_star;
    let mut res = if (q - q_star).abs() <= 1e-10 * q_star.abs() {
        CriticalResult::plain(CriticalKind::Degenerate(r_star))
    } else if q > q_star {
        let mut r = CriticalResult::plain(CriticalKind::NoCritical);
        r.notes = format!("field weaker than the threshold charge q* = {q_star}");
        r
    } else if q > -1.0 {
        let g = |r: f64| Ok(f(r)? - w / q);
        let r1 = bisect(&g, 1e-9, r_star)?;
        let r2 = bisect(&g, r_star, 1.0 - 1e-9)?;
        CriticalResult::plain(CriticalKind::Two(r1, r2))
    } else {
        let g = |r: f64| Ok(f(r)? - w / q);
        let r = bisect(&g, 1e-9, r_star)?;
        let mut res = CriticalResult::plain(CriticalKind::One(r));
        if q == -1.0 {
            res.notes = "boundary charge q = -1".into();
        }
        res
    };
    res.q_star = Some(q_star);
    Ok(res)
}

/// Critical distance for the logarithmic kernel, in closed form.
///
/// With `alpha = ((1+q)/q)^{1/d}`: exterior/interior positive fields give
/// `(alpha+1)/(alpha-1)` and `(alpha-1)/(alpha+1)`; fields with q < -1 give
/// `(1+alpha)/(1-alpha)` and `(1-alpha)/(1+alpha)`; weak negative fields
/// (-1 <= q < 0) admit no critical distance.
pub fn critical_distance_log(d: u32, q: f64, side: Side) -> Result<CriticalResult> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension d = {d} must be >= 2")));
    }
    if q == 0.0 || !q.is_finite() {
        return Err(Error::Domain(format!("charge q = {q} must be nonzero")));
    }
    if side == Side::Center {
        return Err(Error::Domain(
            "critical distances live strictly inside (0,1) or (1,oo)".into(),
        ));
    }
    if (-1.0..0.0).contains(&q) {
        let mut res = CriticalResult::plain(CriticalKind::NoCritical);
        res.notes = "weak negative logarithmic field".into();
        return Ok(res);
    }
    let alpha = ((1.0 + q) / q).powf(1.0 / d as f64);
    let r = match (q > 0.0, side) {
        (true, Side::Exterior) => (alpha + 1.0) / (alpha - 1.0),
        (true, _) => (alpha - 1.0) / (alpha + 1.0),
        (false, Side::Exterior) => (1.0 + alpha) / (1.0 - alpha),
        (false, _) => (1.0 - alpha) / (1.0 + alpha),
    };
    if q == -1.0 {
        // alpha = 0 collapses the formula onto the sphere itself
        let mut res = CriticalResult::plain(CriticalKind::NoCritical);
        res.notes = "boundary charge q = -1: formula degenerates to R = 1".into();
        return Ok(res);
    }
    Ok(CriticalResult::plain(CriticalKind::One(r)))
}

/// Image configuration under the inversion principle:
/// `(R, q) -> (1/R, q R^{-s})`; the signed equilibria coincide.
pub fn inversion_map(cfg: &FieldConfig) -> Result<FieldConfig> {
    if cfg.r == 0.0 {
        return Err(Error::Domain("inversion requires R > 0".into()));
    }
    let s = cfg.params.riesz_s()?;
    FieldConfig::new(cfg.params, cfg.q * cfg.r.powf(-s), 1.0 / cfg.r)
}

/// Exterior radius R > 1 whose field matches an interior one:
/// solves `q' U(R') = q U(R)` for R, or reports that no exterior radius
/// can reach the required potential level (the level must lie strictly
/// below W_s, the supremum of U on (1, oo)).
pub fn connect_fields(
    params: &RieszParams,
    q_prime: f64,
    q: f64,
    r_prime: f64,
) -> Result<Option<f64>> {
    if q_prime <= 0.0 || q <= 0.0 {
        return Err(Error::Domain("connect_fields requires q, q' > 0".into()));
    }
    if !(0.0..1.0).contains(&r_prime) {
        return Err(Error::Domain(format!(
            "interior radius R' = {r_prime} outside [0, 1)"
        )));
    }
    let w = riesz_energy(params)?;
    let target = q_prime * potential_sigma(params, r_prime)?.value / q;
    // U maps (1, oo) onto (0, W_s); the band absorbs rounding of W_s itself
    if target >= w * (1.0 - 1e-12) || target <= 0.0 {
        return Ok(None);
    }
    // U is strictly decreasing from W_s to 0 on (1, oo)
    let g = |r: f64| Ok(potential_sigma(params, r)?.value - target);
    let r = scan_and_bisect(g, &exterior_grid())?;
    Ok(Some(r))
}
