//! Verification suite and its independent oracles.
//!
//! [`run`] executes the acceptance checks and returns one outcome per
//! criterion; the CLI `verify` command prints them, and the integration test
//! suite asserts them. The [`oracle`] submodule holds the double-quadrature
//! machinery the checks rely on; it reaches the weighted potentials through
//! direct kernel integration only, never through the closed forms under test.

use crate::cap::{self, CapConfig};
use crate::config::Tolerances;
use crate::poly;
use crate::potential::{
    potential_closed_special, potential_sigma, potential_sigma_quadrature, RieszParams,
};
use crate::sphere::{
    critical_distance, critical_distance_log, signed_density, signed_density_log, CriticalKind,
    FieldConfig, Side,
};
use serde::Serialize;
use std::time::Instant;

/// Verification depth: `Quick` skips the double-quadrature constancy oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    Quick,
    Full,
}

/// Outcome of one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Independent double-quadrature potential oracles (d = 2).
pub mod oracle {
    use super::*;
    use crate::quad::{adaptive_gk_split, tanh_sinh};

    /// K(m) from the complementary modulus b1 = sqrt(1 - m), avoiding the
    /// cancellation of forming m near 1. Plain AGM.
    fn elliptic_k_complement(b1: f64) -> f64 {
        let mut a = 1.0f64;
        let mut b = b1;
        for _ in 0..80 {
            if (a - b).abs() <= 1e-16 * a {
                break;
            }
            let an = 0.5 * (a + b);
            b = (a * b).sqrt();
            a = an;
        }
        std::f64::consts::FRAC_PI_2 / a
    }

    /// Azimuthal mean of |z - y|^{-s} over the parallel circle at altitude u,
    /// for z on S^2 at altitude xi. `delta = u - xi` must be supplied
    /// separately so the near-diagonal case stays stable: the kernel depends
    /// on a - b = 4 delta^2 / (a + b).
    pub fn kernel_avg_d2(xi: f64, u: f64, delta: f64, s: f64) -> f64 {
        let a = 2.0 - 2.0 * xi * u;
        let b = 2.0 * ((1.0 - xi * xi).max(0.0) * (1.0 - u * u).max(0.0)).sqrt();
        if b == 0.0 {
            return a.powf(-s / 2.0);
        }
        let apb = a + b;
        let c = 4.0 * delta * delta / apb; // = a - b, exactly
        if (s - 1.0).abs() < 1e-14 {
            // (2/pi) K(m) / sqrt(a+b) with sqrt(1-m) = 2|delta|/(a+b)
            let b1 = 2.0 * delta.abs() / apb;
            if b1 == 0.0 {
                return f64::INFINITY;
            }
            return 2.0 / std::f64::consts::PI * elliptic_k_complement(b1) / apb.sqrt();
        }
        // (2/pi) int_0^{pi/2} (c + 2 b sin^2 psi)^{-s/2} dpsi
        let result = adaptive_gk_split(
            |psi: f64| {
                let sp = psi.sin();
                (c + 2.0 * b * sp * sp).powf(-s / 2.0)
            },
            &[0.0, 1e-6, 1e-4, 1e-2, 0.1, std::f64::consts::FRAC_PI_2],
            1e-12,
            1e-12,
        );
        2.0 / std::f64::consts::PI * result.value
    }

    /// Riesz potential at altitude xi of an axially symmetric surface density
    /// on S^2 supported on [lo, hi], by double quadrature. The density
    /// receives `(u, hi - u)` with the distance to the support rim formed
    /// from the quadrature transform, so rim-singular densities evaluate
    /// without cancellation.
    pub fn potential_of_density_d2<F: Fn(f64, f64) -> f64>(
        density: F,
        lo: f64,
        hi: f64,
        xi: f64,
        s: f64,
        tol: f64,
    ) -> f64 {
        let piece = |a: f64, b: f64| -> f64 {
            if b - a < 1e-300 {
                return 0.0;
            }
            let gap_to_hi = hi - b;
            tanh_sinh(
                |u, da, db| {
                    // |u - xi| composed from an endpoint gap plus the
                    // transform's own endpoint distance, so it stays exact
                    // when xi sits on or just past an endpoint
                    let delta = if xi >= b {
                        (xi - b) + db
                    } else if xi <= a {
                        (a - xi) + da
                    } else {
                        // interior xi is always split onto an endpoint
                        da.min(db)
                    };
                    let rim = gap_to_hi + db;
                    let u = u.clamp(-1.0, 1.0);
                    kernel_avg_d2(xi, u, delta, s) * density(u, rim)
                },
                a,
                b,
                tol,
            )
            .value
        };
        let total = if xi > lo && xi < hi {
            piece(lo, xi) + piece(xi, hi)
        } else {
            piece(lo, hi)
        };
        0.5 * total
    }

    /// Weighted potential of the full-sphere signed equilibrium (d = 2).
    pub fn weighted_potential_sphere_d2(cfg: &FieldConfig, xi: f64) -> f64 {
        let s = cfg.params.riesz_s().unwrap();
        let u_pot = potential_of_density_d2(
            |u, _| signed_density(cfg, u).unwrap(),
            -1.0,
            1.0,
            xi,
            s,
            1e-9,
        );
        let dist2 = cfg.r * cfg.r - 2.0 * cfg.r * xi + 1.0;
        u_pot + cfg.q * dist2.powf(-s / 2.0)
    }

    /// Weighted potential of the cap equilibrium eta_t at altitude xi (d = 2,
    /// source at (0, -R)).
    pub fn weighted_potential_cap_d2(cfg: &CapConfig, t: f64, xi: f64) -> f64 {
        let s = cfg.riesz_s().unwrap();
        let state = cap::cap_state(cfg, t).unwrap();
        let u_pot = potential_of_density_d2(
            |_, rim| cap::eta_density_rim(cfg, &state, rim).unwrap(),
            -1.0,
            t,
            xi,
            s,
            1e-9,
        );
        let dist2 = cfg.r_src * cfg.r_src + 2.0 * cfg.r_src * xi + 1.0;
        u_pot + cfg.q * dist2.powf(-s / 2.0)
    }

    /// Total mass of an axially symmetric density on the cap [-1, t] of S^d.
    /// The density receives `(u, t - u)` with a cancellation-free rim
    /// distance.
    pub fn cap_mass<F: Fn(f64, f64) -> f64>(d: u32, t: f64, density: F) -> f64 {
        let df = d as f64;
        let ratio = crate::potential::omega_ratio(d);
        ratio
            * tanh_sinh(
                |u, da, db| {
                    let w = (da.max(0.0) * (1.0 - u).max(0.0)).powf(df / 2.0 - 1.0);
                    w * density(u.clamp(-1.0, 1.0), db)
                },
                -1.0,
                t,
                1e-11,
            )
            .value
    }

    /// Least-squares slope of log y against log x.
    pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.abs().max(1e-300).ln()).collect();
        let sx: f64 = lx.iter().sum();
        let sy: f64 = ly.iter().sum();
        let sxx: f64 = lx.iter().map(|x| x * x).sum();
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }
}

fn outcome(name: &'static str, started: Instant, passed: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome {
        name,
        passed,
        detail,
        seconds: started.elapsed().as_secs_f64(),
    }
}

fn check<F: FnOnce() -> Result<(bool, String), crate::Error>>(
    name: &'static str,
    f: F,
) -> CriterionOutcome {
    let started = Instant::now();
    match f() {
        Ok((passed, detail)) => outcome(name, started, passed, detail),
        Err(e) => outcome(name, started, false, format!("error: {e}")),
    }
}

/// Run the verification suite; `Full` includes the double-quadrature
/// constancy oracles.
pub fn run(level: Level, tol: &Tolerances) -> Vec<CriterionOutcome> {
    let mut out = Vec::new();

    out.push(check("golden-ratio critical distance", || {
        let started = Instant::now();
        let res = critical_distance(&RieszParams::new(2, 1.0)?, 1.0, Side::Exterior)?;
        let elapsed = started.elapsed();
        let r = match res.kind {
            CriticalKind::One(r) => r,
            other => return Ok((false, format!("kind {other:?}"))),
        };
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let err = (r - 1.0 - phi).abs();
        let fast = elapsed.as_millis() < 10;
        Ok((
            err <= tol.critical_distance && fast,
            format!("R_q - 1 = {:.13}, err {err:.2e}, {elapsed:?}", r - 1.0),
        ))
    }));

    out.push(check("plastic-constant critical distance", || {
        let res = critical_distance(&RieszParams::new(4, 3.0)?, 1.0, Side::Exterior)?;
        let r = match res.kind {
            CriticalKind::One(r) => r,
            other => return Ok((false, format!("kind {other:?}"))),
        };
        let plastic = ((9.0 - 69f64.sqrt()).cbrt() + (9.0 + 69f64.sqrt()).cbrt())
            / (2f64.cbrt() * 3f64.powf(2.0 / 3.0));
        let err = (r - 1.0 - plastic).abs();
        Ok((
            err <= 1e-9,
            format!("R_q - 1 = {:.11}, err {err:.2e}", r - 1.0),
        ))
    }));

    out.push(check("interior harmonic critical distance", || {
        let res = critical_distance(&RieszParams::new(2, 1.0)?, 1.0, Side::Interior)?;
        let r = match res.kind {
            CriticalKind::One(r) => r,
            other => return Ok((false, format!("kind {other:?}"))),
        };
        let expect = (17f64.sqrt() - 1.0) / 4.0;
        let err = (1.0 - r - expect).abs();
        Ok((
            err <= 1e-12,
            format!("1 - R_q = {:.13}, err {err:.2e}", 1.0 - r),
        ))
    }));

    out.push(check("closed form vs quadrature grid", || {
        let started = Instant::now();
        let mut worst = 0.0f64;
        let mut count = 0usize;
        for &d in &[2u32, 3, 4, 5, 7] {
            let df = d as f64;
            let mut svals: Vec<f64> = [0.2, 0.4, 0.6, 0.8, 0.95]
                .iter()
                .map(|f| f * (df - 1.0))
                .collect();
            svals.push(df - 1.0);
            svals.extend(
                [1.0f64, 2.0, 3.0, 4.0, 5.0]
                    .iter()
                    .map(|k| df - 1.0 + k / 6.0),
            );
            for &s in &svals {
                if s <= 0.0 || s >= df {
                    continue;
                }
                let p = RieszParams::new(d, s)?;
                for &r in &[0.0, 0.25, 0.5, 0.9, 1.1, 2.0, 5.0, 20.0] {
                    let a = potential_sigma(&p, r)?.value;
                    let b = potential_sigma_quadrature(&p, r)?.value;
                    let rel = (a - b).abs() / a.abs().max(1e-300);
                    worst = worst.max(rel);
                    count += 1;
                }
            }
        }
        let elapsed = started.elapsed();
        Ok((
            worst <= tol.closed_vs_quadrature && count >= 150 && elapsed.as_secs() < 30,
            format!("{count} points, worst rel err {worst:.2e}, {elapsed:?}"),
        ))
    }));

    out.push(check("special closed forms vs generic", || {
        let cases: &[(u32, f64, &[f64])] = &[
            (4, 2.0, &[0.5, 0.8, 1.25, 2.0, 5.0]),
            (6, 4.0, &[0.5, 0.8, 1.25, 2.0, 5.0]),
            (6, 2.0, &[0.5, 0.8, 1.25, 2.0, 5.0]),
            (3, 1.0, &[0.1, 0.3, 0.5, 0.7, 0.9]),
            (7, 2.0, &[0.5, 0.8, 1.25, 2.0, 5.0]),
            (3, 2.0, &[0.3, 0.8, 1.5, 2.0, 5.0]),
        ];
        let mut worst = 0.0f64;
        for &(d, s, radii) in cases {
            let p = RieszParams::new(d, s)?;
            for &r in radii {
                let special = potential_closed_special(&p, r)?
                    .ok_or_else(|| crate::Error::Domain("special form missing".into()))?
                    .value;
                let generic = potential_sigma(&p, r)?.value;
                worst = worst.max((special - generic).abs() / generic.abs().max(1e-300));
            }
        }
        Ok((
            worst <= tol.special_forms,
            format!("worst rel err {worst:.2e}"),
        ))
    }));

    out.push(check("superharmonic negative-interior landscape", || {
        let p = RieszParams::new(4, 1.0)?;
        let probe = critical_distance(&p, -0.99, Side::Interior)?;
        let q_star = probe
            .q_star
            .ok_or_else(|| crate::Error::Domain("missing q*".into()))?;
        let res = critical_distance(&p, q_star, Side::Interior)?;
        let r_star = match res.kind {
            CriticalKind::Degenerate(r) => r,
            other => return Ok((false, format!("kind {other:?}"))),
        };
        let err = (r_star - 0.507122392).abs();
        let q_mid = 0.5 * (-1.0 + q_star);
        let two = critical_distance(&p, q_mid, Side::Interior)?;
        let bracketed = matches!(two.kind, CriticalKind::Two(r1, r2) if r1 < r_star && r_star < r2);
        Ok((
            err <= 1e-6 && bracketed,
            format!(
                "R* = {r_star:.9} (err {err:.2e}), q* = {q_star:.6}, two-root bracket: {bracketed}"
            ),
        ))
    }));

    out.push(check("cap norms closed form vs quadrature", || {
        let mut worst = 0.0f64;
        for &d in &[2u32, 3, 5] {
            let df = d as f64;
            for &s in &[df - 2.0 + 0.3, df - 1.0, df - 0.3] {
                for &t in &[-0.8, -0.3, 0.2, 0.6, 0.9] {
                    let a = cap::nu_norm(d, s, t)?;
                    let b = cap::nu_norm_quadrature(d, s, t)?.value;
                    worst = worst.max((a - b).abs());
                }
            }
        }
        Ok((worst <= tol.cap_norms, format!("worst abs err {worst:.2e}")))
    }));

    out.push(check("cap equilibrium mass", || {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let mut worst = 0.0f64;
        for i in 0..22 {
            let (cfg, t) = if i < 20 {
                let d = *[2u32, 3, 4, 5].get(i % 4).unwrap();
                let df = d as f64;
                let s = rng.gen_range(df - 2.0 + 0.15..df - 0.1);
                let r = rng.gen_range(1.2..4.0);
                let q = -rng.gen_range(0.2..6.0);
                (CapConfig::new(d, s, r, q)?, rng.gen_range(-0.85..0.85))
            } else {
                // exceptional kernel with boundary charge
                let d = if i == 20 { 3 } else { 4 };
                (
                    CapConfig::exceptional(d, rng.gen_range(1.5..3.0), -rng.gen_range(1.0..5.0))?,
                    rng.gen_range(-0.5..0.5),
                )
            };
            let state = cap::cap_state(&cfg, t)?;
            let mass = oracle::cap_mass(cfg.d, t, |_, rim| {
                cap::eta_density_rim(&cfg, &state, rim).unwrap_or(0.0)
            }) + state.boundary_charge;
            worst = worst.max((mass - 1.0).abs());
        }
        Ok((
            worst <= tol.cap_mass,
            format!("worst |mass - 1| {worst:.2e}"),
        ))
    }));

    if level == Level::Full {
        out.push(check("cap constancy and boundary exponents", || {
            let started = Instant::now();
            let phi_gold = (1.0 + 5f64.sqrt()) / 2.0;
            let cfg = CapConfig::new(2, 1.0, 1.0 + phi_gold, -5.0)?;
            let state = cap::solve_tc(&cfg)?;
            let tc = state.t;
            if !(-1.0..1.0).contains(&tc) {
                return Ok((false, format!("t_c = {tc}")));
            }
            // constancy on the cap
            let mut vals = Vec::new();
            for i in 0..7 {
                let xi = -0.95 + (tc - 0.05 - -0.95) * i as f64 / 6.0;
                vals.push(oracle::weighted_potential_cap_d2(&cfg, tc, xi));
            }
            let spread = vals.iter().cloned().fold(f64::MIN, f64::max)
                - vals.iter().cloned().fold(f64::MAX, f64::min);
            let constancy_ok = spread <= tol.constancy * state.phi.abs();
            // strictly above Phi outside
            let mut outside_ok = true;
            for i in 1..=5 {
                let xi = tc + (1.0 - tc) * i as f64 / 6.0;
                let v = oracle::weighted_potential_cap_d2(&cfg, tc, xi);
                outside_ok &= v > state.phi;
            }
            // density boundary exponent (s-d)/2 = -1/2 at a subcritical cap
            let t_probe = tc - 0.2;
            let probe = cap::cap_state(&cfg, t_probe)?;
            let hs: Vec<f64> = (3..=6).map(|k| 10f64.powi(-k)).collect();
            let dens: Vec<f64> = hs
                .iter()
                .map(|h| cap::eta_density_with(&cfg, &probe, t_probe - h).unwrap())
                .collect();
            let slope_dens = oracle::loglog_slope(&hs, &dens);
            // outside-potential approach exponent (d-s)/2 = 1/2
            let pots: Vec<f64> = hs
                .iter()
                .map(|h| {
                    (cap::weighted_potential_outside(&cfg, &probe, t_probe + h).unwrap()
                        - probe.phi)
                        .abs()
                })
                .collect();
            let slope_pot = oracle::loglog_slope(&hs, &pots);
            let exps_ok = (slope_dens - -0.5).abs() <= tol.exponent_fit
                && (slope_pot - 0.5).abs() <= tol.exponent_fit;
            let elapsed = started.elapsed();
            Ok((
                constancy_ok && outside_ok && exps_ok && elapsed.as_secs() < 60,
                format!(
                    "t_c = {tc:.6}, spread {spread:.2e} (|Phi| = {:.3}), outside {outside_ok}, \
                     exponents {slope_dens:.3}/{slope_pot:.3}, {elapsed:?}",
                    state.phi.abs()
                ),
            ))
        }));
    }

    out.push(check(
        "polynomial identities and golden factorization",
        || {
            poly::identity_suite(20)?;
            let p = poly::build_poly(
                crate::poly::GoncharKind::First,
                2,
                num::BigRational::from_integer(1.into()),
                0,
            )?;
            let roots = poly::roots(&p)?;
            let mut expected = [-1.0, (3.0 - 5f64.sqrt()) / 2.0, (3.0 + 5f64.sqrt()) / 2.0];
            expected.sort_by(f64::total_cmp);
            let mut got: Vec<f64> = roots.roots.iter().map(|z| z.re).collect();
            got.sort_by(f64::total_cmp);
            let mut worst = 0.0f64;
            for (g, e) in got.iter().zip(expected.iter()) {
                worst = worst.max((g - e).abs());
            }
            let imag_ok = roots.roots.iter().all(|z| z.im.abs() < 1e-12);
            Ok((
                worst <= tol.root_residual && imag_ok,
                format!("identities exact; root err {worst:.2e}"),
            ))
        },
    ));

    out.push(check("trinomial sector inclusion and force field", || {
        for d in 3..=12 {
            poly::sector_inclusion(d)?;
        }
        let worst = poly::force_residual_max(6)?;
        Ok((
            worst <= 1e-8,
            format!("sectors d=3..12 ok; worst force residual {worst:.2e}"),
        ))
    }));

    out.push(check("harmonic asymptotic law", || {
        let mut worst = 0.0f64;
        for &d in &[8u32, 16, 32, 64] {
            let df = d as f64;
            let res = critical_distance(&RieszParams::new(d, df - 1.0)?, 1.0, Side::Exterior)?;
            let r = match res.kind {
                CriticalKind::One(r) => r,
                other => return Ok((false, format!("kind {other:?}"))),
            };
            worst = worst.max(df * df * (r - 2.0 - 3f64.ln() / df).abs());
        }
        Ok((
            worst <= 10.0,
            format!("max d^2 |R_q - 2 - ln3/d| = {worst:.3}"),
        ))
    }));

    out.push(check("logarithmic kernel limits", || {
        // s -> 0 limit of the density
        let mut worst = 0.0f64;
        for &(d, q, r) in &[(2u32, 1.0, 2.0), (3, -0.7, 0.5), (4, 2.0, 3.0)] {
            let cfg_s = FieldConfig::new(RieszParams::new(d, 1e-6)?, q, r)?;
            let cfg_log = FieldConfig::new(RieszParams::log(d)?, q, r)?;
            for &u in &[-1.0, -0.3, 0.4, 1.0] {
                let a = signed_density(&cfg_s, u)?;
                let b = signed_density_log(&cfg_log, u)?;
                worst = worst.max((a - b).abs());
            }
        }
        // closed-form log critical radii zero the pole density
        let mut worst_pole = 0.0f64;
        for &(d, q, side, pole) in &[
            (2u32, 1.0, Side::Exterior, 1.0),
            (3, 2.5, Side::Interior, 1.0),
            (4, -3.0, Side::Exterior, -1.0),
            (5, -2.0, Side::Interior, -1.0),
        ] {
            let res = critical_distance_log(d, q, side)?;
            let r = match res.kind {
                CriticalKind::One(r) => r,
                other => return Ok((false, format!("kind {other:?}"))),
            };
            let cfg = FieldConfig::new(RieszParams::log(d)?, q, r)?;
            worst_pole = worst_pole.max(signed_density_log(&cfg, pole)?.abs());
        }
        Ok((
            worst <= tol.log_limit && worst_pole <= 1e-10,
            format!("limit err {worst:.2e}, pole density {worst_pole:.2e}"),
        ))
    }));

    out
}

/// True when every criterion passed.
pub fn all_passed(outcomes: &[CriterionOutcome]) -> bool {
    outcomes.iter().all(|c| c.passed)
}
