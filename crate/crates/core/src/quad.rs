//! Adaptive quadrature kernels.
//!
//! Two workhorses: a Gauss-Kronrod G7/K15 rule with error-driven interval
//! bisection for smooth to mildly singular integrands, and a tanh-sinh
//! (double exponential) rule for integrands with algebraic endpoint
//! singularities. Workspaces are per-call; everything is safe to run
//! concurrently.

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Conservative absolute error estimate.
    pub err_estimate: f64,
    /// False when the interval or level budget ran out first.
    pub converged: bool,
}

// QK15 nodes on [-1, 1] (QUADPACK): Kronrod abscissae, Kronrod weights and
// the embedded 7-point Gauss weights (applied at xgk[1], [3], [5], [7]).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel: returns (kronrod value, |gauss - kronrod| based error).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut result_k = fc * WGK[7];
    let mut result_g = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        let fsum = f1 + f2;
        result_k += WGK[j] * fsum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_g += WG[j / 2] * fsum;
        }
    }
    let value = result_k * half;
    let mut err = ((result_k - result_g) * half).abs();
    // QUADPACK-style rescaling keeps the estimate honest on rough integrands
    let resasc = resabs * half.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    (value, err)
}

/// Adaptive Gauss-Kronrod integral of `f` over [a, b].
///
/// Bisects the interval with the largest error estimate until the total
/// estimate drops below `max(abs_tol, rel_tol * |value|)` or 4000 panels.
pub fn adaptive_gk<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult {
    adaptive_gk_split(f, &[a, b], abs_tol, rel_tol)
}

/// [`adaptive_gk`] over a pre-split partition given by ascending breakpoints.
pub fn adaptive_gk_split<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult {
    const MAX_PANELS: usize = 4000;
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, err) = qk15(&f, w[0], w[1]);
            panels.push(Panel {
                a: w[0],
                b: w[1],
                value,
                err,
            });
        }
    }
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let target = abs_tol.max(rel_tol * total.abs());
        if err <= target {
            return QuadResult {
                value: total,
                err_estimate: err,
                converged: true,
            };
        }
        if panels.len() >= MAX_PANELS {
            return QuadResult {
                value: total,
                err_estimate: err,
                converged: false,
            };
        }
        // split the worst panel
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty panel list");
        let Panel { a, b, .. } = panels[idx];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // interval at floating-point resolution; accept what we have
            return QuadResult {
                value: panels.iter().map(|p| p.value).sum(),
                err_estimate: panels.iter().map(|p| p.err).sum(),
                converged: false,
            };
        }
        let (v1, e1) = qk15(&f, a, mid);
        let (v2, e2) = qk15(&f, mid, b);
        panels[idx] = Panel {
            a,
            b: mid,
            value: v1,
            err: e1,
        };
        panels.push(Panel {
            a: mid,
            b,
            value: v2,
            err: e2,
        });
    }
}

/// Tanh-sinh (double exponential) integral of `f` over [a, b].
///
/// The integrand receives `(x, x - a, b - x)`; the endpoint distances are
/// computed from the transform without cancellation, so integrable algebraic
/// singularities at either endpoint can be evaluated stably, e.g.
/// `f = |x, da, _| da.powf(-0.5)`.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> QuadResult {
    let half = 0.5 * (b - a);
    if half <= 0.0 {
        return QuadResult {
            value: 0.0,
            err_estimate: 0.0,
            converged: true,
        };
    }
    let pi_2 = std::f64::consts::FRAC_PI_2;
    // level 0 seed: the midpoint node t = 0
    let eval = |t: f64| -> f64 {
        let u = pi_2 * t.sinh();
        // 1 +- tanh(u) without cancellation
        let e2 = (-2.0 * u.abs()).exp();
        let near = 2.0 * e2 / (1.0 + e2); // 1 - tanh(|u|)
        let far = 2.0 / (1.0 + e2); // 1 + tanh(|u|)
        let (dist_a, dist_b) = if t >= 0.0 {
            (half * far, half * near)
        } else {
            (half * near, half * far)
        };
        if dist_a == 0.0 || dist_b == 0.0 {
            return 0.0;
        }
        let x = a + dist_a;
        // weight (pi/2) cosh(t) sech^2((pi/2) sinh t), overflow-safe sech
        let sech = 2.0 * (-u.abs()).exp() / (1.0 + e2);
        let w = pi_2 * t.cosh() * sech * sech;
        if w == 0.0 {
            return 0.0;
        }
        let v = f(x, dist_a, dist_b);
        if v.is_finite() {
            v * w
        } else {
            0.0
        }
    };
    let mut h = 1.0f64;
    let mut sum = eval(0.0);
    let mut prev = f64::NAN;
    // hard cap where the endpoint distances underflow; before that, stop a
    // level's tail once contributions stay negligible
    let t_max = 6.6;
    let mut value = 0.0;
    for level in 0..12 {
        // level 0 visits every multiple of h, later levels the odd ones
        let step = if level == 0 { 1 } else { 2 };
        let mut k = 1;
        let mut quiet = 0;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            let contrib = eval(t) + eval(-t);
            sum += contrib;
            if contrib.abs() <= 1e-18 * sum.abs().max(1e-300) {
                quiet += 1;
                if quiet >= 8 {
                    break;
                }
            } else {
                quiet = 0;
            }
            k += step;
        }
        value = sum * h * half;
        if level > 1 {
            let diff = (value - prev).abs();
            if diff <= tol * value.abs().max(1e-300) + tol {
                return QuadResult {
                    value,
                    err_estimate: diff,
                    converged: true,
                };
            }
        }
        prev = value;
        h *= 0.5;
    }
    QuadResult {
        value,
        err_estimate: (value - prev).abs(),
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gk_polynomial_exact() {
        let r = adaptive_gk(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12, 1e-12);
        // antiderivative x^4/4 - x^2 + x evaluated: (81/4-9+3) - (1/4-1-1)
        assert_relative_eq!(r.value, 16.0, epsilon = 1e-10);
        assert!(r.converged);
    }

    #[test]
    fn gk_near_singular_peak() {
        // 1/(x^2 + 1e-6) over [-1, 1] = 2 atan(1e3) * 1e3
        let r = adaptive_gk(|x| 1.0 / (x * x + 1e-6), -1.0, 1.0, 1e-10, 1e-10);
        let exact = 2.0 * 1e3 * (1e3f64).atan();
        assert_relative_eq!(r.value, exact, max_relative = 1e-9);
    }

    #[test]
    fn gk_split_points() {
        let r = adaptive_gk_split(|x: f64| x.abs(), &[-1.0, 0.0, 1.0], 1e-13, 1e-13);
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn tanh_sinh_smooth() {
        let r = tanh_sinh(|x, _, _| x.exp(), 0.0, 1.0, 1e-12);
        assert_relative_eq!(r.value, std::f64::consts::E - 1.0, max_relative = 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        // int_0^1 x^{-1/2} dx = 2, singular at the left endpoint
        let r = tanh_sinh(|_, da, _| da.powf(-0.5), 0.0, 1.0, 1e-12);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-10);
        // int_0^1 (x(1-x))^{-1/3} dx = B(2/3, 2/3)
        let r = tanh_sinh(|_, da, db| (da * db).powf(-1.0 / 3.0), 0.0, 1.0, 1e-12);
        let expect = {
            let lg = |x: f64| crate::specfun::ln_gamma(x).unwrap();
            (2.0 * lg(2.0 / 3.0) - lg(4.0 / 3.0)).exp()
        };
        assert_relative_eq!(r.value, expect, max_relative = 1e-10);
    }

    #[test]
    fn tanh_sinh_log_singularity() {
        // int_0^1 ln(x) dx = -1
        let r = tanh_sinh(|_, da, _| da.ln(), 0.0, 1.0, 1e-12);
        assert_relative_eq!(r.value, -1.0, max_relative = 1e-11);
    }
}
