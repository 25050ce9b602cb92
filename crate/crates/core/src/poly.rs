//! The four Gonchar polynomial families, built with exact rational
//! coefficients, plus complex root finding, structural identities and the
//! trinomial / force-field analysis behind the second and fourth kinds.
//!
//! For s = d-1-2m the characteristic functions of the critical-distance
//! problem reduce to polynomials: the sphere energy W_s is rational (the
//! sqrt(pi) factors of the half-integer gamma values cancel) and the
//! hypergeometric factor of the potential terminates after m+1 terms, so
//! every coefficient is an exact rational. Construction stays in rational
//! arithmetic; floating point enters only for root finding.

pub use crate::sphere::GoncharKind;
use crate::{Error, Result};
use num::bigint::BigInt;
use num::complex::Complex64;
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Rat = BigRational;

fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Which construction a polynomial came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gonchar(GoncharKind),
    /// The Egervary trinomial P_d(q; w) = (1 + 1/q) w^d + w - 2.
    Trinomial,
}

/// Exact-rational-coefficient polynomial, ascending degree order.
#[derive(Debug, Clone)]
pub struct RationalPoly {
    pub coeffs: Vec<Rat>,
    pub family: Family,
    pub d: u32,
    pub q: Rat,
    pub m: u32,
}

impl RationalPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap()).collect()
    }

    pub fn eval_rational(&self, z: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc * z + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs_f64().iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Exact |p(z)| for a complex point with f64 components.
    pub fn residual_at(&self, z: Complex64) -> f64 {
        let zr = Rat::from_float(z.re).unwrap_or_else(Rat::zero);
        let zi = Rat::from_float(z.im).unwrap_or_else(Rat::zero);
        let (mut re, mut im) = (Rat::zero(), Rat::zero());
        for c in self.coeffs.iter().rev() {
            let nre = &re * &zr - &im * &zi + c;
            let nim = &re * &zi + &im * &zr;
            re = nre;
            im = nim;
        }
        let norm2 = &re * &re + &im * &im;
        norm2.to_f64().map(f64::sqrt).unwrap_or(f64::INFINITY)
    }
}

// --- exact building blocks ---------------------------------------------

/// Gamma(n/2) as (rational, number of sqrt(pi) factors), n >= 1.
fn gamma_half(n: i64) -> (Rat, u32) {
    assert!(n >= 1);
    if n % 2 == 0 {
        // (n/2 - 1)!
        let mut v = Rat::one();
        for k in 2..n / 2 {
            v *= rat_int(k);
        }
        (v, 0)
    } else {
        // Gamma(k + 1/2) = (2k)! / (4^k k!) sqrt(pi), k = (n-1)/2
        let k = (n - 1) / 2;
        let mut num = Rat::one();
        for j in 1..=2 * k {
            num *= rat_int(j);
        }
        let mut den = Rat::one();
        for j in 1..=k {
            den *= rat_int(j);
        }
        den *= rat_int(4).pow(k as i32);
        (num / den, 1)
    }
}

/// Exact sphere energy W_{d-1-2m}(S^d): rational for s = d - 1 - 2m.
pub fn sphere_energy_rational(d: u32, m: u32) -> Result<Rat> {
    let di = d as i64;
    let mi = m as i64;
    let s = di - 1 - 2 * mi;
    if d < 2 || s <= 0 {
        return Err(Error::Domain(format!(
            "rational energy needs d >= 2 and s = d-1-2m > 0, got d = {d}, m = {m}"
        )));
    }
    let (g_d, p1) = gamma_half(2 * di);
    let (g_ds2, p2) = gamma_half(2 * mi + 1); // Gamma((d-s)/2) = Gamma(m + 1/2)
    let (g_d2, p3) = gamma_half(di);
    let (g_dm, p4) = gamma_half(di + 1 + 2 * mi); // Gamma(d - s/2)
    debug_assert_eq!(p1 + p2, p3 + p4, "sqrt(pi) must cancel");
    let two_s = Rat::from_integer(BigInt::from(2).pow(s as u32));
    Ok(g_d * g_ds2 / (two_s * g_d2 * g_dm))
}

fn poly_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    out
}

fn poly_scale(a: &[Rat], k: &Rat) -> Vec<Rat> {
    a.iter().map(|c| c * k).collect()
}

/// (c0 + c1 R)^n expanded.
fn binomial_power(c0: i64, c1: i64, n: u32) -> Vec<Rat> {
    let mut acc = vec![Rat::one()];
    let lin = vec![rat_int(c0), rat_int(c1)];
    for _ in 0..n {
        acc = poly_mul(&acc, &lin);
    }
    acc
}

/// R^k as a coefficient vector.
fn monomial(k: u32) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); k as usize + 1];
    v[k as usize] = Rat::one();
    v
}

/// Terminating hypergeometric coefficients of the potential:
/// c_k = (-m)_k (s/2)_k / (((d+1)/2)_k k!), k = 0..m, as rationals.
fn potential_poly_coeffs(d: u32, m: u32) -> Vec<Rat> {
    let s_half = rat(d as i64 - 1 - 2 * m as i64, 2);
    let c_base = rat(d as i64 + 1, 2);
    let mut out = Vec::with_capacity(m as usize + 1);
    let mut term = Rat::one();
    out.push(term.clone());
    for k in 0..m as i64 {
        let kf = rat_int(k);
        term = term * (rat_int(-(m as i64)) + &kf) * (&s_half + &kf)
            / ((&c_base + &kf) * (kf + Rat::one()));
        out.push(term.clone());
    }
    out
}

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.len() > 1 && v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

/// Core constructor without the sign-of-q precondition (the structural
/// identities evaluate families at charges of either sign).
fn build_poly_unchecked(kind: GoncharKind, d: u32, q: &Rat, m: u32) -> Result<RationalPoly> {
    let di = d as i64;
    let s = di - 1 - 2 * m as i64;
    if d < 2 || s <= 0 {
        return Err(Error::Domain(format!(
            "polynomial family needs d >= 2 and s = d-1-2m > 0, got d = {d}, m = {m}"
        )));
    }
    if q.is_zero() {
        return Err(Error::Domain("charge q must be nonzero".into()));
    }
    let w = sphere_energy_rational(d, m)?;
    let w_over_q = &w / q;
    let upoly = potential_poly_coeffs(d, m);
    let two_m = 2 * m;
    // exterior: R^{d-1} U(R) = sum_k c_k R^{2(m-k)}; interior: sum_k c_k R^{2k}
    let u_ext: Vec<Rat> = {
        let mut v = vec![Rat::zero(); two_m as usize + 1];
        for (k, c) in upoly.iter().enumerate() {
            v[(two_m as usize) - 2 * k] = c.clone();
        }
        v
    };
    let u_int: Vec<Rat> = {
        let mut v = vec![Rat::zero(); two_m as usize + 1];
        for (k, c) in upoly.iter().enumerate() {
            v[2 * k] = c.clone();
        }
        v
    };
    let coeffs = match kind {
        GoncharKind::First => {
            // [W/q (R-1)^d - (R+1)^{d-s}] R^{d-1} + (R-1)^d R^{d-1} U(R)
            let a = poly_mul(
                &poly_scale(&binomial_power(-1, 1, d), &w_over_q),
                &monomial(d - 1),
            );
            let b = poly_mul(&binomial_power(1, 1, two_m + 1), &monomial(d - 1));
            let c = poly_mul(&binomial_power(-1, 1, d), &u_ext);
            poly_add(&poly_add(&a, &poly_scale(&b, &rat_int(-1))), &c)
        }
        GoncharKind::Second => {
            // W/q (1-R)^d - (1+R)^{d-s} + (1-R)^d U(R)
            let a = poly_scale(&binomial_power(1, -1, d), &w_over_q);
            let b = binomial_power(1, 1, two_m + 1);
            let c = poly_mul(&binomial_power(1, -1, d), &u_int);
            poly_add(&poly_add(&a, &poly_scale(&b, &rat_int(-1))), &c)
        }
        GoncharKind::Third => {
            // [W/q (R+1)^d - (R-1)^{d-s}] R^{d-1} + (R+1)^d R^{d-1} U(R)
            let a = poly_mul(
                &poly_scale(&binomial_power(1, 1, d), &w_over_q),
                &monomial(d - 1),
            );
            let b = poly_mul(&binomial_power(-1, 1, two_m + 1), &monomial(d - 1));
            let c = poly_mul(&binomial_power(1, 1, d), &u_ext);
            poly_add(&poly_add(&a, &poly_scale(&b, &rat_int(-1))), &c)
        }
        GoncharKind::Fourth => {
            // W/q (1+R)^d - (1-R)^{d-s} + (1+R)^d U(R)
            let a = poly_scale(&binomial_power(1, 1, d), &w_over_q);
            let b = binomial_power(1, -1, two_m + 1);
            let c = poly_mul(&binomial_power(1, 1, d), &u_int);
            poly_add(&poly_add(&a, &poly_scale(&b, &rat_int(-1))), &c)
        }
    };
    Ok(RationalPoly {
        coeffs: trim(coeffs),
        family: Family::Gonchar(kind),
        d,
        q: q.clone(),
        m,
    })
}

/// Build the Gonchar polynomial of the given kind for s = d - 1 - 2m.
///
/// Sign convention of the underlying theorems: q > 0 for the first and
/// second kinds, q < 0 for the third and fourth.
pub fn build_poly(kind: GoncharKind, d: u32, q: Rat, m: u32) -> Result<RationalPoly> {
    let positive_kind = matches!(kind, GoncharKind::First | GoncharKind::Second);
    if positive_kind != q.is_positive() {
        return Err(Error::Domain(format!(
            "{kind:?} requires q {} 0",
            if positive_kind { ">" } else { "<" }
        )));
    }
    build_poly_unchecked(kind, d, &q, m)
}

/// The trinomial `P_d(q; w) = (1 + 1/q) w^d + w - 2` behind the second and
/// fourth kinds (B(d,q;z) = P_d(q; 1-z), D(d,q';z) = P_d(q'; 1+z)).
pub fn trinomial(d: u32, q: &Rat) -> Result<RationalPoly> {
    if d < 1 {
        return Err(Error::Domain("trinomial needs d >= 1".into()));
    }
    if q.is_zero() || *q == rat_int(-1) {
        return Err(Error::Domain(format!("trinomial undefined at q = {q}")));
    }
    let mut coeffs = vec![Rat::zero(); d as usize + 1];
    coeffs[0] = rat_int(-2);
    coeffs[1] = Rat::one();
    coeffs[d as usize] += Rat::one() + q.recip();
    Ok(RationalPoly {
        coeffs: trim(coeffs),
        family: Family::Trinomial,
        d,
        q: q.clone(),
        m: 0,
    })
}

// --- root finding --------------------------------------------------------

/// All complex roots plus exact residuals.
#[derive(Debug, Clone)]
pub struct RootSet {
    /// Sorted by (re, im).
    pub roots: Vec<Complex64>,
    /// |p(z_i)| evaluated in exact rational arithmetic.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

fn horner_c(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex64::new(c, 0.0);
    }
    (p, dp)
}

/// Simultaneous Aberth-Ehrlich iteration from a circle of radius
/// `1 + max |c_i / c_n|` with seeded random phases, polished by Newton steps
/// evaluated in exact rational arithmetic.
pub fn roots(p: &RationalPoly) -> Result<RootSet> {
    let coeffs = p.coeffs_f64();
    let n = coeffs.len() - 1;
    if n < 1 {
        return Err(Error::Domain("root finding needs degree >= 1".into()));
    }
    // Initial guesses on circles whose radii come from the upper convex
    // hull of (i, log|c_i|): each hull edge of horizontal extent k
    // contributes k points at the edge's modulus estimate. Randomized
    // phases with a fixed seed keep the output deterministic.
    let mut rng = ChaCha8Rng::seed_from_u64(0x6f6e6368);
    let logc: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| (i, c.abs().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &(i, y) in &logc {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 - x1) as f64 * (y - y1) - (i - x1) as f64 * (y2 - y1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((i, y));
    }
    let mut zs: Vec<Complex64> = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i1, y1) = w[0];
        let (i2, y2) = w[1];
        let k = i2 - i1;
        let radius = ((y1 - y2) / k as f64).exp();
        for j in 0..k {
            let jitter: f64 = rng.gen_range(-0.25..0.25);
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5 + jitter) / k as f64 + 0.3779;
            zs.push(Complex64::from_polar(radius, theta));
        }
    }
    while zs.len() < n {
        zs.push(Complex64::from_polar(
            1.0,
            rng.gen_range(0.0..std::f64::consts::TAU),
        ));
    }
    zs.truncate(n);
    // |p| at machine level relative to sum |c_k| |z|^k counts as converged;
    // frozen roots stop moving so clusters cannot destabilize each other
    let abs_coeffs: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
    let floor_at = |z: Complex64| -> f64 {
        let r = z.norm();
        let mut acc = 0.0;
        for &c in abs_coeffs.iter().rev() {
            acc = acc * r + c;
        }
        acc * (n as f64) * f64::EPSILON
    };
    let mut frozen = vec![false; n];
    let mut converged = false;
    for _ in 0..1000 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let (mut pv, mut dv) = horner_c(&coeffs, zs[i]);
            // pull in any iterate that escaped to overflow territory
            let mut guard = 0;
            while (!pv.is_finite() || !dv.is_finite()) && guard < 600 {
                zs[i] *= 0.7;
                let e = horner_c(&coeffs, zs[i]);
                pv = e.0;
                dv = e.1;
                guard += 1;
            }
            if pv.norm() <= floor_at(zs[i]) {
                frozen[i] = true;
                continue;
            }
            let newton = if dv.norm() > 0.0 {
                pv / dv
            } else {
                Complex64::new(1e-12, 1e-12)
            };
            let mut rep = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = zs[i] - zs[j];
                    if diff.norm() > 1e-300 {
                        rep += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * rep;
            let mut step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            // limit runaway corrections near iterate collisions
            let cap = 0.5 * (1.0 + zs[i].norm());
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            zs[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + zs[i].norm()));
        }
        if max_step < 1e-14 || frozen.iter().all(|&f| f) {
            converged = true;
            break;
        }
    }
    // Refinement sweeps with exact rational evaluation: the expanded
    // coefficients can be so ill-conditioned (binomial scale ~ 1e11 at
    // d = 40) that f64 Horner noise covers the root locations entirely;
    // rational arithmetic removes the evaluation error, leaving only the
    // f64 rounding of the iterates themselves. The Aberth repulsion term
    // keeps refined iterates from collapsing onto one root.
    for _ in 0..80 {
        let mut moved = false;
        for i in 0..n {
            let (pv, dv) = exact_eval(p, zs[i]);
            if !pv.is_finite() || !dv.is_finite() {
                zs[i] *= 0.7;
                moved = true;
                continue;
            }
            if pv.norm() == 0.0 || dv.norm() == 0.0 {
                continue;
            }
            let newton = pv / dv;
            if newton.norm() <= 4.0 * f64::EPSILON * (1.0 + zs[i].norm()) {
                continue;
            }
            let mut rep = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = zs[i] - zs[j];
                    if diff.norm() > 1e-300 {
                        rep += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * rep;
            let mut step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            let cap = 0.5 * (1.0 + zs[i].norm());
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            zs[i] -= step;
            moved = true;
        }
        if !moved {
            converged = true;
            break;
        }
    }
    zs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let residuals: Vec<f64> = zs.iter().map(|&z| p.residual_at(z)).collect();
    Ok(RootSet {
        roots: zs,
        residuals,
        converged,
    })
}

/// p(z) and p'(z) at a complex f64 point, computed in rational arithmetic
/// and rounded once at the end.
fn exact_eval(p: &RationalPoly, z: Complex64) -> (Complex64, Complex64) {
    let zr = Rat::from_float(z.re).unwrap_or_else(Rat::zero);
    let zi = Rat::from_float(z.im).unwrap_or_else(Rat::zero);
    let (mut re, mut im) = (Rat::zero(), Rat::zero());
    let (mut dre, mut dim) = (Rat::zero(), Rat::zero());
    for c in p.coeffs.iter().rev() {
        let ndre = &dre * &zr - &dim * &zi + &re;
        let ndim = &dre * &zi + &dim * &zr + &im;
        dre = ndre;
        dim = ndim;
        let nre = &re * &zr - &im * &zi + c;
        let nim = &re * &zi + &im * &zr;
        re = nre;
        im = nim;
    }
    (
        Complex64::new(
            re.to_f64().unwrap_or(f64::NAN),
            im.to_f64().unwrap_or(f64::NAN),
        ),
        Complex64::new(
            dre.to_f64().unwrap_or(f64::NAN),
            dim.to_f64().unwrap_or(f64::NAN),
        ),
    )
}

/// Scale for residual acceptance: max|coeff| * max(1, |z|)^deg.
pub fn residual_scale(p: &RationalPoly, z: Complex64) -> f64 {
    let maxc = p
        .coeffs_f64()
        .iter()
        .map(|c| c.abs())
        .fold(0.0f64, f64::max);
    maxc * z.norm().max(1.0).powi(p.degree() as i32)
}

/// Bisection for a real root in [lo, hi]; requires a sign change.
pub fn real_root_in(p: &RationalPoly, lo: f64, hi: f64) -> Result<f64> {
    let coeffs = p.coeffs_f64();
    let eval = |x: f64| {
        let mut acc = 0.0;
        for &c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (eval(a), eval(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa > 0.0) == (fb > 0.0) {
        return Err(Error::NoSignChange(lo, hi));
    }
    let mut fa = fa;
    while b - a > 1e-13 * b.abs().max(1.0) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = eval(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

// --- structural identities ------------------------------------------------

/// Harmonic-case family values straight from the displayed equations,
/// in exact rational arithmetic.
fn harmonic_value(kind: GoncharKind, d: u32, q: &Rat, z: &Rat) -> Rat {
    let dn = d as usize;
    let pow = |base: Rat, n: usize| -> Rat {
        let mut acc = Rat::one();
        for _ in 0..n {
            acc *= &base;
        }
        acc
    };
    let one = Rat::one();
    match kind {
        GoncharKind::First => {
            (pow(z - &one, dn) / q - z - &one) * pow(z.clone(), dn - 1) + pow(z - &one, dn)
        }
        GoncharKind::Second => (&one + &one / q) * pow(&one - z, dn) - z - &one,
        GoncharKind::Third => {
            (pow(z + &one, dn) / q - z + &one) * pow(z.clone(), dn - 1) + pow(z + &one, dn)
        }
        GoncharKind::Fourth => (&one + &one / q) * pow(z + &one, dn) + z - &one,
    }
}

/// The structural identities connecting the four harmonic families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// z^d A(d, q z^{1-d}; 1/z) = B(d, q; z), and the converse.
    FirstSecondInversion,
    /// z^d C(d, q' z^{1-d}; 1/z) = D(d, q'; z), and the converse.
    ThirdFourthInversion,
    /// B(d, -q; -z) = D(d, -q; z) for q != 1.
    SecondFourthNegation,
    /// (-z)^{2d-1} A(d, 1; -1/z) = C(d, -1; z) for even d;
    /// the two sides sum to 2 (1+z)^d for odd d.
    FirstThirdCorrespondence,
    /// z^{2d-1} A(d, 1; 1/z) = A(d, 1; z) for even d (self-reciprocity).
    SelfReciprocalFirst,
    /// z^{2d-1} C(d, -1; 1/z) = -C(d, -1; z) for every d.
    ReciprocalThird,
}

/// Check one identity at the given rational samples (each nonzero).
pub fn identity_check(which: Identity, d: u32, q: &Rat, samples: &[Rat]) -> Result<()> {
    let one = Rat::one();
    let pow = |base: &Rat, n: u32| -> Rat {
        let mut acc = Rat::one();
        for _ in 0..n {
            acc *= base;
        }
        acc
    };
    for z in samples {
        if z.is_zero() {
            return Err(Error::Domain("samples must avoid 0".into()));
        }
        let zinv = z.recip();
        let z_pow_1md = pow(&zinv, d - 1); // z^{1-d}
        let (lhs, rhs) = match which {
            Identity::FirstSecondInversion => {
                let qq = q * &z_pow_1md;
                let lhs = pow(z, d) * harmonic_value(GoncharKind::First, d, &qq, &zinv);
                let rhs = harmonic_value(GoncharKind::Second, d, q, z);
                // converse in the same pass
                let lhs2 = pow(z, d) * harmonic_value(GoncharKind::Second, d, &qq, &zinv);
                let rhs2 = harmonic_value(GoncharKind::First, d, q, z);
                if lhs2 != rhs2 {
                    return Err(Error::IdentityViolation(format!(
                        "converse of first/second inversion at z = {z}"
                    )));
                }
                (lhs, rhs)
            }
            Identity::ThirdFourthInversion => {
                let qq = q * &z_pow_1md;
                let lhs = pow(z, d) * harmonic_value(GoncharKind::Third, d, &qq, &zinv);
                let rhs = harmonic_value(GoncharKind::Fourth, d, q, z);
                let lhs2 = pow(z, d) * harmonic_value(GoncharKind::Fourth, d, &qq, &zinv);
                let rhs2 = harmonic_value(GoncharKind::Third, d, q, z);
                if lhs2 != rhs2 {
                    return Err(Error::IdentityViolation(format!(
                        "converse of third/fourth inversion at z = {z}"
                    )));
                }
                (lhs, rhs)
            }
            Identity::SecondFourthNegation => {
                if *q == one {
                    return Err(Error::Domain("negation identity excludes q = 1".into()));
                }
                let neg_q = -q.clone();
                let neg_z = -z.clone();
                (
                    harmonic_value(GoncharKind::Second, d, &neg_q, &neg_z),
                    harmonic_value(GoncharKind::Fourth, d, &neg_q, z),
                )
            }
            Identity::FirstThirdCorrespondence => {
                let neg_inv = -zinv.clone();
                let a_val = harmonic_value(GoncharKind::First, d, &one, &neg_inv);
                let scale = pow(&(-z.clone()), 2 * d - 1);
                let c_val = harmonic_value(GoncharKind::Third, d, &rat_int(-1), z);
                if d % 2 == 0 {
                    (scale * a_val, c_val)
                } else {
                    (scale * a_val + c_val, rat_int(2) * pow(&(z + &one), d))
                }
            }
            Identity::SelfReciprocalFirst => {
                if d % 2 != 0 {
                    return Err(Error::Domain(
                        "self-reciprocity of the first kind needs even d".into(),
                    ));
                }
                (
                    pow(z, 2 * d - 1) * harmonic_value(GoncharKind::First, d, &one, &zinv),
                    harmonic_value(GoncharKind::First, d, &one, z),
                )
            }
            Identity::ReciprocalThird => (
                pow(z, 2 * d - 1) * harmonic_value(GoncharKind::Third, d, &rat_int(-1), &zinv),
                -harmonic_value(GoncharKind::Third, d, &rat_int(-1), z),
            ),
        };
        if lhs != rhs {
            return Err(Error::IdentityViolation(format!(
                "{which:?} fails at d = {d}, q = {q}, z = {z}"
            )));
        }
    }
    Ok(())
}

/// Run every identity at `n` random rational samples each.
pub fn identity_suite(n: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(20547);
    let mut samples = |avoid_one_over: bool| -> Vec<Rat> {
        (0..n)
            .map(|_| loop {
                let num = rng.gen_range(-40i64..=40);
                let den = rng.gen_range(1i64..=12);
                if num != 0 && !(avoid_one_over && num == den) {
                    break rat(num, den);
                }
            })
            .collect()
    };
    for d in [2u32, 3, 4, 5, 8, 9] {
        let q = rat(3, 2);
        identity_check(Identity::FirstSecondInversion, d, &q, &samples(false))?;
        identity_check(
            Identity::ThirdFourthInversion,
            d,
            &rat(-5, 3),
            &samples(false),
        )?;
        identity_check(
            Identity::SecondFourthNegation,
            d,
            &rat(7, 4),
            &samples(false),
        )?;
        identity_check(
            Identity::FirstThirdCorrespondence,
            d,
            &Rat::one(),
            &samples(false),
        )?;
        if d % 2 == 0 {
            identity_check(
                Identity::SelfReciprocalFirst,
                d,
                &Rat::one(),
                &samples(false),
            )?;
        }
        identity_check(Identity::ReciprocalThird, d, &rat_int(-1), &samples(false))?;
    }
    Ok(())
}

// --- trinomial force field and zero inclusion ------------------------------

/// Vertices of the two concentric polygons whose unit charges have the
/// trinomial zeros as force-field equilibrium points: d-1 inner vertices and
/// d outer vertices, with the phase offset alpha = 0 for
/// q in (-inf, -1) u (0, inf) and alpha = pi for q in (-1, 0).
pub fn egervary_vertices(d: u32, q: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if d < 2 {
        return Err(Error::Domain("vertices need d >= 2".into()));
    }
    if q == 0.0 || q == -1.0 {
        return Err(Error::Domain(format!("vertices undefined at q = {q}")));
    }
    let df = d as f64;
    let alpha = if q > -1.0 && q < 0.0 {
        std::f64::consts::PI
    } else {
        0.0
    };
    let scale = (1.0 + 1.0 / q).abs();
    let rho1 = ((2.0 - 1.0 / df) / scale).powf(1.0 / (df - 1.0));
    let rho2 = ((2.0 + 1.0 / (df - 1.0)) * 2.0 / scale).powf(1.0 / df);
    let inner = (1..=d - 1)
        .map(|k| {
            let phase = (-alpha + (2.0 * k as f64 + 1.0) * std::f64::consts::PI) / (df - 1.0);
            Complex64::from_polar(rho1, phase)
        })
        .collect();
    let outer = (1..=d)
        .map(|k| {
            let phase =
                (std::f64::consts::PI - alpha + (2.0 * k as f64 + 1.0) * std::f64::consts::PI) / df;
            Complex64::from_polar(rho2, phase)
        })
        .collect();
    Ok((inner, outer))
}

/// Largest force residual `|sum_k 1/(conj z - conj zeta_k)|` over the zeros
/// of P_d(1; w); zero would be exact equilibrium.
pub fn force_residual_max(d: u32) -> Result<f64> {
    let tri = trinomial(d, &Rat::one())?;
    let zeros = roots(&tri)?;
    let (inner, outer) = egervary_vertices(d, 1.0)?;
    let mut worst = 0.0f64;
    for &z in &zeros.roots {
        let zc = z.conj();
        let mut force = Complex64::new(0.0, 0.0);
        for v in inner.iter().chain(outer.iter()) {
            force += (zc - v.conj()).inv();
        }
        worst = worst.max(force.norm());
    }
    Ok(worst)
}

/// Zero-inclusion report for P_d(1; w) = 2 w^d + w - 2.
#[derive(Debug, Clone)]
pub struct SectorReport {
    pub d: u32,
    /// Unique positive root of x^d - x/2 - 1 (outer radius).
    pub outer_radius: f64,
    /// Unique positive root of x^d + x/2 - 1 (inner radius).
    pub inner_radius: f64,
    pub half_angle: f64,
    pub roots: Vec<Complex64>,
}

/// Verify that each annular sector centered on the d-th roots of unity
/// contains exactly one zero of `2 w^d + w - 2`, with the radius bounds
/// `2/3 <= t < 1 < s <= (3/2)^{1/(d-1)}`.
pub fn sector_inclusion(d: u32) -> Result<SectorReport> {
    if d < 3 {
        return Err(Error::Domain("sector inclusion needs d >= 3".into()));
    }
    let df = d as f64;
    let bis = |f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64| -> f64 {
        let mut fa = f(a);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let fm = f(mid);
            if (fm > 0.0) == (fa > 0.0) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
            if b - a < 1e-15 {
                break;
            }
        }
        0.5 * (a + b)
    };
    let s_rad = bis(&|x: f64| x.powi(d as i32) - 0.5 * x - 1.0, 1.0, 1.6);
    let t_rad = bis(&|x: f64| x.powi(d as i32) + 0.5 * x - 1.0, 0.4, 1.0);
    let bound_hi = 1.5f64.powf(1.0 / (df - 1.0));
    if !(2.0 / 3.0 <= t_rad && t_rad < 1.0 && 1.0 < s_rad && s_rad <= bound_hi) {
        return Err(Error::InclusionViolation(format!(
            "radius bounds fail for d = {d}: t = {t_rad}, s = {s_rad}, cap = {bound_hi}"
        )));
    }
    let zeros = roots(&trinomial(d, &Rat::one())?)?;
    let half_angle = bound_hi / (2.0 * df);
    let mut counts = vec![0usize; d as usize];
    for &z in &zeros.roots {
        let r = z.norm();
        if !(t_rad - 1e-9 <= r && r <= s_rad + 1e-9) {
            return Err(Error::InclusionViolation(format!(
                "root {z} of P_{d}(1;.) outside the annulus [{t_rad}, {s_rad}]"
            )));
        }
        let arg = z.arg();
        for (k, count) in counts.iter_mut().enumerate() {
            let center = 2.0 * std::f64::consts::PI * k as f64 / df;
            let tau = 2.0 * std::f64::consts::PI;
            let mut diff = (arg - center).rem_euclid(tau);
            if diff > std::f64::consts::PI {
                diff = tau - diff;
            }
            if diff <= half_angle + 1e-12 {
                *count += 1;
            }
        }
    }
    for (k, &c) in counts.iter().enumerate() {
        if c != 1 {
            return Err(Error::InclusionViolation(format!(
                "sector {k} of d = {d} holds {c} roots, expected exactly 1"
            )));
        }
    }
    Ok(SectorReport {
        d,
        outer_radius: s_rad,
        inner_radius: t_rad,
        half_angle,
        roots: zeros.roots,
    })
}

// --- zero maps -------------------------------------------------------------

/// Flat (d, root) table over a dimension list, for export.
pub fn zero_map(
    kind: GoncharKind,
    d_list: &[u32],
    q: &Rat,
    m: u32,
) -> Result<Vec<(u32, Complex64)>> {
    let mut out = Vec::new();
    for &d in d_list {
        let p = build_poly(kind, d, q.clone(), m)?;
        for z in roots(&p)?.roots {
            out.push((d, z));
        }
    }
    Ok(out)
}

/// Distance diagnostics of the zero set.
///
/// For the second kind the zeros approach the circle |z - 1| = 1 and for the
/// fourth |z + 1| = 1; the value is the largest distance of a zero to that
/// circle. For the first and third kinds the reference is the conjectured
/// union of the circles |z| = 1, |z -+ 1| = 1 with the two vertical segments
/// through the intersection points; purely a diagnostic.
pub fn circle_distance(kind: GoncharKind, d: u32, q: &Rat) -> Result<f64> {
    let p = build_poly(kind, d, q.clone(), 0)?;
    let zs = roots(&p)?;
    let dist = |z: Complex64| -> f64 {
        match kind {
            GoncharKind::Second => ((z - Complex64::new(1.0, 0.0)).norm() - 1.0).abs(),
            GoncharKind::Fourth => ((z + Complex64::new(1.0, 0.0)).norm() - 1.0).abs(),
            GoncharKind::First | GoncharKind::Third => gamma_set_distance(z),
        }
    };
    Ok(zs.roots.iter().map(|&z| dist(z)).fold(0.0, f64::max))
}

/// Distance to the three circles |z| = 1, |z - 1| = 1, |z + 1| = 1 and the
/// vertical segments Re z = +-1/2, |Im z| <= sqrt(3)/2 joining their
/// intersection points.
fn gamma_set_distance(z: Complex64) -> f64 {
    let c0 = (z.norm() - 1.0).abs();
    let c1 = ((z - Complex64::new(1.0, 0.0)).norm() - 1.0).abs();
    let c2 = ((z + Complex64::new(1.0, 0.0)).norm() - 1.0).abs();
    let seg = |x0: f64| -> f64 {
        let ylim = 3f64.sqrt() / 2.0;
        if z.im.abs() <= ylim {
            (z.re - x0).abs()
        } else {
            (z - Complex64::new(x0, ylim.copysign(z.im))).norm()
        }
    };
    c0.min(c1).min(c2).min(seg(0.5)).min(seg(-0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one() -> Rat {
        Rat::one()
    }

    #[test]
    fn rational_energy_matches_float_formula() {
        for &(d, m) in &[(2u32, 0u32), (4, 0), (4, 1), (7, 2), (9, 3), (24, 2)] {
            let s = d as f64 - 1.0 - 2.0 * m as f64;
            let exact = sphere_energy_rational(d, m).unwrap().to_f64().unwrap();
            let float =
                crate::potential::riesz_energy(&crate::potential::RieszParams::new(d, s).unwrap())
                    .unwrap();
            assert_relative_eq!(exact, float, max_relative = 1e-13);
        }
        // harmonic m = 0 gives exactly 1
        assert_eq!(sphere_energy_rational(6, 0).unwrap(), one());
    }

    #[test]
    fn first_kind_d2_is_golden_cubic() {
        let p = build_poly(GoncharKind::First, 2, one(), 0).unwrap();
        let expect: Vec<Rat> = [1, -2, -2, 1].iter().map(|&k| rat_int(k)).collect();
        assert_eq!(p.coeffs, expect);
    }

    #[test]
    fn fourth_kind_unit_negative_charge_is_linear() {
        let p = build_poly(GoncharKind::Fourth, 3, rat_int(-1), 0).unwrap();
        assert_eq!(p.coeffs, vec![rat_int(-1), rat_int(1)]);
        let p = build_poly(GoncharKind::Fourth, 9, rat_int(-1), 0).unwrap();
        assert_eq!(p.coeffs, vec![rat_int(-1), rat_int(1)]);
    }

    #[test]
    fn second_kind_is_shifted_trinomial() {
        // B(d, q; z) = P_d(q; 1 - z)
        let q = rat(5, 3);
        let b = build_poly(GoncharKind::Second, 6, q.clone(), 0).unwrap();
        let tri = trinomial(6, &q).unwrap();
        for k in -6..=6 {
            let z = rat(k, 5);
            let w = Rat::one() - &z;
            assert_eq!(b.eval_rational(&z), tri.eval_rational(&w));
        }
    }

    #[test]
    fn wrong_charge_sign_is_rejected() {
        assert!(build_poly(GoncharKind::First, 3, rat_int(-2), 0).is_err());
        assert!(build_poly(GoncharKind::Fourth, 3, rat_int(2), 0).is_err());
        assert!(build_poly(GoncharKind::First, 4, one(), 2).is_err()); // s <= 0
    }

    #[test]
    fn poly_matches_gonchar_function_along_the_axis() {
        // the rational construction evaluates to the transcendental-form
        // characteristic function for s = d-1-2m
        use crate::potential::RieszParams;
        use crate::sphere::{gonchar_function, FieldConfig};
        for &(kind, d, m, qv, r) in &[
            (GoncharKind::First, 6u32, 1u32, 2.0f64, 1.7f64),
            (GoncharKind::Second, 6, 1, 2.0, 0.45),
            (GoncharKind::Third, 7, 2, -1.5, 2.2),
            (GoncharKind::Fourth, 7, 2, -1.5, 0.3),
        ] {
            let s = d as f64 - 1.0 - 2.0 * m as f64;
            let q = Rat::from_float(qv).unwrap();
            let p = build_poly(kind, d, q, m).unwrap();
            let cfg = FieldConfig::new(RieszParams::new(d, s).unwrap(), qv, r).unwrap();
            let transcendental = gonchar_function(kind, &cfg).unwrap();
            assert_relative_eq!(p.eval_f64(r), transcendental, max_relative = 1e-10);
        }
    }

    #[test]
    fn roots_of_golden_cubic() {
        let p = build_poly(GoncharKind::First, 2, one(), 0).unwrap();
        let rs = roots(&p).unwrap();
        assert_eq!(rs.roots.len(), 3);
        let expected = [-1.0, (3.0 - 5f64.sqrt()) / 2.0, (3.0 + 5f64.sqrt()) / 2.0];
        let mut sorted = expected;
        sorted.sort_by(f64::total_cmp);
        for (z, e) in rs.roots.iter().zip(sorted.iter()) {
            assert!((z.re - e).abs() < 1e-12 && z.im.abs() < 1e-13, "{z} vs {e}");
        }
        for (&res, &z) in rs.residuals.iter().zip(rs.roots.iter()) {
            assert!(res <= 1e-12 * residual_scale(&p, z));
        }
    }

    #[test]
    fn root_count_and_conjugate_symmetry() {
        let p = build_poly(GoncharKind::First, 5, one(), 0).unwrap();
        assert_eq!(p.degree(), 9); // 2d - 1
        let rs = roots(&p).unwrap();
        assert_eq!(rs.roots.len(), 9);
        // non-real roots pair up
        for &z in rs.roots.iter().filter(|z| z.im.abs() > 1e-12) {
            let best = rs
                .roots
                .iter()
                .map(|&w| (w - z.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "conjugate of {z} missing");
        }
    }

    #[test]
    fn residuals_across_families() {
        for &(kind, q) in &[
            (GoncharKind::First, 1i64),
            (GoncharKind::Second, 1),
            (GoncharKind::Third, -1),
            (GoncharKind::Fourth, -2),
        ] {
            for &d in &[6u32, 12, 24] {
                for m in 0..=2u32 {
                    if 2 * m + 1 >= d {
                        continue;
                    }
                    if kind == GoncharKind::Fourth && q == -1 && m == 0 {
                        continue; // degenerate linear family
                    }
                    let p = build_poly(kind, d, rat_int(q), m).unwrap();
                    let rs = roots(&p).unwrap();
                    assert_eq!(rs.roots.len(), p.degree());
                    for (&res, &z) in rs.residuals.iter().zip(rs.roots.iter()) {
                        assert!(
                            res <= 1e-12 * residual_scale(&p, z),
                            "{kind:?} d={d} m={m}: residual {res:.2e} at {z}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn second_and_fourth_kind_zeros_are_simple() {
        for &d in &[6u32, 12, 24] {
            for (kind, q) in [(GoncharKind::Second, 1i64), (GoncharKind::Fourth, -2)] {
                let p = build_poly(kind, d, rat_int(q), 0).unwrap();
                let rs = roots(&p).unwrap();
                let mut min_gap = f64::INFINITY;
                for i in 0..rs.roots.len() {
                    for j in 0..i {
                        min_gap = min_gap.min((rs.roots[i] - rs.roots[j]).norm());
                    }
                }
                assert!(min_gap > 1e-8, "{kind:?} d={d}: gap {min_gap:.2e}");
            }
        }
    }

    #[test]
    fn real_root_matches_critical_distance() {
        use crate::potential::RieszParams;
        use crate::sphere::{critical_distance, CriticalKind, Side};
        // (A, 2, 1, 0): golden; (B, 2, 1, 0): (sqrt 17 - 1)/4 from 1
        let p = build_poly(GoncharKind::First, 2, one(), 0).unwrap();
        let r = real_root_in(&p, 1.0 + 1e-9, 10.0).unwrap();
        assert_relative_eq!(r, (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-12);
        let p = build_poly(GoncharKind::Second, 2, one(), 0).unwrap();
        let r = real_root_in(&p, 0.0, 1.0).unwrap();
        assert_relative_eq!(1.0 - r, (17f64.sqrt() - 1.0) / 4.0, epsilon = 1e-12);
        assert!(real_root_in(&p, 0.5, 0.9).is_err()); // no sign change
                                                      // cross-validation against the transcendental solver
        for &(kind, d, m, qv, side) in &[
            (GoncharKind::First, 4u32, 0u32, 1.0f64, Side::Exterior),
            (GoncharKind::First, 6, 1, 2.5, Side::Exterior),
            (GoncharKind::Second, 5, 1, 0.7, Side::Interior),
            (GoncharKind::Third, 3, 0, -2.0, Side::Exterior),
            (GoncharKind::Third, 8, 2, -1.4, Side::Exterior),
            (GoncharKind::Fourth, 4, 0, -3.0, Side::Interior),
            (GoncharKind::Fourth, 9, 1, -1.2, Side::Interior),
            (GoncharKind::Second, 8, 2, 0.5, Side::Interior),
        ] {
            let s = d as f64 - 1.0 - 2.0 * m as f64;
            let res = critical_distance(&RieszParams::new(d, s).unwrap(), qv, side).unwrap();
            let expected = match res.kind {
                CriticalKind::One(r) => r,
                other => panic!("{other:?}"),
            };
            let p = build_poly(kind, d, Rat::from_float(qv).unwrap(), m).unwrap();
            let r = match side {
                Side::Exterior => real_root_in(&p, 1.0 + 1e-9, 50.0).unwrap(),
                _ => real_root_in(&p, 1e-9, 1.0 - 1e-9).unwrap(),
            };
            assert_relative_eq!(r, expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn identities_hold_exactly() {
        identity_suite(20).unwrap();
    }

    #[test]
    fn reciprocal_third_kind_roots_pair_up() {
        let p = build_poly(GoncharKind::Third, 5, rat_int(-1), 0).unwrap();
        let rs = roots(&p).unwrap();
        for &z in &rs.roots {
            let zinv = z.inv();
            let best = rs
                .roots
                .iter()
                .map(|&w| (w - zinv).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-9, "1/zeta missing for {z}");
        }
    }

    #[test]
    fn trinomial_basics() {
        // P_1 is linear with root 2/(2 + 1/q)
        let p = trinomial(1, &rat(1, 2)).unwrap();
        assert_eq!(p.degree(), 1);
        let root = -p.coeffs[0].to_f64().unwrap() / p.coeffs[1].to_f64().unwrap();
        assert_relative_eq!(root, 2.0 / (2.0 + 2.0), epsilon = 1e-15);
        assert!(trinomial(4, &rat_int(-1)).is_err());
        // simple-zeros criterion: discriminant condition of the trinomial
        // A w^{n+m} + B w^m + C with n = d-1, m = 1 keeps signs apart
        let d = 6i32;
        let (a, b, c) = (2.0f64, 1.0f64, -2.0f64);
        let lhs = (-1.0f64).powi(d) * a * c.powi(d - 1) / b.powi(d);
        let n = (d - 1) as f64;
        let rhs = (1.0 * n.powf(n)) / (n + 1.0).powf(n + 1.0);
        assert!(lhs < 0.0 && rhs > 0.0);
    }

    #[test]
    fn egervary_vertices_define_equilibrium() {
        let worst = force_residual_max(6).unwrap();
        assert!(worst <= 1e-8, "force residual {worst:.2e}");
    }

    #[test]
    fn sector_inclusion_small_dimensions() {
        for d in 3..=12 {
            let rep = sector_inclusion(d).unwrap();
            assert_eq!(rep.roots.len(), d as usize);
        }
        // bound check for d = 6
        let rep = sector_inclusion(6).unwrap();
        assert!(rep.inner_radius >= 2.0 / 3.0);
        assert!(rep.outer_radius <= 1.5f64.powf(0.2));
    }

    #[test]
    fn zeros_approach_reference_circles() {
        let mut prev = f64::INFINITY;
        for &d in &[10u32, 20, 40] {
            let dist = circle_distance(GoncharKind::Second, d, &one()).unwrap();
            assert!(dist < prev, "d = {d}: {dist} !< {prev}");
            prev = dist;
        }
        // degenerate fourth-kind family: single root at 1, distance 1 from
        // the circle |z + 1| = 1; excluded from the convergence claim
        let dist = circle_distance(GoncharKind::Fourth, 9, &rat_int(-1)).unwrap();
        assert_relative_eq!(dist, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_map_row_counts() {
        let table = zero_map(GoncharKind::First, &[12], &one(), 0).unwrap();
        assert_eq!(table.len(), 23); // degree 2d-1
        let table = zero_map(GoncharKind::Second, &[12], &one(), 0).unwrap();
        assert_eq!(table.len(), 12);
    }
}
