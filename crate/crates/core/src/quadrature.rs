//! Gauss–Legendre quadrature and bracketed root finding.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n > 0, "a quadrature rule needs at least one node");
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi's initial guess, then Newton on P_n.
        let k = (i + 1) as f64;
        let nf = n as f64;
        let mut x = libm::cos(core::f64::consts::PI * (k - 0.25) / (nf + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule.reverse();
    rule
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn apply_rule(rule: &[(f64, f64)], f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// `rule` mapped onto `panels` equal sub-intervals of `[a, b]`.
pub fn composite_rule(a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let lo = a + width * p as f64;
        let mid = lo + 0.5 * width;
        out.extend(rule.iter().map(|&(x, w)| (mid + 0.5 * width * x, 0.5 * width * w)));
    }
    out
}

const ADAPTIVE_ORDER: usize = 16;
const MAX_DEPTH: usize = 40;

/// Adaptive Gauss–Legendre integration to absolute tolerance `tol`.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("cannot integrate over [{a}, {b}] to tolerance {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let rule = gauss_legendre(ADAPTIVE_ORDER);
    let whole = apply_rule(&rule, &mut f, a, b);
    refine(&rule, &mut f, a, b, whole, tol, 0)
}

fn refine(
    rule: &[(f64, f64)],
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = apply_rule(rule, f, a, m);
    let right = apply_rule(rule, f, m, b);
    let sum = left + right;
    let err = (sum - whole).abs();
    if err <= tol || (depth > 4 && err <= 64.0 * f64::EPSILON * sum.abs()) {
        return Ok(sum);
    }
    if depth >= MAX_DEPTH || !err.is_finite() {
        return Err(Error::InvalidState(format!("quadrature did not converge on [{a}, {b}] (error {err:.3e})")));
    }
    Ok(refine(rule, f, a, m, left, 0.5 * tol, depth + 1)? + refine(rule, f, m, b, right, 0.5 * tol, depth + 1)?)
}

/// Bisection on a bracket with `f(lo)` and `f(hi)` of opposite sign (or zero).
pub fn bisect(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidArgument(format!("[{lo}, {hi}] does not bracket a root")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
