//! Bracketed scalar root finding.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Newton iteration safeguarded by a bisection bracket.
///
/// `f` must change sign on `[lo, hi]`. A Newton step that leaves the current
/// bracket (or a vanishing derivative) is replaced by a bisection step.
/// Converges when `|f(x)| < tol` or the bracket collapses to adjacent floats.
pub fn newton_bisect<F, D>(f: F, df: D, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFinding(format!(
            "no sign change on [{a}, {b}] (f = {fa}, {fb})"
        )));
    }
    let a_negative = fa < 0.0;
    let mut x = 0.5 * (a + b);

    for _ in 0..MAX_ITER {
        let fx = f(x);
        if fx.abs() < tol {
            return Ok(x);
        }
        if (fx < 0.0) == a_negative {
            a = x;
        } else {
            b = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) {
            return Ok(x);
        }
    }
    Err(Error::RootFinding(format!(
        "no convergence after {MAX_ITER} iterations near {x}"
    )))
}

/// Plain bisection for a fixed number of halvings.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, steps: usize) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    if fa.signum() == f(b).signum() {
        return Err(Error::RootFinding(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..steps {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Locate a sign change of `g` inside `[lo, hi]` where `g(lo)` and `g(hi)`
/// have opposite signs. Illinois-modified secant steps with a bisection
/// fallback; stops when `|g| < tol` or the bracket reaches float resolution.
pub fn refine_sign_change<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let (mut ga, mut gb) = (g(a), g(b));
    if ga == 0.0 {
        return a;
    }
    if gb == 0.0 {
        return b;
    }
    let mut side = 0i8;
    let mut best = if ga.abs() < gb.abs() { a } else { b };
    for i in 0..MAX_ITER {
        let width = (b - a).abs();
        if width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        let secant = (a * gb - b * ga) / (gb - ga);
        let lo_x = a.min(b);
        let hi_x = a.max(b);
        // Every fourth iterate bisects to guarantee bracket shrinkage.
        let x = if i % 4 == 3 || !(secant > lo_x && secant < hi_x) {
            0.5 * (a + b)
        } else {
            secant
        };
        let gx = g(x);
        best = x;
        if gx.abs() < tol || gx == 0.0 {
            return x;
        }
        if gx.signum() == gb.signum() {
            b = x;
            gb = gx;
            if side == -1 {
                ga *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            ga = gx;
            if side == 1 {
                gb *= 0.5;
            }
            side = 1;
        }
    }
    best
}
