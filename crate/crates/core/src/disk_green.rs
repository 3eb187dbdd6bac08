//! Green function of the unit disk and the stationarity system locating the
//! limit concentration points of low-energy nodal solutions.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    x1: f64,
    x2: f64,
}

impl DiskPoint {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        let r2 = x1 * x1 + x2 * x2;
        if !(r2 < 1.0) {
            return Err(Error::InvalidInput(format!("({x1}, {x2}) is not inside the unit disk")));
        }
        Ok(Self { x1, x2 })
    }

    pub const ORIGIN: DiskPoint = DiskPoint { x1: 0.0, x2: 0.0 };

    pub fn coords(&self) -> (f64, f64) {
        (self.x1, self.x2)
    }

    pub fn norm_sq(&self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2
    }

    fn dist_sq(&self, other: &DiskPoint) -> f64 {
        (self.x1 - other.x1).powi(2) + (self.x2 - other.x2).powi(2)
    }

    fn dot(&self, other: &DiskPoint) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }
}

/// `| |y| x - y/|y| |^2 = |x|^2 |y|^2 - 2 x·y + 1`, which equals
/// `|y|^2 |x - y/|y|^2|^2` and stays finite at `y = 0`.
fn image_dist_sq(x: &DiskPoint, y: &DiskPoint) -> f64 {
    x.norm_sq() * y.norm_sq() - 2.0 * x.dot(y) + 1.0
}

/// `G(x, y) = -(1/2π) ln|x-y| + (1/2π) ln|y| + (1/2π) ln|x - y/|y|^2|`,
/// with the limit `-(1/2π) ln|x|` at `y = 0`.
pub fn green(x: &DiskPoint, y: &DiskPoint) -> Result<f64> {
    let d2 = x.dist_sq(y);
    if d2 == 0.0 {
        return Err(Error::InvalidInput("Green function evaluated at its pole".into()));
    }
    Ok((image_dist_sq(x, y) / d2).ln() / (4.0 * PI))
}

/// `H(x, y) = G(x, y) + (1/2π) ln|x-y|`; `H(x, x) = (1/2π) ln(1 - |x|^2)`.
pub fn regular_part(x: &DiskPoint, y: &DiskPoint) -> f64 {
    image_dist_sq(x, y).ln() / (4.0 * PI)
}

/// Left-hand sides of the stationarity system for `x+ = (0, a)`,
/// `x- = (0, -b)`.
pub fn stationarity_residual(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let q = a * b + 1.0;
    (
        -1.0 / s + b / q - a / (a * a - 1.0),
        1.0 / s - a / q - b / (1.0 - b * b),
    )
}

fn stationarity_jacobian(a: f64, b: f64) -> [[f64; 2]; 2] {
    let s2 = (a + b).powi(2);
    let q2 = (a * b + 1.0).powi(2);
    [
        [
            1.0 / s2 - b * b / q2 + (a * a + 1.0) / (a * a - 1.0).powi(2),
            1.0 / s2 + 1.0 / q2,
        ],
        [
            -1.0 / s2 - 1.0 / q2,
            -1.0 / s2 + a * a / q2 - (1.0 + b * b) / (1.0 - b * b).powi(2),
        ],
    ]
}

/// `sqrt(sqrt(5) - 2)`, the positive root of `a^4 + 4a^2 - 1 = 0`.
pub fn antipodal_root() -> f64 {
    (5f64.sqrt() - 2.0).sqrt()
}

fn inf_norm(f: (f64, f64)) -> f64 {
    f.0.abs().max(f.1.abs())
}

/// Damped Newton iteration for the stationarity system inside `(0, 1)^2`.
pub fn solve_antipodal(guess: (f64, f64), tolerance: f64) -> Result<(f64, f64)> {
    let inside = |a: f64, b: f64| a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0;
    if !inside(guess.0, guess.1) {
        return Err(Error::InvalidInput(format!("guess {guess:?} outside (0,1)^2")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let (mut a, mut b) = guess;
    let mut trace = vec![(a, b)];
    let mut f = stationarity_residual(a, b);
    for _ in 0..100 {
        if inf_norm(f) < 1e-14 {
            break;
        }
        let j = stationarity_jacobian(a, b);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Divergence {
                reason: "singular Jacobian".into(),
                trace,
            });
        }
        let da = -(j[1][1] * f.0 - j[0][1] * f.1) / det;
        let db = -(-j[1][0] * f.0 + j[0][0] * f.1) / det;
        let mut t = 1.0;
        let accepted = loop {
            let (na, nb) = (a + t * da, b + t * db);
            if inside(na, nb) {
                let nf = stationarity_residual(na, nb);
                if inf_norm(nf) < inf_norm(f) || t < 1e-3 && inf_norm(nf).is_finite() {
                    break Some((na, nb, nf));
                }
            }
            t *= 0.5;
            if t < 1e-6 {
                break None;
            }
        };
        let Some((na, nb, nf)) = accepted else {
            return Err(Error::Divergence {
                reason: "line search left the unit square".into(),
                trace,
            });
        };
        let step = (na - a).abs().max((nb - b).abs());
        (a, b, f) = (na, nb, nf);
        trace.push((a, b));
        if step < 1e-16 {
            break;
        }
    }
    let root = antipodal_root();
    if inf_norm(f) >= tolerance || (a - b).abs() >= tolerance || (a - root).abs() >= tolerance {
        return Err(Error::Divergence {
            reason: format!("stopped at ({a}, {b}) with residual {:e}", inf_norm(f)),
            trace,
        });
    }
    Ok((a, b))
}

/// `8π sqrt(e) (G(x, x+) - G(x, x-))` with `x+ = (0, a)`, `x- = (0, -b)`.
pub fn limit_difference(x: &DiskPoint, a: f64, b: f64) -> Result<f64> {
    let plus = DiskPoint::new(0.0, a)?;
    let minus = DiskPoint::new(0.0, -b)?;
    Ok(8.0 * PI * E.sqrt() * (green(x, &plus)? - green(x, &minus)?))
}

/// Largest defects of `φ(-x1, x2) = φ(x1, x2)` and `φ(x1, -x2) = -φ(x1, x2)`
/// over a polar grid, skipping points within `0.05` of the poles.
pub fn reflection_defects(a: f64, b: f64) -> Result<(f64, f64)> {
    let (mut even, mut odd): (f64, f64) = (0.0, 0.0);
    for i in 1..20 {
        let r = 0.05 * i as f64;
        for k in 0..36 {
            let th = 2.0 * PI * (k as f64 + 0.25) / 36.0;
            let (x1, x2) = (r * th.cos(), r * th.sin());
            let near_pole = |y: f64| x1.abs() < 0.05 && (x2 - y).abs() < 0.05;
            if near_pole(a) || near_pole(-a) || near_pole(b) || near_pole(-b) {
                continue;
            }
            let phi = limit_difference(&DiskPoint::new(x1, x2)?, a, b)?;
            let mirror = limit_difference(&DiskPoint::new(-x1, x2)?, a, b)?;
            let flip = limit_difference(&DiskPoint::new(x1, -x2)?, a, b)?;
            even = even.max((phi - mirror).abs());
            odd = odd.max((phi + flip).abs());
        }
    }
    Ok((even, odd))
}

/// Trapezoidal mean of `G(·, y)` over the circle of `radius` about `center`.
pub fn circle_mean(y: &DiskPoint, center: &DiskPoint, radius: f64, n: usize) -> Result<f64> {
    let (c1, c2) = center.coords();
    let mut sum = 0.0;
    for k in 0..n {
        let th = 2.0 * PI * k as f64 / n as f64;
        sum += green(&DiskPoint::new(c1 + radius * th.cos(), c2 + radius * th.sin())?, y)?;
    }
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x1: f64, x2: f64) -> DiskPoint {
        DiskPoint::new(x1, x2).unwrap()
    }

    #[test]
    fn origin_limit() {
        let g = green(&pt(0.5, 0.0), &DiskPoint::ORIGIN).unwrap();
        assert!((g - 2f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!((g - 0.1103178).abs() < 1e-7);
    }

    #[test]
    fn matches_displayed_formula() {
        let (x, y) = (pt(0.3, -0.2), pt(-0.1, 0.6));
        let ys = y.norm_sq();
        let (y1, y2) = (y.x1 / ys, y.x2 / ys);
        let raw = (-(x.dist_sq(&y)).sqrt().ln()
            + ys.sqrt().ln()
            + ((x.x1 - y1).powi(2) + (x.x2 - y2).powi(2)).sqrt().ln())
            / (2.0 * PI);
        assert!((green(&x, &y).unwrap() - raw).abs() < 1e-14);
    }

    #[test]
    fn regular_part_values() {
        assert_eq!(regular_part(&DiskPoint::ORIGIN, &DiskPoint::ORIGIN), 0.0);
        let a = 0.4;
        let h = regular_part(&pt(0.0, a), &pt(0.0, a));
        assert!((h - (1.0 - a * a).ln() / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn pole_and_outside_rejected() {
        assert!(green(&pt(0.1, 0.1), &pt(0.1, 0.1)).is_err());
        assert!(DiskPoint::new(1.0, 0.0).is_err());
        assert!(DiskPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn system_at_root_and_off_root() {
        let a = antipodal_root();
        assert!((a.powi(4) + 4.0 * a * a - 1.0).abs() < 1e-15);
        let (f1, f2) = stationarity_residual(a, a);
        assert!(f1.abs() < 1e-12 && f2.abs() < 1e-12);
        let (g1, g2) = stationarity_residual(0.5, 0.5);
        assert!(g1.abs() > 1e-3 && g2.abs() > 1e-3);
    }

    #[test]
    fn jacobian_matches_differences() {
        let (a, b, h) = (0.37, 0.61, 1e-6);
        let j = stationarity_jacobian(a, b);
        let fa = |a, b| stationarity_residual(a, b);
        let (pa, ma) = (fa(a + h, b), fa(a - h, b));
        let (pb, mb) = (fa(a, b + h), fa(a, b - h));
        let fd = [
            [(pa.0 - ma.0) / (2.0 * h), (pb.0 - mb.0) / (2.0 * h)],
            [(pa.1 - ma.1) / (2.0 * h), (pb.1 - mb.1) / (2.0 * h)],
        ];
        for i in 0..2 {
            for k in 0..2 {
                assert!((j[i][k] - fd[i][k]).abs() < 1e-6, "{i}{k}");
            }
        }
    }

    #[test]
    fn newton_converges_from_both_guesses() {
        for guess in [(0.5, 0.5), (0.3, 0.7)] {
            let (a, b) = solve_antipodal(guess, 1e-10).unwrap();
            assert!((a - antipodal_root()).abs() < 1e-10 && (b - a).abs() < 1e-10);
        }
        assert!(solve_antipodal((1.5, 0.5), 1e-10).is_err());
    }

    #[test]
    fn harmonic_away_from_pole() {
        let y = pt(0.2, 0.3);
        let c = pt(-0.3, -0.2);
        let mean = circle_mean(&y, &c, 0.15, 256).unwrap();
        assert!((mean - green(&c, &y).unwrap()).abs() < 1e-8);
    }
}
