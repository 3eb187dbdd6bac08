//! Independent oracles: nothing here calls the production integrator,
//! quadrature or root finders.
#![allow(dead_code)]

use std::f64::consts::PI;

pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, steps: usize) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) < 0.0, "no bracket on [{a}, {b}]");
    for _ in 0..steps {
        let m = 0.5 * (a + b);
        if (f(m) < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Power series of `J_0`.
pub fn j0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= -(x * x) / (4.0 * (k * k) as f64);
        sum += term;
    }
    sum
}

pub fn j0_zero(k: usize) -> f64 {
    let brackets = [(2.0, 3.0), (5.0, 6.0), (8.0, 9.0)];
    let (a, b) = brackets[k - 1];
    bisect(j0, a, b, 80)
}

pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Five-point first and second derivatives.
pub fn fd5<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> (f64, f64) {
    let (m2, m1, c, p1, p2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
    (
        (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
        (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h),
    )
}

/// Quantities of a shot integrated by classical RK4 in the linear radius.
#[derive(Debug, Clone)]
pub struct BruteShot {
    pub zeros: Vec<f64>,
    pub critical: Vec<(f64, f64)>,
    /// `∫_0^{last zero} u'^2 r dr` and `∫ |u|^{p+1} r dr`, trapezoidal.
    pub dirichlet: f64,
    pub lp1: f64,
}

/// Fixed-step RK4 for `u'' + u'/r + |u|^{p-1}u = 0`, `u(0) = u0`, stopping
/// at the `n_zeros`-th zero.
pub fn brute_shot(p: f64, u0: f64, n_zeros: usize, h: f64) -> BruteShot {
    let f = |u: f64| u.abs().powf(p - 1.0) * u;
    let rhs = |r: f64, u: f64, v: f64| (v, -v / r - f(u));
    let mut r = h;
    let mut u = u0 - f(u0) * h * h / 4.0;
    let mut v = -f(u0) * h / 2.0;
    let mut zeros = Vec::new();
    let mut critical = Vec::new();
    let mut dirichlet = 0.5 * v * v * r * h;
    let mut lp1 = 0.5 * u.abs().powf(p + 1.0) * r * h + 0.5 * h * h * u0.abs().powf(p + 1.0) * 0.5;
    loop {
        let (k1u, k1v) = rhs(r, u, v);
        let (k2u, k2v) = rhs(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = rhs(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = rhs(r + h, u + h * k3u, v + h * k3v);
        let un = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        let vn = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        let rn = r + h;
        if v * vn < 0.0 {
            let t = v / (v - vn);
            // Peak value from the quadratic through the step.
            critical.push((r + t * h, u + 0.5 * t * h * v));
        }
        if u * un <= 0.0 && u != 0.0 {
            let t = u / (u - un);
            let z = r + t * h;
            zeros.push(z);
            if zeros.len() == n_zeros {
                let th = t * h;
                dirichlet += 0.5 * th * (v * v * r + vn * vn * z);
                lp1 += 0.5 * th * u.abs().powf(p + 1.0) * r;
                return BruteShot {
                    zeros,
                    critical,
                    dirichlet,
                    lp1,
                };
            }
        }
        dirichlet += 0.5 * h * (v * v * r + vn * vn * rn);
        lp1 += 0.5 * h * (u.abs().powf(p + 1.0) * r + un.abs().powf(p + 1.0) * rn);
        r = rn;
        u = un;
        v = vn;
    }
}

/// Nodal-solution scalars from the brute-force shot and the scaling family.
#[derive(Debug, Clone, Copy)]
pub struct BruteNodal {
    pub nodal_radius: f64,
    pub peak_radius: f64,
    pub norm_minus: f64,
    pub norm_plus: f64,
    pub energy: f64,
    pub lp1_mass: f64,
}

pub fn brute_nodal(p: f64, h: f64) -> BruteNodal {
    let shot = brute_shot(p, -1.0, 2, h);
    let big_r = shot.zeros[1];
    let lam = big_r.powf(2.0 / (p - 1.0));
    let (sigma, peak) = shot
        .critical
        .iter()
        .copied()
        .find(|(c, _)| *c > shot.zeros[0])
        .expect("a maximum between the zeros");
    // ∫_B |∇u_p|^2 is scale invariant up to the amplitude factor λ^2.
    BruteNodal {
        nodal_radius: shot.zeros[0] / big_r,
        peak_radius: sigma / big_r,
        norm_minus: lam,
        norm_plus: lam * peak,
        energy: p * 2.0 * PI * lam * lam * shot.dirichlet,
        lp1_mass: p * 2.0 * PI * lam.powf(p + 1.0) * shot.lp1 / (big_r * big_r),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BruteGround {
    pub sup_norm: f64,
    pub energy: f64,
}

pub fn brute_ground(p: f64, h: f64) -> BruteGround {
    let shot = brute_shot(p, 1.0, 1, h);
    let lam = shot.zeros[0].powf(2.0 / (p - 1.0));
    BruteGround {
        sup_norm: lam,
        energy: p * 2.0 * PI * lam * lam * shot.dirichlet,
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
