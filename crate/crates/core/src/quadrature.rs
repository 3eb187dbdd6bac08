//! Globally adaptive Gauss-Kronrod quadrature.
//!
//! The 21-point Kronrod rule with its embedded 10-point Gauss rule is applied
//! on panels; the panel with the largest error estimate is bisected until the
//! summed estimate meets the tolerance. Semi-infinite ranges are mapped onto a
//! finite interval by `s -> 1/s`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Tolerances for [`integrate`] and friends. The target is met when the
/// summed error estimate is below `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_panels: 20_000,
        }
    }
}

impl QuadConfig {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Upper limit of an integral: finite or the sentinel for `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperLimit {
    Finite(f64),
    Unbounded,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One application of the 21-point Kronrod rule with the QUADPACK error
/// heuristic.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        // Gauss nodes sit at the odd Kronrod indices.
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Panel { a, b, value, error }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<Integral> {
    integrate_with_breakpoints(f, &[a, b], cfg)
}

/// Integrate `f` over `[points[0], points[last]]`, starting from one panel per
/// consecutive pair of `points`. Breakpoints should sit where the integrand
/// changes character (trajectory steps, kinks).
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    cfg: QuadConfig,
) -> Result<Integral> {
    if points.len() < 2 {
        return Err(Error::InvalidInput(
            "quadrature needs at least two breakpoints".into(),
        ));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite quadrature limit".into()));
    }

    let mut heap = BinaryHeap::with_capacity(points.len());
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let panel = gk21(&f, w[0], w[1]);
        evaluations += 21;
        value += panel.value;
        error += panel.error;
        heap.push(panel);
    }
    let max_panels = cfg.max_panels.max(heap.len() + 1);

    while error > cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
        if heap.len() >= max_panels {
            return Err(Error::Quadrature { value, error });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel can no longer be split in floating point.
            heap.push(worst);
            return Err(Error::Quadrature { value, error });
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    if !value.is_finite() {
        return Err(Error::Quadrature { value, error });
    }
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

/// Integrate `f` over `[a, upper)`. For an unbounded upper limit the tail
/// beyond `max(a, split)` is mapped to `(0, 1/max(a, split)]` by `s = 1/u`;
/// `split` should be of the order of the integrand's natural length scale.
pub fn integrate_upper<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    upper: UpperLimit,
    split: f64,
    cfg: QuadConfig,
) -> Result<Integral> {
    match upper {
        UpperLimit::Finite(b) => integrate(f, a, b, cfg),
        UpperLimit::Unbounded => {
            if !(split > 0.0) {
                return Err(Error::InvalidInput("split point must be positive".into()));
            }
            let c = a.max(split);
            let head = if c > a {
                integrate(&f, a, c, cfg)?
            } else {
                Integral {
                    value: 0.0,
                    error: 0.0,
                    evaluations: 0,
                }
            };
            let tail = integrate(
                |u: f64| {
                    if u <= 0.0 {
                        0.0
                    } else {
                        f(1.0 / u) / (u * u)
                    }
                },
                0.0,
                1.0 / c,
                cfg,
            )?;
            Ok(Integral {
                value: head.value + tail.value,
                error: head.error + tail.error,
                evaluations: head.evaluations + tail.evaluations,
            })
        }
    }
}
