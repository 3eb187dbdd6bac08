//! Blow-up rescalings `z_p^±`, distances to the limit profiles, and the
//! scalar identities tracked along a sweep in `p`.

mod extrapolate;
mod sweep;

pub use extrapolate::{extrapolate, ColumnFit, Extrapolation, Model, MIN_ROWS};
pub use sweep::{
    column, measure_row, sweep, Column, ConvergenceTable, RowData, SweepConfig, SweepRow, COLUMNS,
    DEFAULT_GRID,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limit_profiles::{eval_regular_profile, eval_singular_profile, AsymptoticConstants};
use crate::nodal_solver::{NodalSolution, RadialProfile};
use crate::quadrature::{integrate_with_breakpoints, QuadConfig};
use crate::radial_ode::weighted_power;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    NegativePart,
    PositivePart,
}

/// Samples of `z_p^-` or `z_p^+` on a uniform grid of the rescaled variable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RescaledProfile {
    pub kind: ProfileKind,
    pub p: f64,
    pub sample_points: Vec<f64>,
    pub values: Vec<f64>,
    /// `ε_p^-` or `ε_p^+`.
    pub scale: f64,
    /// Measured `l_p = s_p / ε_p^+` for the positive part.
    pub anchor: Option<f64>,
}

fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect()
}

/// `z_p^-(x) = p (1 - |u_p(ε_p^- x)| / ||u_p^-||)` on `[0, window_radius]`,
/// sampled at `n` points. Converges to `-U`.
pub fn rescale_negative(sol: &NodalSolution, window_radius: f64, n: usize) -> Result<RescaledProfile> {
    if !(window_radius > 0.0) {
        return Err(Error::InvalidInput("window radius must be positive".into()));
    }
    if window_radius.ln() > sol.ln_nodal_radius - sol.ln_eps_minus {
        return Err(Error::InvalidInput(format!(
            "window {window_radius} exceeds the nodal region r_p/ε = {}",
            (sol.ln_nodal_radius - sol.ln_eps_minus).exp()
        )));
    }
    let xs = uniform(0.0, window_radius, n);
    let values = xs
        .iter()
        .map(|&x| {
            if x == 0.0 {
                return 0.0;
            }
            let u = sol.profile.eval_log(sol.ln_eps_minus + x.ln()).0;
            sol.p * (1.0 - u.abs() / sol.norm_minus)
        })
        .collect();
    Ok(RescaledProfile {
        kind: ProfileKind::NegativePart,
        p: sol.p,
        sample_points: xs,
        values,
        scale: sol.eps_minus,
        anchor: None,
    })
}

/// `z_p^+(r) = p (u_p(s_p + ε_p^+ r) / u_p(s_p) - 1)` on `window`. Converges
/// to `Z_l(r + l)`.
pub fn rescale_positive(sol: &NodalSolution, window: (f64, f64), n: usize) -> Result<RescaledProfile> {
    let (a, b) = window;
    let lp = sol.peak_ratio();
    // s_p + ε r = s_p (1 + r / l_p), kept in log form.
    let lo_ok = 1.0 + a / lp > 0.0 && (a / lp).ln_1p() > sol.ln_nodal_radius - sol.ln_peak_radius;
    let hi_ok = (b / lp).ln_1p() < -sol.ln_peak_radius;
    if !(a < b) || !lo_ok || !hi_ok {
        return Err(Error::InvalidInput(format!(
            "window [{a}, {b}] outside the annulus image (l_p = {lp})"
        )));
    }
    let xs = uniform(a, b, n);
    let values = xs
        .iter()
        .map(|&r| {
            if r == 0.0 {
                return 0.0;
            }
            let u = sol.profile.eval_log(sol.ln_peak_radius + (r / lp).ln_1p()).0;
            sol.p * (u / sol.norm_plus - 1.0)
        })
        .collect();
    Ok(RescaledProfile {
        kind: ProfileKind::PositivePart,
        p: sol.p,
        sample_points: xs,
        values,
        scale: sol.eps_plus,
        anchor: Some(lp),
    })
}

fn centered_differences(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    (1..xs.len().saturating_sub(1))
        .map(|i| (ys[i + 1] - ys[i - 1]) / (xs[i + 1] - xs[i - 1]))
        .collect()
}

/// Sup of the value gap and of the centered-difference derivative gap
/// between the samples and `limit` over the samples inside `window`.
pub fn profile_distance<F: Fn(f64) -> f64>(
    sampled: &RescaledProfile,
    limit: F,
    window: (f64, f64),
) -> Result<(f64, f64)> {
    let xs = &sampled.sample_points;
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    let slack = 1e-12 * (last - first).abs().max(1.0);
    if window.0 < first - slack || window.1 > last + slack || window.0 > window.1 {
        return Err(Error::InvalidInput(format!(
            "window [{}, {}] not inside sampled range [{first}, {last}]",
            window.0, window.1
        )));
    }
    let reference: Vec<f64> = xs.iter().map(|&x| limit(x)).collect();
    let inside = |x: f64| x >= window.0 - slack && x <= window.1 + slack;
    let value_gap = xs
        .iter()
        .zip(&sampled.values)
        .zip(&reference)
        .filter(|((x, _), _)| inside(**x))
        .map(|((_, z), u)| (z - u).abs())
        .fold(0.0, f64::max);
    let dz = centered_differences(xs, &sampled.values);
    let du = centered_differences(xs, &reference);
    let slope_gap = xs[1..xs.len() - 1]
        .iter()
        .zip(dz.iter().zip(&du))
        .filter(|(x, _)| inside(**x))
        .map(|(_, (a, b))| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((value_gap, slope_gap))
}

/// `-U`, the limit of `z_p^-`.
pub fn negative_limit(x: f64) -> f64 {
    -eval_regular_profile(x)
}

/// `Z_l(r + l)`, the limit of `z_p^+`.
pub fn positive_limit(consts: &AsymptoticConstants) -> impl Fn(f64) -> f64 {
    let params = consts.singular_params();
    move |r| eval_singular_profile(&params, r + params.l).unwrap_or(f64::NAN)
}

/// `sup |p u_p(r) - γ ln r|` over `radii`.
pub fn green_limit_check(sol: &NodalSolution, radii: &[f64], gamma: f64) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for &r in radii {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidInput(format!("radius {r} outside (0, 1]")));
        }
        sup = sup.max((sol.p * sol.u(r) - gamma * r.ln()).abs());
    }
    Ok(sup)
}

/// `I_p = (p / u_p(s_p)) ∫_{s_p}^1 s u_p^p ds` by quadrature, together with
/// the flux form `-p u_p'(1) / u_p(s_p)` of the same quantity.
pub fn peak_integral(sol: &NodalSolution, quad: QuadConfig) -> Result<(f64, f64)> {
    let a = sol.ln_peak_radius;
    let mut pts = vec![a];
    pts.extend(sol.profile.ln_breakpoints().into_iter().filter(|s| *s > a));
    let integral = integrate_with_breakpoints(
        |t| weighted_power(sol.p, sol.profile.eval_log(t).0, 2.0 * t),
        &pts,
        quad,
    )?;
    let factor = sol.p / sol.norm_plus;
    Ok((factor * integral.value, -factor * sol.boundary_slope))
}

/// `-½ ln(r_p^{2/(p-1)} ||u_p^+||) (α - 2)`, tending to 1.
pub fn rate_composite(sol: &NodalSolution, alpha: f64) -> f64 {
    -0.5 * (sol.scaled_nodal_radius() * sol.norm_plus).ln() * (alpha - 2.0)
}

/// Relative gap between `4 sqrt(e) / r_p^{2/(p-1)}` and `||u_p^+|| (α - 2)`.
pub fn slope_balance_gap(sol: &NodalSolution, alpha: f64) -> f64 {
    let lhs = 4.0 * std::f64::consts::E.sqrt() / sol.scaled_nodal_radius();
    let rhs = sol.norm_plus * (alpha - 2.0);
    (lhs - rhs) / rhs
}

/// Max finite-difference residual of `z'' + z'/(l_p + r) + (1 + z/p)^p = 0`
/// at interior samples of a positive-part profile.
pub fn shifted_ode_residual(profile: &RescaledProfile) -> Result<f64> {
    let lp = match (profile.kind, profile.anchor) {
        (ProfileKind::PositivePart, Some(lp)) => lp,
        _ => return Err(Error::InvalidInput("positive-part profile required".into())),
    };
    let (xs, zs, p) = (&profile.sample_points, &profile.values, profile.p);
    let mut worst: f64 = 0.0;
    for i in 1..xs.len().saturating_sub(1) {
        let h = xs[i + 1] - xs[i];
        let d2 = (zs[i + 1] - 2.0 * zs[i] + zs[i - 1]) / (h * h);
        let d1 = (zs[i + 1] - zs[i - 1]) / (2.0 * h);
        let source = (p * (zs[i] / p).ln_1p()).exp();
        worst = worst.max((d2 + d1 / (lp + xs[i]) + source).abs());
    }
    Ok(worst)
}
