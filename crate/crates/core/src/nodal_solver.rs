//! Radial solutions of `-Δu = |u|^{p-1}u` on the unit disk with Dirichlet data:
//! the two-nodal-region solution `u_p` and the positive ground state `f_p`.
//!
//! Both come from a single normalised shot `v` (center value `-c` or `+c`)
//! and the exact scaling family `u(r) = R^{2/(p-1)} v(R r)`, where `R` is the
//! zero of `v` that is mapped onto the boundary.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breakpoints, QuadConfig};
use crate::radial_ode::{integrate_shooting, weighted_power, RadialTrajectory, ShotConfig, StopRule};
use crate::roots::newton_bisect;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub shot: ShotConfig,
    /// Relative tolerance of the energy quadratures.
    pub quad_rel_tol: f64,
    /// Magnitude `c` of the shooting value `u(0) = ∓c`.
    pub shoot_magnitude: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            shot: ShotConfig::default(),
            quad_rel_tol: 1e-10,
            shoot_magnitude: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn quad(&self) -> QuadConfig {
        QuadConfig {
            abs_tol: 0.0,
            rel_tol: self.quad_rel_tol,
            max_panels: 400_000,
        }
    }
}

/// A radial function on the closed unit disk, evaluated in `s = ln r <= 0`.
pub trait RadialProfile {
    /// `(u, r u'(r))` at `r = exp(s)`.
    fn eval_log(&self, s: f64) -> (f64, f64);

    /// Panel boundaries in `s` for quadrature, increasing, ending at `0`.
    fn ln_breakpoints(&self) -> Vec<f64>;

    fn value(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.eval_log(f64::NEG_INFINITY).0;
        }
        self.eval_log(r.ln()).0
    }

    fn derivative(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        self.eval_log(r.ln()).1 / r
    }
}

/// The shot `v` rescaled onto the unit disk.
#[derive(Debug, Clone)]
pub struct ScaledProfile {
    trajectory: Arc<RadialTrajectory>,
    ln_scale: f64,
    amplitude: f64,
}

impl ScaledProfile {
    fn new(trajectory: Arc<RadialTrajectory>, ln_scale: f64) -> Self {
        let p = trajectory.exponent();
        Self {
            trajectory,
            ln_scale,
            amplitude: (2.0 * ln_scale / (p - 1.0)).exp(),
        }
    }

    pub fn trajectory(&self) -> &RadialTrajectory {
        &self.trajectory
    }

    /// `ln R`: the boundary `r = 1` sits at shot radius `R`.
    pub fn ln_scale(&self) -> f64 {
        self.ln_scale
    }

    /// `R^{2/(p-1)}`.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
}

impl RadialProfile for ScaledProfile {
    fn eval_log(&self, s: f64) -> (f64, f64) {
        let t = (s + self.ln_scale).min(self.trajectory.ln_end());
        let [v, w] = self
            .trajectory
            .eval_log(t)
            .expect("scaled profile evaluated inside the unit disk");
        (self.amplitude * v, self.amplitude * w)
    }

    fn ln_breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .trajectory
            .ln_abscissas()
            .into_iter()
            .map(|t| t - self.ln_scale)
            .filter(|s| *s < 0.0)
            .collect();
        pts.push(0.0);
        pts
    }
}

/// `(∫_B |∇u|^2, ∫_B |u|^{p+1})` by adaptive quadrature over the profile.
///
/// In `s = ln r` the integrands are `(r u')^2` and `r^2 |u|^{p+1}`; the
/// latter is formed in log space. Contributions below the first breakpoint
/// are `O(r_min^4)` and dropped.
pub fn energy_functional<P: RadialProfile + ?Sized>(
    profile: &P,
    p: f64,
    quad: QuadConfig,
) -> Result<(f64, f64)> {
    let pts = profile.ln_breakpoints();
    let dirichlet = integrate_with_breakpoints(
        |s| {
            let w = profile.eval_log(s).1;
            w * w
        },
        &pts,
        quad,
    )?;
    let lp1 = integrate_with_breakpoints(
        |s| weighted_power(p + 1.0, profile.eval_log(s).0, 2.0 * s).abs(),
        &pts,
        quad,
    )?;
    Ok((2.0 * PI * dirichlet.value, 2.0 * PI * lp1.value))
}

/// Least-energy two-nodal-region radial solution, center negative.
#[derive(Debug, Clone)]
pub struct NodalSolution {
    pub p: f64,
    pub nodal_radius: f64,
    pub ln_nodal_radius: f64,
    pub peak_radius: f64,
    pub ln_peak_radius: f64,
    pub center_value: f64,
    pub norm_minus: f64,
    pub norm_plus: f64,
    pub eps_minus: f64,
    pub ln_eps_minus: f64,
    pub eps_plus: f64,
    pub ln_eps_plus: f64,
    /// `p ∫_B |∇u_p|^2`.
    pub energy: f64,
    /// `p ∫_B |u_p|^{p+1}`.
    pub lp1_mass: f64,
    pub boundary_slope: f64,
    /// `r u_p'(r)` at the nodal radius.
    pub nodal_flux: f64,
    pub profile: ScaledProfile,
}

/// `ln ε` with `ε^{-2} = p m^{p-1}`.
fn ln_blowup_scale(p: f64, m: f64) -> f64 {
    -0.5 * (p.ln() + (p - 1.0) * m.ln())
}

impl NodalSolution {
    /// `r_p^{2/(p-1)}`.
    pub fn scaled_nodal_radius(&self) -> f64 {
        (2.0 * self.ln_nodal_radius / (self.p - 1.0)).exp()
    }

    /// `l_p = s_p / ε_p^+`.
    pub fn peak_ratio(&self) -> f64 {
        (self.ln_peak_radius - self.ln_eps_plus).exp()
    }

    /// Relative Nehari residual `|∫|∇u|^2 / ∫|u|^{p+1} - 1|`.
    pub fn nehari_residual(&self) -> f64 {
        (self.energy / self.lp1_mass - 1.0).abs()
    }

    /// Relative Pohozaev residual
    /// `|(2/(p+1)) ∫_B |u|^{p+1} - π u'(1)^2| / (π u'(1)^2)`.
    pub fn pohozaev_residual(&self) -> f64 {
        let lhs = 2.0 / (self.p + 1.0) * self.lp1_mass / self.p;
        let rhs = PI * self.boundary_slope.powi(2);
        ((lhs - rhs) / rhs).abs()
    }

    /// `r_p^{2/(p-1)} |u_p(r_p r)|` for `r in [0, 1]`: the interior part on
    /// the unit disk.
    pub fn interior_as_ground(&self, r: f64) -> f64 {
        let scale = self.scaled_nodal_radius();
        if r <= 0.0 {
            return scale * self.norm_minus;
        }
        let s = (r.ln() + self.ln_nodal_radius).min(self.ln_nodal_radius);
        scale * self.profile.eval_log(s).0.abs()
    }

    pub fn u(&self, r: f64) -> f64 {
        self.profile.value(r)
    }

    pub fn du(&self, r: f64) -> f64 {
        self.profile.derivative(r)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("exponent must exceed 1, got {p}")));
    }
    Ok(())
}

/// Solve for `u_p` by one shot from `u(0) = -c` to its second zero.
pub fn solve_nodal(p: f64, cfg: &SolverConfig) -> Result<NodalSolution> {
    check_exponent(p)?;
    let c = cfg.shoot_magnitude;
    if !(c > 0.0) {
        return Err(Error::InvalidInput("shooting magnitude must be positive".into()));
    }
    let traj = integrate_shooting(p, -c, StopRule::AfterZeros(2), &cfg.shot)?;
    let zeros: Vec<_> = traj.zeros().copied().collect();
    if zeros.len() < 2 {
        return Err(Error::EventNotFound(format!(
            "expected two zeros, found {}",
            zeros.len()
        )));
    }
    let (z1, z2) = (zeros[0], zeros[1]);
    let peaks: Vec<_> = traj
        .critical_points()
        .filter(|e| e.ln_radius > z1.ln_radius && e.ln_radius < z2.ln_radius)
        .copied()
        .collect();
    if peaks.len() != 1 || peaks[0].u <= 0.0 {
        return Err(Error::EventNotFound(format!(
            "expected one positive maximum between the zeros, found {}",
            peaks.len()
        )));
    }
    let peak = peaks[0];

    let ln_scale = z2.ln_radius;
    let traj = Arc::new(traj);
    let profile = ScaledProfile::new(traj, ln_scale);
    let amp = profile.amplitude();

    let norm_minus = amp * c;
    let norm_plus = amp * peak.u;
    let (dirichlet, lp1) = energy_functional(&profile, p, cfg.quad())?;
    let ln_nodal_radius = z1.ln_radius - ln_scale;
    let ln_peak_radius = peak.ln_radius - ln_scale;
    let ln_eps_minus = ln_blowup_scale(p, norm_minus);
    let ln_eps_plus = ln_blowup_scale(p, norm_plus);

    Ok(NodalSolution {
        p,
        nodal_radius: ln_nodal_radius.exp(),
        ln_nodal_radius,
        peak_radius: ln_peak_radius.exp(),
        ln_peak_radius,
        center_value: -norm_minus,
        norm_minus,
        norm_plus,
        eps_minus: ln_eps_minus.exp(),
        ln_eps_minus,
        eps_plus: ln_eps_plus.exp(),
        ln_eps_plus,
        energy: p * dirichlet,
        lp1_mass: p * lp1,
        boundary_slope: amp * z2.w,
        nodal_flux: amp * z1.w,
        profile,
    })
}

/// Positive radial ground state `f_p` on the unit disk.
#[derive(Debug, Clone)]
pub struct GroundSolution {
    pub p: f64,
    pub sup_norm: f64,
    /// `p ∫_B |∇f_p|^2`.
    pub energy: f64,
    /// `p ∫_B f_p^{p+1}`.
    pub lp1_mass: f64,
    pub boundary_slope: f64,
    pub profile: ScaledProfile,
}

impl GroundSolution {
    pub fn nehari_residual(&self) -> f64 {
        (self.energy / self.lp1_mass - 1.0).abs()
    }

    pub fn value(&self, r: f64) -> f64 {
        self.profile.value(r)
    }
}

/// Solve for `f_p` by one shot from `u(0) = +c` to its first zero.
pub fn solve_ground(p: f64, cfg: &SolverConfig) -> Result<GroundSolution> {
    check_exponent(p)?;
    let c = cfg.shoot_magnitude;
    if !(c > 0.0) {
        return Err(Error::InvalidInput("shooting magnitude must be positive".into()));
    }
    let traj = integrate_shooting(p, c, StopRule::AfterZeros(1), &cfg.shot)?;
    let z1 = *traj
        .zeros()
        .next()
        .ok_or_else(|| Error::EventNotFound("ground state has no zero".into()))?;
    let profile = ScaledProfile::new(Arc::new(traj), z1.ln_radius);
    let amp = profile.amplitude();
    let (dirichlet, lp1) = energy_functional(&profile, p, cfg.quad())?;
    Ok(GroundSolution {
        p,
        sup_norm: amp * c,
        energy: p * dirichlet,
        lp1_mass: p * lp1,
        boundary_slope: amp * z1.w,
        profile,
    })
}

/// Scaled interior-ball quantities with limits `sqrt(e)`, `4 sqrt(e)`, `4e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorBallReport {
    /// `||u_p^-||_inf r_p^{2/(p-1)}`.
    pub scaled_sup: f64,
    /// `p u_p'(r_p) r_p^{1 + 2/(p-1)}`.
    pub scaled_slope: f64,
    /// `p ∫_0^{r_p} |u_p|^{p+1} r dr · r_p^{4/(p-1)}`.
    pub scaled_mass: f64,
}

pub fn interior_ball_checks(sol: &NodalSolution, quad: QuadConfig) -> Result<InteriorBallReport> {
    let p = sol.p;
    let scale = sol.scaled_nodal_radius();
    let mut pts: Vec<f64> = sol
        .profile
        .ln_breakpoints()
        .into_iter()
        .filter(|s| *s < sol.ln_nodal_radius)
        .collect();
    pts.push(sol.ln_nodal_radius);
    let mass = integrate_with_breakpoints(
        |s| weighted_power(p + 1.0, sol.profile.eval_log(s).0, 2.0 * s).abs(),
        &pts,
        quad,
    )?;
    Ok(InteriorBallReport {
        scaled_sup: sol.norm_minus * scale,
        scaled_slope: p * sol.nodal_flux * scale,
        scaled_mass: p * mass.value * scale * scale,
    })
}

/// `J_0(x)` from its power series; accurate to rounding for `x < 8`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn bessel_j1(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (0.5 * x, 0.5 * x);
    for k in 1..60 {
        term *= q / (k * (k + 1)) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// First Dirichlet eigenvalue of `-Δ` on the unit disk, `j_{0,1}^2`.
pub fn first_eigenvalue() -> f64 {
    let j = newton_bisect(bessel_j0, |x| -bessel_j1(x), 2.0, 3.0, 1e-15)
        .expect("J_0 changes sign on [2, 3]");
    j * j
}

/// `min(||u^-||, ||u^+||) - λ_1^{1/(p-1)}`; nonnegative for a genuine
/// nodal solution.
pub fn sup_norm_margin(sol: &NodalSolution) -> f64 {
    let bound = (first_eigenvalue().ln() / (sol.p - 1.0)).exp();
    sol.norm_minus.min(sol.norm_plus) - bound
}

/// `|u'(r) r ln r - u(r) - ∫_r^1 s ln(s) |u|^{p-1}u(s) ds|` for `0 < r <= 1`.
pub fn log_moment_residual(sol: &NodalSolution, r: f64, quad: QuadConfig) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidInput(format!("radius {r} outside (0, 1]")));
    }
    let a = r.ln();
    let (u, w) = sol.profile.eval_log(a);
    let lhs = w * a - u;
    let mut pts = vec![a];
    pts.extend(sol.profile.ln_breakpoints().into_iter().filter(|s| *s > a));
    let rhs = integrate_with_breakpoints(
        |t| t * weighted_power(sol.p, sol.profile.eval_log(t).0, 2.0 * t),
        &pts,
        quad,
    )?;
    Ok((lhs - rhs.value).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Zero;

    impl RadialProfile for Zero {
        fn eval_log(&self, _s: f64) -> (f64, f64) {
            (0.0, 0.0)
        }
        fn ln_breakpoints(&self) -> Vec<f64> {
            vec![-20.0, -1.0, 0.0]
        }
    }

    /// `J_0(j r)` scaled to vanish at `r = 1`, with `j` the first zero.
    struct Quadratic;

    impl RadialProfile for Quadratic {
        fn eval_log(&self, s: f64) -> (f64, f64) {
            let r = s.exp();
            (1.0 - r * r, -2.0 * r * r)
        }
        fn ln_breakpoints(&self) -> Vec<f64> {
            (0..=40).map(|k| -20.0 + 0.5 * k as f64).collect()
        }
    }

    #[test]
    fn zero_profile_has_no_energy() {
        let (d, l) = energy_functional(&Zero, 3.0, QuadConfig::default()).unwrap();
        assert_eq!((d, l), (0.0, 0.0));
    }

    #[test]
    fn quadratic_profile_energies() {
        // ∫_B |∇(1-r^2)|^2 = 2π ∫ 4r^3 dr = 2π; ∫_B (1-r^2)^2 = π/3.
        let (d, l) = energy_functional(&Quadratic, 1.0, QuadConfig::relative(1e-12)).unwrap();
        assert!((d - 2.0 * PI).abs() < 1e-10);
        assert!((l - PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_subcritical_exponents() {
        let cfg = SolverConfig::default();
        assert!(solve_nodal(1.0, &cfg).is_err());
        assert!(solve_nodal(0.5, &cfg).is_err());
        assert!(solve_ground(f64::NAN, &cfg).is_err());
    }

    #[test]
    fn sign_structure_and_events() {
        let sol = solve_nodal(7.0, &SolverConfig::default()).unwrap();
        assert!(sol.center_value < 0.0);
        assert!(sol.nodal_radius > 0.0 && sol.nodal_radius < sol.peak_radius);
        assert!(sol.peak_radius < 1.0);
        assert!(sol.boundary_slope < 0.0);
        assert!(sol.u(1.0).abs() < 1e-12);
        assert!(sol.u(sol.nodal_radius).abs() < 1e-12);
        assert!(sol.du(sol.peak_radius).abs() < 1e-11);
        for k in 1..200 {
            let r = k as f64 / 200.0;
            let u = sol.u(r);
            let du = sol.du(r);
            if r < sol.nodal_radius * 0.999 {
                assert!(u < 0.0);
            } else if r > sol.nodal_radius * 1.001 {
                assert!(u > 0.0);
            }
            if r < sol.peak_radius * 0.999 {
                assert!(du > 0.0);
            } else if r > sol.peak_radius * 1.001 {
                assert!(du < 0.0);
            }
        }
    }

    #[test]
    fn nehari_and_pohozaev_hold() {
        for &p in &[2.0, 5.0, 30.0] {
            let sol = solve_nodal(p, &SolverConfig::default()).unwrap();
            assert!(sol.nehari_residual() < 1e-8, "p = {p}: {}", sol.nehari_residual());
            assert!(sol.pohozaev_residual() < 1e-8, "p = {p}: {}", sol.pohozaev_residual());
        }
    }

    #[test]
    fn log_moment_identity() {
        let cfg = SolverConfig::default();
        let sol = solve_nodal(12.0, &cfg).unwrap();
        for r in [sol.peak_radius, 0.5 * (sol.peak_radius + 1.0), 0.3] {
            let res = log_moment_residual(&sol, r, cfg.quad()).unwrap();
            assert!(res < 1e-9 * sol.norm_plus, "r = {r}: {res}");
        }
    }

    #[test]
    fn eigenvalue_bound() {
        assert!((first_eigenvalue() - 5.783185962946784).abs() < 1e-12);
        let sol = solve_nodal(6.0, &SolverConfig::default()).unwrap();
        assert!(sup_norm_margin(&sol) > 0.0);
    }

    #[test]
    fn ground_state_shape() {
        let g = solve_ground(4.0, &SolverConfig::default()).unwrap();
        assert!(g.value(1.0).abs() < 1e-12);
        assert!((g.value(0.0) - g.sup_norm).abs() < 1e-14);
        assert!(g.profile.derivative(1e-9).abs() < 1e-6);
        for k in 0..100 {
            assert!(g.value(k as f64 / 100.0) > 0.0);
        }
        assert!(g.nehari_residual() < 1e-8);
    }
}
