mod common;

use std::f64::consts::PI;

use lane_emden_nodal::asymptotics::{
    extrapolate, green_limit_check, negative_limit, peak_integral, positive_limit, profile_distance,
    rescale_negative, rescale_positive, shifted_ode_residual, sweep, Model, SweepConfig,
};
use lane_emden_nodal::limit_profiles::{
    derive_constants, eval_regular_profile, eval_singular_profile, profile_mass, regular_profile_derivative,
    solve_tbar, AsymptoticConstants, SingularProfileParams,
};
use lane_emden_nodal::nodal_solver::{solve_nodal, SolverConfig};
use lane_emden_nodal::quadrature::UpperLimit;

use common::{bisect, fd5, rel, simpson};

fn consts() -> AsymptoticConstants {
    AsymptoticConstants::compute().unwrap()
}

#[test]
fn tbar_and_derived_constants() {
    let t = solve_tbar(1e-4).unwrap();
    assert!((t - 0.7875).abs() < 1e-4);
    let c = consts();
    let oracle = bisect(|t| 2.0 * 0.5f64.exp() * t.ln() + t, 0.5, 1.0, 200);
    assert!((c.tbar - oracle).abs() < 1e-14);
    assert!((c.alpha - (2.0 + 4.0 * 0.5f64.exp() / oracle)).abs() < 1e-12);
    assert!((c.r_inf - 0.67).abs() < 1e-3);
    assert!((c.m_minus - 2.4607).abs() < 1e-3);
    assert!((c.u_inf - 1.1754).abs() < 1e-3);
    assert!((c.e_inf - 332.3).abs() < 0.1);
    assert!(c.identity_residuals().iter().all(|r| r.residual < 1e-10));
    assert!(derive_constants(1.5).is_err());
}

#[test]
fn regular_profile_values_and_ode() {
    assert!((eval_regular_profile(8f64.sqrt()) + 2.0 * 2f64.ln()).abs() < 1e-15);
    assert_eq!(eval_regular_profile(0.0), 0.0);
    for r in [0.2, 1.0, 3.0, 9.0] {
        let (d1, d2) = fd5(eval_regular_profile, r, 1e-3);
        assert!((d1 - regular_profile_derivative(r)).abs() < 1e-9);
        assert!((d2 + d1 / r + eval_regular_profile(r).exp()).abs() < 1e-6);
    }
}

#[test]
fn bubble_mass_is_eight_pi() {
    // ∫_0^∞ r e^U dr after r = x/(1-x).
    let mass = 2.0 * PI
        * simpson(
            |x: f64| {
                if x >= 1.0 {
                    return 0.0;
                }
                let r = x / (1.0 - x);
                eval_regular_profile(r).exp() * r / (1.0 - x).powi(2)
            },
            0.0,
            1.0,
            20_000,
        );
    assert!(rel(mass, 8.0 * PI) < 1e-8);
}

#[test]
fn singular_profile_peak_and_ode() {
    let params = consts().singular_params();
    let z = |r: f64| eval_singular_profile(&params, r).unwrap();
    let l = params.l;
    let (d1, _) = fd5(z, l, 1e-4);
    assert!(d1.abs() < 1e-6);
    assert!(params.derivative(l).abs() < 1e-12);
    for r in [0.5 * l, l, 2.0 * l] {
        let (d1, d2) = fd5(z, r, 1e-3 * r);
        assert!((d2 + d1 / r + z(r).exp()).abs() < 1e-6, "r = {r}");
    }
    assert!(eval_singular_profile(&params, 0.0).is_err());
}

#[test]
fn singular_profile_masses() {
    let params = consts().singular_params();
    let (a, l) = (params.alpha, params.l);
    let f = |s: f64| if s > 0.0 { eval_singular_profile(&params, s).unwrap().exp() * s } else { 0.0 };
    let inner = simpson(f, 0.0, l, 200_000);
    // Tail after s = l / (1 - x).
    let outer = simpson(
        |x: f64| if x >= 1.0 { 0.0 } else { f(l / (1.0 - x)) * l / (1.0 - x).powi(2) },
        0.0,
        1.0,
        200_000,
    );
    assert!(rel(inner, a - 2.0) < 1e-8);
    assert!(rel(outer, a + 2.0) < 1e-8);
    let lib_inner = profile_mass(&params, 0.0, UpperLimit::Finite(l)).unwrap();
    let lib_total = profile_mass(&params, 0.0, UpperLimit::Unbounded).unwrap();
    assert!(rel(lib_inner, inner) < 1e-8);
    assert!(rel(lib_total, 2.0 * a) < 1e-8);
    assert!(profile_mass(&params, 2.0, UpperLimit::Finite(1.0)).is_err());
    assert!(SingularProfileParams::from_peak_radius(-1.0).is_err());
}

#[test]
fn rescaled_profiles_at_large_exponent() {
    let c = consts();
    let sol = solve_nodal(1000.0, &SolverConfig::default()).unwrap();
    let neg = rescale_negative(&sol, 5.0, 501).unwrap();
    let (gap, _) = profile_distance(&neg, negative_limit, (0.0, 5.0)).unwrap();
    assert!(gap < 0.1, "{gap}");
    let pos = rescale_positive(&sol, (-0.5 * c.l, 10.0), 1001).unwrap();
    let (gap, _) = profile_distance(&pos, positive_limit(&c), (-0.5 * c.l, 10.0)).unwrap();
    assert!(gap < 0.15, "{gap}");
    assert!(rel(pos.anchor.unwrap(), c.l) < 0.10);
    assert!(shifted_ode_residual(&pos).unwrap() < 1e-3);
    assert!(shifted_ode_residual(&neg).is_err());
    assert!(rescale_negative(&sol, 1e300, 11).is_err());
}

#[test]
fn profile_distances_shrink_with_p() {
    let c = consts();
    let mut last = (f64::INFINITY, f64::INFINITY);
    for p in [100.0, 400.0, 1000.0] {
        let sol = solve_nodal(p, &SolverConfig::default()).unwrap();
        let neg = rescale_negative(&sol, 5.0, 501).unwrap();
        let pos = rescale_positive(&sol, (-0.5 * c.l, 10.0), 1001).unwrap();
        let n = profile_distance(&neg, negative_limit, (0.0, 5.0)).unwrap().0;
        let q = profile_distance(&pos, positive_limit(&c), (-0.5 * c.l, 10.0)).unwrap().0;
        assert!(n < last.0 && q < last.1, "p = {p}");
        last = (n, q);
    }
}

#[test]
fn green_deviation_vanishes_on_boundary() {
    let sol = solve_nodal(200.0, &SolverConfig::default()).unwrap();
    let c = consts();
    assert!(green_limit_check(&sol, &[1.0], c.gamma).unwrap() < 1e-8);
    assert!(green_limit_check(&sol, &[0.0], c.gamma).is_err());
    // Near the boundary p u_p follows the flux coefficient.
    let radii: Vec<f64> = (0..46).map(|k| 0.5 + 0.01 * k as f64).collect();
    let flux = green_limit_check(&sol, &radii, -c.boundary_flux()).unwrap();
    assert!(flux < 0.5, "{flux}");
}

#[test]
fn peak_integral_forms_agree() {
    let sol = solve_nodal(300.0, &SolverConfig::default()).unwrap();
    let (quad, flux) = peak_integral(&sol, SolverConfig::default().quad()).unwrap();
    assert!(rel(quad, flux) < 1e-8);
    assert!(rel(quad, consts().alpha + 2.0) < 0.05);
}

#[test]
fn sweep_and_extrapolation() {
    let grid = [20.0, 40.0, 80.0, 160.0, 320.0];
    let table = sweep(&grid, &SweepConfig::default()).unwrap();
    assert_eq!(table.rows.len(), grid.len());
    assert_eq!(table.failures().count(), 0);
    let energy = table.series_named("energy");
    assert!(energy.iter().filter(|(p, _)| *p >= 100.0).all(|(_, e)| *e <= 339.0));
    let fit = extrapolate(&table, Model::LogCorrected, 0.0).unwrap();
    assert!(rel(fit.fit("scaled_nodal_radius").unwrap().limit, 0.67) < 0.02);
    assert!(extrapolate(&table, Model::LogCorrected, 200.0).is_err());
    assert!(sweep(&[40.0, 20.0], &SweepConfig::default()).is_err());
}
