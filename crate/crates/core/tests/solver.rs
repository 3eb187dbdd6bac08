mod common;

use std::f64::consts::E;

use lane_emden_nodal::nodal_solver::{
    energy_functional, first_eigenvalue, interior_ball_checks, log_moment_residual, solve_ground, solve_nodal,
    sup_norm_margin, RadialProfile, SolverConfig,
};
use lane_emden_nodal::radial_ode::{integrate_shooting, series_start, weighted_power, EventKind, ShotConfig, StopRule};
use lane_emden_nodal::Error;

use common::{brute_ground, brute_nodal, j0, j0_zero, rel};

#[test]
fn linear_shot_hits_bessel_zeros() {
    let traj = integrate_shooting(1.0, 1.0, StopRule::AfterZeros(3), &ShotConfig::default()).unwrap();
    let zeros: Vec<f64> = traj.zeros().map(|e| e.radius()).collect();
    assert_eq!(zeros.len(), 3);
    for (k, z) in zeros.iter().enumerate() {
        assert!((z - j0_zero(k + 1)).abs() < 1e-8, "zero {k}: {z}");
    }
    assert!((zeros[0] - 2.404826).abs() < 1e-6 && (zeros[1] - 5.520078).abs() < 1e-6);
    // Dense output tracks J_0 between steps.
    for r in [0.3, 1.7, 3.9, 6.1] {
        let (u, _) = traj.eval(r).unwrap();
        assert!((u - j0(r)).abs() < 1e-9, "r = {r}");
    }
    assert!(traj.events_alternate());
}

#[test]
fn events_alternate_for_nodal_shot() {
    let traj = integrate_shooting(7.0, -1.0, StopRule::AfterZeros(2), &ShotConfig::default()).unwrap();
    let kinds: Vec<EventKind> = traj.events().iter().map(|e| e.kind).collect();
    assert_eq!(
        kinds,
        [EventKind::ZeroCrossing, EventKind::CriticalPoint, EventKind::ZeroCrossing]
    );
}

#[test]
fn series_start_matches_taylor() {
    let (u, du) = series_start(3.0, -2.0, 1e-3).unwrap();
    assert!((u - (-2.0 + 8.0 * 1e-6 / 4.0)).abs() < 1e-15);
    assert!((du - 8.0 * 1e-3 / 2.0).abs() < 1e-15);
    assert!(series_start(3.0, 0.0, 1e-3).is_err());
    assert!((weighted_power(5.0, -1.5, 0.0) + 1.5f64.powi(5)).abs() < 1e-13);
}

#[test]
fn cubic_nodal_solution_matches_brute_force() {
    let sol = solve_nodal(3.0, &SolverConfig::default()).unwrap();
    let bf = brute_nodal(3.0, 1e-6);
    assert!(rel(sol.nodal_radius, bf.nodal_radius) < 1e-6);
    assert!(rel(sol.peak_radius, bf.peak_radius) < 1e-6);
    assert!(rel(sol.norm_minus, bf.norm_minus) < 1e-6);
    assert!(rel(sol.norm_plus, bf.norm_plus) < 1e-6);
    assert!(rel(sol.energy, bf.energy) < 1e-6);
    assert!(rel(sol.lp1_mass, bf.lp1_mass) < 1e-6);
}

#[test]
fn cubic_ground_state_matches_brute_force() {
    let g = solve_ground(3.0, &SolverConfig::default()).unwrap();
    let bf = brute_ground(3.0, 1e-6);
    assert!(rel(g.sup_norm, bf.sup_norm) < 1e-6);
    assert!(rel(g.energy, bf.energy) < 1e-6);
    assert!(g.nehari_residual() < 1e-8);
}

#[test]
fn variational_identities_hold() {
    for p in [2.0, 5.0, 30.0, 200.0, 1000.0] {
        let sol = solve_nodal(p, &SolverConfig::default()).unwrap();
        assert!(sol.nehari_residual() < 1e-8, "p = {p}");
        assert!(sol.pohozaev_residual() < 1e-8, "p = {p}");
        assert!(sup_norm_margin(&sol) > 0.0, "p = {p}");
    }
}

#[test]
fn independent_of_shooting_magnitude() {
    for p in [3.0, 50.0] {
        let base = solve_nodal(p, &SolverConfig::default()).unwrap();
        for c in [0.5, 2.0] {
            let cfg = SolverConfig {
                shoot_magnitude: c,
                ..SolverConfig::default()
            };
            let sol = solve_nodal(p, &cfg).unwrap();
            assert!(rel(sol.nodal_radius, base.nodal_radius) < 1e-10, "p {p} c {c}");
            assert!(rel(sol.norm_minus, base.norm_minus) < 1e-10, "p {p} c {c}");
            assert!(rel(sol.norm_plus, base.norm_plus) < 1e-10, "p {p} c {c}");
        }
    }
}

#[test]
fn interior_part_is_the_ground_state() {
    for p in [4.0, 60.0] {
        let cfg = SolverConfig::default();
        let sol = solve_nodal(p, &cfg).unwrap();
        let g = solve_ground(p, &cfg).unwrap();
        for r in [0.0, 0.1, 0.35, 0.6, 0.9, 0.999] {
            let (a, b) = (sol.interior_as_ground(r), g.value(r));
            assert!((a - b).abs() < 1e-8 * g.sup_norm, "p {p} r {r}: {a} vs {b}");
        }
    }
}

#[test]
fn sign_and_monotonicity() {
    let sol = solve_nodal(25.0, &SolverConfig::default()).unwrap();
    let (rp, sp) = (sol.nodal_radius, sol.peak_radius);
    let mut prev = sol.u(0.0);
    for k in 1..=400 {
        let r = k as f64 / 400.0;
        let u = sol.u(r);
        if r < rp {
            assert!(u < 0.0);
        } else if r > rp && r < 1.0 {
            assert!(u > 0.0);
        }
        if r <= sp {
            assert!(u >= prev - 1e-14, "not increasing at {r}");
        } else if r - 1.0 / 400.0 >= sp {
            assert!(u <= prev + 1e-14, "not decreasing at {r}");
        }
        prev = u;
    }
    assert!(sol.u(1.0).abs() < 1e-10);
    assert!((sol.u(sp) - sol.norm_plus).abs() < 1e-12);
}

#[test]
fn log_moment_identity() {
    let sol = solve_nodal(12.0, &SolverConfig::default()).unwrap();
    let quad = SolverConfig::default().quad();
    for r in [sol.peak_radius, 0.5 * (sol.peak_radius + 1.0), 0.3 * sol.nodal_radius] {
        let res = log_moment_residual(&sol, r, quad).unwrap();
        assert!(res < 1e-8 * sol.norm_minus, "r {r}: {res}");
    }
    assert!(log_moment_residual(&sol, 1.5, quad).is_err());
}

#[test]
fn first_eigenvalue_from_bessel_oracle() {
    let j = j0_zero(1);
    assert!((first_eigenvalue() - j * j).abs() < 1e-12);
}

#[test]
fn energy_of_zero_profile_vanishes() {
    struct Zero;
    impl RadialProfile for Zero {
        fn eval_log(&self, _: f64) -> (f64, f64) {
            (0.0, 0.0)
        }
        fn ln_breakpoints(&self) -> Vec<f64> {
            vec![-5.0, 0.0]
        }
    }
    let (d, m) = energy_functional(&Zero, 3.0, SolverConfig::default().quad()).unwrap();
    assert_eq!((d, m), (0.0, 0.0));
}

#[test]
fn large_exponent_examples() {
    let cfg = SolverConfig::default();
    let sol = solve_nodal(1000.0, &cfg).unwrap();
    assert!(rel(sol.scaled_nodal_radius(), 0.67) < 0.05);
    let ball = interior_ball_checks(&sol, cfg.quad()).unwrap();
    assert!(rel(ball.scaled_sup, E.sqrt()) < 0.05);
    assert!(rel(ball.scaled_slope, 4.0 * E.sqrt()) < 0.05);
    assert!(rel(ball.scaled_mass, 4.0 * E) < 0.05);
    let g = solve_ground(1000.0, &cfg).unwrap();
    assert!(rel(g.sup_norm, E.sqrt()) < 0.03);
    assert!(rel(g.energy, 8.0 * std::f64::consts::PI * E) < 0.03);
}

#[test]
fn rejects_bad_exponent() {
    let cfg = SolverConfig::default();
    for p in [1.0, 0.5, f64::NAN, f64::INFINITY] {
        assert!(matches!(solve_nodal(p, &cfg), Err(Error::InvalidInput(_))), "p = {p}");
    }
    let bad = SolverConfig {
        shoot_magnitude: 0.0,
        ..cfg
    };
    assert!(solve_nodal(3.0, &bad).is_err());
}
