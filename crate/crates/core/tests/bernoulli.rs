//! Cramér-type checks on the empirical mean of fair coin flips, against the
//! closed-form rate `x log 2x + (1−x) log 2(1−x)`.

use std::time::Instant;

use ldp_core::abstract_conjugate::linear_restriction_conjugate;
use ldp_core::convex::{essential_smoothness_check, lf_transform, Support};
use ldp_core::free_energy::{l_grid_on, lambda_family_table_on, WindowSample, WindowSpec};
use ldp_core::ldp::{derivative_bound_check, rate_grid_on, varadhan_identity_check};
use ldp_core::measure::FiniteSupportMeasure;
use ldp_core::net::iid_mean_example_net;
use ldp_core::tilt::{closed_grid, linear_family, OpenInterval, TiltFunction};

fn rate(x: f64) -> f64 {
    let term = |p: f64| if p == 0.0 { 0.0 } else { p * (2.0 * p).ln() };
    term(x) + term(1.0 - x)
}

fn fine_deltas() -> Vec<f64> {
    (7..=17).map(|i| 0.5f64.powi(i)).collect()
}

fn sample(lo: usize, hi: usize, stride: usize) -> WindowSample {
    let base = FiniteSupportMeasure::from_atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
    let net = iid_mean_example_net(base, hi).unwrap();
    WindowSample::collect(&net, WindowSpec::with_samples(lo, hi, 41, stride).unwrap()).unwrap()
}

#[test]
fn rate_matches_closed_form() {
    let t0 = Instant::now();
    let ws = sample(10_000, 50_000, 200);
    let grid = closed_grid(0.0, 1.0, 201);
    let rfe = rate_grid_on(&ws, &grid, &fine_deltas()).unwrap();
    eprintln!("rate grid: {:?}", t0.elapsed());
    let mut worst: f64 = 0.0;
    for (i, &x) in grid.iter().enumerate() {
        let (a, b) = (rfe.l0.values()[i], rfe.l1.values()[i]);
        assert!(a <= b);
        assert!(b >= rate(x) - 1e-9, "x = {x}: l1 = {b} below {}", rate(x));
        worst = worst.max(b - rate(x));
    }
    eprintln!("max l1 − I = {worst:.3e}");
    assert!(worst < 1e-3);
}

#[test]
fn free_energy_conjugate_and_smoothness() {
    let ws = sample(50, 200, 1);
    let g = OpenInterval::new(-4.0, 4.0).unwrap();
    let l = l_grid_on(&ws, g, 1999, 1e-9).unwrap();
    assert!(l.all_converged());
    for (lam, v) in l.function.xs().iter().zip(l.function.values()) {
        assert!((v - ((1.0 + lam.exp()) / 2.0).ln()).abs() < 1e-12, "λ = {lam}: {v}");
    }
    assert!(essential_smoothness_check(&l.function).holds);
    let xs: Vec<f64> = closed_grid(0.05, 0.95, 91);
    let star = lf_transform(&l.function.clone().with_support(Support::Truncated), &xs).unwrap();
    for (x, v) in xs.iter().zip(star.values()) {
        assert!((v - rate(*x)).abs() < 1e-6, "x = {x}: {v} vs {}", rate(*x));
    }
    let fe = lambda_family_table_on(&ws, &linear_family(g, 1999).unwrap(), 1e-9);
    let via = linear_restriction_conjugate(&fe, &xs, Support::Truncated).unwrap();
    assert_eq!(via.values(), star.values());
}

#[test]
fn derivative_bound_and_varadhan() {
    let ws = sample(10_000, 50_000, 200);
    let grid = closed_grid(0.0, 1.0, 201);
    let rfe = rate_grid_on(&ws, &grid, &fine_deltas()).unwrap();
    let g = OpenInterval::new(-4.0, 4.0).unwrap();
    let l = l_grid_on(&ws, g, 159, 1e-3).unwrap().function;
    let mut worst = f64::NEG_INFINITY;
    for at in 0..l.len() {
        let r = derivative_bound_check(&l, &rfe, at, 1e-3).unwrap();
        for row in &r.rows {
            worst = worst.max(row.l1 - row.bound);
        }
        assert!(r.holds, "{r:?}");
    }
    eprintln!("max l1(s) − bound = {worst:.3e}");
    let tilts = [
        TiltFunction::Linear(-2.0),
        TiltFunction::Linear(1.5),
        TiltFunction::TwoSlope(-1.0, 3.0),
        TiltFunction::q(3),
    ];
    for h in &tilts {
        let v = varadhan_identity_check(&ws, h, &rfe, 1e-3).unwrap();
        eprintln!("{h:?}: {} vs {}", v.lhs, v.rhs);
        assert!(v.holds);
    }
}
