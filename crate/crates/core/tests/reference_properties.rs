use std::f64::consts::PI;

use hbm_core::reference::{
    erf, erf_inv, exact_period, regularized_period_quadrature, simulate_regularized, weak_solution, OdeTolerances,
};
use proptest::prelude::*;

/// |x·x'' + 1| by central differences at interior points of a branch.
fn weak_residual(t: f64, amplitude: f64) -> f64 {
    let h = 1e-5;
    let x = |s: f64| weak_solution(s, amplitude).unwrap();
    let xdd = (x(t + h) - 2.0 * x(t) + x(t - h)) / (h * h);
    (x(t) * xdd + 1.0).abs()
}

#[test]
fn weak_solution_satisfies_the_equation() {
    for amplitude in [0.5, 1.0, 3.0] {
        let half = (2.0 * PI).sqrt() * amplitude / 2.0;
        for i in 1..40 {
            // Interior of branches 0 and 1, away from the zeros.
            let u = -0.95 + 1.9 * i as f64 / 40.0;
            for t in [u * half, 2.0 * half + u * half] {
                assert!(weak_residual(t, amplitude) <= 1e-4, "A = {amplitude}, t = {t}");
            }
        }
    }
}

#[test]
fn regularized_period_decreases_to_the_limit() {
    let ks = [1.0, 1e-1, 1e-2, 1e-3];
    let periods: Vec<f64> = ks.iter().map(|&k| regularized_period_quadrature(1.0, k).unwrap().value).collect();
    let limit = exact_period(1.0).unwrap().value;
    for w in periods.windows(2) {
        assert!(w[0] > w[1], "{periods:?}");
    }
    assert!(periods[3] > limit);
    assert!(periods[3] < 5.3);
    assert!(periods[3] - limit < periods[2] - limit);
}

#[test]
fn orbit_lies_on_the_level_curve() {
    // On H = ln(A² + k²)/2, x = ±√((A² + k²)e^{−y²} − k²); as k → 0 this tends to A e^{−y²/2}.
    let mut previous = f64::INFINITY;
    for k in [1e-1, 1e-2, 1e-3] {
        let traj = simulate_regularized(1.0, k, 2.0, OdeTolerances::default()).unwrap();
        let gap = traj
            .points
            .iter()
            .map(|p| (p.x.abs() - (-p.y * p.y / 2.0).exp()).abs())
            .fold(0.0f64, f64::max);
        assert!(gap < previous, "k = {k}: {gap} vs {previous}");
        previous = gap;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn period_scales_with_amplitude(a in 0.1f64..5.0, k in 1e-3f64..2.0) {
        let t1 = regularized_period_quadrature(a, k).unwrap().value;
        let t2 = regularized_period_quadrature(2.0 * a, 2.0 * k).unwrap().value;
        prop_assert!((t2 - 2.0 * t1).abs() <= 1e-10 * t2);
    }

    #[test]
    fn regularized_period_exceeds_the_limit(a in 0.1f64..5.0, k in 1e-3f64..2.0) {
        let t = regularized_period_quadrature(a, k).unwrap().value;
        prop_assert!(t > exact_period(a).unwrap().value);
    }

    #[test]
    fn erf_inverse(u in -0.999_999f64..0.999_999) {
        let z = erf_inv(u).unwrap();
        prop_assert!((erf(z) - u).abs() <= 1e-15);
    }

    #[test]
    fn weak_solution_is_even_and_periodic(t in -10.0f64..10.0, a in 0.2f64..4.0) {
        let x = weak_solution(t, a).unwrap();
        let period = 2.0 * (2.0 * PI).sqrt() * a;
        prop_assert!((x - weak_solution(-t, a).unwrap()).abs() <= 1e-9 * a);
        prop_assert!((x - weak_solution(t + period, a).unwrap()).abs() <= 1e-9 * a);
        prop_assert!(x.abs() <= a);
    }
}
