use std::f64::consts::PI;

use hbm_core::trigring::{build_hbm_system, hbm_variables, residual_series};
use hbm_core::{MultiPoly, Rational};
use num_traits::Signed;
use proptest::prelude::*;

/// True if `p = c·q` for some positive rational c.
fn positive_multiple(p: &MultiPoly, q: &MultiPoly) -> bool {
    if p.len() != q.len() || p.is_zero() {
        return false;
    }
    let (m0, c0) = &p.terms()[0];
    let d0 = q.coefficient(m0);
    if d0 == Rational::from_integer(0.into()) {
        return false;
    }
    let ratio = c0 / &d0;
    ratio.is_positive() && p.terms().iter().all(|(m, c)| q.coefficient(m) * &ratio == *c)
}

fn check_system(m: u32, n: usize, expected: &[&str]) {
    let vars = hbm_variables(n);
    let sys = build_hbm_system(m, n).unwrap();
    assert_eq!(sys.equations.len(), expected.len(), "m = {m}, N = {n}");
    for (i, text) in expected.iter().enumerate() {
        let want = MultiPoly::parse(text, &vars).unwrap();
        assert!(
            positive_multiple(&sys.equations[i], &want),
            "m = {m}, N = {n}, equation {i}: got {}, want {want}",
            sys.equations[i]
        );
    }
}

#[test]
fn m0_n2() {
    check_system(0, 2, &["1 - 1/2*a1^2*w^2 - 9/2*a3^2*w^2", "a1 + 10*a3", "a1 + a3 - 1"]);
}

#[test]
fn m0_n3() {
    check_system(
        0,
        3,
        &[
            "2 - a1^2*w^2 - 9*a3^2*w^2 - 25*a5^2*w^2",
            "a1^2 + 10*a1*a3 + 34*a3*a5",
            "5*a3 + 13*a5",
            "a1 + a3 + a5 - 1",
        ],
    );
}

#[test]
fn m0_n4() {
    check_system(
        0,
        4,
        &[
            "2 - a1^2*w^2 - 9*a3^2*w^2 - 25*a5^2*w^2 - 49*a7^2*w^2",
            "a1^2 + 10*a1*a3 + 34*a3*a5 + 74*a5*a7",
            "5*a1*a3 + 13*a1*a5 + 29*a3*a7",
            "9*a3^2 + 50*a1*a7 + 26*a1*a5",
            "a1 + a3 + a5 + a7 - 1",
        ],
    );
}

#[test]
fn m1_n2() {
    check_system(
        1,
        2,
        &[
            "4 - 3*a1^2*w^2 - 11*a1*a3*w^2 - 38*a3^2*w^2",
            "4*a3 - a1^3*w^2 - 22*a1^2*a3*w^2 - 27*a3^3*w^2",
            "a1 + a3 - 1",
        ],
    );
}

#[test]
fn m1_n3() {
    check_system(
        1,
        3,
        &[
            "4*a1 - 3*a1^3*w^2 - 11*a1^2*a3*w^2 - 38*a1*a3^2*w^2 - 70*a1*a3*a5*w^2 - 102*a1*a5^2*w^2 - 43*a3^2*a5*w^2",
            "4*a3 - a1^3*w^2 - 22*a1^2*a3*w^2 - 27*a1^2*a5*w^2 - 70*a1*a3*a5*w^2 - 27*a3^3*w^2 - 118*a3*a5^2*w^2",
            "4*a5 - 11*a1^2*a3*w^2 - 54*a1^2*a5*w^2 - 19*a1*a3^2*w^2 - 86*a3^2*a5*w^2 - 75*a5^3*w^2",
            "a1 + a3 + a5 - 1",
        ],
    );
}

/// The commonly quoted form of the cos(3ωt) condition for m = 1, N = 3 lacks
/// the a3·a5² term; a symbolic expansion and the quadrature oracle below both
/// produce it, and the difference is exactly that term.
#[test]
fn m1_n3_third_harmonic_term() {
    let vars = hbm_variables(3);
    let sys = build_hbm_system(1, 3).unwrap();
    let quoted = MultiPoly::parse(
        "4*a3 - a1^3*w^2 - 22*a1^2*a3*w^2 - 27*a1^2*a5*w^2 - 70*a1*a3*a5*w^2 - 27*a3^3*w^2",
        &vars,
    )
    .unwrap();
    let missing = MultiPoly::parse("-118*a3*a5^2*w^2", &vars).unwrap();
    assert_eq!(&sys.equations[1] - &quoted, missing);
}

#[test]
fn system_has_n_conditions_plus_normalisation() {
    for m in 0..4 {
        for n in 1..5 {
            let sys = build_hbm_system(m, n).unwrap();
            assert_eq!(sys.equations.len(), n + 1);
            assert_eq!(sys.ideal_generators.len(), n + 1);
            assert!(sys.harmonics_used.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

/// Fourier coefficients of F = x^(m+1)·x'' + x^m by trapezoid sums over one
/// period. Exact for trig polynomials once the grid exceeds twice the top harmonic.
fn numeric_coefficients(m: u32, a: &[f64], w: f64, top: usize) -> Vec<f64> {
    let samples = 4 * top + 8;
    let period = 2.0 * PI / w;
    let mut out = vec![0.0; top + 1];
    for k in 0..samples {
        let t = period * k as f64 / samples as f64;
        let mut x = 0.0;
        let mut xdd = 0.0;
        for (i, ai) in a.iter().enumerate() {
            let h = (2 * i + 1) as f64;
            x += ai * (h * w * t).cos();
            xdd -= ai * h * h * w * w * (h * w * t).cos();
        }
        let f = x.powi(m as i32 + 1) * xdd + x.powi(m as i32);
        for (j, o) in out.iter_mut().enumerate() {
            *o += f * (j as f64 * w * t).cos();
        }
    }
    for (j, o) in out.iter_mut().enumerate() {
        *o *= if j == 0 { 1.0 } else { 2.0 } / samples as f64;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fourier_coefficients_match_quadrature(
        m in 0u32..3,
        n in 1usize..4,
        a in prop::collection::vec(-1.5f64..1.5, 3),
        w in 0.3f64..2.0,
    ) {
        let series = residual_series(m, n).unwrap();
        let top = series.max_harmonic().unwrap() as usize;
        let mut point: Vec<f64> = a[..n].to_vec();
        point.push(w);
        let numeric = numeric_coefficients(m, &a[..n], w, top);
        for (j, value) in numeric.iter().enumerate() {
            let symbolic = series.coefficient(j as u32).eval_f64(&point);
            prop_assert!((symbolic - value).abs() <= 1e-10 * (1.0 + value.abs()),
                "m = {}, N = {}, j = {}: {} vs {}", m, n, j, symbolic, value);
        }
    }
}
