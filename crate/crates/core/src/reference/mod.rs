//! Ground-truth periods for the limiting oscillator `x x'' + 1 = 0` and its
//! regularisation `x'' = −x/(x² + k²)`, in double precision.
//!
//! The exact period of the singular problem is `2√(2π)·A`. The regularised
//! period is available both as a one-dimensional integral and by direct
//! integration of the equations of motion, and the two routes are kept
//! independent so they can check each other.

mod ode;
mod quadrature;
mod special;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{HbmError, Result};

pub use ode::{simulate_regularized, OdeTolerances, PhasePoint, Trajectory};
pub use quadrature::{tanh_sinh, QuadratureResult};
pub use special::{erf, erf_inv, erfc, erfc_inv};

/// The period coefficient `2√(2π)` of the singular oscillator.
pub fn exact_period_coefficient() -> f64 {
    2.0 * (2.0 * PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodMethod {
    Exact,
    Quadrature,
    Ode,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodResult {
    pub value: f64,
    pub method: PeriodMethod,
    pub estimated_error: f64,
    pub amplitude: f64,
    pub k: Option<f64>,
}

/// Exact period `2√(2π)·A` of the weak periodic solution with amplitude `A`.
pub fn exact_period(amplitude: f64) -> Result<PeriodResult> {
    check_amplitude(amplitude)?;
    Ok(PeriodResult {
        value: exact_period_coefficient() * amplitude,
        method: PeriodMethod::Exact,
        estimated_error: f64::EPSILON * amplitude,
        amplitude,
        k: None,
    })
}

/// Weak periodic solution of `x x'' + 1 = 0` with `x(0) = A`, `x'(0) = 0`.
///
/// On the central branch `|t| < √(2π)A/2` it is
/// `A·exp(−erf⁻¹(2t/(√(2π)A))²)`; neighbouring branches alternate in sign
/// and meet at the zeros `(2n+1)√(2π)A/2`, where the velocity jumps.
pub fn weak_solution(t: f64, amplitude: f64) -> Result<f64> {
    check_amplitude(amplitude)?;
    if !t.is_finite() {
        return Err(HbmError::InvalidInput(format!("t must be finite, got {t}")));
    }
    let half = (2.0 * PI).sqrt() * amplitude / 2.0;
    // Branch n covers ((2n−1)·half, (2n+1)·half).
    let n = ((t + half) / (2.0 * half)).floor();
    let local = t - n * 2.0 * half;
    let u = local / half;
    if u.abs() >= 1.0 {
        return Ok(0.0);
    }
    let z = erf_inv(u)?;
    let sign = if n.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
    Ok(sign * amplitude * (-z * z).exp())
}

/// Samples `(t, x)` of the weak solution on `[from, to]` with the given step.
pub fn weak_solution_samples(amplitude: f64, from: f64, to: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    if !(step > 0.0) || !(to >= from) || !from.is_finite() || !to.is_finite() {
        return Err(HbmError::InvalidInput(format!(
            "need from <= to and step > 0, got from = {from}, to = {to}, step = {step}"
        )));
    }
    let count = ((to - from) / step).floor() as usize;
    (0..=count)
        .map(|i| {
            let t = from + i as f64 * step;
            weak_solution(t, amplitude).map(|x| (t, x))
        })
        .collect()
}

/// Period of the regularised oscillator from
/// `T = 4A ∫₀¹ ds / √(ln((A² + k²)/(A²s² + k²)))`.
pub fn regularized_period_quadrature(amplitude: f64, k: f64) -> Result<PeriodResult> {
    ode::validate(amplitude, k)?;
    let a2 = amplitude * amplitude;
    let k2 = k * k;
    let r = tanh_sinh(
        |s, c| {
            // (A² + k²)/(A²s² + k²) − 1 = A²(1 − s)(1 + s)/(A²s² + k²)
            let excess = a2 * c * (1.0 + s) / (a2 * s * s + k2);
            1.0 / excess.ln_1p().sqrt()
        },
        1e-14,
        12,
    );
    Ok(PeriodResult {
        value: 4.0 * amplitude * r.value,
        method: PeriodMethod::Quadrature,
        estimated_error: 4.0 * amplitude * r.estimated_error,
        amplitude,
        k: Some(k),
    })
}

/// `4 ∫₀¹ ds / √(−2 ln s)`, the `k → 0` limit of the regularised period at `A = 1`.
pub fn k0_limit_integral() -> QuadratureResult {
    let mut r = tanh_sinh(
        |s, c| {
            let log = if s > 0.5 { (-c).ln_1p() } else { s.ln() };
            1.0 / (-2.0 * log).sqrt()
        },
        1e-14,
        12,
    );
    r.value *= 4.0;
    r.estimated_error *= 4.0;
    r
}

/// Period of the regularised oscillator by integrating from `(A, 0)` to the
/// first return to the half-line `{y = 0, x > 0}`.
///
/// The crossing time is located by bisection to 1e-10. The estimated error is
/// the disagreement with four times the first-quarter crossing, which equals
/// the period by the reflection symmetries of the orbit.
pub fn regularized_period_ode(amplitude: f64, k: f64) -> Result<PeriodResult> {
    ode::validate(amplitude, k)?;
    let osc = ode::Oscillator::new(k);
    let tol = OdeTolerances { rtol: 1e-13, atol: 1e-13 * amplitude };
    let mut driver = ode::Driver::new(&osc, tol, [amplitude, 0.0], ode::initial_step(amplitude, k));
    let horizon = 100.0 * (exact_period_coefficient() * amplitude + 2.0 * PI * k);
    let mut quarter = None;
    let mut left_section = false;
    while driver.t < horizon {
        let t0 = driver.t;
        let from = driver.advance(horizon)?;
        let h = driver.t - t0;
        let to = driver.state;
        if quarter.is_none() && from[0] > 0.0 && to[0] <= 0.0 {
            quarter = Some(t0 + bisect(&driver, from, h, 0));
        }
        if to[1] < 0.0 {
            left_section = true;
        }
        if left_section && from[1] > 0.0 && to[1] <= 0.0 && to[0] > 0.0 {
            let period = t0 + bisect(&driver, from, h, 1);
            let quarter = quarter.ok_or_else(|| {
                HbmError::InconsistentBranch("orbit closed without crossing x = 0".into())
            })?;
            return Ok(PeriodResult {
                value: period,
                method: PeriodMethod::Ode,
                estimated_error: (period - 4.0 * quarter).abs().max(1e-10),
                amplitude,
                k: Some(k),
            });
        }
    }
    Err(HbmError::InconsistentBranch(format!("no return to the section before t = {horizon}")))
}

/// Offset in `[0, h]` where component `d` changes sign from positive to non-positive.
fn bisect(driver: &ode::Driver<'_>, from: [f64; 2], h: f64, d: usize) -> f64 {
    let (mut lo, mut hi) = (0.0, h);
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if driver.partial(from, mid)[d] > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_amplitude(amplitude: f64) -> Result<()> {
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(HbmError::InvalidInput(format!("amplitude must be positive, got {amplitude}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        assert!((exact_period_coefficient() - 5.013_256_549_262_001).abs() < 1e-15);
        assert!((exact_period(2.0).unwrap().value - 10.026_513_098_524_002).abs() < 1e-14);
        assert!(exact_period(0.0).is_err());
        assert!(exact_period(-1.0).is_err());
    }

    #[test]
    fn weak_solution_shape() {
        let a = 1.5;
        let half = (2.0 * PI).sqrt() * a / 2.0;
        assert!((weak_solution(0.0, a).unwrap() - a).abs() < 1e-15);
        assert!(weak_solution(half, a).unwrap().abs() < 1e-12);
        assert!((weak_solution(2.0 * half, a).unwrap() + a).abs() < 1e-15);
        assert!((weak_solution(4.0 * half, a).unwrap() - a).abs() < 1e-12);
        let t = 0.37;
        assert!((weak_solution(t, a).unwrap() - weak_solution(-t, a).unwrap()).abs() < 1e-15);
        assert!((weak_solution(t, a).unwrap() - weak_solution(t + 4.0 * half, a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn limit_integral() {
        let r = k0_limit_integral();
        assert!((r.value - exact_period_coefficient()).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn quadrature_and_ode_agree() {
        for k in [1.0, 1e-2] {
            let q = regularized_period_quadrature(1.0, k).unwrap();
            let o = regularized_period_ode(1.0, k).unwrap();
            assert!((q.value - o.value).abs() <= 1e-6 * q.value, "k = {k}: {} vs {}", q.value, o.value);
        }
    }
}
