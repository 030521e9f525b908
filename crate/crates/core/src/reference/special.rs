use std::f64::consts::PI;

use crate::error::{HbmError, Result};

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Error function.
pub fn erf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        return -erf(-z);
    }
    if z <= 2.5 {
        erf_series(z)
    } else {
        1.0 - erfc_continued_fraction(z)
    }
}

/// Complementary error function 1 − erf(z).
pub fn erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        return 2.0 - erfc(-z);
    }
    if z <= 2.5 {
        1.0 - erf_series(z)
    } else {
        erfc_continued_fraction(z)
    }
}

/// erf(z) = 2/√π · e^{−z²} Σ 2ⁿ z^{2n+1} / (1·3·…·(2n+1)); all terms positive.
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= 2.0 * z2 / (2 * n + 1) as f64;
        sum += term;
        if term < sum * 1e-17 || n > 200 {
            break;
        }
    }
    TWO_OVER_SQRT_PI * (-z2).exp() * sum
}

/// erfc for z > 0 from the continued fraction
/// √π e^{z²} erfc(z) = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …)))), by modified Lentz.
fn erfc_continued_fraction(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for n in 1..500 {
        let a = n as f64 / 2.0;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (f * PI.sqrt())
}

/// Inverse error function on (−1, 1).
pub fn erf_inv(u: f64) -> Result<f64> {
    if !(u.abs() < 1.0) {
        return Err(HbmError::Domain(format!("erf_inv needs |u| < 1, got {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let x = u.abs();
    Ok(u.signum() * invert(x, 1.0 - x))
}

/// Inverse complementary error function on (0, 2).
///
/// Near 0 this keeps the full relative precision of `q`, which `erf_inv(1 - q)`
/// cannot once `1 - q` rounds.
pub fn erfc_inv(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 2.0) {
        return Err(HbmError::Domain(format!("erfc_inv needs 0 < q < 2, got {q}")));
    }
    if q > 1.0 {
        return Ok(-erfc_inv(2.0 - q)?);
    }
    if q == 1.0 {
        return Ok(0.0);
    }
    Ok(invert(1.0 - q, q))
}

/// Solves erf(z) = x, z ≥ 0, given x and its complement 1 − x.
fn invert(x: f64, complement: f64) -> f64 {
    // 1 − x², kept accurate near x = 1.
    let one_minus_x2 = complement * (1.0 + x);
    let mut z = seed(x, one_minus_x2);
    for _ in 0..60 {
        // Halley on erf for moderate x, on erfc near 1 where erf(z) − x cancels.
        let r = if x < 0.5 { erf(z) - x } else { complement - erfc(z) };
        let dr = TWO_OVER_SQRT_PI * (-z * z).exp();
        if dr == 0.0 {
            break;
        }
        let step = r / dr;
        // f''/f' = −2z.
        let step = step / (1.0 + z * step);
        z -= step;
        if step.abs() <= 1e-16 * z.abs().max(1e-300) {
            break;
        }
    }
    z
}

/// Closed-form seed with relative error around 2·10⁻³.
fn seed(x: f64, one_minus_x2: f64) -> f64 {
    let a = 0.147;
    let l = one_minus_x2.ln();
    let t = 2.0 / (PI * a) + l / 2.0;
    ((t * t - l / a).sqrt() - t).sqrt().copysign(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((erf(3.0) - 0.999_977_909_503_001_4).abs() < 1e-15);
        assert!((erfc(3.0) - 2.209_049_699_858_544e-5).abs() < 1e-17);
        assert!((erfc(5.0) / 1.537_459_794_428_034_8e-12 - 1.0).abs() < 1e-12);
        assert_eq!(erf(-0.5), -erf(0.5));
        assert_eq!(erf_inv(0.0).unwrap(), 0.0);
        assert!(erf_inv(1.0).is_err());
        assert!(erf_inv(-1.5).is_err());
    }

    #[test]
    fn round_trip() {
        // Storing erf(z) as a double costs |z| up to ulp(1)/erf'(z), which passes
        // 10⁻¹⁰ near |z| = 3.4; beyond that the tail goes through erfc.
        for i in -340..=340 {
            let z = i as f64 / 100.0;
            let back = erf_inv(erf(z)).unwrap();
            assert!((back - z).abs() < 1e-10, "z = {z}: {back}");
        }
        for i in 0..=600 {
            let z = i as f64 / 100.0;
            let back = erfc_inv(erfc(z)).unwrap();
            assert!((back - z).abs() < 1e-10, "z = {z}: {back}");
        }
        for u in [1e-8, 0.3, 0.9, 0.999, 1.0 - 1e-9, 1.0 - 1e-12] {
            let z = erf_inv(u).unwrap();
            assert!(((1.0 - erfc(z)) - u).abs() < 1e-15, "u = {u}");
        }
    }
}
