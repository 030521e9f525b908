//! Exact rationals and outward-conservative rational intervals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{HbmError, Result};

/// Arbitrary-precision rational number, always stored in lowest terms with
/// a positive denominator.
pub type Rational = BigRational;

/// Builds the canonical rational `n / d`.
pub fn rat_normalize(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Rational> {
    let d = d.into();
    if d.is_zero() {
        return Err(HbmError::DivisionByZero);
    }
    Ok(Rational::new(n.into(), d))
}

pub fn rat(n: i64, d: i64) -> Rational {
    rat_normalize(n, d).expect("nonzero denominator")
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back on a shifted division when numerator/denominator overflow f64.
        let shift = r.numer().bits().max(r.denom().bits()) as i64 - 900;
        let (n, d) = if shift > 0 {
            (r.numer() >> shift as usize, r.denom() >> shift as usize)
        } else {
            (r.numer().clone(), r.denom().clone())
        };
        match (n.to_f64(), d.to_f64()) {
            (Some(n), Some(d)) if d != 0.0 => n / d,
            _ => f64::NAN,
        }
    })
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| HbmError::InvalidInput(format!("non-finite value {x}")))
}

/// Largest dyadic `k / 2^bits` not exceeding `r`.
pub fn floor_dyadic(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits as usize;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

/// Smallest dyadic `k / 2^bits` not below `r`.
pub fn ceil_dyadic(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits as usize;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.ceil().to_integer(), scale)
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// Decimal rendering with `digits` significant digits, rounding half away from zero.
pub fn format_significant(r: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // Estimate floor(log10 |r|), then correct.
    let mut e = (a.numer().to_string().len() as i64) - (a.denom().to_string().len() as i64);
    let scale = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(pow10(e as u32))
        } else {
            Rational::new(BigInt::one(), pow10((-e) as u32))
        }
    };
    while a >= scale(e + 1) {
        e += 1;
    }
    while a < scale(e) {
        e -= 1;
    }
    let shift = digits as i64 - 1 - e;
    let scaled = &a * scale(shift);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut s = (scaled + half).floor().to_integer();
    let mut shift = shift;
    if s >= pow10(digits as u32) {
        s /= 10;
        shift -= 1;
    }
    let mut text = s.to_string();
    let out = if shift <= 0 {
        text.push_str(&"0".repeat((-shift) as usize));
        text
    } else {
        let shift = shift as usize;
        if text.len() <= shift {
            format!("0.{}{}", "0".repeat(shift - text.len()), text)
        } else {
            let (i, f) = text.split_at(text.len() - shift);
            format!("{i}.{f}")
        }
    };
    if neg {
        format!("-{out}")
    } else {
        out
    }
}

/// Decimal rendering with a fixed number of fractional digits.
pub fn format_fixed(r: &Rational, decimals: usize) -> String {
    let neg = r.is_negative();
    let scaled = r.abs() * Rational::from_integer(pow10(decimals as u32));
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let s = (scaled + half).floor().to_integer().to_string();
    let s = if s.len() <= decimals {
        format!("{}{}", "0".repeat(decimals + 1 - s.len()), s)
    } else {
        s
    };
    let body = if decimals == 0 {
        s
    } else {
        let (i, f) = s.split_at(s.len() - decimals);
        format!("{i}.{f}")
    };
    if neg && body.chars().any(|c| c != '0' && c != '.') {
        format!("-{body}")
    } else {
        body
    }
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatInterval {
    #[serde(with = "rational_string")]
    lo: Rational,
    #[serde(with = "rational_string")]
    hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(HbmError::InvalidInput(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(RatInterval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(int(n))
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains_interval(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &RatInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn hull(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn abs(&self) -> RatInterval {
        if self.lo.is_negative() && self.hi.is_positive() {
            RatInterval { lo: Rational::zero(), hi: self.hi.clone().max(-&self.lo) }
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, c: &Rational) -> RatInterval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn square(&self) -> RatInterval {
        self.pow(2)
    }

    pub fn pow(&self, n: u32) -> RatInterval {
        if n == 0 {
            return Self::point(Rational::one());
        }
        let lo_p = num_traits::pow(self.lo.clone(), n as usize);
        let hi_p = num_traits::pow(self.hi.clone(), n as usize);
        if n % 2 == 1 {
            RatInterval { lo: lo_p, hi: hi_p }
        } else if self.contains_zero() {
            RatInterval { lo: Rational::zero(), hi: lo_p.max(hi_p) }
        } else if self.lo.is_positive() {
            RatInterval { lo: lo_p, hi: hi_p }
        } else {
            RatInterval { lo: hi_p, hi: lo_p }
        }
    }

    pub fn recip(&self) -> Result<RatInterval> {
        if self.contains_zero() {
            return Err(HbmError::DivisionByZero);
        }
        Ok(RatInterval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn checked_div(&self, other: &RatInterval) -> Result<RatInterval> {
        Ok(self * &other.recip()?)
    }

    /// Outward rounding of both endpoints to dyadics with `bits` fractional bits.
    pub fn round_outward(&self, bits: u32) -> RatInterval {
        RatInterval { lo: floor_dyadic(&self.lo, bits), hi: ceil_dyadic(&self.hi, bits) }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, rhs: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, rhs: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Neg for &RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, rhs: &RatInterval) -> RatInterval {
        if self.is_point() {
            return rhs.scale(&self.lo);
        }
        if rhs.is_point() {
            return self.scale(&rhs.lo);
        }
        let c = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatInterval {
            type Output = RatInterval;
            fn $m(self, rhs: RatInterval) -> RatInterval {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        -&self
    }
}

/// Rational enclosure of π with width at most `2^-bits`, from Machin's formula.
pub fn pi_enclosure(bits: u32) -> RatInterval {
    // arctan(1/x) as an alternating series; consecutive partial sums bracket the limit.
    fn arctan_inv(x: i64, bits: u32) -> (Rational, Rational) {
        let x2 = BigInt::from(x * x);
        let tol = Rational::new(BigInt::one(), BigInt::one() << (bits as usize + 8));
        let mut sum = Rational::zero();
        let mut power = BigInt::from(x);
        let mut k: i64 = 0;
        loop {
            let term = Rational::new(BigInt::one(), &power * BigInt::from(2 * k + 1));
            let next = if k % 2 == 0 { &sum + &term } else { &sum - &term };
            let next_term = Rational::new(BigInt::one(), &power * &x2 * BigInt::from(2 * k + 3));
            if next_term < tol {
                let other = if k % 2 == 0 { &next - &next_term } else { &next + &next_term };
                return if next <= other { (next, other) } else { (other, next) };
            }
            sum = next;
            power *= &x2;
            k += 1;
        }
    }
    let (a_lo, a_hi) = arctan_inv(5, bits);
    let (b_lo, b_hi) = arctan_inv(239, bits);
    let sixteen = int(16);
    let four = int(4);
    let lo = &sixteen * a_lo - &four * b_hi;
    let hi = &sixteen * a_hi - &four * b_lo;
    RatInterval { lo, hi }.round_outward(bits + 4)
}

/// Enclosure of `sqrt(x)` for `x >= 0`, with dyadic endpoints of `bits` fractional bits.
pub fn sqrt_enclosure(x: &Rational, bits: u32) -> Result<RatInterval> {
    if x.is_negative() {
        return Err(HbmError::Domain(format!("sqrt of negative {x}")));
    }
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = (x * Rational::from_integer(scale)).floor().to_integer();
    let root = scaled.sqrt();
    let denom = BigInt::one() << bits as usize;
    let lo = Rational::new(root.clone(), denom.clone());
    let hi = Rational::new(root + BigInt::one(), denom);
    Ok(RatInterval { lo, hi })
}

pub fn sign_of(r: &Rational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn gcd_all<'a>(items: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    let items: Vec<&BigInt> = items.into_iter().filter(|x| !x.is_zero()).collect();
    let Some(smallest) = items.iter().min_by_key(|x| x.bits()) else {
        return BigInt::zero();
    };
    // Starting from the shortest entry and reducing each other entry modulo the
    // running gcd keeps every binary gcd at the size of the answer so far.
    let mut g = smallest.abs();
    for x in items {
        if g.is_one() {
            break;
        }
        let r = x % &g;
        if !r.is_zero() {
            g = g.gcd(&r);
        }
    }
    g
}

/// Parses `p/q`, an integer, or a decimal such as `-1.25e-3` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || HbmError::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        return rat_normalize(n, d);
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let shift = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if shift >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, shift as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, (-shift) as usize))
    };
    if negative {
        r = -r;
    }
    Ok(r)
}

pub(crate) mod rational_string {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        Rational::from_str(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("1.25").unwrap(), rat(5, 4));
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("2e-2").unwrap(), rat(1, 50));
        assert_eq!(parse_rational(".5E1").unwrap(), int(5));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        for bad in ["", "abc", "1.2.3", "1/0", "-", "e5"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn normalize_reduces_and_moves_sign() {
        assert_eq!(rat_normalize(6, -4).unwrap(), rat(-3, 2));
        let z = rat_normalize(0, 7).unwrap();
        assert_eq!((z.numer().clone(), z.denom().clone()), (BigInt::zero(), BigInt::one()));
        let w = rat_normalize(324, 218).unwrap();
        assert_eq!((w.numer().clone(), w.denom().clone()), (BigInt::from(162), BigInt::from(109)));
        assert!(matches!(rat_normalize(1, 0), Err(HbmError::DivisionByZero)));
    }

    #[test]
    fn significant_rendering() {
        assert_eq!(format_significant(&rat(162, 109), 6), "1.48624");
        assert_eq!(format_significant(&rat(-1, 3), 3), "-0.333");
        assert_eq!(format_significant(&rat(999_999, 1), 3), "1000000");
        assert_eq!(format_significant(&rat(1, 1000), 2), "0.0010");
        assert_eq!(format_fixed(&rat(2801, 1000), 2), "2.80");
        assert_eq!(format_fixed(&rat(-1, 1000), 2), "0.00");
    }

    #[test]
    fn pi_is_enclosed() {
        let p = pi_enclosure(120);
        assert!(p.width() <= Rational::new(BigInt::one(), BigInt::one() << 118));
        let (lo, hi) = p.to_f64_pair();
        assert!(lo <= std::f64::consts::PI && std::f64::consts::PI <= hi);
        let digits = rat_normalize(
            BigInt::parse_bytes(b"31415926535897932384626433832795028", 10).unwrap(),
            num_traits::pow(BigInt::from(10), 34),
        )
        .unwrap();
        assert!((p.midpoint() - digits).abs() < rat(1, 1_000_000_000_000_000));
    }

    #[test]
    fn interval_mul_covers_sign_cases() {
        let a = RatInterval::new(int(-2), int(3)).unwrap();
        let b = RatInterval::new(int(-1), int(4)).unwrap();
        assert_eq!(&a * &b, RatInterval::new(int(-8), int(12)).unwrap());
        assert_eq!(a.pow(2), RatInterval::new(int(0), int(9)).unwrap());
        assert!(a.recip().is_err());
    }

    #[test]
    fn sqrt_brackets() {
        let s = sqrt_enclosure(&int(2), 40).unwrap();
        assert!(s.lo() * s.lo() <= int(2) && s.hi() * s.hi() >= int(2));
    }
}
