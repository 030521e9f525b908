//! Sparse multivariate polynomials over ℚ.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::monomial::{Monomial, MonomialOrder};
use super::rational::{RatInterval, Rational};
use crate::error::{HbmError, Result};

/// Polynomial with rational coefficients over a named variable list.
///
/// Terms are kept in strictly descending lexicographic order with no zero
/// coefficients, so structurally equal values are equal polynomials.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<[String]>,
    terms: Vec<(Monomial, Rational)>,
}

fn lex_desc(a: &Monomial, b: &Monomial) -> Ordering {
    b.exponents().cmp(a.exponents())
}

impl MultiPoly {
    pub fn zero(vars: &Arc<[String]>) -> Self {
        MultiPoly { vars: vars.clone(), terms: Vec::new() }
    }

    pub fn constant(vars: &Arc<[String]>, c: Rational) -> Self {
        Self::term(vars, Monomial::one(vars.len()), c)
    }

    pub fn one(vars: &Arc<[String]>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn var(vars: &Arc<[String]>, index: usize) -> Self {
        Self::term(vars, Monomial::var(vars.len(), index, 1), Rational::one())
    }

    pub fn term(vars: &Arc<[String]>, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.nvars(), vars.len());
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        MultiPoly { vars: vars.clone(), terms }
    }

    /// Collects like terms and drops zeros.
    pub fn from_terms(vars: &Arc<[String]>, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), vars.len(), "monomial arity does not match variable list");
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        Self::from_map(vars, acc)
    }

    fn from_map(vars: &Arc<[String]>, acc: HashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| lex_desc(&a.0, &b.0));
        MultiPoly { vars: vars.clone(), terms }
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Terms in descending lexicographic order.
    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn constant_term(&self) -> Rational {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms
            .binary_search_by(|(t, _)| lex_desc(t, m))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Rational)> {
        match order {
            MonomialOrder::Lex => self.terms.first().map(|(m, c)| (m, c)),
            _ => self
                .terms
                .iter()
                .max_by(|a, b| order.cmp(&a.0, &b.0))
                .map(|(m, c)| (m, c)),
        }
    }

    pub fn leading_monomial(&self, order: MonomialOrder) -> Option<Monomial> {
        self.leading_term(order).map(|(m, _)| *m)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m.exponent(var)).max().unwrap_or(0)
    }

    /// Variables that occur with a positive exponent.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.degree_in(i) > 0).collect()
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<()> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(HbmError::MismatchedVariables { left: self.vars.to_vec(), right: other.vars.to_vec() })
        }
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &MultiPoly, negate: bool) -> MultiPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => lex_desc(&a.0, &b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let (m, c) = &other.terms[j];
                    out.push((*m, if negate { -c } else { c.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &self.terms[i].1 - &other.terms[j].1
                    } else {
                        &self.terms[i].1 + &other.terms[j].1
                    };
                    if !c.is_zero() {
                        out.push((self.terms[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        MultiPoly { vars: self.vars.clone(), terms: out }
    }

    /// Exact product; fails when the operands use different variable lists.
    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(MultiPoly::zero(&self.vars));
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                acc.entry(ma.mul(mb))
                    .and_modify(|x| *x += &c)
                    .or_insert(c);
            }
        }
        Ok(Self::from_map(&self.vars, acc))
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        // Multiplying by a monomial preserves lex order.
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut result = MultiPoly::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars());
        let mut sum = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            sum += t;
        }
        sum
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars());
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (i, &e) in m.exponents().iter().enumerate() {
                    t *= point[i].powi(e as i32);
                }
                t
            })
            .sum()
    }

    /// Interval extension: the exact value at any point of the box lies in the result.
    pub fn eval_interval(&self, point: &[RatInterval]) -> RatInterval {
        assert_eq!(point.len(), self.nvars());
        let mut powers: Vec<Vec<RatInterval>> = point.iter().map(|x| vec![RatInterval::from_int(1), x.clone()]).collect();
        let mut sum = RatInterval::from_int(0);
        for (m, c) in &self.terms {
            let mut t = RatInterval::point(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let k = cache.len() as u32;
                    let p = point[i].pow(k);
                    cache.push(p);
                }
                t = &t * &cache[e as usize];
            }
            sum = &sum + &t;
        }
        sum
    }

    /// Substitutes `value` for variable `var`, keeping the ambient list.
    pub fn substitute(&self, var: usize, value: &Rational) -> MultiPoly {
        let terms = self.terms.iter().map(|(m, c)| {
            let e = m.exponent(var);
            let mut m2 = *m;
            m2.set_exponent(var, 0);
            (m2, c * num_traits::pow(value.clone(), e as usize))
        });
        MultiPoly::from_terms(&self.vars, terms)
    }

    /// Substitutes a polynomial for variable `var`.
    pub fn compose(&self, var: usize, value: &MultiPoly) -> MultiPoly {
        let mut powers = vec![MultiPoly::one(&self.vars)];
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponent(var) as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut m2 = *m;
            m2.set_exponent(var, 0);
            out = &out + &powers[e].mul_term(&m2, c);
        }
        out
    }

    /// Coefficient list (ascending degree) when the polynomial involves only `var`.
    pub fn as_univariate(&self, var: usize) -> Option<Vec<Rational>> {
        if self.terms.iter().any(|(m, _)| (0..self.nvars()).any(|i| i != var && m.exponent(i) > 0)) {
            return None;
        }
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Rational::zero(); deg + 1];
        for (m, c) in &self.terms {
            out[m.exponent(var) as usize] = c.clone();
        }
        Some(out)
    }

    /// Writes the polynomial as Σ cₖ·varᵏ with cₖ free of `var`; index k of the result is cₖ.
    pub fn coefficients_in(&self, var: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let mut m2 = *m;
            let e = m.exponent(var) as usize;
            m2.set_exponent(var, 0);
            buckets[e].push((m2, c.clone()));
        }
        buckets.into_iter().map(|t| MultiPoly::from_terms(&self.vars, t)).collect()
    }

    /// Parses text such as `109*w^2 - 162` or `1/2*a1^2 + a3`.
    pub fn parse(text: &str, vars: &Arc<[String]>) -> Result<MultiPoly> {
        let mut terms = Vec::new();
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() || cleaned == "0" {
            return Ok(MultiPoly::zero(vars));
        }
        let mut chunks = Vec::new();
        let mut current = String::new();
        for (i, ch) in cleaned.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !cleaned[..i].ends_with('^') {
                chunks.push(std::mem::take(&mut current));
            }
            current.push(ch);
        }
        chunks.push(current);
        for chunk in chunks {
            let (sign, body) = match chunk.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, chunk.strip_prefix('+').unwrap_or(&chunk)),
            };
            let mut coef = Rational::from_integer(BigInt::from(sign));
            let mut mono = Monomial::one(vars.len());
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(HbmError::Parse(format!("empty factor in '{chunk}'")));
                }
                if factor.chars().next().unwrap().is_ascii_digit() {
                    let r = Rational::from_str(factor).map_err(|e| HbmError::Parse(format!("{factor}: {e}")))?;
                    coef *= r;
                    continue;
                }
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u16>().map_err(|e| HbmError::Parse(format!("{factor}: {e}")))?),
                    None => (factor, 1),
                };
                let idx = vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| HbmError::Parse(format!("unknown variable '{name}'")))?;
                mono.set_exponent(idx, mono.exponent(idx) + exp);
            }
            terms.push((mono, coef));
        }
        Ok(MultiPoly::from_terms(vars, terms))
    }

    /// Same polynomial re-expressed over a different ambient list that contains every used variable.
    pub fn remap(&self, vars: &Arc<[String]>) -> Result<MultiPoly> {
        let mut map = Vec::with_capacity(self.nvars());
        for name in self.vars.iter() {
            map.push(vars.iter().position(|v| v == name));
        }
        let mut terms = Vec::with_capacity(self.len());
        for (m, c) in &self.terms {
            let mut out = Monomial::one(vars.len());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| HbmError::MismatchedVariables {
                    left: self.vars.to_vec(),
                    right: vars.to_vec(),
                })?;
                out.set_exponent(j, e);
            }
            terms.push((out, c.clone()));
        }
        Ok(MultiPoly::from_terms(vars, terms))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono = m.render(&self.vars);
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("variable lists must match")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("variable lists must match")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("variable lists must match")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

/// Splits `p` as `content · monomial_gcd · primitive`.
///
/// The primitive part has coprime integer coefficients, a positive leading
/// coefficient under lex, and no monomial factor. The content carries the sign.
pub fn content_primitive(p: &MultiPoly) -> Result<(Rational, MultiPoly, Monomial)> {
    if p.is_zero() {
        return Err(HbmError::ZeroPolynomial);
    }
    let mut mgcd = p.terms[0].0;
    for (m, _) in &p.terms[1..] {
        mgcd = mgcd.gcd(m);
    }
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for (_, c) in &p.terms {
        num_gcd = num_gcd.gcd(c.numer());
        den_lcm = den_lcm.lcm(c.denom());
    }
    let mut content = Rational::new(num_gcd, den_lcm);
    if p.terms[0].1.is_negative() {
        content = -content;
    }
    let inv = content.recip();
    let terms = p.terms.iter().map(|(m, c)| (mgcd.quotient_of(m).unwrap(), c * &inv)).collect();
    // Dividing every term by the same monomial keeps lex order.
    let primitive = MultiPoly { vars: p.vars.clone(), terms };
    Ok((content, primitive, mgcd))
}

/// Multivariate division of `p` by `divisors`; returns quotients and remainder.
pub fn divide(p: &MultiPoly, divisors: &[MultiPoly], order: MonomialOrder) -> (Vec<MultiPoly>, MultiPoly) {
    let leads: Vec<(Monomial, Rational)> = divisors
        .iter()
        .map(|d| {
            let (m, c) = d.leading_term(order).expect("divisors must be nonzero");
            (*m, c.clone())
        })
        .collect();
    let mut quotients = vec![MultiPoly::zero(p.vars()); divisors.len()];
    let mut rest = p.clone();
    let mut remainder_terms = Vec::new();
    while let Some((lm, lc)) = rest.leading_term(order).map(|(m, c)| (*m, c.clone())) {
        let hit = leads.iter().position(|(dm, _)| dm.divides(&lm));
        match hit {
            Some(i) => {
                let q = leads[i].0.quotient_of(&lm).unwrap();
                let c = &lc / &leads[i].1;
                quotients[i] = &quotients[i] + &MultiPoly::term(p.vars(), q, c.clone());
                rest = &rest - &divisors[i].mul_term(&q, &c);
            }
            None => {
                remainder_terms.push((lm, lc.clone()));
                rest = &rest - &MultiPoly::term(p.vars(), lm, lc);
            }
        }
    }
    (quotients, MultiPoly::from_terms(p.vars(), remainder_terms))
}

/// Remainder of multivariate division; no monomial of the result is divisible
/// by any divisor's leading monomial.
pub fn normal_form(p: &MultiPoly, divisors: &[MultiPoly], order: MonomialOrder) -> MultiPoly {
    divide(p, divisors, order).1
}

/// Bit length of the largest numerator or denominator.
pub fn max_coefficient_bits(p: &MultiPoly) -> u64 {
    p.terms.iter().map(|(_, c)| c.numer().bits().max(c.denom().bits())).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use proptest::prelude::*;

    fn vars() -> Arc<[String]> {
        ["a1", "a3", "a5", "w"].iter().map(|s| s.to_string()).collect()
    }

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse(s, &vars()).unwrap()
    }

    #[test]
    fn product_examples() {
        assert_eq!(&p("a1 + a3") * &p("a1 - a3"), p("a1^2 - a3^2"));
        assert!((&p("a1 + a3") * &MultiPoly::zero(&vars())).is_zero());
        assert_eq!(&p("a1 + 10*a3") * &p("a1"), p("a1^2 + 10*a1*a3"));
    }

    #[test]
    fn mismatched_variables_error() {
        let other: Arc<[String]> = ["x".to_string()].into_iter().collect();
        let q = MultiPoly::var(&other, 0);
        assert!(matches!(p("a1").checked_mul(&q), Err(HbmError::MismatchedVariables { .. })));
    }

    #[test]
    fn rendering_round_trips_through_parser() {
        let q = p("109*w^2 - 162");
        assert_eq!(q.to_string(), "109*w^2 - 162");
        let r = p("-1/2*a1^2*w^2 + a3 - 7");
        assert_eq!(r.to_string(), "-1/2*a1^2*w^2 + a3 - 7");
        assert_eq!(p(&r.to_string()), r);
    }

    #[test]
    fn content_primitive_examples() {
        // −(ω²a₁/2)(a₁+10a₃)
        let raw = p("-1/2*a1^2*w^2 - 5*a1*a3*w^2");
        let (c, prim, g) = content_primitive(&raw).unwrap();
        assert_eq!(c, rat(-1, 2));
        assert_eq!(prim, p("a1 + 10*a3"));
        assert_eq!(g, Monomial::from_exponents(&[1, 0, 0, 2]));

        let raw = p("-5*a1*a3*w^2 - 13*a1*a5*w^2");
        let (c, prim, g) = content_primitive(&raw).unwrap();
        assert_eq!(c, int(-1));
        assert_eq!(prim, p("5*a3 + 13*a5"));
        assert_eq!(g, Monomial::from_exponents(&[1, 0, 0, 2]));

        let (c, prim, g) = content_primitive(&p("7*a1")).unwrap();
        assert_eq!((c, prim, g), (int(7), p("1"), Monomial::from_exponents(&[1, 0, 0, 0])));

        assert!(matches!(content_primitive(&MultiPoly::zero(&vars())), Err(HbmError::ZeroPolynomial)));
    }

    #[test]
    fn normal_form_examples() {
        let lex = MonomialOrder::Lex;
        assert!(normal_form(&p("a1^2 + 10*a1*a3"), &[p("a1 + 10*a3")], lex).is_zero());
        assert_eq!(normal_form(&p("a1"), &[p("a3")], lex), p("a1"));
        let f = p("a1 + a3 - 1");
        let g = p("a1 + 10*a3");
        let (q, r) = divide(&f, std::slice::from_ref(&g), lex);
        assert_eq!(r, p("-9*a3 - 1"));
        assert_eq!(&(&q[0] * &g) + &r, f);
    }

    #[test]
    fn interval_evaluation_encloses_point_values() {
        let q = p("a1^2*w^2 - 3*a1*a3 + 1/3");
        let pt = [rat(1, 3), rat(-2, 5), int(0), rat(7, 4)];
        let boxed: Vec<_> = pt.iter().map(|x| RatInterval::new(x - rat(1, 100), x + rat(1, 100)).unwrap()).collect();
        let v = q.eval(&pt);
        assert!(q.eval_interval(&boxed).contains(&v));
    }

    fn small_poly() -> impl Strategy<Value = MultiPoly> {
        proptest::collection::vec((proptest::collection::vec(0u16..3, 4), -5i64..6, 1i64..4), 0..5).prop_map(|ts| {
            let v = vars();
            MultiPoly::from_terms(&v, ts.into_iter().map(|(e, n, d)| (Monomial::from_exponents(&e), rat(n, d))))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn content_primitive_round_trip(a in small_poly()) {
            prop_assume!(!a.is_zero());
            let (c, prim, g) = content_primitive(&a).unwrap();
            prop_assert_eq!(prim.mul_term(&g, &c), a);
            prop_assert!(prim.terms()[0].1.is_positive());
            prop_assert!(prim.terms().iter().all(|(_, c)| c.is_integer()));
        }

        #[test]
        fn division_identity(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assume!(!b.is_zero() && !c.is_zero());
            for order in [MonomialOrder::Lex, MonomialOrder::GrevLex] {
                let (q, r) = divide(&a, &[b.clone(), c.clone()], order);
                let back = &(&(&q[0] * &b) + &(&q[1] * &c)) + &r;
                prop_assert_eq!(back, a.clone());
                let lb = b.leading_monomial(order).unwrap();
                let lc = c.leading_monomial(order).unwrap();
                prop_assert!(r.terms().iter().all(|(m, _)| !lb.divides(m) && !lc.divides(m)));
            }
        }
    }
}
