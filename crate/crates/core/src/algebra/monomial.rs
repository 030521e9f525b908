use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Upper bound on the number of ambient variables (a₁ … a_{2N−1}, ω).
pub const MAX_VARS: usize = 12;

/// Power product with one exponent slot per ambient variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
    nvars: u8,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables supported");
        Monomial { exps: [0; MAX_VARS], nvars: nvars as u8 }
    }

    pub fn var(nvars: usize, index: usize, exp: u16) -> Self {
        let mut m = Self::one(nvars);
        assert!(index < nvars);
        m.exps[index] = exp;
        m
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        let mut m = Self::one(exps.len());
        m.exps[..exps.len()].copy_from_slice(exps);
        m
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps[..self.nvars as usize]
    }

    pub fn exponent(&self, index: usize) -> u16 {
        self.exps[index]
    }

    pub fn set_exponent(&mut self, index: usize, e: u16) {
        assert!(index < self.nvars());
        self.exps[index] = e;
    }

    pub fn degree(&self) -> u32 {
        self.exponents().iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exponents().iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = *self;
        for i in 0..self.nvars() {
            out.exps[i] += other.exps[i];
        }
        out
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        (0..self.nvars()).all(|i| self.exps[i] <= other.exps[i])
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let mut out = *other;
        for i in 0..self.nvars() {
            out.exps[i] -= self.exps[i];
        }
        Some(out)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for i in 0..self.nvars() {
            out.exps[i] = self.exps[i].max(other.exps[i]);
        }
        out
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for i in 0..self.nvars() {
            out.exps[i] = self.exps[i].min(other.exps[i]);
        }
        out
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        (0..self.nvars()).all(|i| self.exps[i] == 0 || other.exps[i] == 0)
    }

    /// Index of the first variable with a nonzero exponent.
    pub fn leading_variable(&self) -> Option<usize> {
        self.exponents().iter().position(|&e| e > 0)
    }

    pub fn render(&self, vars: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(vars[i].clone()),
                _ => parts.push(format!("{}^{}", vars[i], e)),
            }
        }
        parts.join("*")
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents())
    }
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.exponents().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<u16>::deserialize(d)?;
        if v.len() > MAX_VARS {
            return Err(serde::de::Error::custom("too many variables"));
        }
        Ok(Monomial::from_exponents(&v))
    }
}

/// Term order; variable priority follows the ambient list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonomialOrder {
    Lex,
    GrevLex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.exponents().cmp(b.exponents()),
            MonomialOrder::GrevLex => a.degree().cmp(&b.degree()).then_with(|| {
                // Smaller exponent in the last differing variable wins.
                for i in (0..a.nvars()).rev() {
                    match a.exps[i].cmp(&b.exps[i]) {
                        Ordering::Equal => continue,
                        other => return other.reverse(),
                    }
                }
                Ordering::Equal
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mono() -> impl Strategy<Value = Monomial> {
        proptest::collection::vec(0u16..5, 4).prop_map(|v| Monomial::from_exponents(&v))
    }

    fn order() -> impl Strategy<Value = MonomialOrder> {
        prop_oneof![Just(MonomialOrder::Lex), Just(MonomialOrder::GrevLex)]
    }

    proptest! {
        #[test]
        fn orders_are_admissible(o in order(), u in mono(), v in mono(), w in mono()) {
            // antisymmetry
            if o.cmp(&u, &v) == Ordering::Equal {
                prop_assert_eq!(u, v);
            }
            prop_assert_eq!(o.cmp(&u, &v), o.cmp(&v, &u).reverse());
            // transitivity
            if o.cmp(&u, &v) != Ordering::Greater && o.cmp(&v, &w) != Ordering::Greater {
                prop_assert_ne!(o.cmp(&u, &w), Ordering::Greater);
            }
            // multiplicativity
            prop_assert_eq!(o.cmp(&u, &v), o.cmp(&u.mul(&w), &v.mul(&w)));
            // 1 is minimal
            prop_assert_ne!(o.cmp(&Monomial::one(4), &u), Ordering::Greater);
        }
    }

    #[test]
    fn grevlex_breaks_ties_on_last_variable() {
        let xy = Monomial::from_exponents(&[1, 1, 0]);
        let xz = Monomial::from_exponents(&[1, 0, 1]);
        let y2 = Monomial::from_exponents(&[0, 2, 0]);
        assert_eq!(MonomialOrder::GrevLex.cmp(&xy, &xz), Ordering::Greater);
        assert_eq!(MonomialOrder::GrevLex.cmp(&y2, &xz), Ordering::Greater);
        assert_eq!(MonomialOrder::Lex.cmp(&y2, &xz), Ordering::Less);
    }

    #[test]
    fn divisibility() {
        let a = Monomial::from_exponents(&[1, 2]);
        let b = Monomial::from_exponents(&[2, 3]);
        assert_eq!(a.quotient_of(&b), Some(Monomial::from_exponents(&[1, 1])));
        assert!(b.quotient_of(&a).is_none());
        assert_eq!(a.lcm(&Monomial::from_exponents(&[0, 4])), Monomial::from_exponents(&[1, 4]));
    }
}
