//! Exact coefficient arithmetic: rationals, rational intervals, monomials and
//! multivariate polynomials.

mod monomial;
mod poly;
mod rational;

pub use monomial::{Monomial, MonomialOrder, MAX_VARS};
pub use poly::{content_primitive, divide, max_coefficient_bits, normal_form, MultiPoly};
pub use rational::{
    ceil_dyadic, floor_dyadic, format_fixed, format_significant, from_f64, gcd_all, int, parse_rational, pi_enclosure, rat,
    rat_normalize, sign_of, sqrt_enclosure, to_f64, RatInterval, Rational,
};
