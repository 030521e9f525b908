//! Harmonic balance analysis of the singular oscillator family
//! `x^(m+1) x'' + x^m = 0` in exact arithmetic.
//!
//! The pipeline derives the polynomial balance equations for an odd-cosine
//! ansatz ([`trigring`]), eliminates with a lexicographic Gröbner basis
//! ([`groebner`]), isolates and certifies the real solutions ([`realroots`])
//! and ranks them by residual norm ([`solver`]). [`reference`] provides the
//! ground-truth periods the approximations are measured against.

pub mod algebra;
pub mod error;
pub mod groebner;
pub mod realroots;
pub mod reference;
pub mod solver;
pub mod trigring;

pub use algebra::{Monomial, MonomialOrder, MultiPoly, RatInterval, Rational};
pub use error::{HbmError, Result};
pub use groebner::{Budget, GroebnerBasis, GroebnerStats, LexStrategy};
