//! Exact coefficient arithmetic: rationals, polynomials over them, and
//! rational functions in the parameter λ.

mod poly;
mod ratfun;
mod rational;

pub use poly::{Poly, RationalRoots};
pub use ratfun::RatFun;
pub use rational::{binomial, factorial, parse_rational, pow_int, q, qi, Rational};

use std::fmt;

/// Minimal field interface shared by the coefficient domains of Hahn series.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(q: &Rational) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// `None` for zero.
    fn inverse(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn scaled(&self, q: &Rational) -> Self {
        self.times(&Self::from_rational(q))
    }

    /// Machine-readable encoding used by the JSON reports.
    fn to_json(&self) -> serde_json::Value;
}

impl Field for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Field::is_zero(self) {
            None
        } else {
            Some(num_traits::Inv::inv(self.clone()))
        }
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}
