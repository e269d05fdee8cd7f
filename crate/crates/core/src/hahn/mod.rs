//! Truncated Hahn series with rational exponents and guarantee masks.

mod mask;
mod series;

pub use mask::{Bound, Interval, Mask};
pub use series::HahnSeries;

use crate::fields::{RatFun, Rational};

/// Series with rational coefficients.
pub type QSeries = HahnSeries<Rational>;
/// Series with coefficients in ℚ(λ).
pub type ParametricSeries = HahnSeries<RatFun>;
