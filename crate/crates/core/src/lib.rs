//! Exact computation of Newton polygons, factorizations and Frobenius-type
//! solution bases for linear Mahler equations over Hahn series.

pub mod error;
pub mod factorize;
pub mod fields;
pub mod frobenius;
pub mod hahn;
pub mod newton;
pub mod operator;
pub mod random;

pub use error::{MahlerError, Result};
