//! Coefficient rings: classes at `L = 1` and the atomic ring with Lefschetz denominators.

mod class;
mod laurent;
mod scalar;
pub mod serde_impl;

pub use class::{AtomicClass, ClassMonomial, ClassOrder, ClassSymbol, Coeff, Combination, MotClass};
pub use laurent::LaurentPoly;
pub use scalar::{poly_sum, poly_sum_from_zero, AtomicScalar};
