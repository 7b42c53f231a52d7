//! Exact arithmetic in towers of real quadratic extensions, plus a formal `i`.

pub mod codec;
mod complex;
pub mod interval;
mod tower;

pub use complex::ComplexTowerElement;
pub use interval::{approximate, Interval};
pub use tower::{adjoin_sqrt, Tower, TowerElement};

use num_rational::BigRational;

/// Shorthand for a rational constant.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
