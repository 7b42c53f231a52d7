//! Exact witness sets showing that unit-distance preserving maps from the
//! real plane into `C²` preserve a dense family of distances.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: quadratic towers over `Q`, their complexification, and
//!   certified interval enclosures.
//! * [`geometry`]: exact points in `R²` and `Cⁿ`.
//! * [`matrix`] and [`poly`]: fraction-free determinants and univariate
//!   polynomials with tower coefficients.
//! * [`cayley_menger`]: the squared complex distance `φₙ`, Cayley-Menger
//!   determinants and the four symbolic lemma determinants.
//! * [`witness`]: distance words and the recursive witness-set builder.
//! * [`verifier`]: checks of candidate maps and executable propositions.
//! * [`density`]: certified search for `(2√2/3)^k·(√3)^l` near a target.
//! * [`trials`]: seeded randomized property suites shared by tests and the CLI.

pub mod cayley_menger;
pub mod density;
pub mod error;
pub mod field;
pub mod geometry;
pub mod matrix;
pub mod poly;
pub mod trials;
pub mod verifier;
pub mod witness;

pub use error::{CmError, DensityError, FieldError, VerifyError, WitnessError};
pub use field::{ComplexTowerElement, Interval, Tower, TowerElement};
pub use geometry::{ComplexPoint, ExactPoint2};
pub use poly::UnivariatePoly;
pub use witness::{DistanceWord, WitnessSet};
