//! Exact points in the real plane and in `Cⁿ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::FieldError;
use crate::field::{ComplexTowerElement, Tower, TowerElement};

/// A point of `R²` with tower coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactPoint2 {
    pub x: TowerElement,
    pub y: TowerElement,
}

impl ExactPoint2 {
    pub fn new(x: TowerElement, y: TowerElement) -> ExactPoint2 {
        ExactPoint2 { x, y }
    }

    pub fn origin() -> ExactPoint2 {
        ExactPoint2::new(TowerElement::zero(), TowerElement::zero())
    }

    pub fn add(&self, o: &ExactPoint2) -> ExactPoint2 {
        ExactPoint2::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &ExactPoint2) -> ExactPoint2 {
        ExactPoint2::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn scale(&self, s: &TowerElement) -> ExactPoint2 {
        ExactPoint2::new(&self.x * s, &self.y * s)
    }

    /// Quarter turn counter-clockwise.
    pub fn perp(&self) -> ExactPoint2 {
        ExactPoint2::new(-&self.y, self.x.clone())
    }

    /// Rotate about the origin by the angle with the given cosine and sine.
    pub fn rotate(&self, cos: &TowerElement, sin: &TowerElement) -> ExactPoint2 {
        ExactPoint2::new(&(cos * &self.x) - &(sin * &self.y), &(sin * &self.x) + &(cos * &self.y))
    }

    /// Squared Euclidean distance.
    pub fn dist2(&self, o: &ExactPoint2) -> TowerElement {
        let d = self.sub(o);
        &d.x.square() + &d.y.square()
    }

    pub fn embed(&self, tower: &Tower) -> Result<ExactPoint2, FieldError> {
        Ok(ExactPoint2::new(self.x.embed(tower)?, self.y.embed(tower)?))
    }

    pub fn to_complex(&self) -> ComplexPoint {
        ComplexPoint::new(vec![self.x.clone().into(), self.y.clone().into()])
    }
}

impl fmt::Debug for ExactPoint2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A point of `Cⁿ`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub coords: Vec<ComplexTowerElement>,
}

impl ComplexPoint {
    pub fn new(coords: Vec<ComplexTowerElement>) -> ComplexPoint {
        ComplexPoint { coords }
    }

    pub fn new2(a: ComplexTowerElement, b: ComplexTowerElement) -> ComplexPoint {
        ComplexPoint { coords: vec![a, b] }
    }

    /// A point with Gaussian-rational coordinates `(re + im·i) / den`.
    pub fn gaussian(parts: &[(i64, i64)], den: i64) -> ComplexPoint {
        ComplexPoint::new(parts.iter().map(|&(a, b)| ComplexTowerElement::gaussian(a, b, den)).collect())
    }

    pub fn real(coords: &[TowerElement]) -> ComplexPoint {
        ComplexPoint::new(coords.iter().cloned().map(Into::into).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn add(&self, o: &ComplexPoint) -> ComplexPoint {
        ComplexPoint::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &ComplexPoint) -> ComplexPoint {
        ComplexPoint::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &ComplexTowerElement) -> ComplexPoint {
        ComplexPoint::new(self.coords.iter().map(|a| a * s).collect())
    }

    pub fn conj(&self) -> ComplexPoint {
        ComplexPoint::new(self.coords.iter().map(|a| a.conj()).collect())
    }

    /// Bilinear (not Hermitian) form `Σ aᵢ bᵢ`.
    pub fn dot(&self, o: &ComplexPoint) -> ComplexTowerElement {
        self.coords
            .iter()
            .zip(&o.coords)
            .fold(ComplexTowerElement::real(TowerElement::zero()), |acc, (a, b)| &acc + &(a * b))
    }

    /// Pad with zero coordinates up to dimension `n`.
    pub fn lift(&self, n: usize) -> ComplexPoint {
        let mut c = self.coords.clone();
        c.resize(n, ComplexTowerElement::real(TowerElement::zero()));
        ComplexPoint::new(c)
    }

    pub fn is_real(&self) -> bool {
        self.coords.iter().all(ComplexTowerElement::is_real)
    }
}

impl fmt::Debug for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("").field(&self.coords).finish()
    }
}
