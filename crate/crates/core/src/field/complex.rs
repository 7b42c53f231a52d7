use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::tower::TowerElement;
use crate::error::FieldError;

/// `re + i·im` with both parts in a quadratic tower; `i` is adjoined formally.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComplexTowerElement {
    pub re: TowerElement,
    pub im: TowerElement,
}

impl ComplexTowerElement {
    pub fn new(re: TowerElement, im: TowerElement) -> ComplexTowerElement {
        ComplexTowerElement { re, im }
    }

    pub fn real(re: TowerElement) -> ComplexTowerElement {
        ComplexTowerElement { re, im: TowerElement::zero() }
    }

    pub fn i() -> ComplexTowerElement {
        ComplexTowerElement { re: TowerElement::zero(), im: TowerElement::one() }
    }

    /// Gaussian rational `(a + b i) / d`.
    pub fn gaussian(a: i64, b: i64, d: i64) -> ComplexTowerElement {
        ComplexTowerElement { re: TowerElement::from_ratio(a, d), im: TowerElement::from_ratio(b, d) }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> ComplexTowerElement {
        ComplexTowerElement { re: self.re.clone(), im: -&self.im }
    }

    /// `re² + im²`, a non-negative real.
    pub fn norm_sqr(&self) -> TowerElement {
        &self.re.square() + &self.im.square()
    }

    pub fn checked_add(&self, o: &ComplexTowerElement) -> Result<ComplexTowerElement, FieldError> {
        Ok(ComplexTowerElement { re: self.re.checked_add(&o.re)?, im: self.im.checked_add(&o.im)? })
    }

    pub fn checked_sub(&self, o: &ComplexTowerElement) -> Result<ComplexTowerElement, FieldError> {
        Ok(ComplexTowerElement { re: self.re.checked_sub(&o.re)?, im: self.im.checked_sub(&o.im)? })
    }

    pub fn checked_mul(&self, o: &ComplexTowerElement) -> Result<ComplexTowerElement, FieldError> {
        if self.is_real() && o.is_real() {
            return Ok(ComplexTowerElement::real(self.re.checked_mul(&o.re)?));
        }
        if o.is_real() {
            return Ok(ComplexTowerElement { re: self.re.checked_mul(&o.re)?, im: self.im.checked_mul(&o.re)? });
        }
        if self.is_real() {
            return Ok(ComplexTowerElement { re: self.re.checked_mul(&o.re)?, im: self.re.checked_mul(&o.im)? });
        }
        let ac = self.re.checked_mul(&o.re)?;
        let bd = self.im.checked_mul(&o.im)?;
        let ad = self.re.checked_mul(&o.im)?;
        let bc = self.im.checked_mul(&o.re)?;
        Ok(ComplexTowerElement { re: ac.checked_sub(&bd)?, im: ad.checked_add(&bc)? })
    }

    pub fn square(&self) -> ComplexTowerElement {
        if self.is_real() {
            return ComplexTowerElement::real(self.re.square());
        }
        let re = &self.re.square() - &self.im.square();
        let im = (&self.re * &self.im).scale(&BigRational::from_integer(2.into()));
        ComplexTowerElement { re, im }
    }

    pub fn inverse(&self) -> Result<ComplexTowerElement, FieldError> {
        let n = self.norm_sqr().inverse()?;
        Ok(ComplexTowerElement { re: &self.re * &n, im: -(&self.im * &n) })
    }

    pub fn checked_div(&self, o: &ComplexTowerElement) -> Result<ComplexTowerElement, FieldError> {
        self.checked_mul(&o.inverse()?)
    }

    pub fn scale(&self, q: &BigRational) -> ComplexTowerElement {
        ComplexTowerElement { re: self.re.scale(q), im: self.im.scale(q) }
    }
}

impl From<TowerElement> for ComplexTowerElement {
    fn from(re: TowerElement) -> ComplexTowerElement {
        ComplexTowerElement::real(re)
    }
}

impl From<i64> for ComplexTowerElement {
    fn from(n: i64) -> ComplexTowerElement {
        ComplexTowerElement::real(TowerElement::from_integer(n))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a ComplexTowerElement> for &'a ComplexTowerElement {
            type Output = ComplexTowerElement;
            fn $method(self, rhs: &'a ComplexTowerElement) -> ComplexTowerElement {
                self.$checked(rhs).expect("complex tower elements must share a tower")
            }
        }
        impl $tr<ComplexTowerElement> for ComplexTowerElement {
            type Output = ComplexTowerElement;
            fn $method(self, rhs: ComplexTowerElement) -> ComplexTowerElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a ComplexTowerElement> for ComplexTowerElement {
            type Output = ComplexTowerElement;
            fn $method(self, rhs: &'a ComplexTowerElement) -> ComplexTowerElement {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &ComplexTowerElement {
    type Output = ComplexTowerElement;
    fn neg(self) -> ComplexTowerElement {
        ComplexTowerElement { re: -&self.re, im: -&self.im }
    }
}

impl Neg for ComplexTowerElement {
    type Output = ComplexTowerElement;
    fn neg(self) -> ComplexTowerElement {
        -&self
    }
}

impl Zero for ComplexTowerElement {
    fn zero() -> ComplexTowerElement {
        ComplexTowerElement::real(TowerElement::zero())
    }
    fn is_zero(&self) -> bool {
        ComplexTowerElement::is_zero(self)
    }
}

impl One for ComplexTowerElement {
    fn one() -> ComplexTowerElement {
        ComplexTowerElement::real(TowerElement::one())
    }
}

impl fmt::Display for ComplexTowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "i·({})", self.im),
            (false, false) => write!(f, "({}) + i·({})", self.re, self.im),
        }
    }
}

impl fmt::Debug for ComplexTowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
