//! Univariate polynomials in `t` with tower coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::field::TowerElement;
use crate::matrix::ExactDiv;

/// Coefficients lowest degree first; the leading coefficient is nonzero
/// unless the polynomial is zero (empty).
#[derive(Clone, PartialEq, Eq)]
pub struct UnivariatePoly {
    coeffs: Vec<TowerElement>,
}

impl UnivariatePoly {
    pub fn new(mut coeffs: Vec<TowerElement>) -> UnivariatePoly {
        while coeffs.last().is_some_and(TowerElement::is_zero) {
            coeffs.pop();
        }
        UnivariatePoly { coeffs }
    }

    pub fn constant(c: TowerElement) -> UnivariatePoly {
        UnivariatePoly::new(vec![c])
    }

    /// The indeterminate `t`.
    pub fn t() -> UnivariatePoly {
        UnivariatePoly::new(vec![TowerElement::zero(), TowerElement::one()])
    }

    /// `leading · Π (t − root)`.
    pub fn from_roots(leading: &TowerElement, roots: &[TowerElement]) -> UnivariatePoly {
        roots.iter().fold(UnivariatePoly::constant(leading.clone()), |acc, r| {
            &acc * &UnivariatePoly::new(vec![-r, TowerElement::one()])
        })
    }

    pub fn coeffs(&self) -> &[TowerElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> TowerElement {
        self.coeffs.get(i).cloned().unwrap_or_else(TowerElement::zero)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&TowerElement> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &TowerElement) -> TowerElement {
        self.coeffs.iter().rev().fold(TowerElement::zero(), |acc, c| &(&acc * t) + c)
    }

    pub fn scale(&self, s: &TowerElement) -> UnivariatePoly {
        UnivariatePoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Quotient and remainder; panics on division by the zero polynomial.
    pub fn div_rem(&self, d: &UnivariatePoly) -> (UnivariatePoly, UnivariatePoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.coeffs[dd].inverse().expect("leading coefficient is nonzero");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![TowerElement::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = &rem[rem.len() - 1] * &lead_inv;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] = &rem[k + i] - &(&c * dc);
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(TowerElement::is_zero) {
                rem.pop();
            }
        }
        (UnivariatePoly::new(quot), UnivariatePoly::new(rem))
    }

    /// The unique polynomial of degree < n through n points with distinct abscissae.
    pub fn interpolate(points: &[(TowerElement, TowerElement)]) -> UnivariatePoly {
        let mut acc = UnivariatePoly::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = UnivariatePoly::constant(yi.clone());
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    let inv = (xi - xj).inverse().expect("abscissae must be distinct");
                    basis = &basis * &UnivariatePoly::new(vec![-&(xj * &inv), inv]);
                }
            }
            acc = &acc + &basis;
        }
        acc
    }
}

impl Add<&UnivariatePoly> for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn add(self, o: &UnivariatePoly) -> UnivariatePoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UnivariatePoly::new((0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }
}

impl Sub<&UnivariatePoly> for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn sub(self, o: &UnivariatePoly) -> UnivariatePoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UnivariatePoly::new((0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }
}

impl Mul<&UnivariatePoly> for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn mul(self, o: &UnivariatePoly) -> UnivariatePoly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return UnivariatePoly::zero();
        }
        let mut out = vec![TowerElement::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UnivariatePoly::new(out)
    }
}

impl Neg for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn neg(self) -> UnivariatePoly {
        UnivariatePoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for UnivariatePoly {
    type Output = UnivariatePoly;
    fn add(self, o: UnivariatePoly) -> UnivariatePoly {
        &self + &o
    }
}

impl Mul for UnivariatePoly {
    type Output = UnivariatePoly;
    fn mul(self, o: UnivariatePoly) -> UnivariatePoly {
        &self * &o
    }
}

impl Zero for UnivariatePoly {
    fn zero() -> UnivariatePoly {
        UnivariatePoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for UnivariatePoly {
    fn one() -> UnivariatePoly {
        UnivariatePoly::constant(TowerElement::one())
    }
}

impl ExactDiv for UnivariatePoly {
    fn exact_div(&self, d: &UnivariatePoly) -> UnivariatePoly {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }
}

impl From<TowerElement> for UnivariatePoly {
    fn from(c: TowerElement) -> UnivariatePoly {
        UnivariatePoly::constant(c)
    }
}

impl fmt::Display for UnivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{}", i),
            };
            let (neg, body) = match c.to_rational() {
                Some(q) => (q.is_negative(), q.abs().to_string()),
                None => (false, format!("({})", c)),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (body.as_str(), mono.is_empty()) {
                (b, true) => write!(f, "{}", b)?,
                ("1", false) => write!(f, "{}", mono)?,
                (b, false) => write!(f, "{}{}", b, mono)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UnivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
