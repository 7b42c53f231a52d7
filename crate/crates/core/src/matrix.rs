//! Fraction-free determinants over exact rings.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::field::{ComplexTowerElement, TowerElement};

/// Division that is only ever called when the divisor divides exactly.
pub trait ExactDiv: Sized {
    fn exact_div(&self, divisor: &Self) -> Self;
}

/// Ring operations on references.
pub trait RefRing<T>:
    Add<Self, Output = T> + Sub<Self, Output = T> + Mul<Self, Output = T> + Neg<Output = T> + Sized
{
}

impl<'a, T: 'a> RefRing<T> for &'a T where
    &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T> + Neg<Output = T>
{
}

impl ExactDiv for TowerElement {
    fn exact_div(&self, d: &TowerElement) -> TowerElement {
        self / d
    }
}

impl ExactDiv for ComplexTowerElement {
    fn exact_div(&self, d: &ComplexTowerElement) -> ComplexTowerElement {
        self / d
    }
}

/// Determinant by Bareiss elimination with row pivoting.
///
/// Every intermediate entry is a minor of the input, so divisions are exact
/// and the entries stay as small as the minors themselves.
pub fn det_bareiss<T>(mut m: Vec<Vec<T>>) -> T
where
    T: Clone + Zero + One + ExactDiv,
    for<'a> &'a T: RefRing<T>,
{
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
    if n == 0 {
        return T::one();
    }
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_div(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}
