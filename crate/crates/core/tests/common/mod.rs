#![allow(dead_code)]

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use unitwit::{ComplexPoint, ComplexTowerElement as C};

/// Determinant by first-row cofactor expansion. Exponential, for small matrices only.
pub fn cofactor_det<T>(m: &[Vec<T>]) -> T
where
    T: Clone + Zero + One,
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = T::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<T>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][j] * &cofactor_det(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// `Σ (pᵢ − qᵢ)²`, written out coordinate by coordinate.
pub fn phi_oracle(p: &ComplexPoint, q: &ComplexPoint) -> C {
    let mut s = C::zero();
    for (a, b) in p.coords.iter().zip(&q.coords) {
        let d = a - b;
        s = &s + &(&d * &d);
    }
    s
}

/// Matrix of squared distances bordered by ones with a zero corner, then expanded by cofactors.
pub fn cm_oracle(points: &[ComplexPoint]) -> C {
    let n = points.len();
    let mut m = vec![vec![C::zero(); n + 1]; n + 1];
    for i in 0..n {
        m[0][i + 1] = C::one();
        m[i + 1][0] = C::one();
        for j in 0..n {
            m[i + 1][j + 1] = phi_oracle(&points[i], &points[j]);
        }
    }
    cofactor_det(&m)
}

/// `value² = (8/9)^k · 3^l`, which is rational.
pub fn power_squared(k: u32, l: u32) -> BigRational {
    let num = BigInt::from(8).pow(k) * BigInt::from(3).pow(l);
    BigRational::new(num, BigInt::from(9).pow(k))
}

/// `|(2√2/3)^k (√3)^l − target| ≤ eps`, decided by squaring (needs `target > eps`).
pub fn grid_hit(k: u32, l: u32, target: &BigRational, eps: &BigRational) -> bool {
    assert!(target > eps);
    let v2 = power_squared(k, l);
    let lo = target - eps;
    let hi = target + eps;
    &lo * &lo <= v2 && v2 <= &hi * &hi
}

/// Minimal `(k + l, k)` over the full grid `k, l ≤ bound`.
pub fn grid_search(target: &BigRational, eps: &BigRational, bound: u32) -> Option<(u32, u32)> {
    let mut best: Option<(u32, u32)> = None;
    for k in 0..=bound {
        for l in 0..=bound {
            if grid_hit(k, l, target, eps) && best.is_none_or(|(bk, bl)| (k + l, k) < (bk + bl, bk)) {
                best = Some((k, l));
            }
        }
    }
    best
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
