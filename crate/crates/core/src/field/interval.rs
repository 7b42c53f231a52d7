//! Certified rational enclosures of tower elements under the real embedding.
//!
//! Evaluation runs in fixed point: an enclosure `[lo, hi]` at `bits` stands
//! for `[lo / 2^bits, hi / 2^bits]`. Generators are enclosed by integer square
//! roots of their radicands' enclosures, rounded outward.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::tower::TowerElement;

/// A closed interval with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(q: BigRational) -> Interval {
        Interval { lo: q.clone(), hi: q }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigRational::zero())
    }

    /// Upper bound on `|x - q|` for every `x` in the interval.
    pub fn max_distance_to(&self, q: &BigRational) -> BigRational {
        let a = (&self.lo - q).abs();
        let b = (&self.hi - q).abs();
        if a > b {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, Debug)]
struct Fixed {
    lo: BigInt,
    hi: BigInt,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn isqrt_floor(n: &BigInt) -> BigInt {
    if n.is_positive() {
        n.sqrt()
    } else {
        BigInt::zero()
    }
}

fn isqrt_ceil(n: &BigInt) -> BigInt {
    if !n.is_positive() {
        return BigInt::zero();
    }
    let s = n.sqrt();
    if &s * &s == *n {
        s
    } else {
        s + 1
    }
}

/// Enclose every generator of the element's tower at `bits` of fixed point.
fn generator_enclosures(x: &TowerElement, bits: u64) -> Vec<Fixed> {
    let radicands = x.tower().radicands();
    let mut gens: Vec<Fixed> = Vec::with_capacity(radicands.len());
    for r in &radicands {
        // radicands are elements of the prefix tower, so earlier generators suffice
        let enc = eval_with(r, bits, &gens);
        let scale = BigInt::one() << bits;
        gens.push(Fixed { lo: isqrt_floor(&(&enc.lo * &scale)), hi: isqrt_ceil(&(&enc.hi * &scale)) });
    }
    gens
}

fn eval_with(x: &TowerElement, bits: u64, gens: &[Fixed]) -> Fixed {
    let h = x.height();
    let nums = x.raw_numerators();
    let den = &*x.raw_denominator();
    let one = BigInt::one() << bits;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for (idx, c) in nums.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        // monomial enclosure; generators are positive so endpoints multiply directly
        let mut mlo = one.clone();
        let mut mhi = one.clone();
        for (i, g) in gens.iter().enumerate().take(h) {
            if idx >> i & 1 == 1 {
                mlo = (&mlo * &g.lo) >> bits;
                mhi = ceil_div(&(&mhi * &g.hi), &one);
            }
        }
        let (a, b) = if c.is_positive() { (&mlo, &mhi) } else { (&mhi, &mlo) };
        lo += floor_div(&(c * a), den);
        hi += ceil_div(&(c * b), den);
    }
    Fixed { lo, hi }
}

fn enclose(x: &TowerElement, bits: u64) -> Fixed {
    let gens = generator_enclosures(x, bits);
    eval_with(x, bits, &gens)
}

fn working_bits(x: &TowerElement, target_bits: u64) -> u64 {
    target_bits + x.max_coefficient_bits() + 4 * x.height() as u64 + 16
}

/// An interval of width at most `10^-precision` containing the real value of `x`.
pub fn approximate(x: &TowerElement, precision: u32) -> Interval {
    if let Some(q) = x.to_rational() {
        return Interval::point(q);
    }
    let ten_pow = BigInt::from(10).pow(precision);
    let mut bits = working_bits(x, (precision as u64) * 10 / 3 + 2);
    loop {
        let enc = enclose(x, bits);
        let scale = BigInt::one() << bits;
        if (&enc.hi - &enc.lo) * &ten_pow <= scale {
            return Interval::new(BigRational::new(enc.lo, scale.clone()), BigRational::new(enc.hi, scale));
        }
        bits *= 2;
    }
}

/// Sign under the real embedding. Zero is decided exactly; otherwise the
/// enclosure is refined by doubling precision until it excludes zero.
pub fn sign(x: &TowerElement) -> Ordering {
    if x.is_zero() {
        return Ordering::Equal;
    }
    if let Some(q) = x.to_rational() {
        return q.cmp(&BigRational::zero());
    }
    let mut bits = working_bits(x, 32);
    loop {
        let enc = enclose(x, bits);
        if enc.lo.is_positive() {
            return Ordering::Greater;
        }
        if enc.hi.is_negative() {
            return Ordering::Less;
        }
        bits *= 2;
    }
}

/// Smallest decimal precision whose enclosure excludes zero, for checking
/// agreement between `sign` and `approximate`.
pub fn separating_precision(x: &TowerElement, max_precision: u32) -> Option<u32> {
    (0..=max_precision).find(|&p| !approximate(x, p).contains_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::tower::{adjoin_sqrt, Tower};

    fn q(n: i64, d: i64) -> TowerElement {
        TowerElement::from_ratio(n, d)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sqrt3_to_three_digits() {
        let (_, s3) = adjoin_sqrt(&Tower::rational(), &q(3, 1)).unwrap();
        let iv = approximate(&s3, 3);
        assert!(iv.width() <= rat(1, 1000));
        assert!(iv.lo() > &rat(1731, 1000) && iv.hi() < &rat(1734, 1000));
    }

    #[test]
    fn zero_is_a_point() {
        assert_eq!(approximate(&TowerElement::zero(), 7), Interval::point(BigRational::zero()));
    }

    #[test]
    fn two_sqrt2_over_three() {
        let (_, s2) = adjoin_sqrt(&Tower::rational(), &q(2, 1)).unwrap();
        let x = s2.scale(&rat(2, 3));
        let iv = approximate(&x, 4);
        assert!(iv.width() <= rat(1, 10000));
        // 0.94280904...
        assert!(iv.lo() > &rat(94280, 100000) && iv.hi() < &rat(94282, 100000));
    }

    #[test]
    fn signs() {
        let (t2, s2) = adjoin_sqrt(&Tower::rational(), &q(2, 1)).unwrap();
        assert_eq!(sign(&(&s2 - &q(1, 1))), Ordering::Greater);
        assert_eq!(sign(&TowerElement::zero()), Ordering::Equal);
        assert_eq!(sign(&(&s2.scale(&rat(2, 1)) - &q(3, 1))), Ordering::Less);
        // 99/70 is a close convergent of √2, from above
        assert_eq!(sign(&(&s2 - &q(99, 70))), Ordering::Less);
        let (_, s3) = adjoin_sqrt(&t2, &q(3, 1)).unwrap();
        // (√2 + √3)(√3 - √2) = 1
        let x = &(&s2 + &s3) * &(&s3 - &s2);
        assert_eq!(sign(&(&x - &q(1, 1))), Ordering::Equal);
    }
}
