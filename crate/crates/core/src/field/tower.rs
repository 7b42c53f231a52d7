//! Towers of real quadratic extensions `Q(√r₀)(√r₁)…` and their elements.
//!
//! An element of a tower of height `h` is stored as `2^h` integer coefficients
//! over a common positive denominator. Bit `i` of a coefficient index marks
//! the presence of generator `gᵢ`, so the upper half of the vector is the
//! coefficient of the outermost generator and the lower half lives in the
//! prefix tower. This is the flattened form of the nested `a + b·√r` tree.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{NumRef, One, RefNum, Signed, ToPrimitive, Zero};

use super::interval;
use crate::error::FieldError;

/// A tower of real quadratic extensions of the rationals.
///
/// Every generator denotes the positive square root of its radicand. Towers
/// are immutable; extending one produces a new descriptor that shares the
/// old one as its prefix.
#[derive(Clone)]
pub struct Tower(Arc<Node>);

struct Node {
    parent: Option<Tower>,
    radicand: Option<TowerElement>,
    height: usize,
    rads_int: Option<Vec<Vec<BigInt>>>,
    /// When every radicand is an integer: the product of the radicands in
    /// each subset of generators, indexed by bitmask, and its bit bound.
    weights: Option<(Vec<i128>, u64)>,
    rads_rat: Vec<Vec<BigRational>>,
}

impl Tower {
    /// The base field `Q`.
    pub fn rational() -> Tower {
        static BASE: OnceLock<Tower> = OnceLock::new();
        BASE.get_or_init(|| {
            Tower(Arc::new(Node {
                parent: None,
                radicand: None,
                height: 0,
                rads_int: Some(Vec::new()),
                weights: Some((vec![1], 1)),
                rads_rat: Vec::new(),
            }))
        })
        .clone()
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn parent(&self) -> Option<&Tower> {
        self.0.parent.as_ref()
    }

    /// Radicand of the outermost generator, as an element of the parent tower.
    pub fn radicand(&self) -> Option<&TowerElement> {
        self.0.radicand.as_ref()
    }

    /// All radicands, innermost first.
    pub fn radicands(&self) -> Vec<TowerElement> {
        let mut out = Vec::with_capacity(self.height());
        let mut cur = Some(self);
        while let Some(t) = cur {
            if let Some(r) = t.radicand() {
                out.push(r.clone());
            }
            cur = t.parent();
        }
        out.reverse();
        out
    }

    /// The prefix tower of the given height.
    pub fn prefix(&self, height: usize) -> Tower {
        self.prefix_ref(height).clone()
    }

    fn prefix_ref(&self, height: usize) -> &Tower {
        assert!(height <= self.height(), "prefix height exceeds tower height");
        let mut cur = self;
        while cur.height() > height {
            cur = cur.parent().expect("non-base tower has a parent");
        }
        cur
    }

    pub fn is_prefix_of(&self, other: &Tower) -> bool {
        self.height() <= other.height() && *self == other.prefix(self.height())
    }

    /// Generator `i` (the positive root of radicand `i`) as an element of this tower.
    pub fn generator(&self, i: usize) -> TowerElement {
        assert!(i < self.height(), "generator index out of range");
        let mut num = vec![BigInt::zero(); 1 << self.height()];
        num[1 << i] = BigInt::one();
        TowerElement::from_raw(self.clone(), num, BigInt::one())
    }

    /// Extend by `√radicand`, certifying that the radicand is positive and
    /// not already a square here.
    pub fn extend(&self, radicand: &TowerElement) -> Result<Tower, FieldError> {
        let r = radicand.embed(self)?;
        if r.sign() != Ordering::Greater {
            return Err(FieldError::NotPositive(r.to_string()));
        }
        if r.sqrt_exact().is_some() {
            return Err(FieldError::AlreadySquare(r.to_string()));
        }
        Ok(self.extend_unchecked(r))
    }

    fn extend_unchecked(&self, radicand: TowerElement) -> Tower {
        debug_assert!(radicand.tower == *self);
        let mut rads_rat = self.0.rads_rat.clone();
        rads_rat.push(radicand.coefficients());
        let rads_int = match &self.0.rads_int {
            Some(v) if radicand.raw_denominator().is_one() => {
                let mut v = v.clone();
                v.push(radicand.raw_numerators().into_owned());
                Some(v)
            }
            _ => None,
        };
        let weights = match (&self.0.weights, radicand.to_rational()) {
            (Some((w, _)), Some(q)) if q.is_integer() => q.to_integer().to_i128().and_then(|r| {
                let upper = w.iter().map(|x| x.checked_mul(r)).collect::<Option<Vec<i128>>>()?;
                let mut all = w.clone();
                all.extend(upper);
                let bits = all.iter().map(|x| 128 - x.unsigned_abs().leading_zeros() as u64).max().unwrap_or(1);
                (bits < 60).then_some((all, bits))
            }),
            _ => None,
        };
        Tower(Arc::new(Node {
            parent: Some(self.clone()),
            radicand: Some(radicand),
            height: self.height() + 1,
            weights,
            rads_int,
            rads_rat,
        }))
    }

    fn dim(&self) -> usize {
        1 << self.height()
    }
}

impl PartialEq for Tower {
    fn eq(&self, other: &Tower) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        self.height() == other.height() && self.parent() == other.parent() && self.radicand() == other.radicand()
    }
}

impl Eq for Tower {}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q")?;
        for r in self.radicands() {
            write!(f, "(√{})", r)?;
        }
        Ok(())
    }
}

/// Adjoin `√r` to `tower`.
///
/// When `r` is already a square in `tower`, the existing positive root is
/// returned and the tower is unchanged. Otherwise the tower grows by one
/// generator. Rational and integral-coefficient radicands are scaled to an
/// integral radicand with square factors stripped, so the returned root is a
/// rational multiple of the new generator.
pub fn adjoin_sqrt(tower: &Tower, r: &TowerElement) -> Result<(Tower, TowerElement), FieldError> {
    let r = r.embed(tower)?;
    if r.sign() != Ordering::Greater {
        return Err(FieldError::NotPositive(r.to_string()));
    }
    if let Some(root) = r.sqrt_exact() {
        let root = if root.sign() == Ordering::Less { -root } else { root };
        return Ok((tower.clone(), root));
    }
    // r = R/q  =>  √r = √(R·q)/q, then pull square factors f² out of the content.
    let q = r.raw_denominator().into_owned();
    let scaled: Vec<BigInt> = r.raw_numerators().iter().map(|c| c * &q).collect();
    let content = scaled.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let f = square_root_of_square_part(&content);
    let f2 = &f * &f;
    let radicand_num: Vec<BigInt> = scaled.iter().map(|c| c / &f2).collect();
    let radicand = TowerElement::from_raw(tower.clone(), radicand_num, BigInt::one());
    let ext = tower.extend_unchecked(radicand);
    let g = ext.generator(tower.height());
    let root = g.scale(&BigRational::new(f, q));
    Ok((ext, root))
}

/// Largest `f` (found by trial division) with `f² | n`.
fn square_root_of_square_part(n: &BigInt) -> BigInt {
    let mut n = n.abs();
    let mut f = BigInt::one();
    if n.is_zero() {
        return f;
    }
    let mut p = 2u32;
    while p < 2000 {
        let pp = BigInt::from(p * p);
        while (&n % &pp).is_zero() {
            n /= &pp;
            f *= p;
        }
        while (&n % p).is_zero() {
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let s = n.sqrt();
    if &s * &s == n {
        f *= s;
    }
    f
}

/// An exact real number in a quadratic tower.
#[derive(Clone)]
pub struct TowerElement {
    tower: Tower,
    repr: Repr,
}

/// Numerators over a positive denominator, reduced to lowest terms.
///
/// `Small` is used exactly when every entry is below 2^62 in magnitude, so
/// equal values always share a variant.
#[derive(Clone)]
enum Repr {
    Small(Vec<i128>, i128),
    Big(Vec<BigInt>, BigInt),
}

const SMALL_LIMIT: u64 = 1 << 62;

fn fits(x: i128) -> bool {
    x.unsigned_abs() < SMALL_LIMIT as u128
}

fn bits(x: i128) -> u64 {
    128 - x.unsigned_abs().leading_zeros() as u64
}

impl TowerElement {
    pub(crate) fn from_raw(tower: Tower, num: Vec<BigInt>, den: BigInt) -> TowerElement {
        debug_assert_eq!(num.len(), tower.dim());
        TowerElement { tower, repr: big_repr(num, den) }
    }

    /// Normalize in place, falling back to big integers only when needed.
    fn from_small(tower: Tower, mut num: Vec<i128>, mut den: i128) -> TowerElement {
        debug_assert_eq!(num.len(), tower.dim());
        if den < 0 {
            den = -den;
            num.iter_mut().for_each(|c| *c = -*c);
        }
        let narrow = |x: i128| x.unsigned_abs() <= u64::MAX as u128;
        let mut g = den.unsigned_abs();
        let mut nonzero = false;
        for &c in &num {
            if c != 0 {
                nonzero = true;
                if g != 1 {
                    g = if narrow(c) && g <= u64::MAX as u128 {
                        gcd_u64(g as u64, c.unsigned_abs() as u64) as u128
                    } else {
                        gcd_u128(g, c.unsigned_abs())
                    };
                }
            }
        }
        if !nonzero {
            den = 1;
        } else if g != 1 {
            if narrow(den) && num.iter().all(|&c| narrow(c)) {
                let g = g as u64;
                num.iter_mut().for_each(|c| *c = div_narrow(*c, g));
                den = div_narrow(den, g);
            } else {
                let g = g as i128;
                num.iter_mut().for_each(|c| *c /= g);
                den /= g;
            }
        }
        let repr = if fits(den) && num.iter().all(|&c| fits(c)) {
            Repr::Small(num, den)
        } else {
            Repr::Big(num.into_iter().map(BigInt::from).collect(), BigInt::from(den))
        };
        TowerElement { tower, repr }
    }

    pub fn zero() -> TowerElement {
        TowerElement::from_integer(0)
    }

    pub fn one() -> TowerElement {
        TowerElement::from_integer(1)
    }

    pub fn from_integer(n: i64) -> TowerElement {
        TowerElement::from_small(Tower::rational(), vec![n as i128], 1)
    }

    pub fn from_rational(q: &BigRational) -> TowerElement {
        TowerElement::from_raw(Tower::rational(), vec![q.numer().clone()], q.denom().clone())
    }

    pub fn from_ratio(n: i64, d: i64) -> TowerElement {
        TowerElement::from_rational(&BigRational::new(n.into(), d.into()))
    }

    /// Zero of the given tower.
    pub fn zero_in(tower: &Tower) -> TowerElement {
        TowerElement { tower: tower.clone(), repr: Repr::Small(vec![0; tower.dim()], 1) }
    }

    /// Build from basis coefficients (index bit `i` = generator `i`).
    pub fn from_coefficients(tower: &Tower, coeffs: &[BigRational]) -> Result<TowerElement, FieldError> {
        if coeffs.len() != tower.dim() {
            return Err(FieldError::Decode(format!("expected {} coefficients, got {}", tower.dim(), coeffs.len())));
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Ok(TowerElement::from_raw(tower.clone(), num, den))
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn height(&self) -> usize {
        self.tower.height()
    }

    fn len(&self) -> usize {
        match &self.repr {
            Repr::Small(n, _) => n.len(),
            Repr::Big(n, _) => n.len(),
        }
    }

    fn numerator(&self, i: usize) -> BigInt {
        match &self.repr {
            Repr::Small(n, _) => BigInt::from(n[i]),
            Repr::Big(n, _) => n[i].clone(),
        }
    }

    fn coeff_is_zero(&self, i: usize) -> bool {
        match &self.repr {
            Repr::Small(n, _) => n[i] == 0,
            Repr::Big(n, _) => n[i].is_zero(),
        }
    }

    pub fn coefficient(&self, i: usize) -> BigRational {
        BigRational::new(self.numerator(i), self.raw_denominator().into_owned())
    }

    pub fn coefficients(&self) -> Vec<BigRational> {
        (0..self.len()).map(|i| self.coefficient(i)).collect()
    }

    pub(crate) fn raw_numerators(&self) -> Cow<'_, [BigInt]> {
        match &self.repr {
            Repr::Small(n, _) => Cow::Owned(n.iter().map(|&c| BigInt::from(c)).collect()),
            Repr::Big(n, _) => Cow::Borrowed(n),
        }
    }

    pub(crate) fn raw_denominator(&self) -> Cow<'_, BigInt> {
        match &self.repr {
            Repr::Small(_, d) => Cow::Owned(BigInt::from(*d)),
            Repr::Big(_, d) => Cow::Borrowed(d),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Small(n, _) => n.iter().all(|&c| c == 0),
            Repr::Big(n, _) => all_zero(n),
        }
    }

    pub fn is_one(&self) -> bool {
        self.is_rational()
            && match &self.repr {
                Repr::Small(n, d) => n[0] == *d,
                Repr::Big(n, d) => n[0] == *d,
            }
    }

    pub fn is_rational(&self) -> bool {
        (1..self.len()).all(|i| self.coeff_is_zero(i))
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coefficient(0))
    }

    /// Largest coefficient bit length (numerators and the denominator).
    pub fn max_coefficient_bits(&self) -> u64 {
        match &self.repr {
            Repr::Small(n, d) => n.iter().chain(std::iter::once(d)).map(|&c| bits(c)).max().unwrap_or(0),
            Repr::Big(n, d) => n.iter().chain(std::iter::once(d)).map(BigInt::bits).max().unwrap_or(0),
        }
    }

    /// Same value with the numerator vector cut or zero-padded to `dim`.
    /// Callers guarantee that only zeros are cut.
    fn resized(&self, tower: Tower) -> TowerElement {
        let dim = tower.dim();
        let repr = match &self.repr {
            Repr::Small(n, d) => {
                let mut v = Vec::with_capacity(dim);
                v.extend_from_slice(&n[..dim.min(n.len())]);
                v.resize(dim, 0);
                Repr::Small(v, *d)
            }
            Repr::Big(n, d) => {
                let mut v = Vec::with_capacity(dim);
                v.extend_from_slice(&n[..dim.min(n.len())]);
                v.resize(dim, BigInt::zero());
                Repr::Big(v, d.clone())
            }
        };
        TowerElement { tower, repr }
    }

    /// Re-embed into an extension of this element's tower.
    pub fn embed(&self, tower: &Tower) -> Result<TowerElement, FieldError> {
        if self.tower == *tower {
            return Ok(self.clone());
        }
        if !self.tower.is_prefix_of(tower) {
            return Err(FieldError::IncompatibleTowers(self.height(), tower.height()));
        }
        Ok(self.resized(tower.clone()))
    }

    /// Smallest prefix tower that still contains this element.
    pub fn shrink(&self) -> TowerElement {
        let h = height_for(self.trimmed_len());
        if h == self.height() {
            return self.clone();
        }
        self.resized(self.tower.prefix(h))
    }

    /// Split `a + b·g` (g the outermost generator) into `(a, b)` in the parent tower.
    pub fn split(&self) -> (TowerElement, TowerElement) {
        let parent = self.tower.parent().expect("split needs a tower of height >= 1").clone();
        let half = parent.dim();
        match &self.repr {
            Repr::Small(n, d) => {
                let part = |v: &[i128]| TowerElement::from_small(parent.clone(), v.to_vec(), *d);
                (part(&n[..half]), part(&n[half..]))
            }
            Repr::Big(n, d) => (
                TowerElement::from_raw(parent.clone(), n[..half].to_vec(), d.clone()),
                TowerElement::from_raw(parent, n[half..].to_vec(), d.clone()),
            ),
        }
    }

    /// `a + b·g` where `g` is the outermost generator of `tower`.
    pub fn join(tower: &Tower, a: &TowerElement, b: &TowerElement) -> Result<TowerElement, FieldError> {
        let parent = tower.parent().expect("join needs a tower of height >= 1");
        let a = a.embed(parent)?;
        let b = b.embed(parent)?;
        let (an, ad) = (a.raw_numerators(), a.raw_denominator());
        let (bn, bd) = (b.raw_numerators(), b.raw_denominator());
        let den = ad.lcm(&bd);
        let fa = &den / &*ad;
        let fb = &den / &*bd;
        let num = an.iter().map(|c| c * &fa).chain(bn.iter().map(|c| c * &fb)).collect();
        Ok(TowerElement::from_raw(tower.clone(), num, den))
    }

    /// The larger of the two towers, if one is a prefix of the other.
    fn common_tower(&self, other: &TowerElement) -> Result<Tower, FieldError> {
        if self.tower == other.tower || other.tower.is_prefix_of(&self.tower) {
            Ok(self.tower.clone())
        } else if self.tower.is_prefix_of(&other.tower) {
            Ok(other.tower.clone())
        } else {
            Err(FieldError::IncompatibleTowers(self.height(), other.height()))
        }
    }

    /// Numerators zero-padded to `dim`, as big integers.
    fn big_numerators(&self, dim: usize) -> Vec<BigInt> {
        let mut v = self.raw_numerators().into_owned();
        v.resize(dim, BigInt::zero());
        v
    }

    pub fn checked_add(&self, other: &TowerElement) -> Result<TowerElement, FieldError> {
        self.add_scaled(other, false)
    }

    pub fn checked_sub(&self, other: &TowerElement) -> Result<TowerElement, FieldError> {
        self.add_scaled(other, true)
    }

    fn add_scaled(&self, other: &TowerElement, negate: bool) -> Result<TowerElement, FieldError> {
        let tower = self.common_tower(other)?;
        if other.is_zero() {
            return Ok(self.resized(tower));
        }
        if self.is_zero() && !negate {
            return Ok(other.resized(tower));
        }
        let dim = tower.dim();
        if let (Repr::Small(x, sd), Repr::Small(y, od)) = (&self.repr, &other.repr) {
            let g = gcd_u64(*sd as u64, *od as u64) as i128;
            let (fx, fy, den) = (od / g, sd / g, sd / g * od);
            let sign = if negate { -1 } else { 1 };
            let num = if x.len() == y.len() && fx == 1 && fy == 1 {
                x.iter().zip(y).map(|(&a, &b)| a + sign * b).collect()
            } else {
                (0..dim).map(|i| x.get(i).map_or(0, |&c| c * fx) + sign * y.get(i).map_or(0, |&c| c * fy)).collect()
            };
            return Ok(TowerElement::from_small(tower, num, den));
        }
        let (a, b) = (self.big_numerators(dim), other.big_numerators(dim));
        let (sd, od) = (self.raw_denominator(), other.raw_denominator());
        let combine = |x: &BigInt, y: &BigInt| if negate { x - y } else { x + y };
        if sd == od {
            let num = a.iter().zip(&b).map(|(x, y)| combine(x, y)).collect();
            return Ok(TowerElement::from_raw(tower, num, sd.into_owned()));
        }
        let num = a.iter().zip(&b).map(|(x, y)| combine(&(x * &*od), &(y * &*sd))).collect();
        Ok(TowerElement::from_raw(tower, num, &*sd * &*od))
    }

    pub fn checked_mul(&self, other: &TowerElement) -> Result<TowerElement, FieldError> {
        let tower = self.common_tower(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(TowerElement::zero_in(&tower));
        }
        if let (Some((w, bits)), Repr::Small(a, sd), Repr::Small(b, od)) = (&tower.0.weights, &self.repr, &other.repr) {
            if let Some(num) = mul_small(a, b, tower.dim(), w, *bits) {
                return Ok(TowerElement::from_small(tower.clone(), num, sd * od));
            }
        }
        let dim = tower.dim();
        let (a, b) = (self.big_numerators(dim), other.big_numerators(dim));
        let (sd, od) = (self.raw_denominator(), other.raw_denominator());
        if let Some(rads) = &tower.0.rads_int {
            let num = mul_rec(&a, &b, rads);
            return Ok(TowerElement::from_raw(tower, num, &*sd * &*od));
        }
        let to_rat = |v: &[BigInt], d: &BigInt| -> Vec<BigRational> {
            v.iter().map(|c| BigRational::new(c.clone(), d.clone())).collect()
        };
        let prod = mul_rec(&to_rat(&a, &sd), &to_rat(&b, &od), &tower.0.rads_rat);
        TowerElement::from_coefficients(&tower, &prod)
    }

    pub fn inverse(&self) -> Result<TowerElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.height() == 0 {
            let n = self.numerator(0);
            return Ok(TowerElement::from_raw(self.tower.clone(), vec![self.raw_denominator().into_owned()], n));
        }
        let (a, b) = self.split();
        if b.is_zero() {
            return a.inverse()?.embed(&self.tower);
        }
        let s = self.tower.radicand().expect("height >= 1");
        // (a + b g)^-1 = (a - b g) / (a² - b² s)
        let norm = &(&a * &a) - &(&(&b * &b) * s);
        let ni = norm.inverse()?;
        TowerElement::join(&self.tower, &(&a * &ni), &-(&b * &ni))
    }

    pub fn checked_div(&self, other: &TowerElement) -> Result<TowerElement, FieldError> {
        self.checked_mul(&other.inverse()?)
    }

    /// Multiply by a rational scalar.
    pub fn scale(&self, q: &BigRational) -> TowerElement {
        if let (Repr::Small(n, d), Some(qn), Some(qd)) = (&self.repr, q.numer().to_i64(), q.denom().to_i64()) {
            let num = n.iter().map(|&c| c * qn as i128).collect();
            return TowerElement::from_small(self.tower.clone(), num, d * qd as i128);
        }
        let num = self.raw_numerators().iter().map(|c| c * q.numer()).collect();
        TowerElement::from_raw(self.tower.clone(), num, &*self.raw_denominator() * q.denom())
    }

    pub fn pow(&self, e: u32) -> TowerElement {
        let mut acc = TowerElement::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn square(&self) -> TowerElement {
        self * self
    }

    /// Sign under the real embedding (all generators positive).
    pub fn sign(&self) -> Ordering {
        interval::sign(self)
    }

    /// Exact comparison under the real embedding.
    pub fn cmp_real(&self, other: &TowerElement) -> Result<Ordering, FieldError> {
        Ok(self.checked_sub(other)?.sign())
    }

    pub fn abs(&self) -> TowerElement {
        if self.sign() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// A square root inside this element's own tower, if one exists.
    ///
    /// Either root may be returned; callers pick the sign they need.
    pub fn sqrt_exact(&self) -> Option<TowerElement> {
        if self.is_zero() {
            return Some(TowerElement::zero_in(&self.tower));
        }
        if self.height() == 0 {
            let (c, den) = (self.numerator(0), self.raw_denominator());
            if c.is_negative() {
                return None;
            }
            let n = c.sqrt();
            let d = den.sqrt();
            if &n * &n == c && &d * &d == *den {
                return Some(TowerElement::from_raw(self.tower.clone(), vec![n], d));
            }
            return None;
        }
        let (a, b) = self.split();
        let tower = &self.tower;
        let s = tower.radicand().expect("height >= 1");
        if b.is_zero() {
            if let Some(c) = a.sqrt_exact() {
                return c.embed(tower).ok();
            }
            let q = a.checked_div(s).ok()?;
            let e = q.sqrt_exact()?;
            return TowerElement::join(tower, &TowerElement::zero(), &e).ok();
        }
        // (c + e g)² = c² + e² s + 2ce g
        let norm = &(&a * &a) - &(&(&b * &b) * s);
        let m = norm.sqrt_exact()?;
        let half = BigRational::new(1.into(), 2.into());
        for cand in [(&a + &m).scale(&half), (&a - &m).scale(&half)] {
            if let Some(c) = cand.sqrt_exact() {
                if c.is_zero() {
                    continue;
                }
                let e = (&b * &c.inverse().ok()?).scale(&half);
                let root = TowerElement::join(tower, &c, &e).ok()?;
                if &(&root * &root) == self {
                    return Some(root);
                }
            }
        }
        None
    }

    /// Midpoint of a tight enclosure, for display and export only.
    pub fn to_f64(&self) -> f64 {
        let iv = interval::approximate(self, 17);
        let mid = (iv.lo() + iv.hi()) / BigRational::from_integer(2.into());
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Tower-independent byte encoding: equal values in prefix-related towers
    /// encode identically.
    pub fn canonical_bytes(&self, out: &mut Vec<u8>) {
        let mut put = |c: &BigInt| {
            let b = c.to_signed_bytes_le();
            out.extend_from_slice(&(b.len() as u32).to_le_bytes());
            out.extend_from_slice(&b);
        };
        let len = self.trimmed_len();
        put(&BigInt::from(len));
        (0..len).for_each(|i| put(&self.numerator(i)));
        put(&self.raw_denominator());
    }

    /// Number of numerators up to and including the last nonzero one.
    fn trimmed_len(&self) -> usize {
        (0..self.len()).rev().find(|&i| !self.coeff_is_zero(i)).map_or(0, |i| i + 1)
    }
}

fn big_repr(mut num: Vec<BigInt>, mut den: BigInt) -> Repr {
    if den.is_negative() {
        den = -den;
        for c in &mut num {
            *c = -&*c;
        }
    }
    if all_zero(&num) {
        den = BigInt::one();
    } else {
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            for c in &mut num {
                *c /= &g;
            }
            den /= &g;
        }
    }
    let small = |c: &BigInt| c.to_i128().filter(|&x| fits(x));
    match (num.iter().map(small).collect::<Option<Vec<i128>>>(), small(&den)) {
        (Some(n), Some(d)) => Repr::Small(n, d),
        _ => Repr::Big(num, den),
    }
}

fn all_zero<T: Zero>(v: &[T]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn add_vec<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Clone + NumRef,
    for<'x> &'x T: RefNum<T>,
{
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
            return gcd_u64(a as u64, b as u64) as u128;
        }
        (a, b) = (b, a % b);
    }
    a
}

/// Exact division of a value below 2^64 in magnitude, using 64-bit division.
fn div_narrow(c: i128, g: u64) -> i128 {
    let q = (c.unsigned_abs() as u64 / g) as i128;
    if c < 0 {
        -q
    } else {
        q
    }
}

/// One Euclidean step to bring the operands to the same size, then binary gcd.
fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = if a > b { (b, a) } else { (a, b) };
    if a == 0 {
        return b;
    }
    b %= a;
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// Product in a tower with integer radicands, accumulated in `i128` when the
/// operands are small enough that no sum can overflow. Operands may be
/// shorter than `dim` (prefix-tower elements).
///
/// With `e_S` the product of the generators in `S`, `e_S·e_T = w(S∩T)·e_(S⊕T)`.
fn mul_small(a: &[i128], b: &[i128], dim: usize, w: &[i128], w_bits: u64) -> Option<Vec<i128>> {
    let max_bits = |v: &[i128]| v.iter().map(|&c| bits(c)).max().unwrap_or(0);
    if max_bits(a) + max_bits(b) + w_bits + dim.trailing_zeros() as u64 + 2 > 126 {
        return None;
    }
    let mut out = vec![0i128; dim];
    if std::ptr::eq(a, b) {
        for (s, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            out[0] += x * x * w[s];
            for (t, &y) in a.iter().enumerate().skip(s + 1) {
                if y != 0 {
                    out[s ^ t] += 2 * x * y * w[s & t];
                }
            }
        }
        return Some(out);
    }
    for (s, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (t, &y) in b.iter().enumerate() {
            if y != 0 {
                out[s ^ t] += x * y * w[s & t];
            }
        }
    }
    Some(out)
}

/// Product of two coefficient vectors in a tower whose radicands are `rads`.
fn mul_rec<T>(a: &[T], b: &[T], rads: &[Vec<T>]) -> Vec<T>
where
    T: Clone + NumRef,
    for<'x> &'x T: RefNum<T>,
{
    let n = a.len();
    if n == 1 {
        return vec![&a[0] * &b[0]];
    }
    if all_zero(a) || all_zero(b) {
        return vec![T::zero(); n];
    }
    let half = n / 2;
    let level = n.trailing_zeros() as usize - 1;
    let (sub, r) = (&rads[..level], &rads[level]);
    let (a0, a1) = a.split_at(half);
    let (b0, b1) = b.split_at(half);
    let a1z = all_zero(a1);
    let b1z = all_zero(b1);

    let (lo, hi) = if a1z && b1z {
        (mul_rec(a0, b0, sub), vec![T::zero(); half])
    } else if a1z {
        (mul_rec(a0, b0, sub), mul_rec(a0, b1, sub))
    } else if b1z {
        (mul_rec(a0, b0, sub), mul_rec(a1, b0, sub))
    } else if all_zero(a0) || all_zero(b0) {
        // one side is a pure multiple of g
        let p1 = mul_rec(a1, b1, sub);
        let cross = add_vec(&mul_rec(a0, b1, sub), &mul_rec(a1, b0, sub));
        (mul_radicand(&p1, r, sub), cross)
    } else {
        let p0 = mul_rec(a0, b0, sub);
        let p1 = mul_rec(a1, b1, sub);
        let s = mul_rec(&add_vec(a0, a1), &add_vec(b0, b1), sub);
        let cross = s.iter().zip(&p0).zip(&p1).map(|((s, x), y)| &(s - x) - y).collect();
        (add_vec(&p0, &mul_radicand(&p1, r, sub)), cross)
    };
    let mut out = lo;
    out.extend(hi);
    out
}

fn mul_radicand<T>(v: &[T], r: &[T], sub: &[Vec<T>]) -> Vec<T>
where
    T: Clone + NumRef,
    for<'x> &'x T: RefNum<T>,
{
    if all_zero(&r[1..]) {
        v.iter().map(|x| x * &r[0]).collect()
    } else {
        mul_rec(v, r, sub)
    }
}

/// Height of the smallest tower whose basis covers the first `n` coefficients.
fn height_for(n: usize) -> usize {
    let last = n.saturating_sub(1);
    let mut h = 0;
    while (1usize << h) <= last {
        h += 1;
    }
    h
}

impl PartialEq for TowerElement {
    /// Values are compared on the smallest prefix towers that hold them, so
    /// `8/3` in `Q(√2)(√3)` equals `8/3` in `Q(√3)(√2)`.
    fn eq(&self, other: &TowerElement) -> bool {
        let n = self.trimmed_len();
        if n != other.trimmed_len() {
            return false;
        }
        let same = Arc::ptr_eq(&self.tower.0, &other.tower.0);
        if !same && self.tower.prefix_ref(height_for(n)) != other.tower.prefix_ref(height_for(n)) {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Small(a, x), Repr::Small(b, y)) => x == y && a[..n] == b[..n],
            (Repr::Big(a, x), Repr::Big(b, y)) => x == y && a[..n] == b[..n],
            _ => false,
        }
    }
}

impl Eq for TowerElement {}

impl Hash for TowerElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let n = self.trimmed_len();
        match &self.repr {
            Repr::Small(a, d) => {
                a[..n].hash(state);
                d.hash(state);
            }
            Repr::Big(a, d) => {
                a[..n].hash(state);
                d.hash(state);
            }
        }
    }
}

impl From<i64> for TowerElement {
    fn from(n: i64) -> TowerElement {
        TowerElement::from_integer(n)
    }
}

impl From<BigRational> for TowerElement {
    fn from(q: BigRational) -> TowerElement {
        TowerElement::from_rational(&q)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a TowerElement> for &'a TowerElement {
            type Output = TowerElement;
            /// Panics when the operands live in incompatible towers.
            fn $method(self, rhs: &'a TowerElement) -> TowerElement {
                self.$checked(rhs).expect("tower elements must share a tower")
            }
        }
        impl $tr<TowerElement> for TowerElement {
            type Output = TowerElement;
            fn $method(self, rhs: TowerElement) -> TowerElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a TowerElement> for TowerElement {
            type Output = TowerElement;
            fn $method(self, rhs: &'a TowerElement) -> TowerElement {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &TowerElement {
    type Output = TowerElement;
    fn neg(self) -> TowerElement {
        let repr = match &self.repr {
            Repr::Small(n, d) => Repr::Small(n.iter().map(|c| -c).collect(), *d),
            Repr::Big(n, d) => Repr::Big(n.iter().map(|c| -c).collect(), d.clone()),
        };
        TowerElement { tower: self.tower.clone(), repr }
    }
}

impl Neg for TowerElement {
    type Output = TowerElement;
    fn neg(self) -> TowerElement {
        -&self
    }
}

impl Zero for TowerElement {
    fn zero() -> TowerElement {
        TowerElement::zero()
    }
    fn is_zero(&self) -> bool {
        TowerElement::is_zero(self)
    }
}

impl One for TowerElement {
    fn one() -> TowerElement {
        TowerElement::one()
    }
}

pub(crate) fn generator_name(tower: &Tower, i: usize) -> String {
    let r = &tower.radicands()[i];
    match r.to_rational() {
        Some(q) if q.is_integer() => format!("√{}", q.numer()),
        Some(q) => format!("√({})", q),
        None => format!("g{}", i),
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for idx in 0..self.len() {
            if self.coeff_is_zero(idx) {
                continue;
            }
            let q = self.coefficient(idx);
            let mono: Vec<String> =
                (0..self.height()).filter(|i| idx >> i & 1 == 1).map(|i| generator_name(&self.tower, i)).collect();
            let neg = q.is_negative();
            let mag = q.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("·"))?;
            } else {
                write!(f, "{}·{}", mag, mono.join("·"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {:?}", self, self.tower)
    }
}
