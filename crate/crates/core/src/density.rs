//! Certified search for `(2√2/3)^k · (√3)^l` close to a positive target.
//!
//! Since `log(2√2/3)` and `log √3` are rationally independent with opposite
//! signs, these products are dense in `(0, ∞)`. The search is bounded: for
//! each `l` a float estimate proposes the smallest `k` that can work, and the
//! candidate is accepted only after an exact sign check of `|value − target| − ε`.
//! Floats never decide acceptance.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::DensityError;
use crate::field::codec::{format_rational, parse_rational};
use crate::field::{adjoin_sqrt, approximate, Tower, TowerElement};
use crate::witness::{Builder, DistanceWord, WitnessSet};

/// A certified approximation of a target by `(2√2/3)^k · (√3)^l`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationResult {
    pub k: u32,
    pub l: u32,
    pub value_exact: TowerElement,
    /// Rational upper bound on `|value − target|`, never above the requested ε.
    pub error_bound: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationResultJson {
    pub k: u32,
    pub l: u32,
    pub value_exact: TowerElement,
    pub value_approx: f64,
    pub error_bound: String,
    pub error_bound_approx: f64,
}

impl ApproximationResult {
    pub fn word(&self) -> DistanceWord {
        DistanceWord::power(self.k, self.l)
    }

    pub fn to_json_value(&self) -> ApproximationResultJson {
        ApproximationResultJson {
            k: self.k,
            l: self.l,
            value_exact: self.value_exact.clone(),
            value_approx: self.value_exact.to_f64(),
            error_bound: format_rational(&self.error_bound),
            error_bound_approx: self.error_bound.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn from_json_value(j: &ApproximationResultJson) -> Result<ApproximationResult, DensityError> {
        Ok(ApproximationResult {
            k: j.k,
            l: j.l,
            value_exact: j.value_exact.clone(),
            error_bound: parse_rational(&j.error_bound)?,
        })
    }
}

/// `2√2/3` and `√3` in an extension of `base`.
fn generators(base: &Tower) -> Result<(TowerElement, TowerElement), DensityError> {
    let (t, s2) = adjoin_sqrt(base, &TowerElement::from_integer(2))?;
    let (t, s3) = adjoin_sqrt(&t, &TowerElement::from_integer(3))?;
    let r = s2.embed(&t)?.scale(&BigRational::new(2.into(), 3.into()));
    Ok((r, s3))
}

/// Exact `(2√2/3)^k · (√3)^l`, in the tower `Q(√2)(√3)`.
pub fn power_value(k: u32, l: u32) -> TowerElement {
    let (r, s3) = generators(&Tower::rational()).expect("√2 and √3 adjoin to Q");
    (&r.pow(k) * &s3.pow(l)).shrink()
}

/// Whether `|x − target| ≤ eps`, decided exactly.
fn within(x: &TowerElement, target: &TowerElement, eps: &BigRational) -> Result<bool, DensityError> {
    let d = x.checked_sub(target)?;
    let e = TowerElement::from_rational(eps);
    Ok(d.checked_sub(&e)?.sign() != Ordering::Greater && d.checked_add(&e)?.sign() != Ordering::Less)
}

/// A rational upper bound on `|d|` that does not exceed `eps`, given `|d| ≤ eps`.
fn certified_bound(d: &TowerElement, eps: &BigRational) -> BigRational {
    if let Some(q) = d.to_rational() {
        return q.abs();
    }
    // |d| < eps strictly here, so refinement terminates
    let mut precision = 4;
    loop {
        let bound = approximate(d, precision).max_distance_to(&BigRational::zero());
        if &bound <= eps {
            return bound;
        }
        precision *= 2;
    }
}

/// Smallest-`(k + l)` approximation with `k, l ≤ max_exponent`, ties broken
/// by smaller `k`.
pub fn approximate_distance(
    target: &TowerElement,
    eps: &BigRational,
    max_exponent: u32,
) -> Result<ApproximationResult, DensityError> {
    if target.sign() != Ordering::Greater || !eps.is_positive() {
        return Err(DensityError::NonPositive);
    }
    let (r, s3) = generators(target.tower())?;
    let log_r = (8f64.sqrt() / 3.0).ln();
    let log_s = 3f64.sqrt().ln();
    let upper = (target.to_f64() + eps.to_f64().unwrap_or(f64::MAX)).ln();

    let mut best: Option<(u32, u32)> = None;
    let mut s_pow = TowerElement::one();
    for l in 0..=max_exponent {
        if let Some((bk, bl)) = best {
            if l > bk + bl {
                break;
            }
        }
        // smallest k with r^k·s^l ≤ target + eps, by float estimate
        let estimate = ((upper - l as f64 * log_s) / log_r).ceil().max(0.0);
        let first = (estimate as u32).saturating_sub(1);
        for k in first..=(first + 2).min(max_exponent) {
            if matches!(best, Some((bk, bl)) if (k + l, k) >= (bk + bl, bk)) {
                break;
            }
            let x = &r.pow(k) * &s_pow;
            if within(&x, target, eps)? {
                best = Some((k, l));
                break;
            }
        }
        s_pow = &s_pow * &s3;
    }
    let (k, l) = best.ok_or(DensityError::SearchExhausted(max_exponent))?;
    let value = power_value(k, l);
    let d = (&r.pow(k) * &s3.pow(l)).checked_sub(target)?;
    Ok(ApproximationResult { k, l, value_exact: value, error_bound: certified_bound(&d, eps) })
}

/// The approximation together with the canonical witness set for its word.
/// The builder's depth limit applies to `k + l`.
pub fn witness_for_target(
    target: &TowerElement,
    eps: &BigRational,
    max_exponent: u32,
    builder: &mut Builder,
) -> Result<(ApproximationResult, WitnessSet), DensityError> {
    let result = approximate_distance(target, eps, max_exponent)?;
    let set = builder.build_canonical(&result.word())?;
    Ok((result, (*set).clone()))
}
