mod common;

use std::cmp::Ordering;

use num_rational::BigRational;
use proptest::prelude::*;
use unitwit::density::{approximate_distance, power_value, witness_for_target, ApproximationResult};
use unitwit::witness::Builder;
use unitwit::{DensityError, TowerElement, WitnessError};

use common::{grid_search, power_squared, q};

const BOUND: u32 = 40;

/// `|value − target| ≤ bound`, decided in the tower.
fn certified(r: &ApproximationResult, target: &BigRational) -> bool {
    let d = &r.value_exact - &TowerElement::from_rational(target);
    let b = TowerElement::from_rational(&r.error_bound);
    (&d - &b).sign() != Ordering::Greater && (&d + &b).sign() != Ordering::Less
}

/// Same minimal pair as the full grid, or exhaustion exactly when the grid is empty.
fn agrees_with_grid(target: &BigRational, eps: &BigRational) {
    let grid = grid_search(target, eps, BOUND);
    let r = match approximate_distance(&TowerElement::from_rational(target), eps, BOUND) {
        Ok(r) => r,
        Err(e) => {
            assert_eq!(e, DensityError::SearchExhausted(BOUND));
            assert_eq!(grid, None, "target {} eps {}: search gave up", target, eps);
            return;
        }
    };
    assert_eq!(Some((r.k, r.l)), grid, "target {} eps {}", target, eps);
    assert!(&r.error_bound <= eps);
    assert!(certified(&r, target), "target {}: bound {} does not hold", target, r.error_bound);
    assert_eq!(r.value_exact.square(), TowerElement::from_rational(&power_squared(r.k, r.l)));
}

#[test]
fn no_solution_below_the_bound() {
    // 5/2 within 1/100 first appears at (59, 8)
    assert_eq!(grid_search(&q(5, 2), &q(1, 100), BOUND), None);
    let err = approximate_distance(&TowerElement::from_ratio(5, 2), &q(1, 100), BOUND).unwrap_err();
    assert_eq!(err, DensityError::SearchExhausted(BOUND));
    let r = approximate_distance(&TowerElement::from_ratio(5, 2), &q(1, 100), 80).unwrap();
    assert_eq!((r.k, r.l), (59, 8));
}

#[test]
fn fixed_targets_match_grid() {
    let targets = [q(1, 2), q(1, 1), q(3, 2), q(2, 1), q(5, 2), q(271_828, 100_000)];
    for t in &targets {
        for e in [q(1, 10), q(1, 100)] {
            agrees_with_grid(t, &e);
        }
    }
}

#[test]
fn refinement_never_shortens_the_word() {
    let target = q(271_828, 100_000);
    let mut last = 0;
    for n in 1..=7 {
        let eps = q(1, 1 << n);
        let r = approximate_distance(&TowerElement::from_rational(&target), &eps, 200).unwrap();
        assert!(r.k + r.l >= last, "eps {}: {} < {}", eps, r.k + r.l, last);
        last = r.k + r.l;
    }
}

#[test]
fn irrational_target() {
    let (_, s2) = unitwit::field::adjoin_sqrt(&unitwit::Tower::rational(), &TowerElement::from_integer(2)).unwrap();
    // 2√2 = (2√2/3)·√3², exactly
    let r = approximate_distance(&s2.scale(&q(2, 1)), &q(1, 1000), 20).unwrap();
    assert_eq!((r.k, r.l), (1, 2));
    assert_eq!(r.error_bound, q(0, 1));
}

#[test]
fn json_roundtrip() {
    let r = approximate_distance(&TowerElement::from_integer(2), &q(1, 20), 20).unwrap();
    let j = r.to_json_value();
    assert_eq!((j.k, j.l), (7, 2));
    let text = serde_json::to_string(&j).unwrap();
    let back = ApproximationResult::from_json_value(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, r);
    assert!((j.value_approx - 1.98649).abs() < 1e-5);
}

#[test]
fn power_values() {
    assert!(power_value(0, 0).is_one());
    assert_eq!(power_value(0, 2), TowerElement::from_integer(3));
    assert_eq!(power_value(2, 0), TowerElement::from_ratio(8, 9));
    assert_eq!(power_value(2, 2), TowerElement::from_ratio(8, 3));
}

#[test]
fn witness_for_target_respects_depth() {
    let mut b = Builder::new();
    let err = witness_for_target(&TowerElement::from_integer(2), &q(1, 20), 20, &mut b).unwrap_err();
    assert_eq!(err, DensityError::Witness(WitnessError::DepthExceeded { depth: 9, limit: 3 }));
    let (r, s) = witness_for_target(&TowerElement::from_ratio(17, 10), &q(1, 10), 20, &mut b).unwrap();
    assert_eq!((r.k, r.l), (0, 1));
    assert_eq!(s.stats().point_count, 7);
}

#[test]
fn invalid_inputs() {
    let two = TowerElement::from_integer(2);
    assert_eq!(approximate_distance(&two, &q(0, 1), 5).unwrap_err(), DensityError::NonPositive);
    assert_eq!(approximate_distance(&two, &q(-1, 10), 5).unwrap_err(), DensityError::NonPositive);
    assert_eq!(
        approximate_distance(&TowerElement::from_integer(-2), &q(1, 10), 5).unwrap_err(),
        DensityError::NonPositive
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_targets_match_grid(n in 30i64..=400, e in prop::sample::select(vec![10i64, 30, 100])) {
        let target = q(n, 100);
        let eps = q(1, e);
        agrees_with_grid(&target, &eps);
    }
}
