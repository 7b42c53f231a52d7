use std::collections::HashSet;

use unitwit::witness::{build_between, build_canonical, value, Builder, Label, Role, WitnessStats};
use unitwit::{DistanceWord, ExactPoint2, TowerElement, WitnessError, WitnessSet};

fn one() -> DistanceWord {
    DistanceWord::One
}

/// Every word of depth at most two built from the unary rules, plus two subtractions.
fn small_words() -> Vec<DistanceWord> {
    let unary: [fn(DistanceWord) -> DistanceWord; 5] = [
        DistanceWord::sqrt3,
        DistanceWord::double,
        DistanceWord::triple,
        DistanceWord::sqrt2,
        DistanceWord::two_sqrt2_over3,
    ];
    let mut out = vec![one()];
    for f in unary {
        out.push(f(one()));
    }
    for f in [DistanceWord::sqrt3, DistanceWord::double, DistanceWord::sqrt2] {
        for g in [DistanceWord::sqrt3, DistanceWord::double] {
            out.push(f(g(one())));
        }
    }
    out.push(DistanceWord::pythag_sub(DistanceWord::double(one()), one()));
    out.push(DistanceWord::pythag_sub(DistanceWord::sqrt3(one()), one()));
    out
}

fn independent_dist2(a: &ExactPoint2, b: &ExactPoint2) -> TowerElement {
    let dx = &a.x - &b.x;
    let dy = &a.y - &b.y;
    &(&dx * &dx) + &(&dy * &dy)
}

fn check_invariants(s: &WitnessSet) {
    let w = s.word();
    assert!(s.validate().is_ok(), "{}: {:?}", w, s.validate());
    assert!(s.soundness_violations().is_empty(), "{}", w);
    assert!(s.provenance_problems().is_empty(), "{}: {:?}", w, s.provenance_problems());
    assert!(s.unit_graph_connected(), "{}", w);
    assert!(!s.has_duplicate_points(), "{}", w);
    for (label, p) in s.points() {
        assert_eq!(Label::of(p), label, "{}: label is not the content hash", w);
    }
    let mut seen = HashSet::new();
    for p in s.pairs() {
        let (a, b) = (s.point(p.a).expect("pair endpoint"), s.point(p.b).expect("pair endpoint"));
        assert_eq!(independent_dist2(a, b), p.dist2, "{}: pair {} {}", w, p.a, p.b);
        if p.role == Role::Unit {
            assert!(p.dist2.is_one(), "{}: unit pair at squared distance {}", w, p.dist2);
        }
        let key = if p.a < p.b { (p.a, p.b) } else { (p.b, p.a) };
        assert!(seen.insert(key), "{}: pair {} {} listed twice", w, p.a, p.b);
    }
    let (x, y) = s.endpoint_points();
    assert_eq!(independent_dist2(x, y), value(w).unwrap().square(), "{}: endpoint distance", w);
}

#[test]
fn small_words_are_sound() {
    for w in small_words() {
        let s = build_canonical(&w).unwrap_or_else(|e| panic!("{}: {}", w, e));
        check_invariants(&s);
        let (x, y) = s.endpoint_points();
        assert_eq!(*x, ExactPoint2::origin());
        // the set's tower may adjoin generators in another order than value(w)'s
        assert!(y.y.is_zero() && y.x.sign() == std::cmp::Ordering::Greater, "{}: y = {:?}", w, y);
        assert_eq!(y.x.square(), value(&w).unwrap().square(), "{}", w);
    }
}

#[test]
fn frozen_counts() {
    let stats = |w: DistanceWord| {
        let WitnessStats { point_count, unit_pair_count, derived_pair_count, tower_height, .. } =
            build_canonical(&w).unwrap().stats();
        (point_count, unit_pair_count, derived_pair_count, tower_height)
    };
    assert_eq!(stats(one()), (2, 1, 0, 0));
    assert_eq!(stats(DistanceWord::power(0, 1)), (7, 11, 2, 2));
    assert_eq!(stats(DistanceWord::double(one())), (11, 19, 5, 2));
    assert_eq!(stats(DistanceWord::sqrt2(one())), (22, 41, 10, 3));
    assert_eq!(stats(DistanceWord::power(0, 2)), (44, 95, 22, 2));
    assert_eq!(stats(DistanceWord::triple(one())), (44, 95, 22, 2));
    assert_eq!(stats(DistanceWord::power(1, 0)), (191, 399, 94, 4));
    assert_eq!(stats(DistanceWord::power(1, 1)), (2004, 4281, 1020, 4));
}

#[test]
fn values_of_powers() {
    let (k, l) = (2, 1);
    let v = value(&DistanceWord::power(k, l)).unwrap();
    // ((2√2/3)² · √3)² = (64/81) · 3
    assert_eq!(v.square(), TowerElement::from_ratio(64, 27));
    assert!((v.to_f64() - (8f64.sqrt() / 3.0).powi(2) * 3f64.sqrt()).abs() < 1e-12);
    assert_eq!(DistanceWord::power(k, l).as_power(), Some((k, l)));
    assert_eq!(DistanceWord::power(k, l).depth(), 3);
}

#[test]
fn builds_are_deterministic() {
    let w = DistanceWord::power(1, 0);
    let a = build_canonical(&w).unwrap().to_json().unwrap();
    let b = Builder::new().build_canonical(&w).unwrap().to_json().unwrap();
    assert_eq!(a, b);
}

#[test]
fn json_roundtrip_keeps_everything() {
    for w in [DistanceWord::power(0, 1), DistanceWord::sqrt2(one()), DistanceWord::power(1, 0)] {
        let s = build_canonical(&w).unwrap();
        let json = s.to_json().unwrap();
        let back = WitnessSet::from_json(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json().unwrap(), json);
        check_invariants(&back);
    }
}

#[test]
fn tampered_json_is_rejected() {
    let s = build_canonical(&DistanceWord::power(0, 1)).unwrap();
    let mut j: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
    j["points"][0]["x"] = serde_json::json!("7/5");
    let text = serde_json::to_string(&j).unwrap();
    assert!(WitnessSet::from_json(&text).is_err());
    assert!(WitnessSet::from_json("{").is_err());
}

#[test]
fn depth_limit_is_enforced() {
    let mut b = Builder::new();
    assert_eq!(b.depth_limit(), 3);
    assert_eq!(
        b.build_canonical(&DistanceWord::power(2, 2)).unwrap_err(),
        WitnessError::DepthExceeded { depth: 4, limit: 3 }
    );
    let mut shallow = Builder::new().with_depth_limit(0);
    assert!(shallow.build_canonical(&one()).is_ok());
    assert!(shallow.build_canonical(&DistanceWord::power(0, 1)).is_err());
}

#[test]
fn infeasible_subtraction() {
    let w = DistanceWord::pythag_sub(one(), DistanceWord::double(one()));
    assert!(build_canonical(&w).is_err());
}

#[test]
fn transported_sets_keep_shape() {
    let w = DistanceWord::double(one());
    let canon = build_canonical(&w).unwrap();
    // a 3-4-5 frame scaled to length 2
    let x = ExactPoint2::new(TowerElement::from_integer(1), TowerElement::from_ratio(-1, 2));
    let y = ExactPoint2::new(TowerElement::from_ratio(11, 5), TowerElement::from_ratio(11, 10));
    let s = build_between(&x, &y, &w).unwrap();
    assert_eq!(s.stats().point_count, canon.stats().point_count);
    assert_eq!(s.stats().unit_pair_count, canon.stats().unit_pair_count);
    assert_eq!(s.endpoint_points(), (&x, &y));
    check_invariants(&s);
    let far = ExactPoint2::new(TowerElement::from_integer(5), TowerElement::zero());
    assert_eq!(build_between(&x, &far, &w).unwrap_err(), WitnessError::EndpointMismatch);
}

#[test]
fn exports_mention_every_point() {
    let s = build_canonical(&DistanceWord::power(0, 1)).unwrap();
    let dot = s.to_dot();
    let svg = s.to_svg();
    assert!(dot.starts_with("graph") || dot.starts_with("strict graph"));
    for (label, _) in s.points() {
        assert!(dot.contains(&label.to_string()), "{} missing from DOT", label);
    }
    assert_eq!(svg.matches("<circle").count(), s.len());
}
