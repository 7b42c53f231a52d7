use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use unitwit::field::{adjoin_sqrt, approximate, rat};
use unitwit::{Tower, TowerElement};

/// `Q`, `Q(√2)`, `Q(√2)(√3)` and `Q(√2)(√3)(√(5 + √2))`.
fn towers() -> Vec<Tower> {
    let mut out = vec![Tower::rational()];
    let (t, _) = adjoin_sqrt(&out[0], &TowerElement::from_integer(2)).unwrap();
    out.push(t.clone());
    let (t, _) = adjoin_sqrt(&t, &TowerElement::from_integer(3)).unwrap();
    out.push(t.clone());
    let rad = &TowerElement::from_integer(5) + &t.generator(0);
    let (t, _) = adjoin_sqrt(&t, &rad).unwrap();
    out.push(t);
    out
}

fn element(height: usize) -> impl Strategy<Value = TowerElement> {
    prop::collection::vec((-50i64..=50, 1i64..=12), 1 << height).prop_map(move |cs| {
        let tower = towers()[height].clone();
        let coeffs: Vec<BigRational> = cs.into_iter().map(|(n, d)| rat(n, d)).collect();
        TowerElement::from_coefficients(&tower, &coeffs).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (TowerElement, TowerElement, TowerElement)> {
    (0usize..=3).prop_flat_map(|h| (element(h), element(h), element(h)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms((a, b, c) in triple()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert_eq!(&a * &TowerElement::one(), a.clone());
        prop_assert!((&a + &TowerElement::zero()) == a);
    }

    #[test]
    fn inverse_and_division((a, b, _) in triple()) {
        prop_assume!(!a.is_zero());
        prop_assert!((&a * &a.inverse().unwrap()).is_one());
        prop_assert_eq!(&(&b / &a) * &a, b.clone());
    }

    #[test]
    fn sign_matches_enclosure((a, b, _) in triple()) {
        let s = a.sign();
        let i = approximate(&a, 64);
        prop_assert!(i.lo() <= i.hi());
        match s {
            Ordering::Greater => prop_assert!(i.hi() > &BigRational::zero()),
            Ordering::Less => prop_assert!(i.lo() < &BigRational::zero()),
            Ordering::Equal => prop_assert!(a.is_zero()),
        }
        // order is compatible with addition
        prop_assert_eq!(a.cmp_real(&b).unwrap(), (&a - &b).sign());
        prop_assert_ne!(a.square().sign(), Ordering::Less);
    }

    #[test]
    fn float_value_inside_enclosure(a in (0usize..=3).prop_flat_map(element)) {
        let i = approximate(&a, 80);
        let f = a.to_f64();
        let tol = 1e-9 * (1.0 + f.abs());
        prop_assert!(num_traits::ToPrimitive::to_f64(i.lo()).unwrap() <= f + tol);
        prop_assert!(num_traits::ToPrimitive::to_f64(i.hi()).unwrap() >= f - tol);
    }

    #[test]
    fn square_roots_of_squares(a in (0usize..=3).prop_flat_map(element)) {
        // either root may come back
        let r = a.square().sqrt_exact().expect("a square has a root in its tower");
        prop_assert!(r == a || r == -&a);
    }

    #[test]
    fn json_roundtrip(a in (0usize..=3).prop_flat_map(element)) {
        let s = serde_json::to_string(&a).unwrap();
        let back: TowerElement = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn shrink_keeps_value(a in (0usize..=3).prop_flat_map(element)) {
        let s = a.shrink();
        prop_assert!(s.height() <= a.height());
        prop_assert_eq!(s.embed(a.tower()).unwrap(), a);
    }
}

#[test]
fn generators_square_to_radicands() {
    let t = &towers()[3];
    let rads = t.radicands();
    for (i, r) in rads.iter().enumerate() {
        let g = t.generator(i);
        assert_eq!(g.square(), r.embed(t).unwrap());
        assert_eq!(g.sign(), Ordering::Greater);
    }
}

#[test]
fn square_radicands_are_rejected() {
    let (t2, s2) = adjoin_sqrt(&Tower::rational(), &TowerElement::from_integer(2)).unwrap();
    assert!(t2.extend(&TowerElement::from_integer(8)).is_err());
    assert!(t2.extend(&(&TowerElement::from_integer(3) + &s2.scale(&rat(2, 1)))).is_err()); // (1 + √2)²
    assert!(t2.extend(&TowerElement::from_integer(-3)).is_err());
}

#[test]
fn tower_sign_is_exact_near_zero() {
    // consecutive convergents of √2: 1393/985 is below, 3363/2378 above, both within 4e-7
    let (_, s2) = adjoin_sqrt(&Tower::rational(), &TowerElement::from_integer(2)).unwrap();
    assert_eq!((&s2 - &TowerElement::from_ratio(1393, 985)).sign(), Ordering::Greater);
    assert_eq!((&s2 - &TowerElement::from_ratio(3363, 2378)).sign(), Ordering::Less);
}
