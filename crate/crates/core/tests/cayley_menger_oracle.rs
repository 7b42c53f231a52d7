mod common;

use proptest::prelude::*;
use unitwit::cayley_menger::{
    affine_det, affinely_dependent, check_lemma, cm_det, cm_det_symbolic, phi, verify_prop1_identity, Lemma,
    SquaredDistanceMatrix,
};
use unitwit::{ComplexPoint, ComplexTowerElement as C, TowerElement};

use common::{cm_oracle, cofactor_det, phi_oracle};

fn gaussian() -> impl Strategy<Value = C> {
    (-30i64..=30, -30i64..=30, 1i64..=9).prop_map(|(a, b, d)| C::gaussian(a, b, d))
}

fn points(count: usize, dim: usize) -> impl Strategy<Value = Vec<ComplexPoint>> {
    prop::collection::vec(prop::collection::vec(gaussian(), dim).prop_map(ComplexPoint::new), count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phi_matches_oracle(p in points(2, 2)) {
        prop_assert_eq!(phi(&p[0], &p[1]).unwrap(), phi_oracle(&p[0], &p[1]));
        prop_assert_eq!(phi(&p[0], &p[1]).unwrap(), phi(&p[1], &p[0]).unwrap());
    }

    #[test]
    fn triangle_determinant_matches_cofactors(p in points(3, 2)) {
        prop_assert_eq!(cm_det(&p).unwrap(), cm_oracle(&p));
        prop_assert!(verify_prop1_identity(&p).unwrap());
    }

    #[test]
    fn tetrahedron_in_c3(p in points(4, 3)) {
        prop_assert_eq!(cm_det(&p).unwrap(), cm_oracle(&p));
        prop_assert!(verify_prop1_identity(&p).unwrap());
    }

    #[test]
    fn four_points_in_the_plane_are_dependent(p in points(4, 2)) {
        prop_assert!(cm_det(&p).unwrap().is_zero());
        prop_assert!(cm_oracle(&p).is_zero());
    }

    #[test]
    fn collinear_triples_vanish(p in points(2, 2), t in gaussian()) {
        // p₀ + t·(p₁ − p₀)
        let third = p[0].add(&p[1].sub(&p[0]).scale(&t));
        let tri = vec![p[0].clone(), p[1].clone(), third];
        prop_assert!(affine_det(&tri).unwrap().is_zero());
        prop_assert!(cm_det(&tri).unwrap().is_zero());
    }
}

#[test]
fn isotropic_pair_is_not_degenerate() {
    // φ = 0 for distinct points, yet the triangle can be independent
    let o = ComplexPoint::gaussian(&[(0, 0), (0, 0)], 1);
    let a = ComplexPoint::gaussian(&[(1, 0), (0, 1)], 1);
    let b = ComplexPoint::gaussian(&[(1, 0), (0, 0)], 1);
    assert!(phi(&o, &a).unwrap().is_zero());
    assert!(!affinely_dependent(&[o.clone(), a.clone(), b.clone()]).unwrap());
    assert_eq!(cm_det(&[o, a, b]).unwrap(), C::from(-4) * C::gaussian(0, 1, 1).square());
}

#[test]
fn matrix_validation() {
    let one = C::from(1);
    let zero = C::from(0);
    assert!(SquaredDistanceMatrix::new(vec![vec![zero.clone(), one.clone()], vec![C::from(2), zero.clone()]]).is_err());
    assert!(SquaredDistanceMatrix::new(vec![vec![one.clone(), one.clone()], vec![one.clone(), zero.clone()]]).is_err());
    let m = SquaredDistanceMatrix::new(vec![vec![zero.clone(), one.clone()], vec![one, zero]]).unwrap();
    assert_eq!(m.determinant(), C::from(2));
}

#[test]
fn lemma_polynomials_match_cofactor_expansion() {
    for lemma in Lemma::ALL {
        for inst in check_lemma(lemma).unwrap() {
            assert!(inst.passed, "{} at d = {}", lemma, inst.d);
            let m = lemma.matrix(&inst.d, &inst.a);
            assert_eq!(cm_det_symbolic(&m).unwrap(), inst.polynomial);
            for t in [-2, 5, 11] {
                let t = TowerElement::from_integer(t);
                let block = m.substitute(&t);
                let n = block.len();
                let mut full = vec![vec![TowerElement::zero(); n + 1]; n + 1];
                for i in 0..n {
                    full[0][i + 1] = TowerElement::one();
                    full[i + 1][0] = TowerElement::one();
                    full[i + 1][1..].clone_from_slice(&block[i]);
                }
                assert_eq!(inst.polynomial.eval(&t), cofactor_det(&full), "{} at t = {}", lemma, t);
            }
        }
    }
}

#[test]
fn lemma_one_by_hand() {
    // d = 1: 2t(3 − t) = −2t² + 6t
    let inst = &check_lemma(Lemma::One).unwrap()[0];
    assert!(inst.d.is_one());
    let c: Vec<TowerElement> = inst.polynomial.coeffs().to_vec();
    assert_eq!(c, vec![TowerElement::zero(), TowerElement::from_integer(6), TowerElement::from_integer(-2)]);
}
