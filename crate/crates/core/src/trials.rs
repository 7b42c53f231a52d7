//! Seeded randomized suites for the executable propositions.
//!
//! Every suite draws from a ChaCha8 stream seeded by the caller, so a run is
//! fully determined by `(proposition, trials, seed)`. A failing trial stops
//! its suite and is returned with the points involved.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cayley_menger::{affinely_dependent, verify_prop1_identity, verify_prop2};
use crate::error::VerifyError;
use crate::field::{adjoin_sqrt, rat, ComplexTowerElement as C, Tower, TowerElement};
use crate::geometry::ComplexPoint;
use crate::verifier::{
    equal_phi_flags, generate_isometry, orthogonality_residuals, prop3a, prop3b, prop3b_cm, prop4_check, triangle_cm,
    AffineMap,
};

/// Coordinates are `(a + b·i)/d` with `|a|, |b|, d ≤ COORD_BOUND`.
pub const COORD_BOUND: i64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Proposition {
    #[serde(rename = "1")]
    P1,
    #[serde(rename = "2")]
    P2,
    #[serde(rename = "3a")]
    P3a,
    #[serde(rename = "3b")]
    P3b,
    #[serde(rename = "4")]
    P4,
}

impl Proposition {
    pub const ALL: [Proposition; 5] =
        [Proposition::P1, Proposition::P2, Proposition::P3a, Proposition::P3b, Proposition::P4];

    pub fn name(self) -> &'static str {
        match self {
            Proposition::P1 => "1",
            Proposition::P2 => "2",
            Proposition::P3a => "3a",
            Proposition::P3b => "3b",
            Proposition::P4 => "4",
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Proposition {
    type Err = String;

    fn from_str(s: &str) -> Result<Proposition, String> {
        Proposition::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown proposition {:?} (expected 1, 2, 3a, 3b or 4)", s))
    }
}

/// A trial that contradicted the expected outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub points: Vec<ComplexPoint>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub proposition: Proposition,
    /// Which variant of the suite ran, e.g. `n=3`.
    pub variant: String,
    pub trials: usize,
    pub passed: usize,
    pub counterexample: Option<Counterexample>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none() && self.passed == self.trials
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.ok() { "PASS" } else { "FAIL" };
        write!(f, "prop {} ({}): {}/{} {}", self.proposition, self.variant, self.passed, self.trials, verdict)
    }
}

pub fn gaussian(rng: &mut ChaCha8Rng, bound: i64) -> C {
    C::gaussian(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> ComplexPoint {
    ComplexPoint::new((0..n).map(|_| gaussian(rng, bound)).collect())
}

/// Nonzero Gaussian rational.
fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> C {
    loop {
        let c = gaussian(rng, bound);
        if !c.is_zero() {
            return c;
        }
    }
}

type Outcome = Result<Result<(), Counterexample>, VerifyError>;

fn fail(trial: usize, points: &[ComplexPoint], detail: impl Into<String>) -> Outcome {
    Ok(Err(Counterexample { trial, points: points.to_vec(), detail: detail.into() }))
}

fn run_suite(
    proposition: Proposition,
    variant: &str,
    trials: usize,
    seed: u64,
    mut trial: impl FnMut(usize, &mut ChaCha8Rng) -> Outcome,
) -> Result<SuiteReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut counterexample = None;
    for i in 0..trials {
        match trial(i, &mut rng)? {
            Ok(()) => passed += 1,
            Err(c) => {
                counterexample = Some(c);
                break;
            }
        }
    }
    Ok(SuiteReport { proposition, variant: variant.to_string(), trials, passed, counterexample })
}

/// Squared affine determinant against the normalized CM determinant, for
/// `n + 1` random points of `Cⁿ`.
pub fn prop1_suite(n: usize, trials: usize, seed: u64) -> Result<SuiteReport, VerifyError> {
    run_suite(Proposition::P1, &format!("n={}", n), trials, seed, |i, rng| {
        let pts: Vec<ComplexPoint> = (0..=n).map(|_| random_point(rng, n, COORD_BOUND)).collect();
        if verify_prop1_identity(&pts)? {
            Ok(Ok(()))
        } else {
            fail(i, &pts, "affine determinant squared differs from the normalized CM determinant")
        }
    })
}

/// `count ≥ 4` random points of `C²` have a vanishing CM determinant.
pub fn prop2_suite(count: usize, trials: usize, seed: u64) -> Result<SuiteReport, VerifyError> {
    run_suite(Proposition::P2, &format!("{} points", count), trials, seed, |i, rng| {
        let pts: Vec<ComplexPoint> = (0..count).map(|_| random_point(rng, 2, COORD_BOUND)).collect();
        if verify_prop2(&pts)? {
            Ok(Ok(()))
        } else {
            fail(i, &pts, "CM determinant of dependent points is nonzero")
        }
    })
}

/// A `φ`-similarity `p ↦ λ·(Q·p + v)`, which multiplies every `φ` by `λ²`.
fn random_similarity(rng: &mut ChaCha8Rng) -> (AffineMap, C) {
    let lambda = nonzero(rng, 9);
    let iso = generate_isometry(rng.gen());
    (AffineMap::scaling(lambda.clone()).compose(&iso), lambda.square())
}

fn real_point(x: &TowerElement, y: &TowerElement) -> ComplexPoint {
    ComplexPoint::real(&[x.clone(), y.clone()])
}

/// Images of the unit equilateral triangle under random similarities are
/// `φ`-equilateral with `φ = λ²` and affinely independent.
pub fn prop3a_suite(trials: usize, seed: u64) -> Result<SuiteReport, VerifyError> {
    let (_, s3) = adjoin_sqrt(&Tower::rational(), &TowerElement::from_integer(3))?;
    let half = TowerElement::from_ratio(1, 2);
    let zero = TowerElement::zero();
    let one = TowerElement::one();
    let base = [real_point(&zero, &zero), real_point(&one, &zero), real_point(&half, &(&s3 * &half))];
    run_suite(Proposition::P3a, "similar images of the unit triangle", trials, seed, |i, rng| {
        let (f, s) = random_similarity(rng);
        let pts: Vec<ComplexPoint> = base.iter().map(|p| f.apply(p)).collect();
        if prop3a(&pts[0], &pts[1], &pts[2], &s)? {
            Ok(Ok(()))
        } else {
            fail(i, &pts, "φ-equilateral triangle is affinely dependent")
        }
    })
}

/// The real triangle with squared sides `(2, 3, 9)`, as `(c₁, c₂, c₃)` with
/// `φ(c₁,c₂) = 2`, `φ(c₁,c₃) = 3`, `φ(c₂,c₃) = 9`.
pub fn two_three_nine_triangle() -> [ComplexPoint; 3] {
    let (t3, s3) = adjoin_sqrt(&Tower::rational(), &TowerElement::from_integer(3)).expect("√3 adjoins to Q");
    let (_, s6) = adjoin_sqrt(&t3, &TowerElement::from_integer(6)).expect("√6 adjoins to Q(√3)");
    let zero = TowerElement::zero();
    let c1 = real_point(&zero, &zero);
    let c3 = real_point(&s3, &zero);
    let c2 = real_point(&s3.scale(&rat(-2, 3)), &s6.scale(&rat(1, 3)));
    [c1, c2, c3]
}

/// Similar images of the `(2, 3, 9)` triangle are affinely independent and
/// have CM determinant `−8·d⁴`.
pub fn prop3b_suite(trials: usize, seed: u64) -> Result<SuiteReport, VerifyError> {
    let base = two_three_nine_triangle();
    run_suite(Proposition::P3b, "similar images of the (2, 3, 9) triangle", trials, seed, |i, rng| {
        // a real d² must be positive, so purely imaginary λ is redrawn
        let (f, d2) = loop {
            let (f, d2) = random_similarity(rng);
            if !d2.is_real() || d2.re.sign() == std::cmp::Ordering::Greater {
                break (f, d2);
            }
        };
        let pts: Vec<ComplexPoint> = base.iter().map(|p| f.apply(p)).collect();
        if !prop3b(&pts[0], &pts[1], &pts[2], &d2)? {
            return fail(i, &pts, "(2, 3, 9) triangle is affinely dependent");
        }
        if triangle_cm([&pts[0], &pts[1], &pts[2]])? != prop3b_cm(&d2)? {
            return fail(i, &pts, "CM determinant differs from −8·d⁴");
        }
        Ok(Ok(()))
    })
}

/// Reflection of `p` in the complex line through `a` and `b`, a `φ`-isometry
/// fixing that line. Requires `φ(a, b) ≠ 0`.
fn reflect(p: &ComplexPoint, a: &ComplexPoint, b: &ComplexPoint) -> Result<ComplexPoint, VerifyError> {
    let u = b.sub(a);
    let w = p.sub(a);
    let t = w.dot(&u).checked_div(&u.dot(&u))?;
    let two = C::from(2);
    Ok(a.add(&u.scale(&(&two * &t))).sub(&w))
}

/// Three checks per trial, for random affinely independent centres:
/// a random pair `x ≠ y` never satisfies all three `φ` equalities; a pair
/// mirrored in the line `c₀c₁` satisfies the first two, its difference is
/// orthogonal to `c₁ − c₀`, and it fails the third; and `x = y` satisfies the
/// premise and yields `true`.
pub fn prop4_suite(trials: usize, seed: u64) -> Result<SuiteReport, VerifyError> {
    run_suite(Proposition::P4, "contrapositive", trials, seed, |i, rng| {
        let centres = loop {
            let c: Vec<ComplexPoint> = (0..3).map(|_| random_point(rng, 2, COORD_BOUND)).collect();
            let isotropic = c[1].sub(&c[0]).dot(&c[1].sub(&c[0])).is_zero();
            if !isotropic && !affinely_dependent(&c)? {
                break c;
            }
        };
        let cs: Vec<&ComplexPoint> = centres.iter().collect();
        let x = random_point(rng, 2, COORD_BOUND);
        let y = loop {
            let y = random_point(rng, 2, COORD_BOUND);
            if y != x {
                break y;
            }
        };
        let all_pts = |extra: &[&ComplexPoint]| -> Vec<ComplexPoint> {
            extra.iter().map(|p| (*p).clone()).chain(centres.iter().cloned()).collect()
        };
        if equal_phi_flags(&x, &y, &cs)?.iter().all(|&b| b) {
            return fail(i, &all_pts(&[&x, &y]), "x != y with all three φ equalities");
        }

        let m = reflect(&x, cs[0], cs[1])?;
        if m != x {
            let flags = equal_phi_flags(&x, &m, &cs)?;
            if !(flags[0] && flags[1]) {
                return fail(i, &all_pts(&[&x, &m]), "mirror image does not keep φ to c₀ and c₁");
            }
            if !orthogonality_residuals(&x, &m, &cs[..2])[0].is_zero() {
                return fail(i, &all_pts(&[&x, &m]), "x − y is not orthogonal to c₁ − c₀");
            }
            if flags[2] {
                return fail(i, &all_pts(&[&x, &m]), "mirror pair x != y with all three φ equalities");
            }
        }

        if !prop4_check(&x, &x, cs[0], cs[1], cs[2])? {
            return fail(i, &all_pts(&[&x]), "premise holds but x != y");
        }
        Ok(Ok(()))
    })
}

/// Run every suite of one proposition. Propositions 1 and 2 each have a
/// larger variant (`n = 3`, five points) that runs `trials / 5` instances.
pub fn run(proposition: Proposition, trials: usize, seed: u64) -> Result<Vec<SuiteReport>, VerifyError> {
    Ok(match proposition {
        Proposition::P1 => vec![prop1_suite(2, trials, seed)?, prop1_suite(3, (trials / 5).max(1), seed)?],
        Proposition::P2 => vec![prop2_suite(4, trials, seed)?, prop2_suite(5, (trials / 5).max(1), seed)?],
        Proposition::P3a => vec![prop3a_suite(trials, seed)?],
        Proposition::P3b => vec![prop3b_suite(trials, seed)?],
        Proposition::P4 => vec![prop4_suite(trials, seed)?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley_menger::phi;

    #[test]
    fn triangle_has_the_stated_sides() {
        let [c1, c2, c3] = two_three_nine_triangle();
        assert_eq!(phi(&c1, &c2).unwrap(), C::from(2));
        assert_eq!(phi(&c1, &c3).unwrap(), C::from(3));
        assert_eq!(phi(&c2, &c3).unwrap(), C::from(9));
    }

    #[test]
    fn small_runs_pass() {
        for p in Proposition::ALL {
            for r in run(p, 10, 1).unwrap() {
                assert!(r.ok(), "{}: {:?}", r, r.counterexample);
            }
        }
    }

    #[test]
    fn names_roundtrip() {
        for p in Proposition::ALL {
            assert_eq!(p.name().parse::<Proposition>().unwrap(), p);
        }
        assert!("5".parse::<Proposition>().is_err());
    }
}
