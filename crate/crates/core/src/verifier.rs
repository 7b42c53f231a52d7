//! Checking candidate maps `f: S → C²` against a witness set, and executable
//! forms of the triangle and circle-intersection propositions the witness
//! constructions rely on.
//!
//! # Why two points with equal `φ` to three independent centres coincide
//!
//! Write `⟨u, w⟩ = u₁w₁ + u₂w₂` for the bilinear (not Hermitian) form on `C²`,
//! so that `φ(p, q) = ⟨p − q, p − q⟩`. Expanding,
//!
//! ```text
//! φ(x, c) − φ(y, c) = ⟨x − y, x + y − 2c⟩ = ⟨s, x + y − 2c⟩,   s = x − y.
//! ```
//!
//! If `φ(x, cᵢ) = φ(y, cᵢ)` for `i = 0, 1, 2`, subtracting the `i = 0`
//! equation from the others gives `⟨s, cᵢ − c₀⟩ = 0` for `i = 1, 2`. When the
//! centres are affinely independent, `c₁ − c₀` and `c₂ − c₀` span `C²`, so
//! `⟨s, u⟩ = 0` for every `u`. Taking `u = s̄` gives `|s₁|² + |s₂|² = 0`, hence
//! `s = 0`. With only two of the equalities, `s` is merely orthogonal to
//! `c₁ − c₀`; [`orthogonality_residuals`] exposes those relations and
//! [`prop4_check`] the full statement.
//!
//! Only the identity and complex conjugation are modelled among field
//! automorphisms of `C`. The other automorphisms are not constructive and
//! cannot be represented by finite tables of exact values.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cayley_menger::{affinely_dependent, cm_det, phi, two_three_nine_cm};
use crate::error::VerifyError;
use crate::field::codec::{element_from_json, element_to_json, ElementJson};
use crate::field::{ComplexTowerElement, TowerElement};
use crate::geometry::ComplexPoint;
use crate::witness::{Label, Role, WitnessSet};

type C = ComplexTowerElement;

/// A finite table `label ↦ f(label) ∈ C²`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointMap {
    assignment: BTreeMap<Label, ComplexPoint>,
}

impl PointMap {
    pub fn new() -> PointMap {
        PointMap::default()
    }

    pub fn insert(&mut self, label: Label, image: ComplexPoint) {
        self.assignment.insert(label, image);
    }

    pub fn get(&self, label: Label) -> Option<&ComplexPoint> {
        self.assignment.get(&label)
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, &ComplexPoint)> {
        self.assignment.iter().map(|(l, p)| (*l, p))
    }

    /// Tabulate `f` on every point of `s`.
    pub fn tabulate(s: &WitnessSet, f: impl Fn(&ComplexPoint) -> ComplexPoint) -> PointMap {
        PointMap { assignment: s.points().map(|(l, p)| (l, f(&p.to_complex()))).collect() }
    }

    /// The inclusion `R² ⊂ C²`.
    pub fn identity(s: &WitnessSet) -> PointMap {
        PointMap::tabulate(s, Clone::clone)
    }

    /// Coordinatewise complex conjugation of the images.
    pub fn conjugated(&self) -> PointMap {
        PointMap { assignment: self.assignment.iter().map(|(l, p)| (*l, p.conj())).collect() }
    }

    /// Post-compose with an affine map.
    pub fn then(&self, g: &AffineMap) -> PointMap {
        PointMap { assignment: self.assignment.iter().map(|(l, p)| (*l, g.apply(p))).collect() }
    }

    pub fn to_json_value(&self) -> PointMapJson {
        let enc = |p: &ComplexPoint, i: usize| {
            let c = &p.coords[i];
            (element_to_json(&c.re), element_to_json(&c.im))
        };
        PointMapJson {
            assignment: self
                .iter()
                .map(|(label, p)| {
                    let (re_x, im_x) = enc(p, 0);
                    let (re_y, im_y) = enc(p, 1);
                    ImageJson { label, re_x, im_x, re_y, im_y }
                })
                .collect(),
        }
    }

    pub fn from_json_value(j: &PointMapJson) -> Result<PointMap, VerifyError> {
        let mut m = PointMap::new();
        for e in &j.assignment {
            let x = C::new(element_from_json(&e.re_x)?, element_from_json(&e.im_x)?);
            let y = C::new(element_from_json(&e.re_y)?, element_from_json(&e.im_y)?);
            m.insert(e.label, ComplexPoint::new2(x, y));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageJson {
    pub label: Label,
    pub re_x: ElementJson,
    pub im_x: ElementJson,
    pub re_y: ElementJson,
    pub im_y: ElementJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointMapJson {
    pub assignment: Vec<ImageJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairResult {
    pub a: Label,
    pub b: Label,
    pub role: Role,
    pub declared: TowerElement,
    pub computed: ComplexTowerElement,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointResult {
    pub computed: ComplexTowerElement,
    pub expected: TowerElement,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub unit_ok: bool,
    pub pair_results: Vec<PairResult>,
    pub endpoint_result: EndpointResult,
}

impl VerificationReport {
    /// Unit preservation implies endpoint preservation.
    pub fn consistent(&self) -> bool {
        !self.unit_ok || self.endpoint_result.matches
    }

    pub fn failed_pairs(&self) -> impl Iterator<Item = &PairResult> {
        self.pair_results.iter().filter(|r| !r.matches)
    }
}

fn image(f: &PointMap, l: Label) -> Result<&ComplexPoint, VerifyError> {
    f.get(l).ok_or_else(|| VerifyError::MissingLabel(l.to_string()))
}

/// Compute `φ(f(a), f(b))` for every declared pair and for the endpoints.
/// Nothing is assumed about `f`; the report only records what was observed.
pub fn check_map(s: &WitnessSet, f: &PointMap) -> Result<VerificationReport, VerifyError> {
    if let Some((l, _)) = s.points().find(|(l, _)| f.get(*l).is_none()) {
        return Err(VerifyError::MissingLabel(l.to_string()));
    }
    let mut unit_ok = true;
    let mut pair_results = Vec::with_capacity(s.pairs().len());
    for p in s.pairs() {
        let computed = phi(image(f, p.a)?, image(f, p.b)?)?;
        let matches = computed.is_real() && computed.re == p.dist2;
        if p.role == Role::Unit && !matches {
            unit_ok = false;
        }
        pair_results.push(PairResult { a: p.a, b: p.b, role: p.role, declared: p.dist2.clone(), computed, matches });
    }
    let (x, y) = s.endpoints();
    let (px, py) = s.endpoint_points();
    let expected = px.dist2(py).shrink();
    let computed = phi(image(f, x)?, image(f, y)?)?;
    let matches = computed.is_real() && computed.re == expected;
    Ok(VerificationReport { unit_ok, pair_results, endpoint_result: EndpointResult { computed, expected, matches } })
}

/// Whether `f` satisfies "unit pairs preserved ⇒ endpoint distance preserved".
///
/// Same verdict as [`check_map`]`(..).consistent()`, but derived pairs are
/// skipped and the scan stops at the first unit pair that is not preserved.
pub fn theorem_consistency(s: &WitnessSet, f: &PointMap) -> Result<bool, VerifyError> {
    if let Some((l, _)) = s.points().find(|(l, _)| f.get(*l).is_none()) {
        return Err(VerifyError::MissingLabel(l.to_string()));
    }
    for p in s.unit_pairs() {
        let computed = phi(image(f, p.a)?, image(f, p.b)?)?;
        if !(computed.is_real() && computed.re == p.dist2) {
            return Ok(true);
        }
    }
    let (x, y) = s.endpoints();
    let (px, py) = s.endpoint_points();
    let computed = phi(image(f, x)?, image(f, y)?)?;
    Ok(computed.is_real() && computed.re == px.dist2(py))
}

fn affinely_independent(c: [&ComplexPoint; 3]) -> Result<bool, VerifyError> {
    Ok(!affinely_dependent(&[c[0].clone(), c[1].clone(), c[2].clone()])?)
}

/// A triangle with `φ(c₁,c₂) = φ(c₁,c₃) = φ(c₂,c₃) = s ≠ 0` is affinely independent.
pub fn prop3a(c1: &ComplexPoint, c2: &ComplexPoint, c3: &ComplexPoint, s: &C) -> Result<bool, VerifyError> {
    if s.is_zero() {
        return Err(VerifyError::Precondition("the common φ value must be nonzero".into()));
    }
    for (p, q) in [(c1, c2), (c1, c3), (c2, c3)] {
        if phi(p, q)? != *s {
            return Err(VerifyError::Precondition("the triangle is not φ-equilateral with the given value".into()));
        }
    }
    affinely_independent([c1, c2, c3])
}

fn check_d2(d2: &C) -> Result<(), VerifyError> {
    if d2.is_zero() {
        return Err(VerifyError::Precondition("d² must be nonzero".into()));
    }
    if d2.is_real() && d2.re.sign() != std::cmp::Ordering::Greater {
        return Err(VerifyError::Precondition("real d² must be positive".into()));
    }
    Ok(())
}

/// A triangle with `φ(c₁,c₂) = 2d²`, `φ(c₁,c₃) = 3d²`, `φ(c₂,c₃) = 9d²` is
/// affinely independent.
pub fn prop3b(c1: &ComplexPoint, c2: &ComplexPoint, c3: &ComplexPoint, d2: &C) -> Result<bool, VerifyError> {
    check_d2(d2)?;
    for ((p, q), k) in [((c1, c2), 2), ((c1, c3), 3), ((c2, c3), 9)] {
        if phi(p, q)? != d2.scale(&crate::field::rat(k, 1)) {
            return Err(VerifyError::Precondition(format!("φ values are not (2, 3, 9)·d²; mismatch at factor {}", k)));
        }
    }
    affinely_independent([c1, c2, c3])
}

/// CM determinant of the `(2, 3, 9)·d²` triangle: `−8·d⁴`.
pub fn prop3b_cm(d2: &C) -> Result<C, VerifyError> {
    check_d2(d2)?;
    Ok(two_three_nine_cm(d2))
}

/// `x = y` whenever `φ(x, cᵢ) = φ(y, cᵢ)` for three affinely independent centres.
pub fn prop4_check(
    x: &ComplexPoint,
    y: &ComplexPoint,
    c0: &ComplexPoint,
    c1: &ComplexPoint,
    c2: &ComplexPoint,
) -> Result<bool, VerifyError> {
    if !affinely_independent([c0, c1, c2])? {
        return Err(VerifyError::Precondition("centres are affinely dependent".into()));
    }
    for c in [c0, c1, c2] {
        if phi(x, c)? != phi(y, c)? {
            return Err(VerifyError::Precondition("φ(x, c) != φ(y, c) for some centre".into()));
        }
    }
    Ok(x == y)
}

/// Whether `φ(x, cᵢ) = φ(y, cᵢ)` holds for each centre.
pub fn equal_phi_flags(
    x: &ComplexPoint,
    y: &ComplexPoint,
    centres: &[&ComplexPoint],
) -> Result<Vec<bool>, VerifyError> {
    centres.iter().map(|c| Ok(phi(x, c)? == phi(y, c)?)).collect()
}

/// `⟨x − y, cᵢ − c₀⟩` for `i ≥ 1`; these vanish whenever the `φ` equalities
/// hold for `c₀` and `cᵢ`.
pub fn orthogonality_residuals(x: &ComplexPoint, y: &ComplexPoint, centres: &[&ComplexPoint]) -> Vec<C> {
    let s = x.sub(y);
    centres.iter().skip(1).map(|c| s.dot(&c.sub(centres[0]))).collect()
}

/// An affine map `p ↦ M·p + v` of `C²`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub m: [[C; 2]; 2],
    pub v: [C; 2],
}

impl AffineMap {
    pub fn linear(m: [[C; 2]; 2]) -> AffineMap {
        AffineMap { m, v: [C::zero(), C::zero()] }
    }

    /// `[[a, −b], [b, a]]`; orthogonal when `a² + b² = 1`.
    pub fn rotation(a: C, b: C) -> AffineMap {
        AffineMap::linear([[a.clone(), -&b], [b, a]])
    }

    /// `[[a, b], [b, −a]]`; orthogonal when `a² + b² = 1`.
    pub fn reflection(a: C, b: C) -> AffineMap {
        AffineMap::linear([[a.clone(), b.clone()], [b, -&a]])
    }

    pub fn translation(v: [C; 2]) -> AffineMap {
        AffineMap { m: [[C::one(), C::zero()], [C::zero(), C::one()]], v }
    }

    pub fn scaling(k: C) -> AffineMap {
        AffineMap::linear([[k.clone(), C::zero()], [C::zero(), k]])
    }

    pub fn apply(&self, p: &ComplexPoint) -> ComplexPoint {
        let (x, y) = (&p.coords[0], &p.coords[1]);
        let row = |r: &[C; 2], t: &C| &(&(&r[0] * x) + &(&r[1] * y)) + t;
        ComplexPoint::new2(row(&self.m[0], &self.v[0]), row(&self.m[1], &self.v[1]))
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &AffineMap) -> AffineMap {
        let m = &self.m;
        let e = |i: usize, j: usize| &(&m[i][0] * &g.m[0][j]) + &(&m[i][1] * &g.m[1][j]);
        let v = |i: usize| &(&(&m[i][0] * &g.v[0]) + &(&m[i][1] * &g.v[1])) + &self.v[i];
        AffineMap { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]], v: [v(0), v(1)] }
    }

    /// `MᵀM = I`, i.e. the map preserves `φ`.
    pub fn is_orthogonal(&self) -> bool {
        let m = &self.m;
        let col = |i: usize, j: usize| &(&m[0][i] * &m[0][j]) + &(&m[1][i] * &m[1][j]);
        col(0, 0).is_one() && col(1, 1).is_one() && col(0, 1).is_zero()
    }

    pub fn on(&self, s: &WitnessSet) -> PointMap {
        PointMap::tabulate(s, |p| self.apply(p))
    }
}

/// `(a, b) = ((1 − m²)/(1 + m²), 2m/(1 + m²))`, so that `a² + b² = 1`.
/// Returns `None` when `m = ±i`.
pub fn orthogonal_parameters(m: &C) -> Option<(C, C)> {
    let m2 = m.square();
    let inv = (&C::one() + &m2).inverse().ok()?;
    Some((&(&C::one() - &m2) * &inv, &(m + m) * &inv))
}

fn gaussian(rng: &mut ChaCha8Rng, num: i64, den: i64) -> C {
    C::gaussian(rng.gen_range(-num..=num), rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// Deterministic exact `φ`-isometry `p ↦ Q·p + v` with `QᵀQ = I`, built from
/// a random Gaussian-rational parameter (so `Q` may be non-real) and a random
/// Gaussian-rational translation.
pub fn generate_isometry(seed: u64) -> AffineMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = loop {
        if let Some(ab) = orthogonal_parameters(&gaussian(&mut rng, 6, 6)) {
            break ab;
        }
    };
    let q = if rng.gen_bool(0.5) { AffineMap::rotation(a, b) } else { AffineMap::reflection(a, b) };
    let v = [gaussian(&mut rng, 20, 9), gaussian(&mut rng, 20, 9)];
    AffineMap::translation(v).compose(&q)
}

/// The cross-check map from the examples: a real rotation by `(3/5, 4/5)`, a
/// complex translation, then the non-real orthogonal map `[[5/4, −3i/4], [3i/4, 5/4]]`.
pub fn reference_isometry() -> AffineMap {
    let rot = AffineMap::rotation(C::gaussian(3, 0, 5), C::gaussian(4, 0, 5));
    let shift = AffineMap::translation([C::gaussian(0, 7, 1), C::gaussian(0, -1, 3)]);
    let complex = AffineMap::rotation(C::gaussian(5, 0, 4), C::gaussian(0, 3, 4));
    complex.compose(&shift.compose(&rot))
}

/// CM determinant of three points of `C²`, for reporting.
pub fn triangle_cm(c: [&ComplexPoint; 3]) -> Result<C, VerifyError> {
    Ok(cm_det(&[c[0].clone(), c[1].clone(), c[2].clone()])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::{build_canonical, DistanceWord};

    #[test]
    fn orthogonal_parameter_examples() {
        let (a, b) = orthogonal_parameters(&C::gaussian(0, 1, 3)).unwrap();
        assert_eq!(a, C::gaussian(5, 0, 4));
        assert_eq!(b, C::gaussian(0, 3, 4));
        assert!(orthogonal_parameters(&C::i()).is_none());
        assert!(AffineMap::rotation(C::gaussian(3, 0, 5), C::gaussian(4, 0, 5)).is_orthogonal());
        assert!(reference_isometry().is_orthogonal());
        assert!(!AffineMap::scaling(C::from(2)).is_orthogonal());
    }

    #[test]
    fn generated_isometries_are_orthogonal_and_deterministic() {
        for seed in 0..50 {
            let g = generate_isometry(seed);
            assert!(g.is_orthogonal());
            assert_eq!(g, generate_isometry(seed));
        }
        assert_ne!(generate_isometry(1), generate_isometry(2));
    }

    #[test]
    fn maps_on_sqrt3_set() {
        let s = build_canonical(&DistanceWord::power(0, 1)).unwrap();
        let id = check_map(&s, &PointMap::identity(&s)).unwrap();
        assert!(id.unit_ok && id.endpoint_result.matches);
        assert!(id.pair_results.iter().all(|r| r.matches));
        let iso = check_map(&s, &reference_isometry().on(&s)).unwrap();
        assert!(iso.unit_ok && iso.consistent());
        let scaled = check_map(&s, &AffineMap::scaling(C::from(2)).on(&s)).unwrap();
        assert!(!scaled.unit_ok);
        assert!(scaled.consistent());
        let mut partial = PointMap::identity(&s);
        partial.assignment.remove(&s.endpoints().0);
        assert!(matches!(check_map(&s, &partial), Err(VerifyError::MissingLabel(_))));
    }
}
