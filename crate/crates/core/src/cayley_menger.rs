//! Squared complex distance and Cayley-Menger determinants.
//!
//! For points `c₁ … c_m` of `Cⁿ` the Cayley-Menger determinant is the
//! determinant of the `(m+1)×(m+1)` matrix whose first row and column are
//! `(0, 1, …, 1)` and whose remaining block is `φₙ(cᵢ, cⱼ)`. With `m = n+1`
//! it vanishes exactly on affinely dependent tuples; with `m ≥ n+2` it always
//! vanishes. The lemma determinants below treat one entry as an unknown `t`
//! and recover the admissible images of a pair's squared distance.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::CmError;
use crate::field::{adjoin_sqrt, rat, ComplexTowerElement, Tower, TowerElement};
use crate::geometry::ComplexPoint;
use crate::matrix::{det_bareiss, ExactDiv, RefRing};
use crate::poly::UnivariatePoly;

/// `φₙ(p, q) = Σ (pᵢ − qᵢ)²`.
pub fn phi(p: &ComplexPoint, q: &ComplexPoint) -> Result<ComplexTowerElement, CmError> {
    if p.dim() != q.dim() {
        return Err(CmError::DimensionMismatch(p.dim(), q.dim()));
    }
    let mut acc = ComplexTowerElement::zero();
    for (a, b) in p.coords.iter().zip(&q.coords) {
        let d = a.checked_sub(b)?;
        acc = acc.checked_add(&d.square())?;
    }
    Ok(acc)
}

/// Symmetric matrix of pairwise `φ` values with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SquaredDistanceMatrix {
    entries: Vec<Vec<ComplexTowerElement>>,
}

impl SquaredDistanceMatrix {
    pub fn new(entries: Vec<Vec<ComplexTowerElement>>) -> Result<SquaredDistanceMatrix, CmError> {
        let m = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != m {
                return Err(CmError::DimensionMismatch(row.len(), m));
            }
            if !row[i].is_zero() {
                return Err(CmError::UnsupportedConfiguration(format!("diagonal entry {} is nonzero", i)));
            }
            for j in 0..i {
                if row[j] != entries[j][i] {
                    return Err(CmError::UnsupportedConfiguration(format!("entries ({}, {}) not symmetric", i, j)));
                }
            }
        }
        Ok(SquaredDistanceMatrix { entries })
    }

    pub fn from_points(points: &[ComplexPoint]) -> Result<SquaredDistanceMatrix, CmError> {
        let m = points.len();
        let mut entries = vec![vec![ComplexTowerElement::zero(); m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let v = phi(&points[i], &points[j])?;
                entries[i][j] = v.clone();
                entries[j][i] = v;
            }
        }
        Ok(SquaredDistanceMatrix { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &ComplexTowerElement {
        &self.entries[i][j]
    }

    pub fn determinant(&self) -> ComplexTowerElement {
        det_bareiss(bordered(&self.entries))
    }
}

/// Border a `φ` block with the `(0, 1, …, 1)` row and column.
pub fn bordered<T: Clone + Zero + One>(block: &[Vec<T>]) -> Vec<Vec<T>> {
    let m = block.len();
    let mut out = Vec::with_capacity(m + 1);
    let mut top = vec![T::one(); m + 1];
    top[0] = T::zero();
    out.push(top);
    for row in block {
        let mut r = Vec::with_capacity(m + 1);
        r.push(T::one());
        r.extend(row.iter().cloned());
        out.push(r);
    }
    out
}

fn common_dim(points: &[ComplexPoint]) -> Result<usize, CmError> {
    let n = points.first().map_or(0, ComplexPoint::dim);
    match points.iter().find(|p| p.dim() != n) {
        Some(p) => Err(CmError::DimensionMismatch(n, p.dim())),
        None => Ok(n),
    }
}

/// Cayley-Menger determinant of at least two points.
pub fn cm_det(points: &[ComplexPoint]) -> Result<ComplexTowerElement, CmError> {
    if points.len() < 2 {
        return Err(CmError::WrongPointCount { expected: 2, got: points.len() });
    }
    common_dim(points)?;
    Ok(SquaredDistanceMatrix::from_points(points)?.determinant())
}

fn require_simplex(points: &[ComplexPoint]) -> Result<usize, CmError> {
    let n = common_dim(points)?;
    if points.len() != n + 1 {
        return Err(CmError::WrongPointCount { expected: n + 1, got: points.len() });
    }
    Ok(n)
}

/// `n+1` points of `Cⁿ` are affinely dependent iff their CM determinant vanishes.
pub fn affinely_dependent(points: &[ComplexPoint]) -> Result<bool, CmError> {
    require_simplex(points)?;
    Ok(cm_det(points)?.is_zero())
}

/// Determinant of the coordinate matrix with a trailing column of ones.
pub fn affine_det(points: &[ComplexPoint]) -> Result<ComplexTowerElement, CmError> {
    require_simplex(points)?;
    let m: Vec<Vec<ComplexTowerElement>> = points
        .iter()
        .map(|p| {
            let mut row = p.coords.clone();
            row.push(ComplexTowerElement::one());
            row
        })
        .collect();
    Ok(det_bareiss(m))
}

/// Checks `affine_det² = ((−1)^(n+1) / 2ⁿ) · cm_det` exactly.
pub fn verify_prop1_identity(points: &[ComplexPoint]) -> Result<bool, CmError> {
    let n = require_simplex(points)?;
    let lhs = affine_det(points)?.square();
    let sign = if (n + 1) % 2 == 0 { 1 } else { -1 };
    let factor = rat(sign, 1i64 << n);
    let rhs = cm_det(points)?.scale(&factor);
    Ok(lhs == rhs)
}

/// True iff the CM determinant of `n+k` points (`k ≥ 2`) vanishes.
pub fn verify_prop2(points: &[ComplexPoint]) -> Result<bool, CmError> {
    let n = common_dim(points)?;
    if points.len() < n + 2 {
        return Err(CmError::WrongPointCount { expected: n + 2, got: points.len() });
    }
    Ok(cm_det(points)?.is_zero())
}

/// CM determinant of a triangle with all three `φ` values equal to `s`.
pub fn equilateral_cm(s: &ComplexTowerElement) -> ComplexTowerElement {
    let z = ComplexTowerElement::zero();
    let block = vec![
        vec![z.clone(), s.clone(), s.clone()],
        vec![s.clone(), z.clone(), s.clone()],
        vec![s.clone(), s.clone(), z],
    ];
    det_bareiss(bordered(&block))
}

/// CM determinant of a triangle with `φ` values `2d², 3d², 9d²`.
pub fn two_three_nine_cm(d2: &ComplexTowerElement) -> ComplexTowerElement {
    let z = ComplexTowerElement::zero();
    let a = d2.scale(&rat(2, 1));
    let b = d2.scale(&rat(3, 1));
    let c = d2.scale(&rat(9, 1));
    let block = vec![vec![z.clone(), a.clone(), b.clone()], vec![a, z.clone(), c.clone()], vec![b, c, z]];
    det_bareiss(bordered(&block))
}

/// Entry of a `φ` block that may be the unknown `t`.
#[derive(Clone, Debug, PartialEq)]
pub enum CmEntry {
    Known(TowerElement),
    T,
}

impl From<TowerElement> for CmEntry {
    fn from(v: TowerElement) -> CmEntry {
        CmEntry::Known(v)
    }
}

/// A `φ` block with exactly one symmetric pair replaced by `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicCmMatrix {
    entries: Vec<Vec<CmEntry>>,
}

impl SymbolicCmMatrix {
    pub fn new(entries: Vec<Vec<CmEntry>>) -> Result<SymbolicCmMatrix, CmError> {
        let m = entries.len();
        let mut symbolic = 0;
        for (i, row) in entries.iter().enumerate() {
            if row.len() != m {
                return Err(CmError::DimensionMismatch(row.len(), m));
            }
            match &row[i] {
                CmEntry::Known(v) if v.is_zero() => {}
                _ => return Err(CmError::UnsupportedConfiguration(format!("diagonal entry {} must be 0", i))),
            }
            for j in 0..i {
                if row[j] != entries[j][i] {
                    return Err(CmError::UnsupportedConfiguration(format!("entries ({}, {}) not symmetric", i, j)));
                }
                if row[j] == CmEntry::T {
                    symbolic += 1;
                }
            }
        }
        if symbolic != 1 {
            return Err(CmError::UnsupportedConfiguration(format!(
                "exactly one symmetric pair must be symbolic, found {}",
                symbolic
            )));
        }
        Ok(SymbolicCmMatrix { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// The numeric block with `t` replaced by `value`.
    pub fn substitute(&self, value: &TowerElement) -> Vec<Vec<TowerElement>> {
        self.map(|e| match e {
            CmEntry::Known(v) => v.clone(),
            CmEntry::T => value.clone(),
        })
    }

    fn as_polys(&self) -> Vec<Vec<UnivariatePoly>> {
        self.map(|e| match e {
            CmEntry::Known(v) => UnivariatePoly::constant(v.clone()),
            CmEntry::T => UnivariatePoly::t(),
        })
    }

    fn map<T>(&self, f: impl Fn(&CmEntry) -> T) -> Vec<Vec<T>> {
        self.entries.iter().map(|row| row.iter().map(&f).collect()).collect()
    }
}

fn bordered_det<T>(block: &[Vec<T>]) -> T
where
    T: Clone + Zero + One + ExactDiv,
    for<'a> &'a T: RefRing<T>,
{
    det_bareiss(bordered(block))
}

/// CM determinant as a polynomial in `t`.
///
/// Computed by Bareiss elimination over the polynomial ring and cross-checked
/// against interpolation through three exact evaluations.
pub fn cm_det_symbolic(m: &SymbolicCmMatrix) -> Result<UnivariatePoly, CmError> {
    let direct = bordered_det(&m.as_polys());
    let samples: Vec<(TowerElement, TowerElement)> = (0..3)
        .map(|k| {
            let t0 = TowerElement::from_integer(k);
            let v = bordered_det(&m.substitute(&t0));
            (t0, v)
        })
        .collect();
    let interpolated = UnivariatePoly::interpolate(&samples);
    if direct != interpolated {
        return Err(CmError::RouteMismatch);
    }
    Ok(direct)
}

/// True iff `p = leading · Π (t − root)` coefficient-wise.
pub fn check_factorization(p: &UnivariatePoly, roots: &[TowerElement], leading: &TowerElement) -> bool {
    *p == UnivariatePoly::from_roots(leading, roots)
}

/// The four symbolic determinants that drive the witness constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lemma {
    /// `√3·d` from two rhombi.
    One,
    /// `2·d` from three unit triangles.
    Three,
    /// `√(a² − b²)` from a kite.
    Four,
    /// `(2√2/3)·d` from two kites with `√3`, `√2` and `3` sides.
    Six,
}

impl Lemma {
    pub const ALL: [Lemma; 4] = [Lemma::One, Lemma::Three, Lemma::Four, Lemma::Six];

    pub fn number(self) -> u8 {
        match self {
            Lemma::One => 1,
            Lemma::Three => 3,
            Lemma::Four => 4,
            Lemma::Six => 6,
        }
    }

    pub fn from_number(n: u8) -> Option<Lemma> {
        Lemma::ALL.into_iter().find(|l| l.number() == n)
    }

    /// The factored form the determinant must take.
    pub fn formula(self) -> &'static str {
        match self {
            Lemma::One => "2d²t(3d²−t)",
            Lemma::Three => "3d⁴(t−4d²)²",
            Lemma::Four => "−8b²(t+b²−a²)²",
            Lemma::Six => "2d²t(8d²−9t)",
        }
    }

    /// The symbolic `φ` block. `a` is only used by Lemma 4, where `d` plays `b`.
    pub fn matrix(self, d: &TowerElement, a: &TowerElement) -> SymbolicCmMatrix {
        let k = |c: i64| CmEntry::Known(d.square().scale(&rat(c, 1)));
        let z = || CmEntry::Known(TowerElement::zero());
        let t = || CmEntry::T;
        let rows = match self {
            Lemma::One => vec![
                vec![z(), k(1), k(1), t()],
                vec![k(1), z(), k(1), k(1)],
                vec![k(1), k(1), z(), k(1)],
                vec![t(), k(1), k(1), z()],
            ],
            Lemma::Three => vec![
                vec![z(), k(1), k(1), k(3), t()],
                vec![k(1), z(), k(1), k(1), k(1)],
                vec![k(1), k(1), z(), k(1), k(3)],
                vec![k(3), k(1), k(1), z(), k(1)],
                vec![t(), k(1), k(3), k(1), z()],
            ],
            Lemma::Four => {
                let a2 = || CmEntry::Known(a.square());
                vec![
                    vec![z(), k(1), k(1), t()],
                    vec![k(1), z(), k(4), a2()],
                    vec![k(1), k(4), z(), a2()],
                    vec![t(), a2(), a2(), z()],
                ]
            }
            Lemma::Six => vec![
                vec![z(), k(3), k(2), t()],
                vec![k(3), z(), k(9), k(3)],
                vec![k(2), k(9), z(), k(2)],
                vec![t(), k(3), k(2), z()],
            ],
        };
        SymbolicCmMatrix::new(rows).expect("lemma matrices are well formed")
    }

    /// `(leading, roots)` of the expected factorization.
    pub fn expected(self, d: &TowerElement, a: &TowerElement) -> (TowerElement, Vec<TowerElement>) {
        let d2 = d.square();
        let zero = TowerElement::zero();
        match self {
            Lemma::One => (d2.scale(&rat(-2, 1)), vec![zero, d2.scale(&rat(3, 1))]),
            Lemma::Three => {
                let r = d2.scale(&rat(4, 1));
                (d2.square().scale(&rat(3, 1)), vec![r.clone(), r])
            }
            Lemma::Four => {
                let r = &a.square() - &d2;
                (d2.scale(&rat(-8, 1)), vec![r.clone(), r])
            }
            Lemma::Six => (d2.scale(&rat(-18, 1)), vec![zero, d2.scale(&rat(8, 9))]),
        }
    }

    /// Five exact parameter pairs `(d, a)` over `Q(√2, √3)`.
    pub fn sample_parameters(self) -> Vec<(TowerElement, TowerElement)> {
        let (t2, s2) = adjoin_sqrt(&Tower::rational(), &TowerElement::from_integer(2)).expect("√2");
        let (_, s3) = adjoin_sqrt(&t2, &TowerElement::from_integer(3)).expect("√3");
        let q = TowerElement::from_ratio;
        let ds = [q(1, 1), s2.clone(), s3.clone(), &q(1, 1) + &s3, s2.scale(&rat(2, 3))];
        match self {
            Lemma::Four => vec![
                (q(1, 1), s3.clone()),
                (q(1, 1), q(2, 1)),
                (s2.clone(), q(3, 1)),
                (s2.clone(), &q(1, 1) + &s3),
                (s2.scale(&rat(2, 3)), q(5, 2)),
            ],
            _ => ds.into_iter().map(|d| (d, TowerElement::zero())).collect(),
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lemma {}", self.number())
    }
}

/// One evaluated lemma identity.
#[derive(Clone, Debug)]
pub struct LemmaInstance {
    pub lemma: Lemma,
    pub d: TowerElement,
    pub a: TowerElement,
    pub polynomial: UnivariatePoly,
    pub passed: bool,
}

/// Evaluate a lemma determinant at its five sample parameters.
pub fn check_lemma(lemma: Lemma) -> Result<Vec<LemmaInstance>, CmError> {
    lemma
        .sample_parameters()
        .into_iter()
        .map(|(d, a)| {
            let polynomial = cm_det_symbolic(&lemma.matrix(&d, &a))?;
            let (leading, roots) = lemma.expected(&d, &a);
            let passed = check_factorization(&polynomial, &roots, &leading);
            Ok(LemmaInstance { lemma, d, a, polynomial, passed })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> TowerElement {
        TowerElement::from_integer(n)
    }

    fn real2(x: TowerElement, y: TowerElement) -> ComplexPoint {
        ComplexPoint::real(&[x, y])
    }

    #[test]
    fn phi_examples() {
        let (_, s3) = adjoin_sqrt(&Tower::rational(), &int(3)).unwrap();
        let o = real2(int(0), int(0));
        assert_eq!(phi(&o, &real2(s3, int(0))).unwrap(), ComplexTowerElement::from(3));
        assert!(phi(&o, &o).unwrap().is_zero());
        let p = ComplexPoint::new2(ComplexTowerElement::gaussian(5, 0, 4), ComplexTowerElement::gaussian(0, 3, 4));
        assert_eq!(phi(&o, &p).unwrap(), ComplexTowerElement::from(1));
        let p3 = ComplexPoint::real(&[int(0), int(0), int(0)]);
        assert_eq!(phi(&o, &p3), Err(CmError::DimensionMismatch(2, 3)));
    }

    #[test]
    fn collinear_triangle_vanishes() {
        let pts = [real2(int(0), int(0)), real2(int(1), int(0)), real2(int(2), int(0))];
        assert!(cm_det(&pts).unwrap().is_zero());
        assert!(affinely_dependent(&pts).unwrap());
    }

    #[test]
    fn named_triangles() {
        assert_eq!(equilateral_cm(&ComplexTowerElement::from(1)), ComplexTowerElement::from(-3));
        assert_eq!(two_three_nine_cm(&ComplexTowerElement::from(1)), ComplexTowerElement::from(-8));
        assert_eq!(two_three_nine_cm(&ComplexTowerElement::from(4)), ComplexTowerElement::from(-128));
    }

    #[test]
    fn prop1_right_triangle() {
        let pts = [real2(int(0), int(0)), real2(int(1), int(0)), real2(int(0), int(1))];
        assert_eq!(affine_det(&pts).unwrap(), ComplexTowerElement::from(1));
        assert_eq!(cm_det(&pts).unwrap(), ComplexTowerElement::from(-4));
        assert!(verify_prop1_identity(&pts).unwrap());
        assert!(!affinely_dependent(&pts).unwrap());
    }

    #[test]
    fn wrong_counts() {
        let pts = [real2(int(0), int(0)), real2(int(1), int(0))];
        assert!(matches!(affinely_dependent(&pts), Err(CmError::WrongPointCount { expected: 3, got: 2 })));
        assert!(matches!(verify_prop2(&pts), Err(CmError::WrongPointCount { expected: 4, got: 2 })));
    }

    #[test]
    fn symbolic_rejects_two_unknown_pairs() {
        let z = || CmEntry::Known(int(0));
        let o = || CmEntry::Known(int(1));
        let m = vec![vec![z(), CmEntry::T, CmEntry::T], vec![CmEntry::T, z(), o()], vec![CmEntry::T, o(), z()]];
        assert!(matches!(SymbolicCmMatrix::new(m), Err(CmError::UnsupportedConfiguration(_))));
    }

    #[test]
    fn lemma_one_at_unit_d() {
        let p = cm_det_symbolic(&Lemma::One.matrix(&int(1), &int(0))).unwrap();
        assert_eq!(p, UnivariatePoly::new(vec![int(0), int(6), int(-2)]));
        assert!(check_factorization(&p, &[int(0), int(3)], &int(-2)));
    }

    #[test]
    fn lemma_three_and_six_at_unit_d() {
        let p3 = cm_det_symbolic(&Lemma::Three.matrix(&int(1), &int(0))).unwrap();
        assert!(check_factorization(&p3, &[int(4), int(4)], &int(3)));
        let p6 = cm_det_symbolic(&Lemma::Six.matrix(&int(1), &int(0))).unwrap();
        assert_eq!(p6, UnivariatePoly::new(vec![int(0), int(16), int(-18)]));
    }

    #[test]
    fn lemma_four_printed_example() {
        let (_, s3) = adjoin_sqrt(&Tower::rational(), &int(3)).unwrap();
        let p = cm_det_symbolic(&Lemma::Four.matrix(&int(1), &s3)).unwrap();
        assert!(check_factorization(&p, &[int(2), int(2)], &int(-8)));
        assert!(!check_factorization(&UnivariatePoly::zero(), &[int(2)], &int(-8)));
    }
}
