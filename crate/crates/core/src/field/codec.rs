//! JSON encoding of tower elements.
//!
//! An element is `{"tower": [radicand, ...], "coeffs": tree}` where each
//! radicand is itself an encoded element of the prefix tower (innermost
//! first) and `tree` is either a `"num/den"` string (height 0) or a pair
//! `[a, b]` of trees for `a + b·g` with `g` the outermost generator.

use std::cell::RefCell;
use std::collections::HashMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::complex::ComplexTowerElement;
use super::tower::{Tower, TowerElement};
use crate::error::FieldError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffTree {
    Leaf(String),
    Node(Box<CoeffTree>, Box<CoeffTree>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub tower: Vec<ElementJson>,
    pub coeffs: CoeffTree,
}

pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let bad = || FieldError::Decode(format!("bad rational {:?}", s));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Coefficient tree of `x` relative to its own tower.
pub fn coeff_tree(x: &TowerElement) -> CoeffTree {
    fn build(c: &[BigRational]) -> CoeffTree {
        if c.len() == 1 {
            return CoeffTree::Leaf(format_rational(&c[0]));
        }
        let (a, b) = c.split_at(c.len() / 2);
        CoeffTree::Node(Box::new(build(a)), Box::new(build(b)))
    }
    build(&x.coefficients())
}

/// Decode a coefficient tree against a known tower.
pub fn from_coeff_tree(tower: &Tower, tree: &CoeffTree) -> Result<TowerElement, FieldError> {
    fn flatten(t: &CoeffTree, depth: usize, out: &mut Vec<BigRational>) -> Result<(), FieldError> {
        match (t, depth) {
            (CoeffTree::Leaf(s), 0) => {
                out.push(parse_rational(s)?);
                Ok(())
            }
            (CoeffTree::Node(a, b), d) if d > 0 => {
                flatten(a, d - 1, out)?;
                flatten(b, d - 1, out)
            }
            _ => Err(FieldError::Decode("coefficient tree depth does not match tower height".into())),
        }
    }
    let mut flat = Vec::with_capacity(1 << tower.height());
    flatten(tree, tower.height(), &mut flat)?;
    TowerElement::from_coefficients(tower, &flat)
}

pub fn tower_to_json(tower: &Tower) -> Vec<ElementJson> {
    tower.radicands().iter().map(element_to_json).collect()
}

thread_local! {
    static TOWER_CACHE: RefCell<HashMap<String, Tower>> = RefCell::new(HashMap::new());
}

/// Rebuild a tower, re-certifying every radicand (positive, not a square).
pub fn tower_from_json(rads: &[ElementJson]) -> Result<Tower, FieldError> {
    let key = serde_json::to_string(rads).map_err(|e| FieldError::Decode(e.to_string()))?;
    if let Some(t) = TOWER_CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(t);
    }
    let mut tower = Tower::rational();
    for r in rads {
        let rad = element_from_json(r)?;
        if *rad.tower() != tower {
            return Err(FieldError::Decode("radicand does not live in its prefix tower".into()));
        }
        tower = tower.extend(&rad)?;
    }
    TOWER_CACHE.with(|c| c.borrow_mut().insert(key, tower.clone()));
    Ok(tower)
}

pub fn element_to_json(x: &TowerElement) -> ElementJson {
    ElementJson { tower: tower_to_json(x.tower()), coeffs: coeff_tree(x) }
}

pub fn element_from_json(j: &ElementJson) -> Result<TowerElement, FieldError> {
    let tower = tower_from_json(&j.tower)?;
    from_coeff_tree(&tower, &j.coeffs)
}

impl Serialize for TowerElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        element_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TowerElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<TowerElement, D::Error> {
        let j = ElementJson::deserialize(d)?;
        element_from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: TowerElement,
    im: TowerElement,
}

impl Serialize for ComplexTowerElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ComplexJson { re: self.re.clone(), im: self.im.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexTowerElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<ComplexTowerElement, D::Error> {
        let j = ComplexJson::deserialize(d)?;
        Ok(ComplexTowerElement::new(j.re, j.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::tower::adjoin_sqrt;

    #[test]
    fn encodes_nested_tree() {
        let (t3, s3) = adjoin_sqrt(&Tower::rational(), &TowerElement::from_integer(3)).unwrap();
        let (_, g) = adjoin_sqrt(&t3, &TowerElement::from_ratio(11, 12)).unwrap();
        let x = &s3 + &g;
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(
            json,
            r#"{"tower":[{"tower":[],"coeffs":"3/1"},{"tower":[{"tower":[],"coeffs":"3/1"}],"coeffs":["33/1","0/1"]}],"coeffs":[["0/1","1/1"],["1/6","0/1"]]}"#
        );
        let back: TowerElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn rejects_square_radicand() {
        let json = r#"{"tower":[{"tower":[],"coeffs":"4/1"}],"coeffs":["1/1","0/1"]}"#;
        assert!(serde_json::from_str::<TowerElement>(json).is_err());
    }

    #[test]
    fn rejects_depth_mismatch() {
        let json = r#"{"tower":[{"tower":[],"coeffs":"2/1"}],"coeffs":"1/1"}"#;
        assert!(serde_json::from_str::<TowerElement>(json).is_err());
    }
}
