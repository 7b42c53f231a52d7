//! JSON, DOT and SVG renderings of witness sets.
//!
//! JSON is exact and round-trips; every tower element is a coefficient tree
//! relative to the set's tower, which is stored once at the top. The `approx_*`
//! fields and the SVG drawing are decimal approximations for display only.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::set::{Constraint, Label, NodeId, ProvenanceNode, RequiredPair, Role, Rule, WitnessSet};
use super::DistanceWord;
use crate::error::WitnessError;
use crate::field::codec::{coeff_tree, from_coeff_tree, tower_from_json, tower_to_json, CoeffTree, ElementJson};
use crate::field::{approximate, Tower, TowerElement};
use crate::geometry::ExactPoint2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub label: Label,
    pub x: CoeffTree,
    pub y: CoeffTree,
    pub approx_x: f64,
    pub approx_y: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub a: Label,
    pub b: Label,
    pub dist2: CoeffTree,
    pub role: Role,
    pub provenance_id: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub a: Label,
    pub b: Label,
    pub word: DistanceWord,
    pub dist2: CoeffTree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub name: String,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: NodeId,
    pub rule: Rule,
    pub word: DistanceWord,
    pub endpoints: [Label; 2],
    pub vertices: Vec<VertexJson>,
    pub constraints: Vec<ConstraintJson>,
    pub conclusions: Vec<ConstraintJson>,
    pub children: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceJson {
    pub root: NodeId,
    pub nodes: Vec<NodeJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSetJson {
    pub word: DistanceWord,
    pub tower: Vec<ElementJson>,
    pub points: Vec<PointJson>,
    pub endpoints: [Label; 2],
    pub pairs: Vec<PairJson>,
    pub provenance: ProvenanceJson,
}

/// Decimal approximation rounded to 6 places.
pub fn approx6(x: &TowerElement) -> f64 {
    let iv = approximate(x, 8);
    let mid: BigRational = (iv.lo() + iv.hi()) / BigRational::from_integer(2.into());
    let v = mid.to_f64().unwrap_or(f64::NAN);
    (v * 1e6).round() / 1e6
}

fn tree_in(x: &TowerElement, tower: &Tower) -> Result<CoeffTree, WitnessError> {
    Ok(coeff_tree(&x.embed(tower)?))
}

fn constraint_json(c: &Constraint, tower: &Tower) -> Result<ConstraintJson, WitnessError> {
    Ok(ConstraintJson { a: c.a, b: c.b, word: c.word.clone(), dist2: tree_in(&c.dist2, tower)? })
}

fn constraint_from(c: &ConstraintJson, tower: &Tower) -> Result<Constraint, WitnessError> {
    Ok(Constraint { a: c.a, b: c.b, word: c.word.clone(), dist2: from_coeff_tree(tower, &c.dist2)?.shrink() })
}

impl WitnessSet {
    pub fn to_json_value(&self) -> Result<WitnessSetJson, WitnessError> {
        let t = self.tower();
        let points = self
            .points()
            .map(|(label, p)| {
                Ok(PointJson {
                    label,
                    x: tree_in(&p.x, t)?,
                    y: tree_in(&p.y, t)?,
                    approx_x: approx6(&p.x),
                    approx_y: approx6(&p.y),
                })
            })
            .collect::<Result<_, WitnessError>>()?;
        let pairs = self
            .pairs()
            .iter()
            .map(|p| {
                Ok(PairJson { a: p.a, b: p.b, dist2: tree_in(&p.dist2, t)?, role: p.role, provenance_id: p.provenance })
            })
            .collect::<Result<_, WitnessError>>()?;
        let nodes = self
            .nodes()
            .map(|n| {
                Ok(NodeJson {
                    id: n.id,
                    rule: n.rule,
                    word: n.word.clone(),
                    endpoints: [n.endpoints.0, n.endpoints.1],
                    vertices: n
                        .vertices
                        .iter()
                        .map(|(name, label)| VertexJson { name: name.clone(), label: *label })
                        .collect(),
                    constraints: n.constraints.iter().map(|c| constraint_json(c, t)).collect::<Result<_, _>>()?,
                    conclusions: n.conclusions.iter().map(|c| constraint_json(c, t)).collect::<Result<_, _>>()?,
                    children: n.children.clone(),
                })
            })
            .collect::<Result<_, WitnessError>>()?;
        let (x, y) = self.endpoints();
        Ok(WitnessSetJson {
            word: self.word().clone(),
            tower: tower_to_json(t),
            points,
            endpoints: [x, y],
            pairs,
            provenance: ProvenanceJson { root: self.root(), nodes },
        })
    }

    pub fn to_json(&self) -> Result<String, WitnessError> {
        serde_json::to_string_pretty(&self.to_json_value()?).map_err(|e| WitnessError::Malformed(e.to_string()))
    }

    /// Decode a set. Labels are checked against coordinates; call
    /// [`WitnessSet::validate`] to check the mathematics.
    pub fn from_json_value(j: &WitnessSetJson) -> Result<WitnessSet, WitnessError> {
        let tower = tower_from_json(&j.tower)?;
        let points = j
            .points
            .iter()
            .map(|p| Ok((p.label, ExactPoint2::new(from_coeff_tree(&tower, &p.x)?, from_coeff_tree(&tower, &p.y)?))))
            .collect::<Result<Vec<_>, WitnessError>>()?;
        let pairs = j
            .pairs
            .iter()
            .map(|p| {
                Ok(RequiredPair {
                    a: p.a,
                    b: p.b,
                    dist2: from_coeff_tree(&tower, &p.dist2)?,
                    role: p.role,
                    provenance: p.provenance_id,
                })
            })
            .collect::<Result<Vec<_>, WitnessError>>()?;
        let nodes = j
            .provenance
            .nodes
            .iter()
            .map(|n| {
                let node = ProvenanceNode::new(
                    n.rule,
                    n.word.clone(),
                    (n.endpoints[0], n.endpoints[1]),
                    n.vertices.iter().map(|v| (v.name.clone(), v.label)).collect(),
                    n.constraints.iter().map(|c| constraint_from(c, &tower)).collect::<Result<_, _>>()?,
                    n.conclusions.iter().map(|c| constraint_from(c, &tower)).collect::<Result<_, _>>()?,
                    n.children.clone(),
                );
                if node.id != n.id {
                    return Err(WitnessError::Malformed(format!("node id {} does not match its content", n.id)));
                }
                Ok(node)
            })
            .collect::<Result<Vec<_>, WitnessError>>()?;
        WitnessSet::from_parts(
            j.word.clone(),
            tower,
            points,
            (j.endpoints[0], j.endpoints[1]),
            pairs,
            nodes,
            j.provenance.root,
        )
    }

    pub fn from_json(s: &str) -> Result<WitnessSet, WitnessError> {
        let j: WitnessSetJson = serde_json::from_str(s).map_err(|e| WitnessError::Malformed(e.to_string()))?;
        WitnessSet::from_json_value(&j)
    }

    /// Graphviz rendering: unit pairs as solid edges, derived pairs dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph witness {{");
        let _ = writeln!(out, "  label=\"{}\";", self.word());
        let _ = writeln!(out, "  node [shape=point];");
        let (x, y) = self.endpoints();
        for (label, p) in self.points() {
            let extra = if label == x || label == y { ", shape=circle, width=0.1" } else { "" };
            let _ = writeln!(out, "  \"{}\" [pos=\"{:.6},{:.6}!\"{}];", label, approx6(&p.x), approx6(&p.y), extra);
        }
        for p in self.pairs() {
            let style = match p.role {
                Role::Unit => "",
                Role::Derived => " [style=dashed]",
            };
            let _ = writeln!(out, "  \"{}\" -- \"{}\"{};", p.a, p.b, style);
        }
        out.push_str("}\n");
        out
    }

    /// SVG drawing scaled into an 800-unit square viewport.
    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 800.0;
        const MARGIN: f64 = 20.0;
        let pos: std::collections::HashMap<Label, (f64, f64)> =
            self.points().map(|(l, p)| (l, (approx6(&p.x), approx6(&p.y)))).collect();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in pos.values() {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let k = (SIZE - 2.0 * MARGIN) / span;
        // SVG's y axis points down.
        let map = |(x, y): (f64, f64)| (MARGIN + (x - x0) * k, SIZE - MARGIN - (y - y0) * k);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\" width=\"800\" height=\"800\">"
        );
        let _ = writeln!(out, "<title>{}</title>", self.word());
        for p in self.pairs() {
            let (ax, ay) = map(pos[&p.a]);
            let (bx, by) = map(pos[&p.b]);
            let style = match p.role {
                Role::Unit => "stroke=\"black\" stroke-width=\"0.5\"",
                Role::Derived => "stroke=\"red\" stroke-width=\"0.5\" stroke-dasharray=\"4 2\"",
            };
            let _ =
                writeln!(out, "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" {}/>", ax, ay, bx, by, style);
        }
        let (ex, ey) = self.endpoints();
        for (label, _) in self.points() {
            let (cx, cy) = map(pos[&label]);
            let (r, fill) = if label == ex || label == ey { (4.0, "blue") } else { (1.5, "black") };
            let _ = writeln!(
                out,
                "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{}\" fill=\"{}\"><title>{}</title></circle>",
                cx, cy, r, fill, label
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
