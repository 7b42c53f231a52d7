use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use super::DistanceWord;
use crate::error::WitnessError;
use crate::field::{Tower, TowerElement};
use crate::geometry::ExactPoint2;

fn digest64(bytes: &[u8]) -> u64 {
    let h = Sha256::digest(bytes);
    u64::from_be_bytes(h[..8].try_into().expect("sha256 output has 32 bytes"))
}

fn parse_hex_id(s: &str, prefix: char) -> Option<u64> {
    let rest = s.strip_prefix(prefix)?;
    (rest.len() == 16).then(|| u64::from_str_radix(rest, 16).ok()).flatten()
}

/// Content-addressed point label: a hash of the exact coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(u64);

impl Label {
    pub fn of(p: &ExactPoint2) -> Label {
        let mut bytes = Vec::with_capacity(64);
        p.x.canonical_bytes(&mut bytes);
        p.y.canonical_bytes(&mut bytes);
        Label(digest64(&bytes))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{:016x}", self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Label {
    type Err = WitnessError;
    fn from_str(s: &str) -> Result<Label, WitnessError> {
        parse_hex_id(s, 'p').map(Label).ok_or_else(|| WitnessError::Malformed(format!("bad point label {:?}", s)))
    }
}

/// Identifier of a provenance node, derived from its rule, word and endpoints.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u64);

impl NodeId {
    fn of(rule: Rule, word: &DistanceWord, endpoints: (Label, Label)) -> NodeId {
        let s = format!("{}|{}|{}|{}", rule.name(), word, endpoints.0, endpoints.1);
        NodeId(digest64(s.as_bytes()))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{:016x}", self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for NodeId {
    type Err = WitnessError;
    fn from_str(s: &str) -> Result<NodeId, WitnessError> {
        parse_hex_id(s, 'n').map(NodeId).ok_or_else(|| WitnessError::Malformed(format!("bad node id {:?}", s)))
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<$t, D::Error> {
                String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Label);
string_serde!(NodeId);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// A pair at distance 1, preserved by hypothesis.
    Unit,
    /// A pair whose distance is forced by a construction.
    Derived,
}

/// The construction that produced a provenance node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Two points at distance 1.
    Base,
    /// Two rhombi sharing `x`, giving `√3·d`.
    Sqrt3Rhombi,
    /// Three unit triangles along a segment, giving `2·d`.
    DoubleTriangles,
    /// `3·d = √3·(√3·d)`.
    TripleRewrite,
    /// Kite on the chord `p₁p₂`, giving `√(a² − b²)`.
    PythagKite,
    /// `√2·d = √((√3·d)² − d²)`.
    Sqrt2Rewrite,
    /// Two kites with apex distances `√3·d` and `√2·d`, giving `(2√2/3)·d`.
    TwoSqrt2Over3Kites,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Base => "base",
            Rule::Sqrt3Rhombi => "sqrt3_rhombi",
            Rule::DoubleTriangles => "double_triangles",
            Rule::TripleRewrite => "triple_rewrite",
            Rule::PythagKite => "pythag_kite",
            Rule::Sqrt2Rewrite => "sqrt2_rewrite",
            Rule::TwoSqrt2Over3Kites => "two_sqrt2_over_3_kites",
        }
    }
}

/// A pair of points at distance `value(word)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub a: Label,
    pub b: Label,
    pub word: DistanceWord,
    pub dist2: TowerElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProvenanceNode {
    pub id: NodeId,
    pub rule: Rule,
    pub word: DistanceWord,
    pub endpoints: (Label, Label),
    /// Named figure vertices.
    pub vertices: Vec<(String, Label)>,
    /// Pairs the construction relies on; each is covered by a child set.
    pub constraints: Vec<Constraint>,
    /// Pairs the construction proves.
    pub conclusions: Vec<Constraint>,
    pub children: Vec<NodeId>,
}

impl ProvenanceNode {
    pub fn new(
        rule: Rule,
        word: DistanceWord,
        endpoints: (Label, Label),
        vertices: Vec<(String, Label)>,
        constraints: Vec<Constraint>,
        conclusions: Vec<Constraint>,
        children: Vec<NodeId>,
    ) -> ProvenanceNode {
        ProvenanceNode {
            id: NodeId::of(rule, &word, endpoints),
            rule,
            word,
            endpoints,
            vertices,
            constraints,
            conclusions,
            children,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequiredPair {
    pub a: Label,
    pub b: Label,
    pub dist2: TowerElement,
    pub role: Role,
    pub provenance: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessStats {
    pub point_count: usize,
    pub unit_pair_count: usize,
    pub derived_pair_count: usize,
    pub tower_height: usize,
    pub max_coefficient_bits: u64,
}

/// Rigid motion `p ↦ origin + R·p`, where `R` rotates by the angle with the
/// given cosine and sine.
#[derive(Clone, Debug)]
pub struct PlacementFrame {
    origin: ExactPoint2,
    cos: TowerElement,
    sin: TowerElement,
}

impl PlacementFrame {
    pub fn new(origin: ExactPoint2, cos: TowerElement, sin: TowerElement) -> Result<PlacementFrame, WitnessError> {
        if !(&cos.square() + &sin.square()).is_one() {
            return Err(WitnessError::Malformed("frame direction is not a unit vector".into()));
        }
        Ok(PlacementFrame { origin, cos, sin })
    }

    /// The frame taking `(0,0)` to `x` and `(length, 0)` to `y`.
    pub fn between(x: &ExactPoint2, y: &ExactPoint2, length: &TowerElement) -> Result<PlacementFrame, WitnessError> {
        if x.dist2(y) != length.square() || length.is_zero() {
            return Err(WitnessError::EndpointMismatch);
        }
        let inv = length.inverse()?;
        let d = y.sub(x);
        Ok(PlacementFrame { origin: x.clone(), cos: &d.x * &inv, sin: &d.y * &inv })
    }

    pub fn is_identity(&self) -> bool {
        self.origin.x.is_zero() && self.origin.y.is_zero() && self.cos.is_one() && self.sin.is_zero()
    }

    pub fn place(&self, p: &ExactPoint2) -> ExactPoint2 {
        self.origin.add(&p.rotate(&self.cos, &self.sin))
    }

    pub fn tower(&self) -> Tower {
        [&self.origin.x, &self.origin.y, &self.cos, &self.sin]
            .into_iter()
            .map(|e| e.tower().clone())
            .max_by_key(Tower::height)
            .expect("four elements")
    }
}

fn ordered(a: Label, b: Label) -> (Label, Label) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn compact(p: ExactPoint2) -> ExactPoint2 {
    ExactPoint2::new(p.x.shrink(), p.y.shrink())
}

fn larger_tower(a: &Tower, b: &Tower) -> Result<Tower, WitnessError> {
    if a.is_prefix_of(b) {
        Ok(b.clone())
    } else if b.is_prefix_of(a) {
        Ok(a.clone())
    } else {
        Err(crate::error::FieldError::IncompatibleTowers(a.height(), b.height()).into())
    }
}

/// A finite labelled point set containing two endpoints, the pairs whose
/// distances a unit-preserving map must keep, and the constructions that
/// justify them.
#[derive(Clone)]
pub struct WitnessSet {
    word: DistanceWord,
    tower: Tower,
    points: BTreeMap<Label, ExactPoint2>,
    endpoints: (Label, Label),
    pairs: Vec<RequiredPair>,
    pair_index: HashMap<(Label, Label, Role), usize>,
    nodes: BTreeMap<NodeId, ProvenanceNode>,
    root: NodeId,
}

impl WitnessSet {
    /// An empty set whose endpoints and root node are filled in by the caller.
    pub(crate) fn empty(word: DistanceWord, tower: Tower, x: &ExactPoint2, y: &ExactPoint2) -> WitnessSet {
        let mut s = WitnessSet {
            word,
            tower,
            points: BTreeMap::new(),
            endpoints: (Label(0), Label(0)),
            pairs: Vec::new(),
            pair_index: HashMap::new(),
            nodes: BTreeMap::new(),
            root: NodeId(0),
        };
        let lx = s.insert_point(x.clone()).expect("fresh set");
        let ly = s.insert_point(y.clone()).expect("fresh set");
        s.endpoints = (lx, ly);
        s
    }

    pub fn word(&self) -> &DistanceWord {
        &self.word
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in label order.
    pub fn points(&self) -> impl Iterator<Item = (Label, &ExactPoint2)> {
        self.points.iter().map(|(l, p)| (*l, p))
    }

    pub fn point(&self, label: Label) -> Option<&ExactPoint2> {
        self.points.get(&label)
    }

    pub fn endpoints(&self) -> (Label, Label) {
        self.endpoints
    }

    pub fn endpoint_points(&self) -> (&ExactPoint2, &ExactPoint2) {
        (&self.points[&self.endpoints.0], &self.points[&self.endpoints.1])
    }

    pub fn pairs(&self) -> &[RequiredPair] {
        &self.pairs
    }

    pub fn unit_pairs(&self) -> impl Iterator<Item = &RequiredPair> {
        self.pairs.iter().filter(|p| p.role == Role::Unit)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> Option<&ProvenanceNode> {
        self.nodes.get(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &ProvenanceNode> {
        self.nodes.values()
    }

    pub fn stats(&self) -> WitnessStats {
        let unit = self.unit_pairs().count();
        let bits = self
            .points
            .values()
            .flat_map(|p| [p.x.max_coefficient_bits(), p.y.max_coefficient_bits()])
            .max()
            .unwrap_or(0);
        WitnessStats {
            point_count: self.points.len(),
            unit_pair_count: unit,
            derived_pair_count: self.pairs.len() - unit,
            tower_height: self.tower.height(),
            max_coefficient_bits: bits,
        }
    }

    pub(crate) fn insert_point(&mut self, p: ExactPoint2) -> Result<Label, WitnessError> {
        let p = compact(p);
        let label = Label::of(&p);
        match self.points.get(&label) {
            Some(q) if *q != p => Err(WitnessError::Malformed(format!("label collision at {}", label))),
            Some(_) => Ok(label),
            None => {
                self.points.insert(label, p);
                Ok(label)
            }
        }
    }

    pub(crate) fn insert_pair(&mut self, pair: RequiredPair) {
        let (a, b) = ordered(pair.a, pair.b);
        let key = (a, b, pair.role);
        if !self.pair_index.contains_key(&key) {
            self.pair_index.insert(key, self.pairs.len());
            self.pairs.push(RequiredPair { a, b, dist2: pair.dist2.shrink(), ..pair });
        }
    }

    /// Insert a node and make it the root; the endpoint pair (if derived) is
    /// re-attributed to it.
    pub(crate) fn set_root(&mut self, node: ProvenanceNode) {
        let id = node.id;
        self.nodes.insert(id, node);
        self.root = id;
        let (a, b) = ordered(self.endpoints.0, self.endpoints.1);
        if let Some(&i) = self.pair_index.get(&(a, b, Role::Derived)) {
            self.pairs[i].provenance = id;
        }
    }

    pub(crate) fn set_word(&mut self, word: DistanceWord) {
        self.word = word;
    }

    pub(crate) fn set_tower(&mut self, tower: Tower) {
        self.tower = tower;
    }

    /// Add every point, pair and provenance node of `other`.
    pub(crate) fn absorb(&mut self, other: &WitnessSet) -> Result<(), WitnessError> {
        self.tower = larger_tower(&self.tower, &other.tower)?;
        for (label, p) in &other.points {
            match self.points.get(label) {
                Some(q) if q != p => return Err(WitnessError::Malformed(format!("label collision at {}", label))),
                Some(_) => {}
                None => {
                    self.points.insert(*label, p.clone());
                }
            }
        }
        for pair in &other.pairs {
            self.insert_pair(pair.clone());
        }
        for (id, node) in &other.nodes {
            self.nodes.entry(*id).or_insert_with(|| node.clone());
        }
        Ok(())
    }

    /// Union of sets with exact-equality dedup of points and pairs; word,
    /// endpoints and root are taken from the first set.
    pub fn merge(sets: &[WitnessSet]) -> Result<WitnessSet, WitnessError> {
        let (first, rest) = sets.split_first().ok_or_else(|| WitnessError::Malformed("nothing to merge".into()))?;
        let mut out = first.clone();
        for s in rest {
            out.absorb(s)?;
        }
        Ok(out)
    }

    /// Image of the set under a rigid motion; labels and node ids are recomputed.
    pub fn transported(&self, frame: &PlacementFrame) -> Result<WitnessSet, WitnessError> {
        if frame.is_identity() {
            return Ok(self.clone());
        }
        let tower = larger_tower(&self.tower, &frame.tower())?;
        let mut relabel = HashMap::with_capacity(self.points.len());
        let mut points = BTreeMap::new();
        for (label, p) in &self.points {
            let q = compact(frame.place(p));
            let l = Label::of(&q);
            if points.insert(l, q).is_some() {
                return Err(WitnessError::Malformed(format!("label collision at {}", l)));
            }
            relabel.insert(*label, l);
        }
        let map = |l: &Label| relabel[l];
        let map_c = |c: &Constraint| Constraint { a: map(&c.a), b: map(&c.b), ..c.clone() };
        let mut renode = HashMap::with_capacity(self.nodes.len());
        for (id, n) in &self.nodes {
            let endpoints = (map(&n.endpoints.0), map(&n.endpoints.1));
            renode.insert(*id, NodeId::of(n.rule, &n.word, endpoints));
        }
        let nodes = self
            .nodes
            .values()
            .map(|n| {
                let node = ProvenanceNode {
                    id: renode[&n.id],
                    rule: n.rule,
                    word: n.word.clone(),
                    endpoints: (map(&n.endpoints.0), map(&n.endpoints.1)),
                    vertices: n.vertices.iter().map(|(k, l)| (k.clone(), map(l))).collect(),
                    constraints: n.constraints.iter().map(map_c).collect(),
                    conclusions: n.conclusions.iter().map(map_c).collect(),
                    children: n.children.iter().map(|c| renode[c]).collect(),
                };
                (node.id, node)
            })
            .collect();
        let mut out = WitnessSet {
            word: self.word.clone(),
            tower,
            points,
            endpoints: (map(&self.endpoints.0), map(&self.endpoints.1)),
            pairs: Vec::with_capacity(self.pairs.len()),
            pair_index: HashMap::with_capacity(self.pairs.len()),
            nodes,
            root: renode[&self.root],
        };
        for p in &self.pairs {
            out.insert_pair(RequiredPair {
                a: map(&p.a),
                b: map(&p.b),
                provenance: renode[&p.provenance],
                ..p.clone()
            });
        }
        Ok(out)
    }

    /// Indices of pairs whose recomputed squared distance differs from the declared one.
    pub fn soundness_violations(&self) -> Vec<usize> {
        self.pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| match (self.points.get(&p.a), self.points.get(&p.b)) {
                (Some(a), Some(b)) => a.dist2(b) != p.dist2,
                _ => true,
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Problems found by checking every derived pair against its provenance
    /// node and every node's constraints against the pair list.
    pub fn provenance_problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let has_pair = |c: &Constraint| {
            let (a, b) = ordered(c.a, c.b);
            [Role::Unit, Role::Derived]
                .iter()
                .any(|r| self.pair_index.get(&(a, b, *r)).is_some_and(|&i| self.pairs[i].dist2 == c.dist2))
        };
        if !self.nodes.contains_key(&self.root) {
            problems.push(format!("root node {} is missing", self.root));
        }
        for pair in &self.pairs {
            let Some(node) = self.nodes.get(&pair.provenance) else {
                problems.push(format!("pair {}-{} cites missing node {}", pair.a, pair.b, pair.provenance));
                continue;
            };
            if pair.role == Role::Unit {
                if !pair.dist2.is_one() {
                    problems.push(format!("unit pair {}-{} is not at distance 1", pair.a, pair.b));
                }
                continue;
            }
            let concluded =
                node.conclusions.iter().any(|c| ordered(c.a, c.b) == (pair.a, pair.b) && c.dist2 == pair.dist2);
            if !concluded {
                problems.push(format!("node {} does not conclude pair {}-{}", node.id, pair.a, pair.b));
            }
        }
        for node in self.nodes.values() {
            for c in &node.constraints {
                if !has_pair(c) {
                    problems.push(format!("node {} relies on absent pair {}-{} ({})", node.id, c.a, c.b, c.word));
                }
            }
            for child in &node.children {
                if !self.nodes.contains_key(child) {
                    problems.push(format!("node {} has missing child {}", node.id, child));
                }
            }
        }
        problems
    }

    /// Whether the unit pairs connect every point.
    pub fn unit_graph_connected(&self) -> bool {
        let index: HashMap<Label, usize> = self.points.keys().enumerate().map(|(i, l)| (*l, i)).collect();
        let mut uf = UnionFind::<usize>::new(index.len());
        for p in self.unit_pairs() {
            match (index.get(&p.a), index.get(&p.b)) {
                (Some(&a), Some(&b)) => {
                    uf.union(a, b);
                }
                _ => return false,
            }
        }
        let mut roots = (0..index.len()).map(|i| uf.find(i));
        match roots.next() {
            Some(r) => roots.all(|s| s == r),
            None => true,
        }
    }

    /// Whether two labels share the same exact coordinates.
    pub fn has_duplicate_points(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.points.len());
        !self.points.values().all(|p| seen.insert(p))
    }

    /// Run every structural check, reporting the first failure.
    pub fn validate(&self) -> Result<(), WitnessError> {
        let (x, y) = self.endpoints;
        if !self.points.contains_key(&x) || !self.points.contains_key(&y) {
            return Err(WitnessError::Malformed("endpoints are not members".into()));
        }
        if let Some(&i) = self.soundness_violations().first() {
            let p = &self.pairs[i];
            return Err(WitnessError::Malformed(format!("pair {}-{} is not at its declared distance", p.a, p.b)));
        }
        if let Some(p) = self.provenance_problems().into_iter().next() {
            return Err(WitnessError::Malformed(p));
        }
        if self.has_duplicate_points() {
            return Err(WitnessError::Malformed("two labels share coordinates".into()));
        }
        if !self.unit_graph_connected() {
            return Err(WitnessError::Malformed("unit pairs do not connect all points".into()));
        }
        Ok(())
    }

    /// Reassemble a set from decoded parts, checking that labels match coordinates.
    pub(crate) fn from_parts(
        word: DistanceWord,
        tower: Tower,
        points: Vec<(Label, ExactPoint2)>,
        endpoints: (Label, Label),
        pairs: Vec<RequiredPair>,
        nodes: Vec<ProvenanceNode>,
        root: NodeId,
    ) -> Result<WitnessSet, WitnessError> {
        let mut s = WitnessSet {
            word,
            tower,
            points: BTreeMap::new(),
            endpoints,
            pairs: Vec::new(),
            pair_index: HashMap::new(),
            nodes: nodes.into_iter().map(|n| (n.id, n)).collect(),
            root,
        };
        for (label, p) in points {
            let got = s.insert_point(p)?;
            if got != label {
                return Err(WitnessError::Malformed(format!("label {} does not match its coordinates", label)));
            }
        }
        for p in pairs {
            s.insert_pair(p);
        }
        Ok(s)
    }
}

impl fmt::Debug for WitnessSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = self.stats();
        write!(
            f,
            "WitnessSet({}: {} points, {} unit, {} derived)",
            self.word, st.point_count, st.unit_pair_count, st.derived_pair_count
        )
    }
}

impl PartialEq for WitnessSet {
    fn eq(&self, o: &WitnessSet) -> bool {
        self.word == o.word
            && self.endpoints == o.endpoints
            && self.points == o.points
            && self.pair_index.len() == o.pair_index.len()
            && self
                .pairs
                .iter()
                .all(|p| o.pair_index.get(&(p.a, p.b, p.role)).is_some_and(|&i| o.pairs[i].dist2 == p.dist2))
            && self.nodes == o.nodes
            && self.root == o.root
    }
}
