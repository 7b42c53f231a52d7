//! Distance words and their witness sets.
//!
//! A witness set for a segment `x`–`y` is a finite set of points containing
//! `x` and `y` such that any map into `C²` preserving the unit pairs of the set
//! also preserves `φ(x, y)`. Sets are built recursively: each rule places a
//! small figure whose auxiliary pairs are covered by smaller witness sets moved
//! rigidly into place.

mod builder;
pub mod export;
mod set;
mod word;

pub use builder::{build_between, build_canonical, value, Builder, DEFAULT_DEPTH_LIMIT};
pub use set::{
    Constraint, Label, NodeId, PlacementFrame, ProvenanceNode, RequiredPair, Role, Rule, WitnessSet, WitnessStats,
};
pub use word::DistanceWord;
