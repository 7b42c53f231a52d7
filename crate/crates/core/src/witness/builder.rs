use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use super::set::{Constraint, Label, PlacementFrame, ProvenanceNode, RequiredPair, Role, Rule, WitnessSet};
use super::DistanceWord;
use crate::error::WitnessError;
use crate::field::{adjoin_sqrt, rat, Tower, TowerElement};
use crate::geometry::ExactPoint2;

/// Default bound on [`DistanceWord::depth`] for requested words.
pub const DEFAULT_DEPTH_LIMIT: usize = 3;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// A figure in its canonical frame: named vertices (`x` first, `y` second),
/// the pairs it relies on and the pairs it proves.
struct Figure {
    rule: Rule,
    word: DistanceWord,
    vertices: Vec<(&'static str, ExactPoint2)>,
    constraints: Vec<(usize, usize, DistanceWord)>,
    conclusions: Vec<(usize, usize)>,
}

/// Builds witness sets, sharing one growing tower and a cache of canonical
/// sets between calls.
pub struct Builder {
    tower: Tower,
    depth_limit: usize,
    values: HashMap<DistanceWord, TowerElement>,
    cache: HashMap<DistanceWord, Arc<WitnessSet>>,
}

impl Default for Builder {
    fn default() -> Builder {
        Builder::new()
    }
}

impl Builder {
    pub fn new() -> Builder {
        Builder::in_tower(Tower::rational())
    }

    /// A builder whose tower extends `tower`, so that points given in
    /// `tower` can be passed to [`Builder::build_between`].
    pub fn in_tower(tower: Tower) -> Builder {
        Builder { tower, depth_limit: DEFAULT_DEPTH_LIMIT, values: HashMap::new(), cache: HashMap::new() }
    }

    pub fn with_depth_limit(mut self, limit: usize) -> Builder {
        self.depth_limit = limit;
        self
    }

    pub fn depth_limit(&self) -> usize {
        self.depth_limit
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    fn sqrt(&mut self, r: &TowerElement) -> Result<TowerElement, WitnessError> {
        let (tower, root) = adjoin_sqrt(&self.tower, r)?;
        self.tower = tower;
        Ok(root)
    }

    fn sqrt_int(&mut self, n: i64) -> Result<TowerElement, WitnessError> {
        self.sqrt(&TowerElement::from_integer(n))
    }

    /// Exact value of a word.
    pub fn value(&mut self, w: &DistanceWord) -> Result<TowerElement, WitnessError> {
        if let Some(v) = self.values.get(w) {
            return Ok(v.clone());
        }
        let v = match w {
            DistanceWord::One => TowerElement::one(),
            DistanceWord::Sqrt3(a) => &self.sqrt_int(3)? * &self.value(a)?,
            DistanceWord::Double(a) => self.value(a)?.scale(&rat(2, 1)),
            DistanceWord::Triple(a) => self.value(a)?.scale(&rat(3, 1)),
            DistanceWord::Sqrt2(a) => &self.sqrt_int(2)? * &self.value(a)?,
            DistanceWord::TwoSqrt2Over3(a) => (&self.sqrt_int(2)? * &self.value(a)?).scale(&rat(2, 3)),
            DistanceWord::PythagSub(a, b) => {
                let a2 = self.value(a)?.square();
                let b2 = self.value(b)?.square();
                let c2 = &a2 - &b2;
                if c2.sign() != Ordering::Greater {
                    return Err(WitnessError::Domain);
                }
                self.sqrt(&c2)?
            }
        };
        self.values.insert(w.clone(), v.clone());
        Ok(v)
    }

    fn check_depth(&self, w: &DistanceWord) -> Result<(), WitnessError> {
        let depth = w.depth();
        if depth > self.depth_limit {
            return Err(WitnessError::DepthExceeded { depth, limit: self.depth_limit });
        }
        Ok(())
    }

    /// The witness set for `w` with `x = (0,0)` and `y = (value(w), 0)`.
    pub fn build_canonical(&mut self, w: &DistanceWord) -> Result<Arc<WitnessSet>, WitnessError> {
        self.check_depth(w)?;
        self.canonical(w)
    }

    /// The canonical set for `w` moved rigidly onto the segment `x`–`y`.
    pub fn build_between(
        &mut self,
        x: &ExactPoint2,
        y: &ExactPoint2,
        w: &DistanceWord,
    ) -> Result<WitnessSet, WitnessError> {
        self.check_depth(w)?;
        self.between(x, y, w)
    }

    fn between(&mut self, x: &ExactPoint2, y: &ExactPoint2, w: &DistanceWord) -> Result<WitnessSet, WitnessError> {
        let v = self.value(w)?;
        let frame = PlacementFrame::between(x, y, &v)?;
        self.canonical(w)?.transported(&frame)
    }

    fn canonical(&mut self, w: &DistanceWord) -> Result<Arc<WitnessSet>, WitnessError> {
        if let Some(s) = self.cache.get(w) {
            return Ok(s.clone());
        }
        let set = match w {
            DistanceWord::One => self.base(),
            DistanceWord::Triple(a) => {
                let inner = DistanceWord::sqrt3(DistanceWord::sqrt3((**a).clone()));
                self.rewrite(w, inner, Rule::TripleRewrite)?
            }
            DistanceWord::Sqrt2(a) => {
                let inner = DistanceWord::pythag_sub(DistanceWord::sqrt3((**a).clone()), (**a).clone());
                self.rewrite(w, inner, Rule::Sqrt2Rewrite)?
            }
            DistanceWord::Sqrt3(a) => {
                let fig = self.sqrt3_figure(a)?;
                self.assemble(fig)?
            }
            DistanceWord::Double(a) => {
                let fig = self.double_figure(a)?;
                self.assemble(fig)?
            }
            DistanceWord::TwoSqrt2Over3(a) => {
                let fig = self.two_sqrt2_over3_figure(a)?;
                self.assemble(fig)?
            }
            DistanceWord::PythagSub(a, b) => {
                let fig = self.pythag_figure(w, a, b)?;
                self.assemble(fig)?
            }
        };
        let set = Arc::new(set);
        self.cache.insert(w.clone(), set.clone());
        Ok(set)
    }

    fn base(&mut self) -> WitnessSet {
        let x = ExactPoint2::origin();
        let y = ExactPoint2::new(TowerElement::one(), TowerElement::zero());
        let mut s = WitnessSet::empty(DistanceWord::One, self.tower.clone(), &x, &y);
        let (lx, ly) = s.endpoints();
        let node = ProvenanceNode::new(
            Rule::Base,
            DistanceWord::One,
            (lx, ly),
            vec![("x".into(), lx), ("y".into(), ly)],
            vec![],
            vec![],
            vec![],
        );
        s.insert_pair(RequiredPair { a: lx, b: ly, dist2: TowerElement::one(), role: Role::Unit, provenance: node.id });
        s.set_root(node);
        s
    }

    /// Reuse the set of an equal-valued word, recording the rewrite.
    fn rewrite(&mut self, w: &DistanceWord, inner: DistanceWord, rule: Rule) -> Result<WitnessSet, WitnessError> {
        let mut s = (*self.canonical(&inner)?).clone();
        let d2 = self.value(w)?.square();
        let (lx, ly) = s.endpoints();
        let node = ProvenanceNode::new(
            rule,
            w.clone(),
            (lx, ly),
            vec![("x".into(), lx), ("y".into(), ly)],
            vec![Constraint { a: lx, b: ly, word: inner, dist2: d2.clone() }],
            vec![Constraint { a: lx, b: ly, word: w.clone(), dist2: d2 }],
            vec![s.root()],
        );
        s.set_word(w.clone());
        s.set_root(node);
        s.set_tower(self.tower.clone());
        Ok(s)
    }

    /// Intersection of the circles about `a` and `b` with squared radii
    /// `ra2`, `rb2`, on the given side of the directed line `a → b`.
    fn intersect(
        &mut self,
        a: &ExactPoint2,
        ra2: &TowerElement,
        b: &ExactPoint2,
        rb2: &TowerElement,
        side: Side,
    ) -> Result<ExactPoint2, WitnessError> {
        let v = b.sub(a);
        let l2 = &v.x.square() + &v.y.square();
        let inv = l2.inverse()?;
        let u = (&(&(&l2 + ra2) - rb2) * &inv).scale(&rat(1, 2));
        let h2 = &(ra2 * &inv) - &u.square();
        if h2.sign() != Ordering::Greater {
            return Err(WitnessError::ConstructionInfeasible);
        }
        let h = self.sqrt(&h2)?;
        let base = a.add(&v.scale(&u));
        let off = v.perp().scale(&h);
        Ok(match side {
            Side::Left => base.add(&off),
            Side::Right => base.sub(&off),
        })
    }

    fn axis_point(t: &TowerElement) -> ExactPoint2 {
        ExactPoint2::new(t.clone(), TowerElement::zero())
    }

    fn sqrt3_figure(&mut self, inner: &DistanceWord) -> Result<Figure, WitnessError> {
        let d = self.value(inner)?;
        let d2 = d.square();
        let len = &self.sqrt_int(3)? * &d;
        let len2 = len.square();
        let x = ExactPoint2::origin();
        let y = Self::axis_point(&len);
        let p1 = self.intersect(&x, &d2, &y, &d2, Side::Left)?;
        let p2 = self.intersect(&x, &d2, &y, &d2, Side::Right)?;
        let yt = self.intersect(&x, &len2, &y, &d2, Side::Left)?;
        let q1 = self.intersect(&x, &d2, &yt, &d2, Side::Left)?;
        let q2 = self.intersect(&x, &d2, &yt, &d2, Side::Right)?;
        let w = inner.clone();
        let (vx, vy, vyt, vp1, vp2, vq1, vq2) = (0, 1, 2, 3, 4, 5, 6);
        Ok(Figure {
            rule: Rule::Sqrt3Rhombi,
            word: DistanceWord::sqrt3(w.clone()),
            vertices: vec![
                ("x", x),
                ("y", y),
                ("y_tilde", yt),
                ("p1", p1),
                ("p2", p2),
                ("p1_tilde", q1),
                ("p2_tilde", q2),
            ],
            constraints: [
                (vy, vyt),
                (vx, vp1),
                (vx, vp2),
                (vy, vp1),
                (vy, vp2),
                (vp1, vp2),
                (vx, vq1),
                (vx, vq2),
                (vyt, vq1),
                (vyt, vq2),
                (vq1, vq2),
            ]
            .into_iter()
            .map(|(a, b)| (a, b, w.clone()))
            .collect(),
            conclusions: vec![(vx, vy), (vx, vyt)],
        })
    }

    fn double_figure(&mut self, inner: &DistanceWord) -> Result<Figure, WitnessError> {
        let d = self.value(inner)?;
        let d2 = d.square();
        let x = ExactPoint2::origin();
        let y = Self::axis_point(&d.scale(&rat(2, 1)));
        let p1 = Self::axis_point(&d);
        let p2 = self.intersect(&x, &d2, &p1, &d2, Side::Left)?;
        let p3 = self.intersect(&p1, &d2, &y, &d2, Side::Left)?;
        let w = inner.clone();
        let s3 = DistanceWord::sqrt3(w.clone());
        let (vx, vy, vp1, vp2, vp3) = (0, 1, 2, 3, 4);
        let mut constraints: Vec<_> = [(vp1, vp2), (vp1, vp3), (vp2, vp3), (vx, vp1), (vx, vp2), (vy, vp1), (vy, vp3)]
            .into_iter()
            .map(|(a, b)| (a, b, w.clone()))
            .collect();
        constraints.push((vx, vp3, s3.clone()));
        constraints.push((vy, vp2, s3));
        Ok(Figure {
            rule: Rule::DoubleTriangles,
            word: DistanceWord::double(w),
            vertices: vec![("x", x), ("y", y), ("p1", p1), ("p2", p2), ("p3", p3)],
            constraints,
            conclusions: vec![(vx, vy)],
        })
    }

    fn pythag_figure(&mut self, w: &DistanceWord, a: &DistanceWord, b: &DistanceWord) -> Result<Figure, WitnessError> {
        let c = self.value(w)?;
        let a2 = self.value(a)?.square();
        let b2 = self.value(b)?.square();
        let x = ExactPoint2::origin();
        let y = Self::axis_point(&c);
        let p1 = self.intersect(&x, &b2, &y, &a2, Side::Left)?;
        let p2 = self.intersect(&x, &b2, &y, &a2, Side::Right)?;
        let (vx, vy, vp1, vp2) = (0, 1, 2, 3);
        Ok(Figure {
            rule: Rule::PythagKite,
            word: w.clone(),
            vertices: vec![("x", x), ("y", y), ("p1", p1), ("p2", p2)],
            constraints: vec![
                (vx, vp1, b.clone()),
                (vx, vp2, b.clone()),
                (vy, vp1, a.clone()),
                (vy, vp2, a.clone()),
                (vp1, vp2, DistanceWord::double(b.clone())),
            ],
            conclusions: vec![(vx, vy)],
        })
    }

    fn two_sqrt2_over3_figure(&mut self, inner: &DistanceWord) -> Result<Figure, WitnessError> {
        let w = inner.clone();
        let d2 = self.value(inner)?.square();
        let len = self.value(&DistanceWord::two_sqrt2_over3(w.clone()))?;
        let len2 = len.square();
        let r3 = d2.scale(&rat(3, 1));
        let r2 = d2.scale(&rat(2, 1));
        let x = ExactPoint2::origin();
        let y = Self::axis_point(&len);
        // The apex heights over x–y add up to 3d, so the two apexes lie on opposite sides.
        let p1 = self.intersect(&x, &r3, &y, &r3, Side::Left)?;
        let p2 = self.intersect(&x, &r2, &y, &r2, Side::Right)?;
        let yt = self.intersect(&x, &len2, &y, &d2, Side::Left)?;
        let q1 = self.intersect(&x, &r3, &yt, &r3, Side::Left)?;
        let q2 = self.intersect(&x, &r2, &yt, &r2, Side::Right)?;
        let s3 = DistanceWord::sqrt3(w.clone());
        let s2 = DistanceWord::sqrt2(w.clone());
        let t3 = DistanceWord::triple(w.clone());
        let (vx, vy, vyt, vp1, vp2, vq1, vq2) = (0, 1, 2, 3, 4, 5, 6);
        Ok(Figure {
            rule: Rule::TwoSqrt2Over3Kites,
            word: DistanceWord::two_sqrt2_over3(w.clone()),
            vertices: vec![
                ("x", x),
                ("y", y),
                ("y_tilde", yt),
                ("p1", p1),
                ("p2", p2),
                ("p1_tilde", q1),
                ("p2_tilde", q2),
            ],
            constraints: vec![
                (vy, vyt, w),
                (vx, vp1, s3.clone()),
                (vy, vp1, s3.clone()),
                (vx, vq1, s3.clone()),
                (vyt, vq1, s3),
                (vx, vp2, s2.clone()),
                (vy, vp2, s2.clone()),
                (vx, vq2, s2.clone()),
                (vyt, vq2, s2),
                (vp1, vp2, t3.clone()),
                (vq1, vq2, t3),
            ],
            conclusions: vec![(vx, vy), (vx, vyt)],
        })
    }

    /// Cover every constraint of the figure by a transported sub-set and
    /// record the figure as the root of the union.
    fn assemble(&mut self, fig: Figure) -> Result<WitnessSet, WitnessError> {
        let verts: Vec<ExactPoint2> = fig.vertices.iter().map(|(_, p)| p.clone()).collect();
        let mut s = WitnessSet::empty(fig.word.clone(), self.tower.clone(), &verts[0], &verts[1]);
        let labels = verts.iter().map(|p| s.insert_point(p.clone())).collect::<Result<Vec<Label>, _>>()?;
        let mut constraints = Vec::with_capacity(fig.constraints.len());
        let mut children = Vec::with_capacity(fig.constraints.len());
        for (i, j, w) in &fig.constraints {
            let sub = self.between(&verts[*i], &verts[*j], w)?;
            s.absorb(&sub)?;
            children.push(sub.root());
            let dist2 = self.value(w)?.square();
            constraints.push(Constraint { a: labels[*i], b: labels[*j], word: w.clone(), dist2 });
        }
        let d2 = self.value(&fig.word)?.square();
        let mut conclusions = Vec::with_capacity(fig.conclusions.len());
        for &(i, j) in &fig.conclusions {
            if verts[i].dist2(&verts[j]) != d2 {
                return Err(WitnessError::Malformed(format!(
                    "{} figure misplaces {}",
                    fig.rule.name(),
                    fig.vertices[j].0
                )));
            }
            conclusions.push(Constraint { a: labels[i], b: labels[j], word: fig.word.clone(), dist2: d2.clone() });
        }
        let node = ProvenanceNode::new(
            fig.rule,
            fig.word,
            (labels[0], labels[1]),
            fig.vertices.iter().zip(&labels).map(|((n, _), l)| (n.to_string(), *l)).collect(),
            constraints,
            conclusions.clone(),
            children,
        );
        for c in conclusions {
            s.insert_pair(RequiredPair { a: c.a, b: c.b, dist2: c.dist2, role: Role::Derived, provenance: node.id });
        }
        s.set_root(node);
        s.set_tower(self.tower.clone());
        Ok(s)
    }
}

/// Exact value of a word, computed in a fresh tower.
pub fn value(w: &DistanceWord) -> Result<TowerElement, WitnessError> {
    Builder::new().value(w)
}

/// Canonical witness set for `w` under the default depth limit.
pub fn build_canonical(w: &DistanceWord) -> Result<WitnessSet, WitnessError> {
    Ok((*Builder::new().build_canonical(w)?).clone())
}

/// Witness set for `w` on the segment `x`–`y`, which must have length `value(w)`.
pub fn build_between(x: &ExactPoint2, y: &ExactPoint2, w: &DistanceWord) -> Result<WitnessSet, WitnessError> {
    let tower =
        [&x.x, &x.y, &y.x, &y.y].into_iter().map(|e| e.tower()).max_by_key(|t| t.height()).expect("four coordinates");
    Builder::in_tower(tower.clone()).build_between(x, y, w)
}
