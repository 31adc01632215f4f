//! Edge paths, their reduction, spanning trees and lassos.

mod tame;

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::surface::{Dart, RibbonMap};

pub use tame::{refine_generators, tame_generators, TameGenerators};
pub(crate) use tame::conjugator;

/// A path of darts starting at `base`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeWord {
    base: usize,
    darts: Vec<Dart>,
}

impl EdgeWord {
    /// Checks that consecutive darts chain head to tail.
    pub fn new(map: &RibbonMap, base: usize, darts: Vec<Dart>) -> Result<Self> {
        if base >= map.vertex_count() {
            return Err(Error::IndexOutOfRange {
                what: "vertex",
                index: base,
                len: map.vertex_count(),
            });
        }
        let mut at = base;
        for (i, &d) in darts.iter().enumerate() {
            if d.0 >= map.dart_count() {
                return Err(Error::BrokenWord(format!("dart {d:?} is not in the map")));
            }
            if map.tail(d) != at {
                return Err(Error::BrokenWord(format!(
                    "dart {i} ({d:?}) leaves vertex {} but the path is at {at}",
                    map.tail(d)
                )));
            }
            at = map.head(d);
        }
        Ok(EdgeWord { base, darts })
    }

    pub fn empty(base: usize) -> Self {
        EdgeWord {
            base,
            darts: Vec::new(),
        }
    }

    pub(crate) fn unchecked(base: usize, darts: Vec<Dart>) -> Self {
        EdgeWord { base, darts }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn end(&self, map: &RibbonMap) -> usize {
        self.darts.last().map_or(self.base, |&d| map.head(d))
    }

    pub fn is_reduced(&self) -> bool {
        self.darts.windows(2).all(|w| w[1] != w[0].rev())
    }

    pub fn reduce(&self) -> EdgeWord {
        EdgeWord {
            base: self.base,
            darts: reduce_darts(&self.darts),
        }
    }

    /// The reversed path, starting where this one ends.
    pub fn inverse(&self, map: &RibbonMap) -> EdgeWord {
        EdgeWord {
            base: self.end(map),
            darts: invert(&self.darts),
        }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, map: &RibbonMap, other: &EdgeWord) -> Result<EdgeWord> {
        if self.end(map) != other.base {
            return Err(Error::BrokenWord(format!(
                "path ends at {} but the next starts at {}",
                self.end(map),
                other.base
            )));
        }
        let mut darts = self.darts.clone();
        darts.extend_from_slice(&other.darts);
        Ok(EdgeWord {
            base: self.base,
            darts,
        })
    }

    /// Signed 1-based edge ids.
    pub fn signed_ids(&self) -> Vec<i64> {
        self.darts.iter().map(|d| d.signed_id()).collect()
    }

    /// Net traversal count of each edge.
    pub fn abelianization(&self, edges: usize) -> Vec<i64> {
        let mut v = vec![0i64; edges];
        for d in &self.darts {
            v[d.edge()] += if d.is_positive() { 1 } else { -1 };
        }
        v
    }
}

impl Serialize for EdgeWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EdgeWord", 2)?;
        st.serialize_field("base", &self.base)?;
        st.serialize_field("edges", &self.signed_ids())?;
        st.end()
    }
}

pub fn reduce(word: &EdgeWord) -> EdgeWord {
    word.reduce()
}

pub(crate) fn reduce_darts(darts: &[Dart]) -> Vec<Dart> {
    let mut out: Vec<Dart> = Vec::with_capacity(darts.len());
    for &d in darts {
        if out.last() == Some(&d.rev()) {
            out.pop();
        } else {
            out.push(d);
        }
    }
    out
}

pub(crate) fn invert(darts: &[Dart]) -> Vec<Dart> {
    darts.iter().rev().map(|d| d.rev()).collect()
}

/// `h(w) = h(w_n)⋯h(w_1)`, with `h(d⁻¹) = h(d)⁻¹`; `values[e]` is the
/// element carried by the positive dart of edge `e`.
pub fn holonomy_of_word(group: &FiniteGroup, values: &[usize], word: &EdgeWord) -> Result<usize> {
    holonomy_of_darts(group, values, &word.darts)
}

pub(crate) fn holonomy_of_darts(group: &FiniteGroup, values: &[usize], darts: &[Dart]) -> Result<usize> {
    let mut acc = group.identity();
    for &d in darts {
        let x = *values
            .get(d.edge())
            .ok_or_else(|| Error::BrokenWord(format!("dart {d:?} outside the configuration")))?;
        let h = if d.is_positive() { x } else { group.inv(x) };
        acc = group.mul(h, acc);
    }
    Ok(acc)
}

/// A spanning tree with paths from its root.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    root: usize,
    edges: BTreeSet<usize>,
    /// Parent vertex and the dart from it into each vertex.
    parent: Vec<Option<(usize, Dart)>>,
}

impl SpanningTree {
    /// Roots an edge set that is already a spanning tree.
    pub(crate) fn from_edges(map: &RibbonMap, edges: BTreeSet<usize>, root: usize) -> Result<Self> {
        let v = map.vertex_count();
        let mut parent = vec![None; v];
        let mut seen = vec![false; v];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &d in map.rotation(x) {
                let y = map.head(d);
                if edges.contains(&d.edge()) && !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, d));
                    queue.push_back(y);
                }
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::Disconnected(format!("tree misses vertex {x}")));
        }
        if edges.len() + 1 != v {
            return Err(Error::InvalidMap(format!(
                "{} edges cannot form a spanning tree on {v} vertices",
                edges.len()
            )));
        }
        Ok(SpanningTree {
            root,
            edges,
            parent,
        })
    }

    /// The same tree with another root.
    pub fn rerooted(&self, map: &RibbonMap, root: usize) -> Result<Self> {
        Self::from_edges(map, self.edges.clone(), root)
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &BTreeSet<usize> {
        &self.edges
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.edges.contains(&edge)
    }

    /// Tree path from the root to `x`.
    pub fn path_from_root(&self, x: usize) -> Vec<Dart> {
        let mut out = Vec::new();
        let mut at = x;
        while let Some((p, d)) = self.parent[at] {
            out.push(d);
            at = p;
        }
        out.reverse();
        out
    }

    /// Reduced tree path `[u, x]_T`.
    pub fn path(&self, u: usize, x: usize) -> Vec<Dart> {
        let mut w = invert(&self.path_from_root(u));
        w.extend(self.path_from_root(x));
        reduce_darts(&w)
    }

    pub fn depth(&self, x: usize) -> usize {
        self.path_from_root(x).len()
    }
}

/// BFS tree from vertex 0 scanning rotations in order, avoiding `forbidden`.
pub fn spanning_tree(map: &RibbonMap, forbidden: &BTreeSet<usize>) -> Result<SpanningTree> {
    let v = map.vertex_count();
    let mut seen = vec![false; v];
    let mut edges = BTreeSet::new();
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for &d in map.rotation(x) {
            let y = map.head(d);
            if !forbidden.contains(&d.edge()) && !seen[y] {
                seen[y] = true;
                edges.insert(d.edge());
                queue.push_back(y);
            }
        }
    }
    if let Some(x) = seen.iter().position(|s| !s) {
        return Err(Error::Disconnected(format!(
            "vertex {x} is cut off once the forbidden edges are removed"
        )));
    }
    SpanningTree::from_edges(map, edges, 0)
}

/// One edge of the dual tree, in BFS order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualStep {
    pub parent: usize,
    pub child: usize,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualTree {
    pub root: usize,
    pub steps: Vec<DualStep>,
}

impl DualTree {
    pub fn edges(&self) -> BTreeSet<usize> {
        self.steps.iter().map(|s| s.edge).collect()
    }
}

/// Face on the other side of the edge crossed by a framed dart.
pub(crate) fn across(map: &RibbonMap, (d, eps): (Dart, i8)) -> Option<usize> {
    if map.is_boundary_edge(d.edge()) {
        return None;
    }
    map.face_of((d.rev(), map.lambda(d.edge()) * eps))
}

/// BFS tree of the dual graph rooted at face 0 (the face holding the lowest
/// framed dart), children taken in the order of each face's cycle. Boundary
/// edges are not dual edges.
pub fn dual_spanning_tree(map: &RibbonMap) -> Result<DualTree> {
    let f = map.face_count();
    let mut seen = vec![false; f];
    let mut steps = Vec::with_capacity(f.saturating_sub(1));
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for &fd in &map.face(x).cycle {
            if let Some(y) = across(map, fd) {
                if !seen[y] {
                    seen[y] = true;
                    steps.push(DualStep {
                        parent: x,
                        child: y,
                        edge: fd.0.edge(),
                    });
                    queue.push_back(y);
                }
            }
        }
    }
    if let Some(x) = seen.iter().position(|s| !s) {
        return Err(Error::Disconnected(format!("face {x} is not reachable in the dual graph")));
    }
    Ok(DualTree { root: 0, steps })
}

/// `l_{e,T} = [v, tail e]_T · e · [head e, v]_T`, reduced.
pub fn lasso(map: &RibbonMap, tree: &SpanningTree, dart: Dart, base: usize) -> Result<EdgeWord> {
    if base >= map.vertex_count() {
        return Err(Error::IndexOutOfRange {
            what: "vertex",
            index: base,
            len: map.vertex_count(),
        });
    }
    if dart.0 >= map.dart_count() {
        return Err(Error::BrokenWord(format!("dart {dart:?} is not in the map")));
    }
    Ok(EdgeWord::unchecked(base, lasso_darts(map, tree, dart, base)))
}

pub(crate) fn lasso_darts(map: &RibbonMap, tree: &SpanningTree, dart: Dart, base: usize) -> Vec<Dart> {
    let mut w = tree.path(base, map.tail(dart));
    w.push(dart);
    w.extend(tree.path(map.head(dart), base));
    reduce_darts(&w)
}

/// Lassos of the positive darts of the edges outside `tree`, by edge index.
pub fn free_basis(map: &RibbonMap, base: usize, tree: &SpanningTree) -> Result<Vec<EdgeWord>> {
    (0..map.edge_count())
        .filter(|e| !tree.contains(*e))
        .map(|e| lasso(map, tree, Dart::positive(e), base))
        .collect()
}

/// Rank over ℚ of integer vectors, by exact elimination.
pub fn integer_rank(vectors: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                for k in c..cols {
                    let t = &f * &rows[rank][k];
                    rows[i][k] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the abelianizations of `words` in ℤ^edges.
pub fn abelian_rank(map: &RibbonMap, words: &[&EdgeWord]) -> usize {
    let vs: Vec<Vec<i64>> = words.iter().map(|w| w.abelianization(map.edge_count())).collect();
    integer_rank(&vs)
}

#[cfg(test)]
pub(crate) mod testing {
    use rand::Rng;

    use super::*;

    /// Random walk from `base` that backtracks with probability 1/3.
    pub(crate) fn random_walk<R: Rng>(map: &RibbonMap, base: usize, len: usize, rng: &mut R) -> EdgeWord {
        let mut darts: Vec<Dart> = Vec::new();
        let mut at = base;
        for _ in 0..len {
            let d = match darts.last() {
                Some(&last) if rng.random_ratio(1, 3) => last.rev(),
                _ => {
                    let rot = map.rotation(at);
                    if rot.is_empty() {
                        break;
                    }
                    rot[rng.random_range(0..rot.len())]
                }
            };
            at = map.head(d);
            darts.push(d);
        }
        EdgeWord::new(map, base, darts).unwrap()
    }
}
