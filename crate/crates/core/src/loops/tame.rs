//! Tame generators: lassos `a₁..a_g`, bounding lassos `c₁..c_p` and facial
//! lassos `l₁..l_f` with the single relation `w(a)·c₁⋯c_p = l₁⋯l_f`.
//!
//! Faces are glued one at a time along the dual tree. The glued region has a
//! boundary path `W` from `x₀` with `S(x₀)·W·S(x₀)⁻¹ = l₁⋯l_k` in the free
//! group, where `S(x)` is the tree path from the base. Gluing the face across
//! the dart `y = W[j]` rotates `W` to start at `head(y)`, which conjugates
//! every lasso so far by `U = S(x₀)·W[..=j]·S(head y)⁻¹`. Once every face is
//! glued, `W` crosses each remaining edge and is read off letter by letter.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{across, invert, lasso_darts, reduce_darts, spanning_tree, DualStep, EdgeWord, SpanningTree};
use crate::error::{Error, Result};
use crate::surface::{Dart, Framed, Refinement, RibbonMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TameGenerators {
    pub base: usize,
    pub a: Vec<EdgeWord>,
    pub c: Vec<EdgeWord>,
    pub l: Vec<EdgeWord>,
    /// Letters of `w`: index into `a` and exponent.
    pub word: Vec<(usize, i8)>,
    /// Face bounded by each facial lasso.
    pub faces: Vec<usize>,
    /// Boundary circuit of each bounding lasso, with the exponent of its
    /// circuit loop.
    pub boundary: Vec<(usize, i8)>,
}

impl TameGenerators {
    /// The word `w(a)` as a path.
    pub fn w_darts(&self) -> Vec<Dart> {
        self.word
            .iter()
            .flat_map(|&(i, s)| {
                if s == 1 {
                    self.a[i].darts.clone()
                } else {
                    invert(&self.a[i].darts)
                }
            })
            .collect()
    }

    /// `w(a)·c₁⋯c_p·(l₁⋯l_f)⁻¹`, unreduced.
    pub fn relation_darts(&self) -> Vec<Dart> {
        let mut out = self.w_darts();
        for c in &self.c {
            out.extend_from_slice(&c.darts);
        }
        for l in self.l.iter().rev() {
            out.extend(invert(&l.darts));
        }
        out
    }

    pub fn relation_holds(&self) -> bool {
        reduce_darts(&self.relation_darts()).is_empty()
    }

    /// `a`, then `c`, then `l` with the facial lasso `drop` left out.
    pub fn generators_without(&self, drop: usize) -> Vec<&EdgeWord> {
        self.a
            .iter()
            .chain(&self.c)
            .chain(self.l.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, l)| l))
            .collect()
    }

    /// Each `a`-letter occurs exactly twice in `w`.
    pub fn letters_twice(&self) -> bool {
        let mut count = vec![0usize; self.a.len()];
        for &(i, _) in &self.word {
            count[i] += 1;
        }
        count.iter().all(|&c| c == 2)
    }
}

/// Orbit of `fd` under the face permutation, starting at `fd`.
fn orbit_from(map: &RibbonMap, fd: Framed) -> Vec<Framed> {
    let mut out = vec![fd];
    let mut x = map.phi_bar(fd);
    while x != fd {
        out.push(x);
        x = map.phi_bar(x);
    }
    out
}

fn darts_of(w: &[Framed]) -> Vec<Dart> {
    w.iter().map(|&(d, _)| d).collect()
}

fn conjugate(u: &[Dart], l: &[Dart]) -> Vec<Dart> {
    let mut w = invert(u);
    w.extend_from_slice(l);
    w.extend_from_slice(u);
    reduce_darts(&w)
}

/// The glued region: its boundary path and the lassos of its faces.
struct Region {
    boundary: Vec<Framed>,
    lassos: Vec<Vec<Dart>>,
    faces: Vec<usize>,
}

impl Region {
    fn start(map: &RibbonMap, tree: &SpanningTree, base: usize, face: usize, cycle: Vec<Framed>) -> Self {
        let lasso = match cycle.first() {
            Some(&(d, _)) => spoked(tree, base, map.tail(d), &darts_of(&cycle)),
            None => Vec::new(),
        };
        Region {
            boundary: cycle,
            lassos: vec![lasso],
            faces: vec![face],
        }
    }

    fn glue(&mut self, map: &RibbonMap, tree: &SpanningTree, base: usize, step: DualStep) -> Result<()> {
        let j = self
            .boundary
            .iter()
            .position(|&fd| fd.0.edge() == step.edge && across(map, fd) == Some(step.child))
            .ok_or_else(|| Error::InvalidMap(format!("edge {} is not on the glued region", step.edge)))?;
        let (y, eps) = self.boundary[j];
        let x0 = map.tail(self.boundary[0].0);
        let hy = map.head(y);
        let other = orbit_from(map, (y.rev(), map.lambda(y.edge()) * eps));

        let mut u = tree.path(base, x0);
        u.extend(darts_of(&self.boundary[..=j]));
        u.extend(tree.path(hy, base));
        let u = reduce_darts(&u);
        for l in self.lassos.iter_mut() {
            *l = conjugate(&u, l);
        }
        self.lassos.push(spoked(tree, base, hy, &darts_of(&other)));
        self.faces.push(step.child);

        let mut next = Vec::with_capacity(self.boundary.len() + other.len() - 2);
        next.extend_from_slice(&self.boundary[j + 1..]);
        next.extend_from_slice(&self.boundary[..j]);
        next.extend_from_slice(&other[1..]);
        self.boundary = next;
        Ok(())
    }
}

/// `S(x)·cycle·S(x)⁻¹` for a closed path at `x`.
fn spoked(tree: &SpanningTree, base: usize, x: usize, cycle: &[Dart]) -> Vec<Dart> {
    let mut w = tree.path(base, x);
    w.extend_from_slice(cycle);
    w.extend(tree.path(x, base));
    reduce_darts(&w)
}

struct Forest(Vec<usize>);

impl Forest {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

pub fn tame_generators(map: &RibbonMap, base: usize) -> Result<TameGenerators> {
    if base >= map.vertex_count() {
        return Err(Error::IndexOutOfRange {
            what: "vertex",
            index: base,
            len: map.vertex_count(),
        });
    }
    let dual = super::dual_spanning_tree(map)?;
    let glued: BTreeSet<usize> = dual.edges();
    let chosen: Vec<usize> = map
        .boundary_circuits()
        .iter()
        .map(|c| c.iter().min().expect("boundary circuits are nonempty").edge())
        .collect();
    let chosen_set: BTreeSet<usize> = chosen.iter().copied().collect();

    // primal tree: boundary arcs first, then the remaining free edges
    let mut forest = Forest((0..map.vertex_count()).collect());
    let mut tree_edges = BTreeSet::new();
    for (k, c) in map.boundary_circuits().iter().enumerate() {
        for d in c {
            if d.edge() == chosen[k] {
                continue;
            }
            if !forest.union(map.tail(*d), map.head(*d)) {
                return Err(Error::InvalidMap(format!(
                    "boundary circuit {k} passes through a vertex twice"
                )));
            }
            tree_edges.insert(d.edge());
        }
    }
    for e in 0..map.edge_count() {
        if glued.contains(&e) || chosen_set.contains(&e) || tree_edges.contains(&e) {
            continue;
        }
        let d = Dart::positive(e);
        if forest.union(map.tail(d), map.head(d)) {
            tree_edges.insert(e);
        }
    }
    if tree_edges.len() + 1 != map.vertex_count() {
        return Err(Error::Disconnected(
            "the edges off the dual tree and the chosen boundary edges do not connect the vertices".into(),
        ));
    }
    let tree = SpanningTree::from_edges(map, tree_edges, base)?;
    let rest: Vec<usize> = (0..map.edge_count())
        .filter(|e| !glued.contains(e) && !chosen_set.contains(e) && !tree.contains(*e))
        .collect();

    let build = |flip: bool| -> Result<TameGenerators> {
        let root = match map.face(0).cycle.first() {
            None => Vec::new(),
            Some(&fd) if flip => orbit_from(map, map.alpha_bar(fd)),
            Some(&fd) => orbit_from(map, fd),
        };
        let mut region = Region::start(map, &tree, base, 0, root);
        for &step in &dual.steps {
            region.glue(map, &tree, base, step)?;
        }
        read_relation(map, &tree, base, &rest, &chosen, region)
    };
    let mut gens = build(false)?;
    if map.is_orientable() && !gens.boundary.is_empty() && gens.boundary.iter().all(|&(_, s)| s == -1) {
        gens = build(true)?;
    }
    if !gens.relation_holds() {
        return Err(Error::InvalidMap("tame relation does not reduce".into()));
    }
    Ok(gens)
}

/// Reads `W = t₀ b₁ t₁ ⋯ b_p t_p` off the fully glued region and sets
/// `c_i = (T_i⋯T_p)⁻¹·B_i·(T_i⋯T_p)`, so that `T₀⋯T_p·c₁⋯c_p = W`.
fn read_relation(
    map: &RibbonMap,
    tree: &SpanningTree,
    base: usize,
    rest: &[usize],
    chosen: &[usize],
    region: Region,
) -> Result<TameGenerators> {
    let lasso = |d: Dart| lasso_darts(map, tree, d, base);
    let mut segments: Vec<Vec<Dart>> = vec![Vec::new()];
    let mut crossings = Vec::new();
    for &(d, _) in &region.boundary {
        let e = d.edge();
        if rest.contains(&e) {
            segments.last_mut().unwrap().push(d);
        } else if let Some(k) = chosen.iter().position(|&b| b == e) {
            let sign = if Some(d) == map.boundary_dart(e) { 1 } else { -1 };
            crossings.push((k, sign, d));
            segments.push(Vec::new());
        }
    }

    let a: Vec<EdgeWord> = rest
        .iter()
        .map(|&e| EdgeWord::unchecked(base, lasso(Dart::positive(e))))
        .collect();
    let word: Vec<(usize, i8)> = segments
        .iter()
        .flatten()
        .map(|d| {
            let i = rest.iter().position(|&e| e == d.edge()).unwrap();
            (i, if d.is_positive() { 1 } else { -1 })
        })
        .collect();

    let mut c = Vec::with_capacity(crossings.len());
    let mut boundary = Vec::with_capacity(crossings.len());
    for (i, &(k, sign, d)) in crossings.iter().enumerate() {
        let tail: Vec<Dart> = segments[i + 1..].iter().flatten().flat_map(|&x| lasso(x)).collect();
        let tail = reduce_darts(&tail);
        let mut w = invert(&tail);
        w.extend(lasso(d));
        w.extend_from_slice(&tail);
        c.push(EdgeWord::unchecked(base, reduce_darts(&w)));
        boundary.push((k, sign));
    }

    let gens = TameGenerators {
        base,
        a,
        c,
        l: region
            .lassos
            .into_iter()
            .map(|l| EdgeWord::unchecked(base, l))
            .collect(),
        word,
        faces: region.faces,
        boundary,
    };
    if !gens.letters_twice() {
        return Err(Error::InvalidMap("a free edge is not crossed twice".into()));
    }
    Ok(gens)
}

/// Factors each coarse facial lasso into lassos of the fine faces it
/// contains. The `a` and `c` lassos are carried over through the
/// substitution.
pub fn refine_generators(
    coarse: &TameGenerators,
    fine: &RibbonMap,
    refinement: &Refinement,
) -> Result<TameGenerators> {
    if refinement.face_parent.len() != fine.face_count() {
        return Err(Error::InvalidRefinement(format!(
            "containment lists {} faces but the fine map has {}",
            refinement.face_parent.len(),
            fine.face_count()
        )));
    }
    let carry = |w: &EdgeWord| -> Result<EdgeWord> {
        if w.darts.iter().any(|d| d.0 >= refinement.substitution.len()) {
            return Err(Error::InvalidRefinement("word uses a dart the refinement does not know".into()));
        }
        Ok(EdgeWord::unchecked(w.base, reduce_darts(&refinement.substitute(&w.darts))))
    };
    let tree = spanning_tree(fine, &BTreeSet::new())?;
    let interior: BTreeSet<usize> = refinement.interior_edges.iter().copied().collect();

    let mut l = Vec::new();
    let mut faces = Vec::new();
    for (i, coarse_l) in coarse.l.iter().enumerate() {
        let parent = coarse.faces[i];
        let target = carry(coarse_l)?.darts;
        let children: Vec<usize> = (0..fine.face_count())
            .filter(|&f| refinement.face_parent[f] == parent)
            .collect();
        let Some(&first) = children.first() else {
            return Err(Error::InvalidRefinement(format!("coarse face {parent} has no fine faces")));
        };
        let mut region = Region::start(fine, &tree, coarse.base, first, fine.face(first).cycle.clone());
        let mut seen: BTreeSet<usize> = BTreeSet::from([first]);
        let mut queue = std::collections::VecDeque::from([first]);
        let mut steps = Vec::new();
        while let Some(x) = queue.pop_front() {
            for &fd in &fine.face(x).cycle {
                if !interior.contains(&fd.0.edge()) {
                    continue;
                }
                if let Some(y) = across(fine, fd) {
                    if refinement.face_parent[y] == parent && seen.insert(y) {
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
        if seen.len() != children.len() {
            return Err(Error::InvalidRefinement(format!(
                "fine faces of coarse face {parent} are not joined by interior edges"
            )));
        }
        for step in steps {
            region.glue(fine, &tree, coarse.base, step)?;
        }

        let product: Vec<Dart> = reduce_darts(&region.lassos.concat());
        let (lassos, order) = if let Some(v) = conjugator(&target, &product) {
            let vi = invert(&v);
            (
                region.lassos.iter().map(|x| conjugate(&vi, x)).collect::<Vec<_>>(),
                region.faces.clone(),
            )
        } else if let Some(v) = conjugator(&target, &invert(&product)) {
            let vi = invert(&v);
            (
                region.lassos.iter().rev().map(|x| conjugate(&vi, &invert(x))).collect(),
                region.faces.iter().rev().copied().collect(),
            )
        } else {
            return Err(Error::InvalidRefinement(format!(
                "fine faces of coarse face {parent} do not bound it"
            )));
        };
        if reduce_darts(&lassos.concat()) != target {
            return Err(Error::InvalidRefinement("facial lasso does not factor".into()));
        }
        l.extend(lassos.into_iter().map(|x| EdgeWord::unchecked(coarse.base, x)));
        faces.extend(order);
    }

    let gens = TameGenerators {
        base: coarse.base,
        a: coarse.a.iter().map(carry).collect::<Result<_>>()?,
        c: coarse.c.iter().map(carry).collect::<Result<_>>()?,
        l,
        word: coarse.word.clone(),
        faces,
        boundary: coarse.boundary.clone(),
    };
    if !gens.relation_holds() {
        return Err(Error::InvalidRefinement("refined relation does not reduce".into()));
    }
    Ok(gens)
}

/// Splits a reduced word as `p·core·p⁻¹` with `core` cyclically reduced.
fn cyclic_core(w: &[Dart]) -> (&[Dart], &[Dart]) {
    let mut k = 0;
    while w.len() >= 2 * k + 2 && w[k] == w[w.len() - 1 - k].rev() {
        k += 1;
    }
    (&w[..k], &w[k..w.len() - k])
}

/// Some `v` with `v·b·v⁻¹ = a` in the free group, for reduced `a` and `b`.
pub(crate) fn conjugator(a: &[Dart], b: &[Dart]) -> Option<Vec<Dart>> {
    let (p, ac) = cyclic_core(a);
    let (q, bc) = cyclic_core(b);
    if ac.len() != bc.len() {
        return None;
    }
    let n = bc.len();
    let k = if n == 0 {
        0
    } else {
        (0..n).find(|&k| bc[k..].iter().chain(&bc[..k]).eq(ac.iter()))?
    };
    // ac = r⁻¹·bc·r with r = bc[..k], so v = p·r⁻¹·q⁻¹
    let mut v = p.to_vec();
    v.extend(invert(&bc[..k]));
    v.extend(invert(q));
    let v = reduce_darts(&v);
    let mut check = v.clone();
    check.extend_from_slice(b);
    check.extend(invert(&v));
    (reduce_darts(&check) == a).then_some(v)
}
