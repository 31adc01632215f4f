//! Refinement by edge subdivision and face splitting.
//!
//! Existing edges, darts and vertices keep their indices; new ones are
//! appended. Each operation returns a [`Refinement`] describing how the
//! coarse map sits inside the fine one.

use super::{Dart, RibbonMap, AREA_TOL};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    /// Fine path replacing each coarse dart.
    pub substitution: Vec<Vec<Dart>>,
    /// Coarse face containing each fine face.
    pub face_parent: Vec<usize>,
    /// Fine edges drawn through the interior of coarse faces.
    pub interior_edges: Vec<usize>,
    /// Subdivided edges with the index of their new second half.
    pub halves: Vec<(usize, usize)>,
}

impl Refinement {
    pub fn identity(map: &RibbonMap) -> Self {
        Refinement {
            substitution: (0..map.dart_count()).map(|d| vec![Dart(d)]).collect(),
            face_parent: (0..map.face_count()).collect(),
            interior_edges: Vec::new(),
            halves: Vec::new(),
        }
    }

    /// Composes `self` (coarse to middle) with `next` (middle to fine).
    pub fn then(&self, next: &Refinement) -> Refinement {
        Refinement {
            substitution: self
                .substitution
                .iter()
                .map(|w| {
                    w.iter()
                        .flat_map(|d| next.substitution[d.0].iter().copied())
                        .collect()
                })
                .collect(),
            face_parent: next
                .face_parent
                .iter()
                .map(|&f| self.face_parent[f])
                .collect(),
            interior_edges: {
                let mut inner: Vec<usize> = self
                    .interior_edges
                    .iter()
                    .chain(&next.interior_edges)
                    .copied()
                    .collect();
                for &(old, new) in &next.halves {
                    if inner.contains(&old) {
                        inner.push(new);
                    }
                }
                inner
            },
            halves: self.halves.iter().chain(&next.halves).copied().collect(),
        }
    }

    /// Maps a coarse dart path to the fine map.
    pub fn substitute(&self, word: &[Dart]) -> Vec<Dart> {
        word.iter()
            .flat_map(|d| self.substitution[d.0].iter().copied())
            .collect()
    }
}

impl RibbonMap {
    /// Inserts a degree-2 vertex in the middle of `edge`. The first half
    /// keeps the edge's index and signature; the second half is a new edge
    /// with signature +1.
    pub fn subdivide_edge(&self, edge: usize) -> Result<(RibbonMap, Refinement)> {
        if edge >= self.edge_count() {
            return Err(Error::IndexOutOfRange {
                what: "edge",
                index: edge,
                len: self.edge_count(),
            });
        }
        let p = Dart::positive(edge);
        let n = p.rev();
        let p2 = Dart::positive(self.edge_count());
        let n2 = p2.rev();
        let v = self.head(p);

        let mut rotations = self.rotations.clone();
        for d in rotations[v].iter_mut() {
            if *d == n {
                *d = n2;
            }
        }
        rotations.push(vec![n, p2]);
        let mut lambda = self.lambda.clone();
        lambda.push(1);
        let boundary = self
            .boundary
            .iter()
            .map(|c| {
                c.iter()
                    .flat_map(|&d| match d {
                        d if d == p => vec![p, p2],
                        d if d == n => vec![n2, n],
                        d => vec![d],
                    })
                    .collect()
            })
            .collect();
        let fine = RibbonMap::new(rotations, lambda, boundary)?;

        let mut substitution: Vec<Vec<Dart>> = (0..self.dart_count()).map(|d| vec![Dart(d)]).collect();
        substitution[p.0] = vec![p, p2];
        substitution[n.0] = vec![n2, n];
        let face_parent = self.parents_of(&fine)?;
        let fine = self.carry_areas(fine, &face_parent, None)?;
        Ok((
            fine,
            Refinement {
                substitution,
                face_parent,
                interior_edges: Vec::new(),
                halves: vec![(edge, p2.edge())],
            },
        ))
    }

    /// Draws a new edge inside `face` from the corner before position
    /// `corner1` of its representative cycle to the corner before position
    /// `corner2`. When the map has areas, `areas = (a1, a2)` must split the
    /// face's area: `a1` goes to the piece containing the cycle's darts from
    /// `corner1` up to `corner2`.
    pub fn split_face(
        &self,
        face: usize,
        corner1: usize,
        corner2: usize,
        areas: Option<(f64, f64)>,
    ) -> Result<(RibbonMap, Refinement)> {
        if face >= self.face_count() {
            return Err(Error::IndexOutOfRange {
                what: "face",
                index: face,
                len: self.face_count(),
            });
        }
        let cycle = &self.faces[face].cycle;
        for c in [corner1, corner2] {
            if c >= cycle.len() {
                return Err(Error::IndexOutOfRange {
                    what: "corner",
                    index: c,
                    len: cycle.len(),
                });
            }
        }
        if corner1 == corner2 {
            return Err(Error::InvalidMap("corners must be distinct".into()));
        }
        match (self.areas.as_ref(), areas) {
            (Some(old), Some((a1, a2))) => {
                if !(a1 > 0.0 && a2 > 0.0) || !a1.is_finite() || !a2.is_finite() {
                    return Err(Error::InvalidArea(format!(
                        "sub-areas must be positive, got {a1} and {a2}"
                    )));
                }
                if (a1 + a2 - old[face]).abs() > AREA_TOL * old[face].max(1.0) {
                    return Err(Error::InvalidArea(format!(
                        "sub-areas {a1} + {a2} do not add up to {}",
                        old[face]
                    )));
                }
            }
            (Some(_), None) => {
                return Err(Error::InvalidArea("sub-areas required".into()));
            }
            (None, Some(_)) => {
                return Err(Error::InvalidArea("map carries no areas".into()));
            }
            (None, None) => {}
        }

        let new = Dart::positive(self.edge_count());
        let (w1, e1) = cycle[corner1];
        let (w2, e2) = cycle[corner2];
        let mut rotations = self.rotations.clone();
        insert_at_corner(&mut rotations[self.tail(w1)], w1, e1, new);
        insert_at_corner(&mut rotations[self.tail(w2)], w2, e2, new.rev());
        let mut lambda = self.lambda.clone();
        lambda.push(e1 * e2);
        let fine = RibbonMap::new(rotations, lambda, self.boundary.clone())?;
        if fine.face_count() != self.face_count() + 1 {
            return Err(Error::InvalidMap("split did not add a face".into()));
        }

        let face_parent = self.parents_of(&fine)?;
        let first = fine
            .face_of((w1, e1))
            .ok_or_else(|| Error::InvalidMap("corner dart left the framing".into()))?;
        let fine = self.carry_areas(fine, &face_parent, areas.map(|a| (face, first, a)))?;
        Ok((
            fine,
            Refinement {
                substitution: (0..self.dart_count()).map(|d| vec![Dart(d)]).collect(),
                face_parent,
                interior_edges: vec![new.edge()],
                halves: Vec::new(),
            },
        ))
    }

    /// Coarse face of each fine face, read through a shared framed dart.
    fn parents_of(&self, fine: &RibbonMap) -> Result<Vec<usize>> {
        fine.faces
            .iter()
            .map(|f| {
                f.cycle
                    .iter()
                    .find(|(d, _)| d.0 < self.dart_count())
                    .and_then(|&fd| self.face_of(fd))
                    .ok_or_else(|| Error::InvalidMap("fine face shares no dart with the coarse map".into()))
            })
            .collect()
    }

    fn carry_areas(
        &self,
        fine: RibbonMap,
        parents: &[usize],
        split: Option<(usize, usize, (f64, f64))>,
    ) -> Result<RibbonMap> {
        let Some(old) = self.areas.as_ref() else {
            return Ok(fine);
        };
        let areas = parents
            .iter()
            .enumerate()
            .map(|(f, &p)| match split {
                Some((face, first, (a1, a2))) if p == face => {
                    if f == first {
                        a1
                    } else {
                        a2
                    }
                }
                _ => old[p],
            })
            .collect();
        fine.with_areas(areas)
    }
}

/// Places `new` in the sector entered just before `w` along a face with
/// side `eps`: right after `w` in the rotation when `eps = 1`, right before
/// it otherwise.
fn insert_at_corner(rotation: &mut Vec<Dart>, w: Dart, eps: i8, new: Dart) {
    let i = rotation.iter().position(|&d| d == w).expect("dart at its tail");
    if eps == 1 {
        rotation.insert(i + 1, new);
    } else {
        rotation.insert(i, new);
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::standard_map;
    use super::*;

    fn invariants(m: &RibbonMap) -> (i64, bool, usize, usize) {
        let s = m.euler_and_genus().unwrap();
        (s.euler_characteristic, s.orientable, s.genus, s.boundary_components)
    }

    #[test]
    fn subdivision_keeps_faces() {
        for m in [torus(), klein(), theta(), disk(), standard_map(true, 0, 2).unwrap()] {
            for e in 0..m.edge_count() {
                let (f, r) = m.subdivide_edge(e).unwrap();
                assert_eq!(f.face_count(), m.face_count());
                assert_eq!(f.edge_count(), m.edge_count() + 1);
                assert_eq!(f.vertex_count(), m.vertex_count() + 1);
                assert_eq!(invariants(&f), invariants(&m));
                assert!(f.check_face_permutation());
                // each coarse face word maps to a fine face word
                for (ff, &p) in r.face_parent.iter().enumerate() {
                    let coarse = r.substitute(&m.face(p).darts());
                    assert_eq!(coarse.len(), f.face(ff).len());
                }
            }
        }
    }

    #[test]
    fn split_torus_face() {
        let m = torus().with_areas(vec![1.0]).unwrap();
        let (f, r) = m.split_face(0, 0, 2, Some((0.25, 0.75))).unwrap();
        assert_eq!(f.face_count(), 2);
        assert_eq!(invariants(&f), (0, true, 2, 0));
        assert_eq!(r.face_parent, vec![0, 0]);
        assert_eq!(r.interior_edges, vec![2]);
        let a = f.areas().unwrap();
        let first = f.face_of((d(0), 1)).unwrap();
        assert_eq!(a[first], 0.25);
        assert_eq!(a[1 - first], 0.75);
    }

    #[test]
    fn split_errors() {
        let m = torus().with_areas(vec![1.0]).unwrap();
        assert!(m.split_face(0, 1, 1, Some((0.5, 0.5))).is_err());
        assert!(m.split_face(0, 0, 1, Some((0.0, 1.0))).is_err());
        assert!(m.split_face(0, 0, 1, Some((0.4, 0.4))).is_err());
        assert!(m.split_face(0, 0, 9, Some((0.5, 0.5))).is_err());
        assert!(m.split_face(1, 0, 1, Some((0.5, 0.5))).is_err());
        assert!(m.split_face(0, 0, 1, None).is_err());
    }

    #[test]
    fn every_corner_pair_splits() {
        let maps = [
            torus(),
            projective(),
            klein(),
            theta(),
            disk(),
            standard_map(true, 0, 3).unwrap(),
            standard_map(false, 1, 1).unwrap(),
        ];
        for m in maps {
            for face in 0..m.face_count() {
                let len = m.face(face).len();
                for i in 0..len {
                    for j in 0..len {
                        if i == j {
                            continue;
                        }
                        let (f, _) = m.split_face(face, i, j, None).unwrap();
                        assert_eq!(f.face_count(), m.face_count() + 1);
                        assert_eq!(invariants(&f), invariants(&m));
                        assert!(f.check_face_permutation());
                    }
                }
            }
        }
    }

    #[test]
    fn composed_refinement() {
        let m = klein().with_areas(vec![2.0]).unwrap();
        let (m1, r1) = m.split_face(0, 0, 2, Some((0.5, 1.5))).unwrap();
        let (m2, r2) = m1.subdivide_edge(0).unwrap();
        let (m3, r3) = m2.split_face(1, 0, 2, Some((m2.areas().unwrap()[1] / 2.0, m2.areas().unwrap()[1] / 2.0))).unwrap();
        let r = r1.then(&r2).then(&r3);
        assert_eq!(r.face_parent, vec![0; 3]);
        assert_eq!(r.interior_edges.len(), 2);
        let (_, r4) = m3.subdivide_edge(r.interior_edges[0]).unwrap();
        assert_eq!(r.then(&r4).interior_edges.len(), 3);
        assert!((m3.total_area().unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(r.substitution[0].len(), 2);
    }
}
