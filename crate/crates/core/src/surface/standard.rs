//! One-face polygon models.
//!
//! The single interior face reads `w(a)·d₁c₁d₁⁻¹ ⋯ d_p c_p d_p⁻¹`, where
//! `w = a₁a₂a₁⁻¹a₂⁻¹⋯` (orientable) or `a₁a₁a₂a₂⋯` (non-orientable), `d_i`
//! are spokes from the interior vertex and `c_i` are boundary loops.
//! Edges are numbered `a₁..a_g`, then `d₁, c₁, d₂, c₂, …`.

use std::collections::BTreeMap;

use super::{Dart, RibbonMap};
use crate::error::{Error, Result};

/// The standard map of a surface of reduced genus `genus` with `boundary`
/// boundary components. The sphere is a single vertex with no edges.
pub fn standard_map(orientable: bool, genus: usize, boundary: usize) -> Result<RibbonMap> {
    if orientable && genus % 2 != 0 {
        return Err(Error::InvalidSurface(format!(
            "orientable reduced genus must be even, got {genus}"
        )));
    }
    if !orientable && genus == 0 {
        return Err(Error::InvalidSurface(
            "non-orientable surfaces need reduced genus at least 1".into(),
        ));
    }
    let e = genus + 2 * boundary;
    if e == 0 {
        return RibbonMap::new(vec![vec![]], vec![], vec![]);
    }
    let a = |i: usize| Dart::positive(i);
    let spoke = |i: usize| Dart::positive(genus + 2 * i);
    let ring = |i: usize| Dart::positive(genus + 2 * i + 1);

    let mut word = Vec::with_capacity(2 * genus + 3 * boundary);
    if orientable {
        for k in (0..genus).step_by(2) {
            word.extend([a(k), a(k + 1), a(k).rev(), a(k + 1).rev()]);
        }
    } else {
        for k in 0..genus {
            word.extend([a(k), a(k)]);
        }
    }
    for i in 0..boundary {
        word.extend([spoke(i), ring(i), spoke(i).rev()]);
    }
    let mut lambda = vec![1i8; e];
    if !orientable {
        lambda[..genus].fill(-1);
    }

    // successor constraints σ(x) = y read off the face word
    let mut next: BTreeMap<Dart, Dart> = BTreeMap::new();
    let mut eps = 1i8;
    for k in 0..word.len() {
        let (w, w_next) = (word[k], word[(k + 1) % word.len()]);
        eps *= lambda[w.edge()];
        let (x, y) = if eps == 1 {
            (w_next, w.rev())
        } else {
            (w.rev(), w_next)
        };
        if next.insert(x, y).is_some_and(|old| old != y) {
            return Err(Error::InvalidMap("inconsistent polygon word".into()));
        }
    }
    debug_assert_eq!(eps, 1);

    // vertices: interior vertex, then one per boundary component
    let tail_of = |d: Dart| -> usize {
        let edge = d.edge();
        if edge < genus {
            0
        } else {
            let i = (edge - genus) / 2;
            let is_spoke = (edge - genus) % 2 == 0;
            if is_spoke && d.is_positive() {
                0
            } else {
                i + 1
            }
        }
    };
    let mut rotations = Vec::with_capacity(1 + boundary);
    for v in 0..=boundary {
        let darts: Vec<Dart> = (0..2 * e).map(Dart).filter(|&d| tail_of(d) == v).collect();
        rotations.push(link_paths(&darts, &next)?);
    }
    let circuits = (0..boundary).map(|i| vec![ring(i)]).collect();
    RibbonMap::new(rotations, lambda, circuits)
}

/// Chains partial successor constraints into one cyclic order, joining the
/// end of each maximal path to the start of the next.
fn link_paths(darts: &[Dart], next: &BTreeMap<Dart, Dart>) -> Result<Vec<Dart>> {
    let has_pred: std::collections::BTreeSet<Dart> = darts
        .iter()
        .filter_map(|d| next.get(d))
        .copied()
        .collect();
    let mut out = Vec::with_capacity(darts.len());
    let mut used = std::collections::BTreeSet::new();
    let starts: Vec<Dart> = darts
        .iter()
        .copied()
        .filter(|d| !has_pred.contains(d))
        .collect();
    let starts = if starts.is_empty() {
        vec![darts[0]]
    } else {
        starts
    };
    for s in starts {
        let mut x = s;
        while used.insert(x) {
            out.push(x);
            match next.get(&x) {
                Some(&y) => x = y,
                None => break,
            }
        }
    }
    if out.len() != darts.len() {
        return Err(Error::InvalidMap("rotation constraints do not form paths".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_is_the_fixture() {
        let m = standard_map(true, 2, 0).unwrap();
        let t = super::super::fixtures::torus();
        assert_eq!(m.face(0).darts(), t.face(0).darts());
    }

    #[test]
    fn klein_word() {
        let m = standard_map(false, 2, 0).unwrap();
        assert_eq!(m.face_count(), 1);
        let w: Vec<i64> = m.face(0).darts().iter().map(|d| d.signed_id()).collect();
        assert_eq!(w, vec![1, 1, 2, 2]);
        let s = m.euler_and_genus().unwrap();
        assert_eq!((s.euler_characteristic, s.orientable, s.genus), (0, false, 2));
    }

    #[test]
    fn disk_and_sphere() {
        let s = standard_map(true, 0, 1).unwrap().euler_and_genus().unwrap();
        assert_eq!((s.euler_characteristic, s.boundary_components), (1, 1));
        let sphere = standard_map(true, 0, 0).unwrap();
        assert_eq!((sphere.vertex_count(), sphere.edge_count(), sphere.face_count()), (1, 0, 1));
        assert_eq!(sphere.euler_and_genus().unwrap().genus, 0);
    }

    #[test]
    fn invalid_specs() {
        assert!(standard_map(true, 1, 0).is_err());
        assert!(standard_map(false, 0, 2).is_err());
    }

    #[test]
    fn all_small_surfaces() {
        for orientable in [true, false] {
            for g in 0..=4 {
                for p in 0..=3 {
                    if (orientable && g % 2 == 1) || (!orientable && g == 0) {
                        continue;
                    }
                    let m = standard_map(orientable, g, p).unwrap();
                    assert_eq!(m.face_count(), 1, "{orientable} {g} {p}");
                    assert!(m.check_face_permutation());
                    let s = m.euler_and_genus().unwrap();
                    assert_eq!(
                        (s.orientable, s.genus, s.boundary_components),
                        (orientable, g, p)
                    );
                    let v = m.vertex_count() as i64;
                    let e = m.edge_count() as i64;
                    assert_eq!(v - e + 1, 2 - g as i64 - p as i64);
                }
            }
        }
    }
}
