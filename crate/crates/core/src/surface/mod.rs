//! Graphs on compact surfaces as ribbon maps.
//!
//! Edge `e` has darts `2e` and `2e + 1`, reverse of each other. Each vertex
//! carries the cyclic order of its outgoing darts; `λ_e = ±1` records whether
//! the local orientation flips along `e`. Faces are the cycles of
//! `φ̄(d, ε) = (σ^{−λ_e ε}(d⁻¹), λ_e ε)` on the framed darts, paired with
//! their reversals.

mod io;
mod refine;
mod standard;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{BoundaryClass, MapFile, SurfaceFile};
pub use refine::Refinement;
pub use standard::standard_map;

const AREA_TOL: f64 = 1e-12;

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dart(pub usize);

impl Dart {
    pub fn positive(edge: usize) -> Dart {
        Dart(2 * edge)
    }

    pub fn edge(self) -> usize {
        self.0 / 2
    }

    pub fn rev(self) -> Dart {
        Dart(self.0 ^ 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 % 2 == 0
    }

    /// `+(e+1)` for the positive dart of edge `e`, `-(e+1)` for its reverse.
    pub fn signed_id(self) -> i64 {
        let e = self.edge() as i64 + 1;
        if self.is_positive() {
            e
        } else {
            -e
        }
    }

    pub fn from_signed_id(id: i64) -> Option<Dart> {
        match id {
            0 => None,
            i if i > 0 => Some(Dart::positive(i as usize - 1)),
            i => Some(Dart::positive((-i) as usize - 1).rev()),
        }
    }
}

impl fmt::Debug for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signed_id())
    }
}

/// A dart together with a side: `+1` or `−1`.
pub type Framed = (Dart, i8);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Face {
    /// Representative facial cycle, started at its smallest framed dart.
    pub cycle: Vec<Framed>,
}

impl Face {
    pub fn darts(&self) -> Vec<Dart> {
        self.cycle.iter().map(|&(d, _)| d).collect()
    }

    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }
}

/// Position of a framed dart among the faces.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct FaceSlot {
    pub face: usize,
    /// Index in the representative cycle, or in its reversal when
    /// `reversed` is set.
    pub position: usize,
    pub reversed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceType {
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub genus: usize,
    pub boundary_components: usize,
}

/// Topological type of a surface with area and boundary classes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceSpec {
    pub orientable: bool,
    /// Reduced genus: twice the handle count, or the cross-cap count.
    pub genus: usize,
    /// Conjugacy class prescribed on each boundary component.
    pub boundary: Vec<usize>,
    pub area: f64,
}

impl SurfaceSpec {
    pub fn new(orientable: bool, genus: usize, boundary: Vec<usize>, area: f64) -> Result<Self> {
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
        if !(area > 0.0) || !area.is_finite() {
            return Err(Error::InvalidSurface(format!("area must be positive, got {area}")));
        }
        Ok(SurfaceSpec {
            orientable,
            genus,
            boundary,
            area,
        })
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }

    /// The one-face standard map carrying the whole area.
    pub fn standard_map(&self) -> Result<RibbonMap> {
        standard_map(self.orientable, self.genus, self.boundary.len())?.with_areas(vec![self.area])
    }
}

#[derive(Clone, Debug)]
pub struct RibbonMap {
    rotations: Vec<Vec<Dart>>,
    lambda: Vec<i8>,
    boundary: Vec<Vec<Dart>>,
    areas: Option<Vec<f64>>,
    tail: Vec<usize>,
    sigma: Vec<Dart>,
    sigma_inv: Vec<Dart>,
    boundary_side: Vec<Option<Dart>>,
    faces: Vec<Face>,
    slots: Vec<Option<FaceSlot>>,
}

fn framed_key((d, eps): Framed) -> usize {
    2 * d.0 + usize::from(eps < 0)
}

fn order_key((d, eps): Framed) -> (bool, Dart) {
    (eps < 0, d)
}

impl RibbonMap {
    /// Builds and validates a map from vertex rotations, edge signatures and
    /// boundary circuits (each a closed sequence of darts with the surface on
    /// their `+1` side).
    pub fn new(
        rotations: Vec<Vec<Dart>>,
        lambda: Vec<i8>,
        boundary: Vec<Vec<Dart>>,
    ) -> Result<Self> {
        let e = lambda.len();
        let nd = 2 * e;
        if rotations.is_empty() {
            return Err(Error::InvalidMap("no vertices".into()));
        }
        let mut tail = vec![usize::MAX; nd];
        let mut sigma = vec![Dart(usize::MAX); nd];
        let mut sigma_inv = vec![Dart(usize::MAX); nd];
        for (v, rot) in rotations.iter().enumerate() {
            if rot.is_empty() && rotations.len() > 1 {
                return Err(Error::InvalidMap(format!("vertex {v} is isolated")));
            }
            for (i, &d) in rot.iter().enumerate() {
                if d.0 >= nd {
                    return Err(Error::InvalidMap(format!("dart {d:?} at vertex {v} has no edge")));
                }
                if tail[d.0] != usize::MAX {
                    return Err(Error::InvalidMap(format!("dart {d:?} appears twice")));
                }
                tail[d.0] = v;
                let next = rot[(i + 1) % rot.len()];
                sigma[d.0] = next;
                sigma_inv[next.0] = d;
            }
        }
        if let Some(d) = tail.iter().position(|&v| v == usize::MAX) {
            return Err(Error::InvalidMap(format!("dart {:?} is at no vertex", Dart(d))));
        }
        if let Some(k) = lambda.iter().position(|&l| l != 1 && l != -1) {
            return Err(Error::InvalidMap(format!("signature of edge {k} is not ±1")));
        }

        let mut boundary_side = vec![None; e];
        for (i, circ) in boundary.iter().enumerate() {
            if circ.is_empty() {
                return Err(Error::InvalidMap(format!("boundary circuit {i} is empty")));
            }
            for (k, &d) in circ.iter().enumerate() {
                if d.0 >= nd {
                    return Err(Error::InvalidMap(format!("boundary dart {d:?} has no edge")));
                }
                if boundary_side[d.edge()].is_some() {
                    return Err(Error::InvalidMap(format!(
                        "edge {} lies on the boundary twice",
                        d.edge()
                    )));
                }
                if lambda[d.edge()] != 1 {
                    return Err(Error::InvalidMap(format!(
                        "boundary edge {} must have signature +1",
                        d.edge()
                    )));
                }
                boundary_side[d.edge()] = Some(d);
                let next = circ[(k + 1) % circ.len()];
                if tail[d.rev().0] != tail[next.0] {
                    return Err(Error::InvalidMap(format!(
                        "boundary circuit {i} breaks after dart {d:?}"
                    )));
                }
            }
        }

        let mut map = RibbonMap {
            rotations,
            lambda,
            boundary,
            areas: None,
            tail,
            sigma,
            sigma_inv,
            boundary_side,
            faces: Vec::new(),
            slots: Vec::new(),
        };
        map.check_connected()?;
        map.compute_faces()?;
        Ok(map)
    }

    fn check_connected(&self) -> Result<()> {
        let v = self.vertex_count();
        let mut seen = vec![false; v];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &d in &self.rotations[x] {
                let y = self.head(d);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(x) => Err(Error::Disconnected(format!("vertex {x} is unreachable"))),
            None => Ok(()),
        }
    }

    /// Whether the framed dart lies on the surface side of its edge.
    pub fn in_framing(&self, (d, eps): Framed) -> bool {
        match self.boundary_side[d.edge()] {
            None => true,
            Some(b) => (d == b && eps == 1) || (d == b.rev() && eps == -1),
        }
    }

    pub fn phi_bar(&self, (d, eps): Framed) -> Framed {
        let s = self.lambda[d.edge()] * eps;
        let r = d.rev();
        let next = if s == 1 {
            self.sigma_inv[r.0]
        } else {
            self.sigma[r.0]
        };
        (next, s)
    }

    pub fn alpha_bar(&self, (d, eps): Framed) -> Framed {
        (d.rev(), -self.lambda[d.edge()] * eps)
    }

    fn framed_darts(&self) -> Vec<Framed> {
        let mut out = Vec::with_capacity(4 * self.edge_count());
        for eps in [1, -1] {
            for d in 0..self.dart_count() {
                let fd = (Dart(d), eps);
                if self.in_framing(fd) {
                    out.push(fd);
                }
            }
        }
        out
    }

    fn compute_faces(&mut self) -> Result<()> {
        let nd = self.dart_count();
        if nd == 0 {
            self.faces = vec![Face { cycle: Vec::new() }];
            self.slots = Vec::new();
            return Ok(());
        }
        let mut orbit_of = vec![usize::MAX; 2 * nd];
        let mut orbits: Vec<Vec<Framed>> = Vec::new();
        for fd in self.framed_darts() {
            if orbit_of[framed_key(fd)] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut cyc = Vec::new();
            let mut x = fd;
            loop {
                if !self.in_framing(x) {
                    return Err(Error::InvalidMap(format!(
                        "face tracing leaves the surface at {:?}",
                        x
                    )));
                }
                if orbit_of[framed_key(x)] != usize::MAX {
                    break;
                }
                orbit_of[framed_key(x)] = id;
                cyc.push(x);
                x = self.phi_bar(x);
            }
            if x != fd {
                return Err(Error::InvalidMap("φ̄ is not a permutation of the framing".into()));
            }
            orbits.push(cyc);
        }

        let mut paired = vec![false; orbits.len()];
        let mut reps: Vec<(Vec<Framed>, usize)> = Vec::new();
        for i in 0..orbits.len() {
            if paired[i] {
                continue;
            }
            let j = orbit_of[framed_key(self.alpha_bar(orbits[i][0]))];
            if j == i {
                return Err(Error::InvalidMap(format!(
                    "facial cycle through {:?} is its own reversal",
                    orbits[i][0]
                )));
            }
            paired[i] = true;
            paired[j] = true;
            let best = orbits[i]
                .iter()
                .chain(&orbits[j])
                .copied()
                .min_by_key(|&fd| order_key(fd))
                .unwrap();
            let (k, cyc) = if orbit_of[framed_key(best)] == i {
                (i, &orbits[i])
            } else {
                (j, &orbits[j])
            };
            let start = cyc.iter().position(|&fd| fd == best).unwrap();
            let mut c = cyc[start..].to_vec();
            c.extend_from_slice(&cyc[..start]);
            reps.push((c, k));
        }
        reps.sort_by_key(|(c, _)| order_key(c[0]));

        let mut slots = vec![None; 2 * nd];
        for (f, (cyc, _)) in reps.iter().enumerate() {
            for (pos, &fd) in cyc.iter().enumerate() {
                slots[framed_key(fd)] = Some(FaceSlot {
                    face: f,
                    position: pos,
                    reversed: false,
                });
                let rev_pos = cyc.len() - 1 - pos;
                slots[framed_key(self.alpha_bar(fd))] = Some(FaceSlot {
                    face: f,
                    position: rev_pos,
                    reversed: true,
                });
            }
        }
        self.faces = reps.into_iter().map(|(cycle, _)| Face { cycle }).collect();
        self.slots = slots;
        Ok(())
    }

    /// Attaches one positive area per face.
    pub fn with_areas(mut self, areas: Vec<f64>) -> Result<Self> {
        if areas.len() != self.face_count() {
            return Err(Error::InvalidArea(format!(
                "{} areas for {} faces",
                areas.len(),
                self.face_count()
            )));
        }
        if let Some(f) = areas.iter().position(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidArea(format!("face {f} has area {}", areas[f])));
        }
        self.areas = Some(areas);
        Ok(self)
    }

    /// Splits `total` over faces in proportion to their lengths.
    pub fn with_proportional_areas(self, total: f64) -> Result<Self> {
        let lens: Vec<f64> = self.faces.iter().map(|f| f.len().max(1) as f64).collect();
        let sum: f64 = lens.iter().sum();
        let areas = lens.iter().map(|l| total * l / sum).collect();
        self.with_areas(areas)
    }

    pub fn without_areas(mut self) -> Self {
        self.areas = None;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.rotations.len()
    }

    pub fn edge_count(&self) -> usize {
        self.lambda.len()
    }

    pub fn dart_count(&self) -> usize {
        2 * self.lambda.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn tail(&self, d: Dart) -> usize {
        self.tail[d.0]
    }

    pub fn head(&self, d: Dart) -> usize {
        self.tail[d.rev().0]
    }

    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d.0]
    }

    pub fn sigma_inv(&self, d: Dart) -> Dart {
        self.sigma_inv[d.0]
    }

    pub fn lambda(&self, edge: usize) -> i8 {
        self.lambda[edge]
    }

    pub fn signatures(&self) -> &[i8] {
        &self.lambda
    }

    pub fn rotation(&self, v: usize) -> &[Dart] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<Dart>] {
        &self.rotations
    }

    pub fn boundary_circuits(&self) -> &[Vec<Dart>] {
        &self.boundary
    }

    /// The boundary dart of `edge`, if the edge lies on the boundary.
    pub fn boundary_dart(&self, edge: usize) -> Option<Dart> {
        self.boundary_side[edge]
    }

    pub fn is_boundary_edge(&self, edge: usize) -> bool {
        self.boundary_side[edge].is_some()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn slot(&self, fd: Framed) -> Option<FaceSlot> {
        self.slots.get(framed_key(fd)).copied().flatten()
    }

    pub fn face_of(&self, fd: Framed) -> Option<usize> {
        self.slot(fd).map(|s| s.face)
    }

    pub fn areas(&self) -> Option<&[f64]> {
        self.areas.as_deref()
    }

    pub fn total_area(&self) -> Option<f64> {
        self.areas.as_ref().map(|a| a.iter().sum())
    }

    pub fn euler_and_genus(&self) -> Result<SurfaceType> {
        let chi = self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64;
        let p = self.boundary.len() as i64;
        let orientable = self.is_orientable();
        let g = 2 - p - chi;
        if g < 0 || (orientable && g % 2 != 0) || (!orientable && g == 0) {
            return Err(Error::InvalidMap(format!(
                "Euler data inconsistent: χ = {chi}, p = {p}, orientable = {orientable}"
            )));
        }
        Ok(SurfaceType {
            euler_characteristic: chi,
            orientable,
            genus: g as usize,
            boundary_components: p as usize,
        })
    }

    /// Vertex signs `s` with `λ(e) = s(tail e)·s(head e)` on every edge,
    /// fixed by `s(0) = 1` along a BFS tree; `None` when non-orientable.
    /// The face orbit through `(d, s(tail d))` follows the orientation.
    pub fn orientation_gauge(&self) -> Option<Vec<i8>> {
        let v = self.vertex_count();
        let mut s = vec![0i8; v];
        s[0] = 1;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &d in &self.rotations[x] {
                let y = self.head(d);
                if s[y] == 0 {
                    s[y] = s[x] * self.lambda[d.edge()];
                    queue.push_back(y);
                }
            }
        }
        (0..self.edge_count())
            .all(|e| {
                let d = Dart::positive(e);
                self.lambda[e] * s[self.tail(d)] * s[self.head(d)] == 1
            })
            .then_some(s)
    }

    pub fn is_orientable(&self) -> bool {
        self.orientation_gauge().is_some()
    }

    /// Reverses the rotation at `v` and flips the signature of every
    /// non-loop edge at `v`. Changes nothing about the underlying surface.
    pub fn flip_vertex(&self, v: usize) -> Result<RibbonMap> {
        if v >= self.vertex_count() {
            return Err(Error::IndexOutOfRange {
                what: "vertex",
                index: v,
                len: self.vertex_count(),
            });
        }
        if self.rotations[v]
            .iter()
            .any(|d| self.is_boundary_edge(d.edge()))
        {
            return Err(Error::InvalidMap(format!("vertex {v} lies on the boundary")));
        }
        let mut rotations = self.rotations.clone();
        rotations[v].reverse();
        let mut lambda = self.lambda.clone();
        for &d in &self.rotations[v] {
            if self.head(d) != v {
                lambda[d.edge()] = -lambda[d.edge()];
            }
        }
        let flipped = RibbonMap::new(rotations, lambda, self.boundary.clone())?;
        let Some(areas) = &self.areas else {
            return Ok(flipped);
        };
        // framings at darts leaving v change sign; faces carry their areas
        let mut moved = vec![0.0; flipped.face_count()];
        for (f, face) in self.faces.iter().enumerate() {
            if let Some(&(d, eps)) = face.cycle.first() {
                let eps = if self.tail(d) == v { -eps } else { eps };
                let g = flipped
                    .face_of((d, eps))
                    .ok_or_else(|| Error::InvalidMap("flip lost a face".into()))?;
                moved[g] = areas[f];
            }
        }
        flipped.with_areas(moved)
    }

    /// Checks `φ̄ ᾱ σ̄ = id` on all framed darts, with
    /// `σ̄(d, ε) = (σ^ε(d), −ε)`, and that `φ̄` preserves the framing.
    pub fn check_face_permutation(&self) -> bool {
        let composes = (0..self.dart_count()).all(|d| {
            [1i8, -1].into_iter().all(|eps| {
                let d = Dart(d);
                let s = if eps == 1 { self.sigma(d) } else { self.sigma_inv(d) };
                self.phi_bar(self.alpha_bar((s, -eps))) == (d, eps)
            })
        });
        composes
            && self
                .framed_darts()
                .iter()
                .all(|&fd| self.in_framing(self.phi_bar(fd)))
    }
}
