//! Uniform measures with conjugacy constraints, the discrete holonomy field
//! weighted by a heat kernel, and exact summation over configurations.
//!
//! A configuration gives one group element per edge, carried by the
//! positive dart. Constrained cycles are parametrized by the values of all
//! their darts but the last and by a point `y` of the prescribed class; the
//! last dart is then forced so that the cycle's holonomy is `y`. Under this
//! parametrization the constrained uniform measure is the uniform measure on
//! the coordinate box, which is what [`Plan`] enumerates.

mod formula;
mod marginal;
mod sample;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::levy::Kernel;
use crate::loops::{holonomy_of_darts, EdgeWord};
use crate::surface::{Dart, RibbonMap};

pub use formula::{
    beta1, beta2, measure_m, measure_m_exact, partition_formula, upsilon, z_function, SymmetricClassFunction,
};
pub use marginal::{marginal_generators, relation_value, tame_closed_form, tame_marginal, Marginal};
pub(crate) use marginal::{bounding_classes, lasso_directions, tame_product};
pub use sample::{sample_df, sample_uniform_constrained, DfSampler, SampleMethod, HEAT_BATH_SWEEPS, EXACT_SAMPLING_LIMIT};

/// Default bound on the number of configurations summed exactly.
pub const DEFAULT_CAP: f64 = 1e8;

/// One group element per edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HolonomyConfig {
    values: Vec<usize>,
}

impl HolonomyConfig {
    pub fn new(group: &FiniteGroup, map: &RibbonMap, values: Vec<usize>) -> Result<Self> {
        if values.len() != map.edge_count() {
            return Err(Error::InvalidConstraints(format!(
                "{} values for {} edges",
                values.len(),
                map.edge_count()
            )));
        }
        if let Some(&x) = values.iter().find(|&&x| x >= group.order()) {
            return Err(Error::IndexOutOfRange {
                what: "element",
                index: x,
                len: group.order(),
            });
        }
        Ok(HolonomyConfig { values })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn holonomy(&self, group: &FiniteGroup, word: &EdgeWord) -> Result<usize> {
        holonomy_of_darts(group, &self.values, word.darts())
    }

    /// `h'(e) = k(head e)·h(e)·k(tail e)⁻¹`.
    pub fn gauge(&self, group: &FiniteGroup, map: &RibbonMap, k: &[usize]) -> HolonomyConfig {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(e, &x)| {
                let d = Dart::positive(e);
                group.mul(group.mul(k[map.head(d)], x), group.inv(k[map.tail(d)]))
            })
            .collect();
        HolonomyConfig { values }
    }
}

/// A marked simple cycle whose holonomy is constrained to a class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mark {
    pub cycle: Vec<Dart>,
    pub class: usize,
}

/// Classes prescribed on the boundary circuits (in the map's order and
/// direction) and on marked cycles.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GConstraints {
    pub boundary: Vec<usize>,
    #[serde(default)]
    pub marks: Vec<Mark>,
}

impl GConstraints {
    pub fn boundary(classes: Vec<usize>) -> Self {
        GConstraints {
            boundary: classes,
            marks: Vec::new(),
        }
    }

    pub fn with_mark(mut self, cycle: Vec<Dart>, class: usize) -> Self {
        self.marks.push(Mark { cycle, class });
        self
    }

    /// Constrained cycles: boundary circuits, then marks.
    fn cycles(&self, map: &RibbonMap) -> Vec<(Vec<Dart>, usize)> {
        map.boundary_circuits()
            .iter()
            .cloned()
            .zip(self.boundary.iter().copied())
            .chain(self.marks.iter().map(|m| (m.cycle.clone(), m.class)))
            .collect()
    }

    pub fn validate(&self, group: &FiniteGroup, map: &RibbonMap) -> Result<()> {
        if self.boundary.len() != map.boundary_circuits().len() {
            return Err(Error::InvalidConstraints(format!(
                "{} boundary classes for {} boundary circuits",
                self.boundary.len(),
                map.boundary_circuits().len()
            )));
        }
        let classes = group.classes().count();
        let mut used = BTreeSet::new();
        for (i, (cycle, class)) in self.cycles(map).into_iter().enumerate() {
            if class >= classes {
                return Err(Error::IndexOutOfRange {
                    what: "class",
                    index: class,
                    len: classes,
                });
            }
            if cycle.is_empty() {
                return Err(Error::InvalidConstraints(format!("constrained cycle {i} is empty")));
            }
            let word = EdgeWord::new(map, map.tail(cycle[0]), cycle.clone())?;
            if word.end(map) != word.base() {
                return Err(Error::InvalidConstraints(format!("constrained cycle {i} is not closed")));
            }
            let mut vertices = BTreeSet::new();
            for &d in &cycle {
                if !vertices.insert(map.tail(d)) {
                    return Err(Error::InvalidConstraints(format!(
                        "constrained cycle {i} is not simple"
                    )));
                }
                if !used.insert(d.edge()) {
                    return Err(Error::InvalidConstraints(format!(
                        "constrained cycles overlap on edge {}",
                        d.edge()
                    )));
                }
            }
            if i >= map.boundary_circuits().len() && cycle.iter().any(|d| map.is_boundary_edge(d.edge())) {
                return Err(Error::InvalidConstraints(format!(
                    "mark {} runs along the boundary",
                    i - map.boundary_circuits().len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct CyclePlan {
    darts: Vec<Dart>,
    members: Vec<usize>,
}

/// Coordinates of the constrained uniform measure.
#[derive(Clone, Debug)]
pub(crate) struct Plan {
    group: Arc<FiniteGroup>,
    edges: usize,
    free: Vec<usize>,
    cycles: Vec<CyclePlan>,
    radices: Vec<usize>,
}

impl Plan {
    pub(crate) fn new(group: &Arc<FiniteGroup>, map: &RibbonMap, constraints: &GConstraints) -> Result<Self> {
        constraints.validate(group, map)?;
        let n = group.order();
        let mut constrained = BTreeSet::new();
        let mut cycles = Vec::new();
        for (cycle, class) in constraints.cycles(map) {
            constrained.extend(cycle.iter().map(|d| d.edge()));
            cycles.push(CyclePlan {
                darts: cycle,
                members: group.classes().members(class).to_vec(),
            });
        }
        let free: Vec<usize> = (0..map.edge_count()).filter(|e| !constrained.contains(e)).collect();
        let mut radices = vec![n; free.len()];
        for c in &cycles {
            radices.extend(std::iter::repeat_n(n, c.darts.len() - 1));
            radices.push(c.members.len());
        }
        Ok(Plan {
            group: group.clone(),
            edges: map.edge_count(),
            free,
            cycles,
            radices,
        })
    }

    pub(crate) fn radices(&self) -> &[usize] {
        &self.radices
    }

    /// Number of coordinate tuples, as a float to survive overflow.
    pub(crate) fn count(&self) -> f64 {
        self.radices.iter().map(|&r| r as f64).product()
    }

    pub(crate) fn check_cap(&self, cap: f64) -> Result<()> {
        let needed = self.count();
        if needed > cap {
            return Err(Error::CapExceeded { needed, cap });
        }
        Ok(())
    }

    pub(crate) fn decode(&self, coords: &[usize], values: &mut [usize]) {
        let g = &*self.group;
        let mut k = 0;
        for &e in &self.free {
            values[e] = coords[k];
            k += 1;
        }
        for c in &self.cycles {
            let mut prod = g.identity();
            let last = c.darts.len() - 1;
            for &d in &c.darts[..last] {
                let x = coords[k];
                k += 1;
                values[d.edge()] = if d.is_positive() { x } else { g.inv(x) };
                prod = g.mul(x, prod);
            }
            let y = c.members[coords[k]];
            k += 1;
            let x = g.mul(y, g.inv(prod));
            let d = c.darts[last];
            values[d.edge()] = if d.is_positive() { x } else { g.inv(x) };
        }
    }

    /// Calls `f` on every configuration, in odometer order.
    pub(crate) fn for_each(&self, mut f: impl FnMut(&[usize])) {
        let mut coords = vec![0usize; self.radices.len()];
        let mut values = vec![0usize; self.edges];
        if self.radices.contains(&0) {
            return;
        }
        loop {
            self.decode(&coords, &mut values);
            f(&values);
            let mut i = coords.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                coords[i] += 1;
                if coords[i] < self.radices[i] {
                    break;
                }
                coords[i] = 0;
            }
        }
    }
}

/// `∫ f dU` for the constrained uniform probability measure, by exact
/// summation over at most `cap` configurations.
pub fn uniform_constrained_mass(
    group: &Arc<FiniteGroup>,
    map: &RibbonMap,
    constraints: &GConstraints,
    cap: f64,
    mut f: impl FnMut(&[usize]) -> f64,
) -> Result<f64> {
    let plan = Plan::new(group, map, constraints)?;
    plan.check_cap(cap)?;
    let mut sum = 0.0;
    plan.for_each(|v| sum += f(v));
    Ok(sum / plan.count())
}

/// Face weights `∏_F Q_{area(F)}(h(∂F))` for one map and kernel.
#[derive(Clone, Debug)]
pub struct DfWeight {
    group: Arc<FiniteGroup>,
    loops: Vec<Vec<Dart>>,
    tables: Vec<Vec<f64>>,
}

impl DfWeight {
    /// Orientable maps read each face along the orientation fixed by the
    /// gauge from vertex 0; non-orientable maps need an inversion-invariant
    /// kernel, and then any reading gives the same weight.
    pub fn new(map: &RibbonMap, kernel: &dyn Kernel) -> Result<Self> {
        let areas = map
            .areas()
            .ok_or_else(|| Error::InvalidArea("the map carries no face areas".into()))?;
        let gauge = map.orientation_gauge();
        if gauge.is_none() && !kernel.inversion_invariant() {
            return Err(Error::InversionRequired);
        }
        let group = kernel.group().clone();
        let loops = oriented_face_loops(map);
        let tables = areas
            .iter()
            .map(|&a| Ok(kernel.density(a)?.values().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(DfWeight { group, loops, tables })
    }

    /// Oriented boundary loop of each face.
    pub fn face_loops(&self) -> &[Vec<Dart>] {
        &self.loops
    }

    pub fn face_holonomy(&self, face: usize, values: &[usize]) -> usize {
        holonomy_of_darts(&self.group, values, &self.loops[face]).expect("configuration matches the map")
    }

    pub fn weight(&self, values: &[usize]) -> f64 {
        let mut w = 1.0;
        for (f, table) in self.tables.iter().enumerate() {
            w *= table[self.face_holonomy(f, values)];
            if w == 0.0 {
                break;
            }
        }
        w
    }
}

/// Boundary loop of each face, read along the orientation fixed by the
/// gauge from vertex 0 when the map is orientable.
pub(crate) fn oriented_face_loops(map: &RibbonMap) -> Vec<Vec<Dart>> {
    let gauge = map.orientation_gauge();
    map.faces()
        .iter()
        .map(|face| {
            let darts = face.darts();
            match (&gauge, face.cycle.first()) {
                (Some(s), Some(&(d, eps))) if s[map.tail(d)] != eps => crate::loops::invert(&darts),
                _ => darts,
            }
        })
        .collect()
}

pub fn df_weight(config: &HolonomyConfig, map: &RibbonMap, kernel: &dyn Kernel) -> Result<f64> {
    if config.values.len() != map.edge_count() {
        return Err(Error::InvalidConstraints("configuration does not match the map".into()));
    }
    Ok(DfWeight::new(map, kernel)?.weight(&config.values))
}

/// Total mass of the discrete holonomy field, by exact summation.
pub fn partition_graph(map: &RibbonMap, constraints: &GConstraints, kernel: &dyn Kernel, cap: f64) -> Result<f64> {
    let w = DfWeight::new(map, kernel)?;
    uniform_constrained_mass(kernel.group(), map, constraints, cap, |v| w.weight(v))
}

#[cfg(test)]
mod tests;
