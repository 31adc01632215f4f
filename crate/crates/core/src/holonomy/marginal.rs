//! Exact joint laws of loop holonomies.

use std::sync::Arc;

use super::{DfWeight, GConstraints, Plan};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::levy::Kernel;
use crate::loops::{conjugator, holonomy_of_darts, invert, reduce_darts, EdgeWord, TameGenerators};
use crate::surface::{Dart, RibbonMap};

/// Largest joint table built.
const MAX_CELLS: f64 = 1e7;

/// Unnormalized joint masses of `k` holonomies, indexed with the first
/// loop most significant. `total` is the partition function.
#[derive(Clone, Debug)]
pub struct Marginal {
    pub group: Arc<FiniteGroup>,
    pub arity: usize,
    pub masses: Vec<f64>,
    pub total: f64,
}

impl Marginal {
    fn zeros(group: &Arc<FiniteGroup>, arity: usize) -> Result<Self> {
        let cells = (group.order() as f64).powi(arity as i32);
        if cells > MAX_CELLS {
            return Err(Error::CapExceeded {
                needed: cells,
                cap: MAX_CELLS,
            });
        }
        Ok(Marginal {
            group: group.clone(),
            arity,
            masses: vec![0.0; cells as usize],
            total: 0.0,
        })
    }

    pub fn index(&self, elements: &[usize]) -> usize {
        let n = self.group.order();
        elements.iter().fold(0, |acc, &x| acc * n + x)
    }

    pub fn mass(&self, elements: &[usize]) -> f64 {
        self.masses[self.index(elements)]
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.masses.iter().map(|m| m / self.total).collect()
    }

    pub fn max_abs_diff(&self, other: &Marginal) -> f64 {
        self.masses
            .iter()
            .zip(&other.masses)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Joint masses of `(h(gen₁),…,h(gen_k))` under the constrained uniform
/// measure, weighted by the discrete field when `kernel` is given.
pub fn marginal_generators(
    group: &Arc<FiniteGroup>,
    map: &RibbonMap,
    constraints: &GConstraints,
    kernel: Option<&dyn Kernel>,
    gens: &[EdgeWord],
    cap: f64,
) -> Result<Marginal> {
    for w in gens {
        EdgeWord::new(map, w.base(), w.darts().to_vec())?;
    }
    let plan = Plan::new(group, map, constraints)?;
    plan.check_cap(cap)?;
    let weight = kernel.map(|k| DfWeight::new(map, k)).transpose()?;
    let mut out = Marginal::zeros(group, gens.len())?;
    let scale = 1.0 / plan.count();
    let n = group.order();
    plan.for_each(|v| {
        let w = weight.as_ref().map_or(1.0, |d| d.weight(v)) * scale;
        if w == 0.0 {
            return;
        }
        let idx = gens.iter().fold(0, |acc, g| {
            acc * n + holonomy_of_darts(group, v, g.darts()).expect("word lies in the map")
        });
        out.masses[idx] += w;
        out.total += w;
    });
    Ok(out)
}

/// Joint masses of `(a₁..a_g, c₁..c_p, l₁..l_{f−1})`.
pub fn tame_marginal(
    map: &RibbonMap,
    tame: &TameGenerators,
    constraints: &GConstraints,
    kernel: &dyn Kernel,
    cap: f64,
) -> Result<Marginal> {
    let gens: Vec<EdgeWord> = tame
        .a
        .iter()
        .chain(&tame.c)
        .chain(&tame.l[..tame.l.len() - 1])
        .cloned()
        .collect();
    marginal_generators(kernel.group(), map, constraints, Some(kernel), &gens, cap)
}

/// The same masses in closed form:
/// `n^{1−g−f}/∏|𝒪_i| · ∏_i Q_{t_i}(h(l_i))` on `G^g × 𝒪₁×⋯×𝒪_p × G^{f−1}`,
/// with `h(l_f)` read off the relation.
pub fn tame_closed_form(
    map: &RibbonMap,
    tame: &TameGenerators,
    constraints: &GConstraints,
    kernel: &dyn Kernel,
    cap: f64,
) -> Result<Marginal> {
    let weight = DfWeight::new(map, kernel)?;
    let areas = map.areas().expect("checked by DfWeight");
    let n = kernel.group().order() as f64;
    let tables = tame
        .faces
        .iter()
        .map(|&face| Ok(kernel.density(areas[face])?.values().iter().map(|q| q / n).collect()))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    tame_product(kernel.group(), map, tame, constraints, weight.face_loops(), &tables, cap)
}

/// Masses `n^{1−g}/∏|𝒪_i| · ∏_i φ_i(h(l_i))` on `G^g × 𝒪₁×⋯×𝒪_p × G^{f−1}`,
/// where `φ_i = tables[i]` is read along the orientation of the face
/// bounded by `l_i` and `h(l_f)` comes from the relation.
pub(crate) fn tame_product(
    group: &Arc<FiniteGroup>,
    map: &RibbonMap,
    tame: &TameGenerators,
    constraints: &GConstraints,
    face_loops: &[Vec<Dart>],
    tables: &[Vec<f64>],
    cap: f64,
) -> Result<Marginal> {
    let (g, p, f) = (tame.a.len(), tame.c.len(), tame.l.len());
    let n = group.order();
    let reversed = lasso_directions(tame, face_loops)?;
    let classes = bounding_classes(group, map, tame, constraints)?;

    let mut radices = vec![n; g];
    radices.extend(classes.iter().map(|m| m.len()));
    radices.extend(std::iter::repeat_n(n, f - 1));
    let count: f64 = radices.iter().map(|&r| r as f64).product();
    if count > cap {
        return Err(Error::CapExceeded { needed: count, cap });
    }
    let prefactor = (n as f64).powi(1 - g as i32)
        / classes.iter().map(|m| m.len() as f64).product::<f64>();

    let mut out = Marginal::zeros(group, g + p + f - 1)?;
    let mut coords = vec![0usize; radices.len()];
    let mut elems = vec![0usize; g + p + f];
    loop {
        for (k, &c) in coords.iter().enumerate() {
            elems[k] = if k >= g && k < g + p { classes[k - g][c] } else { c };
        }
        elems[g + p + f - 1] = relation_value(group, tame, &elems);
        let mut w = prefactor;
        for i in 0..f {
            let x = elems[g + p + i];
            w *= tables[i][if reversed[i] { group.inv(x) } else { x }];
            if w == 0.0 {
                break;
            }
        }
        let idx = out.index(&elems[..g + p + f - 1]);
        out.masses[idx] += w;
        out.total += w;

        let mut k = coords.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            coords[k] += 1;
            if coords[k] < radices[k] {
                break;
            }
            coords[k] = 0;
        }
    }
}

/// Members of the class each bounding lasso's holonomy lies in: the
/// circuit's class, inverted when the lasso runs against the circuit.
pub(crate) fn bounding_classes<'g>(
    group: &'g FiniteGroup,
    map: &RibbonMap,
    tame: &TameGenerators,
    constraints: &GConstraints,
) -> Result<Vec<&'g [usize]>> {
    constraints.validate(group, map)?;
    if !constraints.marks.is_empty() {
        return Err(Error::InvalidConstraints("tame laws take boundary constraints only".into()));
    }
    let cl = group.classes();
    Ok(tame
        .boundary
        .iter()
        .map(|&(k, s)| {
            let c = constraints.boundary[k];
            cl.members(if s == 1 { c } else { cl.inverse(c) })
        })
        .collect())
}

/// Whether each facial lasso runs against the orientation of its face loop.
pub(crate) fn lasso_directions(tame: &TameGenerators, face_loops: &[Vec<Dart>]) -> Result<Vec<bool>> {
    tame.l
        .iter()
        .zip(&tame.faces)
        .enumerate()
        .map(|(i, (l, &face))| {
            let boundary = reduce_darts(&face_loops[face]);
            if conjugator(l.darts(), &boundary).is_some() {
                Ok(false)
            } else if conjugator(l.darts(), &invert(&boundary)).is_some() {
                Ok(true)
            } else {
                Err(Error::InvalidMap(format!("lasso {i} does not go around face {face}")))
            }
        })
        .collect()
}

/// `h(l_f)` forced by the values of `a₁..a_g, c₁..c_p, l₁..l_{f−1}`:
/// `h(c_p)⋯h(c₁)·h(W)·(h(l_{f−1})⋯h(l₁))⁻¹`, where `h(W)` for
/// `W = x₁x₂⋯x_k` is `h(x_k)⋯h(x₁)`.
pub fn relation_value(group: &FiniteGroup, tame: &TameGenerators, gens: &[usize]) -> usize {
    let (g, p, f) = (tame.a.len(), tame.c.len(), tame.l.len());
    let mut rhs = tame.word.iter().fold(group.identity(), |acc, &(i, s)| {
        group.mul(if s == 1 { gens[i] } else { group.inv(gens[i]) }, acc)
    });
    for k in 0..p {
        rhs = group.mul(gens[g + k], rhs);
    }
    let hl = (0..f - 1).fold(group.identity(), |acc, k| group.mul(gens[g + p + k], acc));
    group.mul(rhs, group.inv(hl))
}
