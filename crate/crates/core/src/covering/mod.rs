//! Ramified G-bundles as monodromy tuples: enumeration, automorphisms, the
//! counting formula, Poisson-ramified bundle measures and their monodromy.
//!
//! A tuple `(a₁..a_g, c₁..c_p, d₁..d_k)` satisfies
//! `w(a)·c₁⋯c_p·d₁⋯d_k = 1`, products read left to right, where `w` is
//! `[a₁,a₂][a₃,a₄]⋯` on orientable surfaces and `a₁²a₂²⋯` otherwise.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{ClassMeasure, FiniteGroup};
use crate::holonomy::{
    bounding_classes, lasso_directions, oriented_face_loops, relation_value, tame_marginal, tame_product, GConstraints,
    Marginal,
};
use crate::levy::{HeatKernel, JumpMeasure, PoissonTruncation};
use crate::loops::TameGenerators;
use crate::surface::{RibbonMap, SurfaceSpec};


/// Default Poisson tail discarded by truncated series.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Proposals tried by the rejection samplers before giving up.
pub const MAX_ATTEMPTS: u64 = 10_000_000;

/// Letters of the surface word: index into `a` and exponent.
pub fn surface_word(orientable: bool, genus: usize) -> Vec<(usize, i8)> {
    if orientable {
        (0..genus / 2)
            .flat_map(|h| {
                let (x, y) = (2 * h, 2 * h + 1);
                [(x, 1), (y, 1), (x, -1), (y, -1)]
            })
            .collect()
    } else {
        (0..genus).flat_map(|i| [(i, 1), (i, 1)]).collect()
    }
}

fn eval_word(group: &FiniteGroup, word: &[(usize, i8)], a: &[usize]) -> usize {
    word.iter().fold(group.identity(), |acc, &(i, s)| {
        group.mul(acc, if s == 1 { a[i] } else { group.inv(a[i]) })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MonodromyTuple {
    pub a: Vec<usize>,
    pub c: Vec<usize>,
    pub d: Vec<usize>,
}

impl MonodromyTuple {
    pub fn k(&self) -> usize {
        self.d.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.a.iter().chain(&self.c).chain(&self.d).copied()
    }

    /// `w(a)·c₁⋯c_p·d₁⋯d_k`
    pub fn relation(&self, group: &FiniteGroup, orientable: bool) -> usize {
        let genus = self.a.len();
        let w = eval_word(group, &surface_word(orientable, genus), &self.a);
        group.product(std::iter::once(w).chain(self.c.iter().copied()).chain(self.d.iter().copied()))
    }

    /// Checks class membership, non-trivial ramification and the relation.
    pub fn is_valid(&self, group: &FiniteGroup, spec: &SurfaceSpec) -> bool {
        self.a.len() == spec.genus
            && self.c.len() == spec.boundary.len()
            && self.c.iter().zip(&spec.boundary).all(|(&x, &k)| group.classes().class_of(x) == k)
            && self.d.iter().all(|&x| x != group.identity())
            && self.relation(group, spec.orientable) == group.identity()
    }

    /// Simultaneous conjugation by `g`.
    pub fn conjugate(&self, group: &FiniteGroup, g: usize) -> Self {
        let conj = |v: &[usize]| v.iter().map(|&x| group.conj(g, x)).collect();
        MonodromyTuple {
            a: conj(&self.a),
            c: conj(&self.c),
            d: conj(&self.d),
        }
    }

    /// `∏ Π₁({d_i})`.
    pub fn weight(&self, pi1: &ClassMeasure<f64>) -> f64 {
        self.d.iter().map(|&x| *pi1.weight(x)).product()
    }
}

/// Order of the centralizer of the subgroup generated by the tuple.
pub fn aut_order(group: &FiniteGroup, tuple: &MonodromyTuple) -> usize {
    let xs: Vec<usize> = tuple.elements().collect();
    group.centralizer_order(&xs)
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedBundle {
    pub tuple: MonodromyTuple,
    pub weight: f64,
    pub aut: usize,
}

impl WeightedBundle {
    pub fn new(group: &FiniteGroup, pi: &JumpMeasure, tuple: MonodromyTuple) -> Result<Self> {
        let pi1 = normalized(pi)?;
        Ok(WeightedBundle {
            weight: tuple.weight(&pi1),
            aut: aut_order(group, &tuple),
            tuple,
        })
    }
}

fn normalized(pi: &JumpMeasure) -> Result<ClassMeasure<f64>> {
    pi.normalized()
        .ok_or_else(|| Error::NotAdmissible("the jump measure has zero mass".into()))
}

fn check_spec(group: &FiniteGroup, spec: &SurfaceSpec) -> Result<()> {
    let count = group.classes().count();
    match spec.boundary.iter().find(|&&c| c >= count) {
        Some(&c) => Err(Error::IndexOutOfRange {
            what: "class",
            index: c,
            len: count,
        }),
        None => Ok(()),
    }
}

fn check_pi(pi: &JumpMeasure, orientable: bool) -> Result<()> {
    if !orientable && !pi.inversion_invariant() {
        return Err(Error::InversionRequired);
    }
    Ok(())
}

/// Every tuple with `k` ramification points, in lexicographic order of
/// `(a, c, d)`; the last `d` is forced by the relation.
pub fn enumerate_h(group: &FiniteGroup, spec: &SurfaceSpec, k: usize, cap: f64) -> Result<Vec<MonodromyTuple>> {
    check_spec(group, spec)?;
    let n = group.order();
    let cl = group.classes();
    let (g, p) = (spec.genus, spec.boundary.len());
    let needed = (n as f64).powi((g + p + k) as i32 - 1);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let word = surface_word(spec.orientable, g);
    let free_d = k.saturating_sub(1);
    let mut radices = vec![n; g];
    radices.extend(spec.boundary.iter().map(|&c| cl.size(c)));
    radices.extend(std::iter::repeat_n(n - 1, free_d));

    let mut out = Vec::new();
    let mut coords = vec![0usize; radices.len()];
    if radices.contains(&0) {
        return Ok(out);
    }
    loop {
        let a: Vec<usize> = coords[..g].to_vec();
        let c: Vec<usize> = spec
            .boundary
            .iter()
            .zip(&coords[g..g + p])
            .map(|(&cls, &i)| cl.members(cls)[i])
            .collect();
        // non-identity elements are 1..n
        let mut d: Vec<usize> = coords[g + p..].iter().map(|&i| i + 1).collect();
        let head = group.product(
            std::iter::once(eval_word(group, &word, &a))
                .chain(c.iter().copied())
                .chain(d.iter().copied()),
        );
        let keep = if k == 0 {
            head == group.identity()
        } else {
            let last = group.inv(head);
            d.push(last);
            last != group.identity()
        };
        if keep {
            out.push(MonodromyTuple { a, c, d });
        }
        let mut i = coords.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            coords[i] += 1;
            if coords[i] < radices[i] {
                break;
            }
            coords[i] = 0;
        }
    }
}

/// Both sides of the counting formula in exact arithmetic:
/// `Σ_R f(R)/|Aut R|` over conjugation orbits, and `(1/n)·Σ_{h∈H} f(h)`.
pub fn counting_check(
    group: &FiniteGroup,
    spec: &SurfaceSpec,
    k: usize,
    cap: f64,
    f: &dyn Fn(&MonodromyTuple) -> BigRational,
) -> Result<(BigRational, BigRational)> {
    let tuples = enumerate_h(group, spec, k, cap)?;
    let n = group.order();
    let index: HashMap<&MonodromyTuple, usize> = tuples.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut seen = vec![false; tuples.len()];
    let mut lhs = BigRational::zero();
    for (i, t) in tuples.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let value = f(t);
        let aut = aut_order(group, t);
        let mut orbit = 0usize;
        for g in 0..n {
            let image = t.conjugate(group, g);
            let j = *index
                .get(&image)
                .ok_or_else(|| Error::InvalidConstraints("tuple set is not conjugation-stable".into()))?;
            if !seen[j] {
                seen[j] = true;
                orbit += 1;
                if f(&tuples[j]) != value {
                    return Err(Error::NotInvariant(format!("tuple {j} differs from its conjugate {i}")));
                }
            }
        }
        if orbit * aut != n {
            return Err(Error::NotInvariant(format!("orbit of tuple {i} has size {orbit}, |Aut| = {aut}")));
        }
        lhs += value / BigRational::from_integer(BigInt::from(aut));
    }
    let raw = tuples.iter().fold(BigRational::zero(), |acc, t| acc + f(t));
    let rhs = raw / BigRational::from_integer(BigInt::from(n));
    Ok((lhs, rhs))
}

fn boundary_size(group: &FiniteGroup, spec: &SurfaceSpec) -> f64 {
    spec.boundary.iter().map(|&c| group.classes().size(c) as f64).product()
}

/// Mass of the based bundle measure with `k` fixed ramification points:
/// `n^{1−g}/∏|𝒪_i| · Σ_{h∈H} ∏ Π₁({d_i})`.
pub fn bb_mass_fixed(pi: &JumpMeasure, spec: &SurfaceSpec, k: usize, cap: f64) -> Result<f64> {
    let group = pi.group();
    check_pi(pi, spec.orientable)?;
    let pi1 = normalized(pi)?;
    let sum: f64 = enumerate_h(group, spec, k, cap)?.iter().map(|t| t.weight(&pi1)).sum();
    Ok((group.order() as f64).powi(1 - spec.genus as i32) / boundary_size(group, spec) * sum)
}

/// Law of `w(a)·c₁⋯c_p` for uniform `a` and class-uniform `c`, by direct
/// enumeration.
pub fn relation_law(group: &FiniteGroup, spec: &SurfaceSpec, cap: f64) -> Result<Vec<f64>> {
    check_spec(group, spec)?;
    let n = group.order();
    let cl = group.classes();
    let g = spec.genus;
    let needed = (n as f64).powi(g as i32) * boundary_size(group, spec);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let word = surface_word(spec.orientable, g);
    // law of w(a), then fold in each boundary class
    let mut law = vec![0.0; n];
    let mut a = vec![0usize; g];
    let unit = (n as f64).powi(-(g as i32));
    loop {
        law[eval_word(group, &word, &a)] += unit;
        let mut i = g;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            a[i] += 1;
            if a[i] < n {
                break;
            }
            a[i] = 0;
        }
        if a.iter().all(|&x| x == 0) {
            break;
        }
    }
    for &c in &spec.boundary {
        let members = cl.members(c);
        let mut next = vec![0.0; n];
        for (x, &m) in law.iter().enumerate() {
            for &y in members {
                next[group.mul(x, y)] += m / members.len() as f64;
            }
        }
        law = next;
    }
    Ok(law)
}

/// `Σ_k Pois(k; λ)·Π₁^{∗k}` truncated at `tail_tol`, as weights on `G`.
#[derive(Clone, Debug)]
pub struct RamificationSeries {
    pub weights: Vec<f64>,
    pub truncation: usize,
    pub tail: f64,
}

pub fn ramification_series(pi: &JumpMeasure, area: f64, tail_tol: f64) -> Result<RamificationSeries> {
    let group = pi.group();
    let pi1 = normalized(pi)?;
    let pois = PoissonTruncation::new(pi.total_rate() * area, tail_tol)?;
    let n = group.order();
    let mut weights = vec![0.0; n];
    let mut power = vec![0.0; n];
    power[group.identity()] = 1.0;
    for (k, &p) in pois.weights.iter().enumerate() {
        if k > 0 {
            let mut next = vec![0.0; n];
            for (x, &m) in power.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                for (y, &q) in pi1.weights().iter().enumerate() {
                    next[group.mul(x, y)] += m * q;
                }
            }
            power = next;
        }
        for (w, &m) in weights.iter_mut().zip(&power) {
            *w += p * m;
        }
    }
    Ok(RamificationSeries {
        weights,
        truncation: pois.max_index(),
        tail: pois.tail,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BbMass {
    pub mass: f64,
    pub truncation: usize,
    pub tail: f64,
}

/// Total mass of the Poisson-ramified based bundle measure, summed over the
/// number of ramification points without characters:
/// `n · Σ_x law(x)·Σ_k Pois(k)·Π₁^{∗k}({x⁻¹})`.
///
/// This equals `Σ_x Q_t(x⁻¹)·m({x})`, which is the partition function when
/// `Π` is inversion-invariant and, in general, the partition function with
/// every boundary class inverted.
pub fn bb_mass(pi: &JumpMeasure, spec: &SurfaceSpec, tail_tol: f64, cap: f64) -> Result<BbMass> {
    check_pi(pi, spec.orientable)?;
    let group = pi.group();
    let law = relation_law(group, spec, cap)?;
    let series = ramification_series(pi, spec.area, tail_tol)?;
    let n = group.order() as f64;
    let mass = law
        .iter()
        .enumerate()
        .map(|(x, &m)| m * series.weights[group.inv(x)])
        .sum::<f64>()
        * n;
    Ok(BbMass {
        mass,
        truncation: series.truncation,
        tail: series.tail,
    })
}

/// Joint masses of `(a₁..a_g, c₁..c_p, l₁..l_{f−1})` under the
/// Poisson-ramified bundle measure: each face contributes
/// `Σ_k Pois(k; Π(G)t_i)·Π₁^{∗k}` at its lasso's monodromy. No heat kernel
/// or character enters.
pub fn monodromy_marginal(
    map: &RibbonMap,
    tame: &TameGenerators,
    constraints: &GConstraints,
    pi: &JumpMeasure,
    tail_tol: f64,
    cap: f64,
) -> Result<(Marginal, f64)> {
    let loops = oriented_face_loops(map);
    check_pi(pi, map.orientation_gauge().is_some())?;
    let areas = map
        .areas()
        .ok_or_else(|| Error::InvalidArea("the map carries no face areas".into()))?;
    let mut tables = Vec::with_capacity(tame.faces.len());
    let mut tail = 0.0f64;
    for &face in &tame.faces {
        let s = ramification_series(pi, areas[face], tail_tol)?;
        tail = tail.max(s.tail);
        tables.push(s.weights);
    }
    Ok((tame_product(pi.group(), map, tame, constraints, &loops, &tables, cap)?, tail))
}

#[derive(Clone, Debug, Serialize)]
pub struct HoloMonoReport {
    /// Masses from the discrete field summed over edge configurations.
    pub holonomy: Vec<f64>,
    /// Masses from the ramified-bundle series.
    pub monodromy: Vec<f64>,
    pub holonomy_total: f64,
    pub monodromy_total: f64,
    pub max_abs_diff: f64,
    pub tail: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares the joint law of the tame generators under the holonomy field
/// (heat kernel, summed over the graph) with their law as monodromy of the
/// Poisson-ramified bundle (jump-count series).
pub fn verify_holo_mono(
    map: &RibbonMap,
    tame: &TameGenerators,
    constraints: &GConstraints,
    pi: &JumpMeasure,
    tol: f64,
    tail_tol: f64,
    cap: f64,
) -> Result<HoloMonoReport> {
    let kernel = HeatKernel::new(pi.clone())?;
    let hf = tame_marginal(map, tame, constraints, &kernel, cap)?;
    let (mf, tail) = monodromy_marginal(map, tame, constraints, pi, tail_tol, cap)?;
    Ok(HoloMonoReport::compare(hf, mf, tail, tol))
}

impl HoloMonoReport {
    pub fn compare(hf: Marginal, mf: Marginal, tail: f64, tol: f64) -> Self {
        let diff = hf.max_abs_diff(&mf).max((hf.total - mf.total).abs());
        HoloMonoReport {
            holonomy: hf.masses,
            monodromy: mf.masses,
            holonomy_total: hf.total,
            monodromy_total: mf.total,
            max_abs_diff: diff,
            tail,
            tol,
            pass: diff <= tol,
        }
    }
}

/// Poisson ramification counts with their intensities `Π(G)·area`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RamificationCounts {
    pub counts: Vec<usize>,
    pub intensities: Vec<f64>,
}

/// How the ramification count interacts with rejection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoveringMode {
    /// Counts and tuple are redrawn together, giving the normalized bundle
    /// measure; counts are then tilted away from Poisson by the relation.
    Annealed,
    /// Counts are drawn once from the Poisson law and the tuple is drawn
    /// from the bundle measure given them.
    Quenched,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoveringSample {
    pub counts: RamificationCounts,
    pub tuple: MonodromyTuple,
    pub attempts: u64,
}

fn poisson<R: Rng>(lambda: f64, rng: &mut R) -> usize {
    // inversion by sequential search; intensities here are small
    let u: f64 = rng.random();
    let mut p = (-lambda).exp();
    let mut cdf = p;
    let mut k = 0;
    while u > cdf && p > 0.0 {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
    }
    k
}

fn draw<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random::<f64>() * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Rejection sampler for a ramified bundle on the surface `spec`: `a`
/// uniform, `c_i` uniform in `𝒪_i`, `d` i.i.d. `Π₁`, accepted when the
/// relation holds.
pub fn sample_covering(pi: &JumpMeasure, spec: &SurfaceSpec, mode: CoveringMode, seed: u64) -> Result<CoveringSample> {
    let group = pi.group();
    check_spec(group, spec)?;
    check_pi(pi, spec.orientable)?;
    let pi1 = normalized(pi)?;
    let lambda = pi.total_rate() * spec.area;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = group.order();
    let cl = group.classes();
    let mut k = poisson(lambda, &mut rng);
    for attempt in 1..=MAX_ATTEMPTS {
        if mode == CoveringMode::Annealed && attempt > 1 {
            k = poisson(lambda, &mut rng);
        }
        let tuple = MonodromyTuple {
            a: (0..spec.genus).map(|_| rng.random_range(0..n)).collect(),
            c: spec
                .boundary
                .iter()
                .map(|&c| {
                    let m = cl.members(c);
                    m[rng.random_range(0..m.len())]
                })
                .collect(),
            d: (0..k).map(|_| draw(pi1.weights(), &mut rng)).collect(),
        };
        if tuple.relation(group, spec.orientable) == group.identity() {
            return Ok(CoveringSample {
                counts: RamificationCounts {
                    counts: vec![k],
                    intensities: vec![lambda],
                },
                tuple,
                attempts: attempt,
            });
        }
    }
    Err(Error::AcceptanceTooLow { attempts: MAX_ATTEMPTS })
}

/// A ramified bundle on a map with areas, read through tame generators.
#[derive(Clone, Debug, Serialize)]
pub struct MapCoveringSample {
    pub counts: RamificationCounts,
    /// Local monodromies in each face, in the order they are multiplied.
    pub jumps: Vec<Vec<usize>>,
    /// Values of `a₁..a_g, c₁..c_p, l₁..l_f`.
    pub generators: Vec<usize>,
    pub attempts: u64,
}

/// Rejection sampler on a map: per-face Poisson counts, `d` i.i.d. `Π₁`
/// with `h(l_i)` their product around face `i`, accepted when the tame
/// relation holds.
pub fn sample_covering_map(
    map: &RibbonMap,
    tame: &TameGenerators,
    constraints: &GConstraints,
    pi: &JumpMeasure,
    mode: CoveringMode,
    seed: u64,
) -> Result<MapCoveringSample> {
    let group = pi.group();
    let loops = oriented_face_loops(map);
    check_pi(pi, map.orientation_gauge().is_some())?;
    let pi1 = normalized(pi)?;
    let areas = map
        .areas()
        .ok_or_else(|| Error::InvalidArea("the map carries no face areas".into()))?;
    let reversed = lasso_directions(tame, &loops)?;
    let classes = bounding_classes(group, map, tame, constraints)?;
    let intensities: Vec<f64> = tame.faces.iter().map(|&f| pi.total_rate() * areas[f]).collect();
    let n = group.order();
    let (g, p, f) = (tame.a.len(), tame.c.len(), tame.l.len());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: Vec<usize> = intensities.iter().map(|&l| poisson(l, &mut rng)).collect();
    for attempt in 1..=MAX_ATTEMPTS {
        if mode == CoveringMode::Annealed && attempt > 1 {
            counts = intensities.iter().map(|&l| poisson(l, &mut rng)).collect();
        }
        let mut gens: Vec<usize> = (0..g).map(|_| rng.random_range(0..n)).collect();
        gens.extend(classes.iter().map(|m| m[rng.random_range(0..m.len())]));
        let jumps: Vec<Vec<usize>> = counts
            .iter()
            .map(|&k| (0..k).map(|_| draw(pi1.weights(), &mut rng)).collect())
            .collect();
        for (i, js) in jumps.iter().enumerate() {
            // d_k⋯d₁ around the face, read against the lasso when reversed
            let x = js.iter().fold(group.identity(), |acc, &d| group.mul(d, acc));
            gens.push(if reversed[i] { group.inv(x) } else { x });
        }
        if relation_value(group, tame, &gens) == gens[g + p + f - 1] {
            return Ok(MapCoveringSample {
                counts: RamificationCounts { counts, intensities },
                jumps,
                generators: gens,
                attempts: attempt,
            });
        }
    }
    Err(Error::AcceptanceTooLow { attempts: MAX_ATTEMPTS })
}
