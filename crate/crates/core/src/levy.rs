//! Conjugation-invariant jump processes on a finite group and their heat
//! kernels.
//!
//! `Q_t` is the density (against the uniform probability) of the time-`t`
//! law of the compound Poisson process with jump measure `Π`. It is computed
//! either by the truncated series `n·Σ_k Pois(k; tΠ(G)) Π₁^{∗k}` or by the
//! finite character sum `Σ_α e^{−tλ_α} d_α χ_α`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{CharacterTable, ClassDensity, ClassMeasure, FiniteGroup};

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-9;
const SUPPORT_TOL: f64 = 1e-10;

/// Lévy file contents: per-element rates keyed by a class label.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct LevySpec {
    pub rates: BTreeMap<String, f64>,
}

#[derive(Clone, Debug)]
pub struct JumpMeasure {
    measure: ClassMeasure<f64>,
    inversion_invariant: bool,
}

impl JumpMeasure {
    pub fn new(measure: ClassMeasure<f64>) -> Result<Self> {
        if *measure.weight(0) != 0.0 {
            return Err(Error::InvalidJumpMeasure(
                "jump measure must vanish at the identity".into(),
            ));
        }
        if measure.weights().iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidJumpMeasure("non-finite rate".into()));
        }
        let inversion_invariant = measure.is_inversion_invariant();
        Ok(JumpMeasure {
            measure,
            inversion_invariant,
        })
    }

    /// `rates[c]` is the rate of each single element of class `c`.
    pub fn from_class_rates(group: Arc<FiniteGroup>, rates: &[f64]) -> Result<Self> {
        Self::new(ClassMeasure::from_class_weights(group, rates)?)
    }

    /// Total rate `total` spread evenly over the non-identity elements.
    pub fn uniform_nonidentity(group: Arc<FiniteGroup>, total: f64) -> Result<Self> {
        let n = group.order();
        if n == 1 {
            return Self::new(ClassMeasure::zero(group));
        }
        let mut rates = vec![total / (n - 1) as f64; group.classes().count()];
        rates[0] = 0.0;
        Self::from_class_rates(group, &rates)
    }

    /// Total rate `total` spread evenly over class `c`.
    pub fn on_class(group: Arc<FiniteGroup>, c: usize, total: f64) -> Result<Self> {
        let cl = group.classes();
        if c >= cl.count() {
            return Err(Error::IndexOutOfRange {
                what: "class",
                index: c,
                len: cl.count(),
            });
        }
        let mut rates = vec![0.0; cl.count()];
        rates[c] = total / cl.size(c) as f64;
        Self::from_class_rates(group, &rates)
    }

    /// Reads a Lévy file. Keys may name any element of the class; absent
    /// classes get rate 0.
    pub fn from_spec(group: Arc<FiniteGroup>, spec: &LevySpec) -> Result<Self> {
        let cl = group.classes();
        let mut rates = vec![0.0; cl.count()];
        let mut seen = vec![false; cl.count()];
        for (label, &rate) in &spec.rates {
            let x = group.element_by_label(label).ok_or_else(|| {
                Error::InvalidJumpMeasure(format!("no element labelled {label:?}"))
            })?;
            let c = cl.class_of(x);
            if seen[c] {
                return Err(Error::InvalidJumpMeasure(format!(
                    "class of {label:?} given twice"
                )));
            }
            if rate < 0.0 {
                return Err(Error::InvalidJumpMeasure(format!(
                    "negative rate for {label:?}"
                )));
            }
            seen[c] = true;
            rates[c] = rate;
        }
        Self::from_class_rates(group, &rates)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.measure.group()
    }

    pub fn measure(&self) -> &ClassMeasure<f64> {
        &self.measure
    }

    pub fn rate(&self, x: usize) -> f64 {
        *self.measure.weight(x)
    }

    /// `Π(G)`
    pub fn total_rate(&self) -> f64 {
        *self.measure.mass()
    }

    pub fn inversion_invariant(&self) -> bool {
        self.inversion_invariant
    }

    /// `Π₁ = Π/Π(G)`, or `None` when `Π = 0`.
    pub fn normalized(&self) -> Option<ClassMeasure<f64>> {
        let total = self.total_rate();
        (total > 0.0).then(|| self.measure.scale(&(1.0 / total)))
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.group().order())
            .filter(|&x| self.rate(x) > 0.0)
            .collect()
    }

    /// Membership mask of `⟨supp Π⟩`.
    pub fn generated_subgroup(&self) -> Vec<bool> {
        self.group().generated_subgroup(&self.support())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub conjugation_invariant: bool,
    pub generated_subgroup: Vec<usize>,
    pub generates_group: bool,
    pub inversion_invariant: bool,
    pub inversion_required: bool,
    pub admissible: bool,
}

pub fn check_admissible(pi: &JumpMeasure, require_inversion: bool) -> AdmissibilityReport {
    let g = pi.group();
    let conjugation_invariant = (0..g.order()).all(|x| {
        (0..g.order()).all(|h| pi.rate(g.conj(h, x)) == pi.rate(x))
    });
    let mask = pi.generated_subgroup();
    let generated_subgroup: Vec<usize> = (0..g.order()).filter(|&x| mask[x]).collect();
    let generates_group = generated_subgroup.len() == g.order();
    let inversion_invariant = pi.inversion_invariant();
    AdmissibilityReport {
        conjugation_invariant,
        generated_subgroup,
        generates_group,
        inversion_invariant,
        inversion_required: require_inversion,
        admissible: conjugation_invariant
            && generates_group
            && (inversion_invariant || !require_inversion),
    }
}

/// Poisson weights `Pois(k; λ)` for `k ≤ K`, where `K` is the smallest index
/// whose upper tail is at most `tail_tol`.
#[derive(Clone, Debug)]
pub struct PoissonTruncation {
    pub weights: Vec<f64>,
    /// Mass beyond the last retained index.
    pub tail: f64,
}

impl PoissonTruncation {
    pub fn new(lambda: f64, tail_tol: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidTime(lambda));
        }
        if lambda == 0.0 {
            return Ok(PoissonTruncation {
                weights: vec![1.0],
                tail: 0.0,
            });
        }
        let kmax = (lambda + 40.0 * lambda.sqrt() + 50.0).ceil() as usize;
        let mut log_fact = 0.0;
        let mut pmf = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            if k > 0 {
                log_fact += (k as f64).ln();
            }
            pmf.push((-lambda + k as f64 * lambda.ln() - log_fact).exp());
        }
        // suffix[k] = Σ_{j ≥ k} pmf[j]; the mass past kmax is far below f64 resolution
        let mut suffix = vec![0.0; kmax + 2];
        for k in (0..=kmax).rev() {
            suffix[k] = suffix[k + 1] + pmf[k];
        }
        let cut = (0..=kmax)
            .find(|&k| suffix[k + 1] <= tail_tol)
            .unwrap_or(kmax);
        pmf.truncate(cut + 1);
        Ok(PoissonTruncation {
            weights: pmf,
            tail: suffix[cut + 1],
        })
    }

    pub fn max_index(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn retained(&self) -> f64 {
        self.weights.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct SeriesKernel {
    pub density: ClassDensity,
    /// Largest number of jumps retained.
    pub truncation: usize,
    /// Poisson mass discarded before renormalization.
    pub defect: f64,
}

/// `Q_t` by the jump-count series; independent of characters.
pub fn heat_kernel_series(pi: &JumpMeasure, t: f64, tail_tol: f64) -> Result<SeriesKernel> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    let g = pi.group().clone();
    let n = g.order();
    let Some(step) = pi.normalized().filter(|_| t > 0.0) else {
        let mut v = vec![0.0; n];
        v[0] = n as f64;
        return Ok(SeriesKernel {
            density: ClassDensity::raw(g, v),
            truncation: 0,
            defect: 0.0,
        });
    };
    let pois = PoissonTruncation::new(t * pi.total_rate(), tail_tol)?;
    let mut acc = vec![0.0; n];
    let mut power = crate::group::delta_class::<f64>(&g, 0)?;
    for (k, &p) in pois.weights.iter().enumerate() {
        if k > 0 {
            power = power.convolve(&step)?;
        }
        for (a, w) in acc.iter_mut().zip(power.weights()) {
            *a += p * w;
        }
    }
    let scale = n as f64 / pois.retained();
    Ok(SeriesKernel {
        density: ClassDensity::raw(g, acc.into_iter().map(|a| a * scale).collect()),
        truncation: pois.max_index(),
        defect: pois.tail,
    })
}

/// Exponents `λ_α = Π(G) − Π̂(α)/d_α`; real when `Π` is inversion-invariant.
pub fn exponents(pi: &JumpMeasure, table: &CharacterTable) -> Result<Vec<Complex64>> {
    (0..table.count())
        .map(|a| {
            let mut hat = pi.measure().fourier_coefficient(table, a)?;
            if pi.inversion_invariant() {
                hat.im = 0.0;
            }
            Ok(Complex64::new(pi.total_rate(), 0.0) - hat / table.dim(a) as f64)
        })
        .collect()
}

/// `Q_t` by the character sum.
pub fn heat_kernel_characters(
    pi: &JumpMeasure,
    t: f64,
    table: &CharacterTable,
) -> Result<ClassDensity> {
    let lambdas = exponents(pi, table)?;
    character_sum(pi.group(), &lambdas, table, t)
}

fn character_sum(
    g: &Arc<FiniteGroup>,
    lambdas: &[Complex64],
    table: &CharacterTable,
    t: f64,
) -> Result<ClassDensity> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    let cl = g.classes();
    let coeffs: Vec<Complex64> = lambdas
        .iter()
        .enumerate()
        .map(|(a, l)| (-t * l).exp() * table.dim(a) as f64)
        .collect();
    let mut per_class = Vec::with_capacity(cl.count());
    for c in 0..cl.count() {
        let z: Complex64 = (0..table.count())
            .map(|a| coeffs[a] * table.value(a, c))
            .sum();
        if z.im.abs() > IMAG_TOL {
            return Err(Error::ImaginaryResidual(z.im.abs()));
        }
        per_class.push(z.re);
    }
    let values = (0..g.order()).map(|x| per_class[cl.class_of(x)]).collect();
    Ok(ClassDensity::raw(g.clone(), values))
}

/// A family of class densities indexed by time.
pub trait Kernel: Send + Sync {
    fn group(&self) -> &Arc<FiniteGroup>;
    fn density(&self, t: f64) -> Result<ClassDensity>;
    fn inversion_invariant(&self) -> bool;
}

/// Heat kernel of a jump measure, evaluated by characters with a per-time cache.
#[derive(Debug)]
pub struct HeatKernel {
    jump: JumpMeasure,
    table: CharacterTable,
    exponents: Vec<Complex64>,
    cache: Mutex<HashMap<u64, ClassDensity>>,
}

impl HeatKernel {
    pub fn new(jump: JumpMeasure) -> Result<Self> {
        let table = CharacterTable::compute(jump.group())?;
        Self::with_table(jump, table)
    }

    pub fn with_table(jump: JumpMeasure, table: CharacterTable) -> Result<Self> {
        let exponents = exponents(&jump, &table)?;
        Ok(HeatKernel {
            jump,
            table,
            exponents,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn jump(&self) -> &JumpMeasure {
        &self.jump
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn exponents(&self) -> &[Complex64] {
        &self.exponents
    }

    pub fn series(&self, t: f64, tail_tol: f64) -> Result<SeriesKernel> {
        heat_kernel_series(&self.jump, t, tail_tol)
    }
}

impl Kernel for HeatKernel {
    fn group(&self) -> &Arc<FiniteGroup> {
        self.jump.group()
    }

    fn density(&self, t: f64) -> Result<ClassDensity> {
        let key = t.to_bits();
        if let Some(d) = self.cache.lock().expect("cache poisoned").get(&key) {
            return Ok(d.clone());
        }
        let d = character_sum(self.jump.group(), &self.exponents, &self.table, t)?;
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(key, d.clone());
        Ok(d)
    }

    fn inversion_invariant(&self) -> bool {
        self.jump.inversion_invariant()
    }
}

/// A kernel whose values are multiplied by `1 + ε` at one class; a negative
/// control for verification suites.
pub struct PerturbedKernel<K> {
    pub inner: K,
    pub class: usize,
    pub epsilon: f64,
}

impl<K: Kernel> Kernel for PerturbedKernel<K> {
    fn group(&self) -> &Arc<FiniteGroup> {
        self.inner.group()
    }

    fn density(&self, t: f64) -> Result<ClassDensity> {
        let d = self.inner.density(t)?;
        let g = d.group().clone();
        let values = (0..g.order())
            .map(|x| {
                let f = d.value(x);
                if g.classes().class_of(x) == self.class {
                    f * (1.0 + self.epsilon)
                } else {
                    f
                }
            })
            .collect();
        Ok(ClassDensity::raw(g, values))
    }

    fn inversion_invariant(&self) -> bool {
        self.inner.inversion_invariant()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    pub time: f64,
    pub subgroup: Vec<usize>,
    pub min_on_subgroup: f64,
    pub max_abs_off_subgroup: f64,
    pub positive_on_subgroup: bool,
    pub vanishes_off_subgroup: bool,
    /// `(1/n) Σ_{x≠1} Q_t(x)`
    pub off_identity_mass: f64,
    /// `tΠ(G)`
    pub off_identity_bound: f64,
    pub small_time_bound_holds: bool,
    pub pass: bool,
}

/// Checks `Q_t > 0` exactly on `⟨supp Π⟩`, and the one-jump bound.
pub fn positivity_support_check(pi: &JumpMeasure, t: f64) -> Result<PositivityReport> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    let kernel = HeatKernel::new(pi.clone())?;
    let q = kernel.density(t)?;
    let g = pi.group();
    let n = g.order() as f64;
    let mask = pi.generated_subgroup();
    let mut min_on = f64::INFINITY;
    let mut max_off: f64 = 0.0;
    for x in 0..g.order() {
        if mask[x] {
            min_on = min_on.min(q.value(x));
        } else {
            max_off = max_off.max(q.value(x).abs());
        }
    }
    let off_identity_mass = (1..g.order()).map(|x| q.value(x)).sum::<f64>() / n;
    let off_identity_bound = t * pi.total_rate();
    let positive_on_subgroup = min_on > 0.0;
    let vanishes_off_subgroup = max_off <= SUPPORT_TOL;
    // rounding slack for the case Π = 0
    let small_time_bound_holds = off_identity_mass <= off_identity_bound + 1e-15;
    Ok(PositivityReport {
        time: t,
        subgroup: (0..g.order()).filter(|&x| mask[x]).collect(),
        min_on_subgroup: min_on,
        max_abs_off_subgroup: max_off,
        positive_on_subgroup,
        vanishes_off_subgroup,
        off_identity_mass,
        off_identity_bound,
        small_time_bound_holds,
        pass: positive_on_subgroup && vanishes_off_subgroup && small_time_bound_holds,
    })
}
