//! Conjugation-invariant measures and densities on a finite group.
//!
//! A [`ClassMeasure`] stores the mass `w(x)` of each singleton; a
//! [`ClassDensity`] stores a density `f` against the uniform probability, so
//! the mass of `{x}` is `f(x)/n`.

use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

use super::{same_group, CharacterTable, FiniteGroup};
use crate::error::{Error, Result};

const CLASS_TOL: f64 = 1e-12;

/// Scalars a measure can carry: floats for kernels, rationals for exact work.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Send + Sync {
    fn from_count(k: usize) -> Self;
    fn to_f64(&self) -> f64;
    fn approx_eq(&self, other: &Self) -> bool;
}

impl Scalar for f64 {
    fn from_count(k: usize) -> Self {
        k as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= CLASS_TOL * (1.0 + self.abs().max(other.abs()))
    }
}

impl Scalar for BigRational {
    fn from_count(k: usize) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
}

#[derive(Clone, Debug)]
pub struct ClassMeasure<S = f64> {
    group: Arc<FiniteGroup>,
    weights: Vec<S>,
    mass: S,
}

pub type RationalMeasure = ClassMeasure<BigRational>;

impl<S: Scalar> ClassMeasure<S> {
    /// Checks length, non-negativity and class-constancy.
    pub fn from_weights(group: Arc<FiniteGroup>, weights: Vec<S>) -> Result<Self> {
        let n = group.order();
        if weights.len() != n {
            return Err(Error::IndexOutOfRange {
                what: "weight vector",
                index: weights.len(),
                len: n,
            });
        }
        if let Some(x) = weights.iter().position(|w| *w < S::zero()) {
            return Err(Error::InvalidJumpMeasure(format!(
                "negative weight at element {x}"
            )));
        }
        let cl = group.classes();
        for x in 0..n {
            let rep = cl.representative(cl.class_of(x));
            if !weights[x].approx_eq(&weights[rep]) {
                return Err(Error::NotInvariant(format!(
                    "weights of {x} and {rep} differ"
                )));
            }
        }
        Ok(Self::raw(group, weights))
    }

    /// `per_class[c]` is the mass of each single element of class `c`.
    pub fn from_class_weights(group: Arc<FiniteGroup>, per_class: &[S]) -> Result<Self> {
        let cl = group.classes();
        if per_class.len() != cl.count() {
            return Err(Error::IndexOutOfRange {
                what: "class weight vector",
                index: per_class.len(),
                len: cl.count(),
            });
        }
        let w = (0..group.order())
            .map(|x| per_class[cl.class_of(x)].clone())
            .collect();
        Self::from_weights(group, w)
    }

    pub(crate) fn raw(group: Arc<FiniteGroup>, weights: Vec<S>) -> Self {
        let mass = weights.iter().cloned().fold(S::zero(), |a, b| a + b);
        ClassMeasure {
            group,
            weights,
            mass,
        }
    }

    pub fn zero(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        Self::raw(group, vec![S::zero(); n])
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn weight(&self, x: usize) -> &S {
        &self.weights[x]
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// Mass of a single element of class `c`.
    pub fn class_weight(&self, c: usize) -> &S {
        &self.weights[self.group.classes().representative(c)]
    }

    pub fn mass(&self) -> &S {
        &self.mass
    }

    pub fn is_probability(&self) -> bool {
        self.mass.approx_eq(&S::one())
    }

    /// `(μ∗ν)({x}) = Σ_y μ({y}) ν({y⁻¹x})`
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        let g = &self.group;
        let n = g.order();
        let mut out = vec![S::zero(); n];
        for y in 0..n {
            if self.weights[y].is_zero() {
                continue;
            }
            for z in 0..n {
                if other.weights[z].is_zero() {
                    continue;
                }
                let x = g.mul(y, z);
                out[x] = out[x].clone() + self.weights[y].clone() * other.weights[z].clone();
            }
        }
        Ok(Self::raw(self.group.clone(), out))
    }

    /// `μ^{∗k}`, with `μ^{∗0} = δ_1`.
    pub fn convolve_power(&self, k: usize) -> Self {
        let mut acc = delta_class(&self.group, 0).expect("identity class exists");
        for _ in 0..k {
            acc = acc.convolve(self).expect("same group");
        }
        acc
    }

    /// `ν^∨({x}) = ν({x⁻¹})`
    pub fn inverted(&self) -> Self {
        let w = (0..self.group.order())
            .map(|x| self.weights[self.group.inv(x)].clone())
            .collect();
        Self::raw(self.group.clone(), w)
    }

    pub fn is_inversion_invariant(&self) -> bool {
        (0..self.group.order()).all(|x| self.weights[x].approx_eq(&self.weights[self.group.inv(x)]))
    }

    pub fn scale(&self, s: &S) -> Self {
        let w = self.weights.iter().map(|w| w.clone() * s.clone()).collect();
        Self::raw(self.group.clone(), w)
    }

    pub fn to_f64(&self) -> ClassMeasure<f64> {
        ClassMeasure::raw(
            self.group.clone(),
            self.weights.iter().map(Scalar::to_f64).collect(),
        )
    }

    /// Density against the uniform probability: `f(x) = n·w(x)`.
    pub fn to_density(&self) -> ClassDensity {
        let n = self.group.order() as f64;
        ClassDensity {
            group: self.group.clone(),
            values: self.weights.iter().map(|w| n * w.to_f64()).collect(),
        }
    }

    /// `μ̂(α) = Σ_x conj(χ_α(x)) μ({x})`
    pub fn fourier_coefficient(&self, table: &CharacterTable, alpha: usize) -> Result<Complex64> {
        if alpha >= table.count() {
            return Err(Error::IndexOutOfRange {
                what: "irrep",
                index: alpha,
                len: table.count(),
            });
        }
        let cl = self.group.classes();
        Ok((0..cl.count())
            .map(|c| table.value(alpha, c).conj() * (cl.size(c) as f64 * self.class_weight(c).to_f64()))
            .sum())
    }
}

/// Uniform probability on class `c`.
pub fn delta_class<S: Scalar>(group: &Arc<FiniteGroup>, c: usize) -> Result<ClassMeasure<S>> {
    let cl = group.classes();
    if c >= cl.count() {
        return Err(Error::IndexOutOfRange {
            what: "class",
            index: c,
            len: cl.count(),
        });
    }
    let each = S::one() / S::from_count(cl.size(c));
    let mut w = vec![S::zero(); group.order()];
    for &x in cl.members(c) {
        w[x] = each.clone();
    }
    Ok(ClassMeasure::raw(group.clone(), w))
}

/// Law of the commutator `aba⁻¹b⁻¹` of two independent uniform elements.
pub fn eta_measure(group: &Arc<FiniteGroup>) -> RationalMeasure {
    let n = group.order();
    let mut counts = vec![0usize; n];
    for a in 0..n {
        for b in 0..n {
            counts[group.commutator(a, b)] += 1;
        }
    }
    counts_to_measure(group, &counts, n * n)
}

/// Law of the square of a uniform element.
pub fn kappa_measure(group: &Arc<FiniteGroup>) -> RationalMeasure {
    let n = group.order();
    let mut counts = vec![0usize; n];
    for a in 0..n {
        counts[group.mul(a, a)] += 1;
    }
    counts_to_measure(group, &counts, n)
}

fn counts_to_measure(group: &Arc<FiniteGroup>, counts: &[usize], total: usize) -> RationalMeasure {
    let d = BigInt::from(total);
    let w = counts
        .iter()
        .map(|&k| BigRational::new(BigInt::from(k), d.clone()))
        .collect();
    ClassMeasure::raw(group.clone(), w)
}

#[derive(Clone, Debug)]
pub struct ClassDensity {
    group: Arc<FiniteGroup>,
    values: Vec<f64>,
}

impl ClassDensity {
    pub fn from_values(group: Arc<FiniteGroup>, values: Vec<f64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::IndexOutOfRange {
                what: "density vector",
                index: values.len(),
                len: group.order(),
            });
        }
        let cl = group.classes();
        for x in 0..values.len() {
            let rep = cl.representative(cl.class_of(x));
            if !values[x].approx_eq(&values[rep]) {
                return Err(Error::NotInvariant(format!(
                    "density values of {x} and {rep} differ"
                )));
            }
        }
        Ok(ClassDensity { group, values })
    }

    pub(crate) fn raw(group: Arc<FiniteGroup>, values: Vec<f64>) -> Self {
        ClassDensity { group, values }
    }

    pub fn constant(group: Arc<FiniteGroup>, c: f64) -> Self {
        let n = group.order();
        ClassDensity {
            group,
            values: vec![c; n],
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn value(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn class_value(&self, c: usize) -> f64 {
        self.values[self.group.classes().representative(c)]
    }

    /// `(1/n) Σ_x f(x)`
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_probability(&self, tol: f64) -> bool {
        (self.mean() - 1.0).abs() <= tol
    }

    /// `(f★g)(x) = (1/n) Σ_y f(y) g(y⁻¹x)`
    pub fn density_convolve(&self, other: &Self) -> Result<Self> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        let g = &self.group;
        let n = g.order();
        let mut out = vec![0.0; n];
        for (x, o) in out.iter_mut().enumerate() {
            *o = (0..n)
                .map(|y| self.values[y] * other.values[g.mul(g.inv(y), x)])
                .sum::<f64>()
                / n as f64;
        }
        Ok(Self::raw(self.group.clone(), out))
    }

    /// Measure with singleton masses `f(x)/n`.
    pub fn to_measure(&self) -> ClassMeasure<f64> {
        let n = self.values.len() as f64;
        ClassMeasure::raw(self.group.clone(), self.values.iter().map(|f| f / n).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
