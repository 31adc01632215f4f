//! Closed-form partition functions and the surgery operators on them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{delta_class, eta_measure, kappa_measure, ClassMeasure, FiniteGroup, RationalMeasure};
use crate::levy::Kernel;
use crate::surface::SurfaceSpec;

/// `η^{∗g/2}∗δ_{𝒪₁}∗⋯∗δ_{𝒪_p}` (orientable) or `κ^{∗g}∗δ_{𝒪₁}∗⋯` otherwise.
pub fn measure_m_exact(group: &Arc<FiniteGroup>, spec: &SurfaceSpec) -> Result<RationalMeasure> {
    let mut m = if spec.orientable {
        eta_measure(group).convolve_power(spec.genus / 2)
    } else {
        kappa_measure(group).convolve_power(spec.genus)
    };
    for &c in &spec.boundary {
        m = m.convolve(&delta_class(group, c)?)?;
    }
    Ok(m)
}

pub fn measure_m(group: &Arc<FiniteGroup>, spec: &SurfaceSpec) -> Result<ClassMeasure<f64>> {
    Ok(measure_m_exact(group, spec)?.to_f64())
}

/// `Z = Σ_x Q_t(x)·m({x})` with `t` the surface's area.
pub fn partition_formula(kernel: &dyn Kernel, spec: &SurfaceSpec) -> Result<f64> {
    if !spec.orientable && !kernel.inversion_invariant() {
        return Err(Error::InversionRequired);
    }
    let q = kernel.density(spec.area)?;
    let m = measure_m(kernel.group(), spec)?;
    Ok(integrate(q.values(), &m))
}

fn integrate(q: &[f64], m: &ClassMeasure<f64>) -> f64 {
    q.iter().zip(m.weights()).map(|(a, b)| a * b).sum()
}

/// A function of `arity` group elements that depends only on their
/// classes and not on their order. Values are stored per class tuple, the
/// first argument most significant.
#[derive(Clone, Debug)]
pub struct SymmetricClassFunction {
    group: Arc<FiniteGroup>,
    arity: usize,
    values: Vec<f64>,
}

impl SymmetricClassFunction {
    pub fn from_fn(group: Arc<FiniteGroup>, arity: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let k = group.classes().count();
        let len = k.pow(arity as u32);
        let mut values = Vec::with_capacity(len);
        let mut tuple = vec![0usize; arity];
        for idx in 0..len {
            let mut r = idx;
            for slot in tuple.iter_mut().rev() {
                *slot = r % k;
                r /= k;
            }
            values.push(f(&tuple));
        }
        SymmetricClassFunction { group, arity, values }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn index(&self, classes: &[usize]) -> usize {
        let k = self.group.classes().count();
        classes.iter().fold(0, |acc, &c| acc * k + c)
    }

    /// Value at a tuple of classes.
    pub fn at_classes(&self, classes: &[usize]) -> f64 {
        assert_eq!(classes.len(), self.arity);
        self.values[self.index(classes)]
    }

    /// Value at a tuple of elements.
    pub fn at(&self, elements: &[usize]) -> f64 {
        let cl = self.group.classes();
        let classes: Vec<usize> = elements.iter().map(|&x| cl.class_of(x)).collect();
        self.at_classes(&classes)
    }

    /// Largest change under swapping two arguments, over all tuples.
    pub fn symmetry_defect(&self) -> f64 {
        let k = self.group.classes().count();
        let mut worst: f64 = 0.0;
        let mut tuple = vec![0usize; self.arity];
        for idx in 0..self.values.len() {
            let mut r = idx;
            for slot in tuple.iter_mut().rev() {
                *slot = r % k;
                r /= k;
            }
            for i in 0..self.arity {
                for j in i + 1..self.arity {
                    let mut s = tuple.clone();
                    s.swap(i, j);
                    worst = worst.max((self.values[idx] - self.at_classes(&s)).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.arity, other.arity);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `Z^ε_{p,g,t}` over all class tuples.
pub fn z_function(
    kernel: &dyn Kernel,
    orientable: bool,
    boundary: usize,
    genus: usize,
    t: f64,
) -> Result<SymmetricClassFunction> {
    let group = kernel.group().clone();
    SurfaceSpec::new(orientable, genus, vec![0; boundary], t)?;
    if !orientable && !kernel.inversion_invariant() {
        return Err(Error::InversionRequired);
    }
    let q = kernel.density(t)?;
    let base = if orientable {
        eta_measure(&group).convolve_power(genus / 2)
    } else {
        kappa_measure(&group).convolve_power(genus)
    }
    .to_f64();
    let deltas: Vec<ClassMeasure<f64>> = (0..group.classes().count())
        .map(|c| delta_class(&group, c))
        .collect::<Result<_>>()?;
    Ok(SymmetricClassFunction::from_fn(group, boundary, |classes| {
        let m = classes
            .iter()
            .fold(base.clone(), |m, &c| m.convolve(&deltas[c]).expect("same group"));
        integrate(q.values(), &m)
    }))
}

fn need_arity(f: &SymmetricClassFunction, k: usize, op: &str) -> Result<()> {
    if f.arity < k {
        return Err(Error::Arity(format!("{op} needs arity at least {k}, got {}", f.arity)));
    }
    Ok(())
}

/// `υf(x₁..x_{p−1}) = (1/n) Σ_x f(x₁..x_{p−1}, x²)`
pub fn upsilon(f: &SymmetricClassFunction) -> Result<SymmetricClassFunction> {
    need_arity(f, 1, "υ")?;
    let g = f.group.clone();
    let n = g.order();
    let cl = g.classes();
    let squares: Vec<usize> = (0..n).map(|x| cl.class_of(g.mul(x, x))).collect();
    Ok(SymmetricClassFunction::from_fn(g.clone(), f.arity - 1, |rest| {
        let mut args = rest.to_vec();
        args.push(0);
        squares
            .iter()
            .map(|&c| {
                *args.last_mut().unwrap() = c;
                f.at_classes(&args)
            })
            .sum::<f64>()
            / n as f64
    }))
}

/// `β₁f(x₁..x_{p−2}) = (1/n) Σ_x f(x₁..x_{p−2}, x, x⁻¹)`
pub fn beta1(f: &SymmetricClassFunction) -> Result<SymmetricClassFunction> {
    need_arity(f, 2, "β₁")?;
    let g = f.group.clone();
    let n = g.order();
    let cl = g.classes();
    Ok(SymmetricClassFunction::from_fn(g.clone(), f.arity - 2, |rest| {
        let mut args = rest.to_vec();
        args.extend([0, 0]);
        let p = args.len();
        (0..n)
            .map(|x| {
                args[p - 2] = cl.class_of(x);
                args[p - 1] = cl.class_of(g.inv(x));
                f.at_classes(&args)
            })
            .sum::<f64>()
            / n as f64
    }))
}

/// `β₂(f⊗f')(x₁..x_{p−1}, y₁..y_{p'−1}) = (1/n) Σ_z f(x.., z) f'(y.., z⁻¹)`
pub fn beta2(f: &SymmetricClassFunction, h: &SymmetricClassFunction) -> Result<SymmetricClassFunction> {
    need_arity(f, 1, "β₂")?;
    need_arity(h, 1, "β₂")?;
    if !crate::group::same_group(&f.group, &h.group) {
        return Err(Error::GroupMismatch);
    }
    let g = f.group.clone();
    let n = g.order();
    let cl = g.classes();
    let (p, q) = (f.arity - 1, h.arity - 1);
    Ok(SymmetricClassFunction::from_fn(g.clone(), p + q, |args| {
        let mut a = args[..p].to_vec();
        a.push(0);
        let mut b = args[p..].to_vec();
        b.push(0);
        (0..n)
            .map(|z| {
                a[p] = cl.class_of(z);
                b[q] = cl.class_of(g.inv(z));
                f.at_classes(&a) * h.at_classes(&b)
            })
            .sum::<f64>()
            / n as f64
    }))
}
