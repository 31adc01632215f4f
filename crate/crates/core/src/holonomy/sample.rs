//! Seeded samplers for the constrained uniform measure and the discrete
//! holonomy field.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DfWeight, GConstraints, HolonomyConfig, Plan};
use crate::error::Result;
use crate::group::FiniteGroup;
use crate::levy::Kernel;
use crate::surface::RibbonMap;

/// Configuration counts up to which the field is sampled exactly.
pub const EXACT_SAMPLING_LIMIT: f64 = 1e6;

/// Sweeps of single-coordinate heat-bath updates per sample, started from
/// a constrained uniform draw.
pub const HEAT_BATH_SWEEPS: usize = 64;

pub fn sample_uniform_constrained(
    group: &Arc<FiniteGroup>,
    map: &RibbonMap,
    constraints: &GConstraints,
    seed: u64,
) -> Result<HolonomyConfig> {
    let plan = Plan::new(group, map, constraints)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = uniform_coords(&plan, &mut rng);
    let mut values = vec![0; map.edge_count()];
    plan.decode(&coords, &mut values);
    Ok(HolonomyConfig { values })
}

fn uniform_coords<R: Rng>(plan: &Plan, rng: &mut R) -> Vec<usize> {
    plan.radices().iter().map(|&r| rng.random_range(0..r)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum SampleMethod {
    /// Inverse-CDF draw from the full table of weights.
    Exact,
    HeatBath { sweeps: usize },
}

/// Sampler for the discrete holonomy field on a fixed map.
///
/// Coordinates are those of the constrained uniform measure, which is the
/// uniform measure on the coordinate box; the heat bath resamples one
/// coordinate at a time from its exact conditional law.
pub struct DfSampler {
    plan: Plan,
    weight: DfWeight,
    method: SampleMethod,
    cumulative: Vec<f64>,
}

impl DfSampler {
    pub fn new(map: &RibbonMap, constraints: &GConstraints, kernel: &dyn Kernel) -> Result<Self> {
        let plan = Plan::new(kernel.group(), map, constraints)?;
        let weight = DfWeight::new(map, kernel)?;
        let method = if plan.count() <= EXACT_SAMPLING_LIMIT {
            SampleMethod::Exact
        } else {
            SampleMethod::HeatBath {
                sweeps: HEAT_BATH_SWEEPS,
            }
        };
        Self::with_method(plan, weight, method)
    }

    pub fn heat_bath(map: &RibbonMap, constraints: &GConstraints, kernel: &dyn Kernel, sweeps: usize) -> Result<Self> {
        let plan = Plan::new(kernel.group(), map, constraints)?;
        let weight = DfWeight::new(map, kernel)?;
        Self::with_method(plan, weight, SampleMethod::HeatBath { sweeps })
    }

    fn with_method(plan: Plan, weight: DfWeight, method: SampleMethod) -> Result<Self> {
        let mut cumulative = Vec::new();
        if method == SampleMethod::Exact {
            plan.check_cap(EXACT_SAMPLING_LIMIT)?;
            let mut acc = 0.0;
            plan.for_each(|v| {
                acc += weight.weight(v);
                cumulative.push(acc);
            });
        }
        Ok(DfSampler {
            plan,
            weight,
            method,
            cumulative,
        })
    }

    pub fn method(&self) -> &SampleMethod {
        &self.method
    }

    pub fn radices(&self) -> &[usize] {
        self.plan.radices()
    }

    pub fn config_of(&self, coords: &[usize]) -> Vec<usize> {
        let mut values = vec![0; self.plan.edges];
        self.plan.decode(coords, &mut values);
        values
    }

    pub fn weight_of(&self, coords: &[usize]) -> f64 {
        self.weight.weight(&self.config_of(coords))
    }

    /// Exact conditional law of coordinate `i` given the others; uniform
    /// when every candidate has weight zero.
    pub fn conditional(&self, coords: &[usize], i: usize) -> Vec<f64> {
        let mut c = coords.to_vec();
        let w: Vec<f64> = (0..self.plan.radices()[i])
            .map(|x| {
                c[i] = x;
                self.weight_of(&c)
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter().map(|x| x / total).collect()
        } else {
            vec![1.0 / w.len() as f64; w.len()]
        }
    }

    /// One pass of heat-bath updates over every coordinate in order.
    pub fn sweep<R: Rng>(&self, coords: &mut [usize], rng: &mut R) {
        for i in 0..coords.len() {
            let p = self.conditional(coords, i);
            coords[i] = draw(&p, rng.random::<f64>());
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> HolonomyConfig {
        let coords = match self.method {
            SampleMethod::Exact => {
                let total = *self.cumulative.last().unwrap_or(&0.0);
                let mut k = if total > 0.0 {
                    let u = rng.random::<f64>() * total;
                    self.cumulative.partition_point(|&c| c <= u)
                } else {
                    rng.random_range(0..self.cumulative.len().max(1))
                };
                k = k.min(self.cumulative.len().saturating_sub(1));
                let mut coords = vec![0; self.plan.radices().len()];
                for (slot, &r) in coords.iter_mut().zip(self.plan.radices()).rev() {
                    *slot = k % r;
                    k /= r;
                }
                coords
            }
            SampleMethod::HeatBath { sweeps } => {
                let mut coords = uniform_coords(&self.plan, rng);
                for _ in 0..sweeps {
                    self.sweep(&mut coords, rng);
                }
                coords
            }
        };
        HolonomyConfig {
            values: self.config_of(&coords),
        }
    }
}

fn draw(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

/// One draw from the discrete field, exact when the configuration space has
/// at most [`EXACT_SAMPLING_LIMIT`] points.
pub fn sample_df(map: &RibbonMap, constraints: &GConstraints, kernel: &dyn Kernel, seed: u64) -> Result<HolonomyConfig> {
    let sampler = DfSampler::new(map, constraints, kernel)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sampler.sample(&mut rng))
}
