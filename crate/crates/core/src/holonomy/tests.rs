use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::*;
use crate::group::FiniteGroup;
use crate::levy::{HeatKernel, JumpMeasure, Kernel};
use crate::loops::tame_generators;
use crate::surface::fixtures::*;
use crate::surface::{standard_map, SurfaceSpec};

fn group(name: &str) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::builtin(name).unwrap())
}

fn symmetric_kernel(g: &Arc<FiniteGroup>, rate: f64) -> HeatKernel {
    HeatKernel::new(JumpMeasure::uniform_nonidentity(g.clone(), rate).unwrap()).unwrap()
}

/// Jumps by the generator `1` of Z3 only.
fn chiral_kernel() -> HeatKernel {
    let g = group("Z3");
    let c = g.classes().class_of(1);
    HeatKernel::new(JumpMeasure::on_class(g, c, 1.3).unwrap()).unwrap()
}

/// Sphere with one loop edge: two faces.
fn loop_sphere(s: f64, t: f64) -> RibbonMap {
    RibbonMap::new(vec![vec![d(0), r(0)]], vec![1], vec![])
        .unwrap()
        .with_areas(vec![s, t])
        .unwrap()
}

/// Sums over every edge assignment, keeping those that meet the boundary
/// classes, and averages the face weights.
fn oracle_partition(map: &RibbonMap, classes: &[usize], kernel: &dyn Kernel) -> f64 {
    let g = kernel.group();
    let n = g.order();
    let e = map.edge_count();
    let gauge = map.orientation_gauge();
    let areas = map.areas().unwrap();
    let q: Vec<Vec<f64>> = areas.iter().map(|&a| kernel.density(a).unwrap().values().to_vec()).collect();
    let hol = |values: &[usize], darts: &[Dart]| {
        darts.iter().fold(g.identity(), |acc, &dd| {
            let x = values[dd.edge()];
            g.mul(if dd.is_positive() { x } else { g.inv(x) }, acc)
        })
    };
    let (mut valid, mut sum) = (0u64, 0.0);
    let mut values = vec![0usize; e];
    for idx in 0..n.pow(e as u32) {
        let mut r = idx;
        for v in values.iter_mut() {
            *v = r % n;
            r /= n;
        }
        let ok = map
            .boundary_circuits()
            .iter()
            .zip(classes)
            .all(|(c, &k)| g.classes().class_of(hol(&values, c)) == k);
        if !ok {
            continue;
        }
        valid += 1;
        let mut w = 1.0;
        for (f, face) in map.faces().iter().enumerate() {
            let mut x = hol(&values, &face.darts());
            if let (Some(s), Some(&(dd, eps))) = (&gauge, face.cycle.first()) {
                if s[map.tail(dd)] != eps {
                    x = g.inv(x);
                }
            }
            w *= q[f][x];
        }
        sum += w;
    }
    sum / valid as f64
}

fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut dof = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        if p > 0.0 {
            let e = p * total as f64;
            stat += (c as f64 - e).powi(2) / e;
            dof += 1;
        } else {
            assert_eq!(c, 0);
        }
    }
    1.0 - ChiSquared::new((dof - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn uniform_mass_is_probability() {
    let g = group("S3");
    for (m, classes) in [
        (torus(), vec![]),
        (disk(), vec![2]),
        (standard_map(true, 0, 2).unwrap(), vec![1, 1]),
        (standard_map(false, 1, 1).unwrap(), vec![2]),
    ] {
        let c = GConstraints::boundary(classes);
        let mass = uniform_constrained_mass(&g, &m, &c, DEFAULT_CAP, |_| 1.0).unwrap();
        assert!((mass - 1.0).abs() < 1e-12);
    }
}

#[test]
fn boundary_constraint_always_met() {
    let g = group("S3");
    let m = standard_map(true, 2, 1).unwrap();
    let c = GConstraints::boundary(vec![1]);
    let circuit = EdgeWord::new(&m, m.tail(m.boundary_circuits()[0][0]), m.boundary_circuits()[0].clone()).unwrap();
    let bad = uniform_constrained_mass(&g, &m, &c, DEFAULT_CAP, |v| {
        let x = holonomy_of_darts(&g, v, circuit.darts()).unwrap();
        (g.classes().class_of(x) != 1) as u8 as f64
    })
    .unwrap();
    assert_eq!(bad, 0.0);
}

#[test]
fn gauge_invariance() {
    let g = group("S3");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (m, _) = theta().split_face(0, 0, 1, None).unwrap();
    let m = m.subdivide_edge(0).unwrap().0;
    let table: Vec<f64> = (0..36).map(|_| rng.random::<f64>()).collect();
    let f = |v: &[usize]| table[6 * v[0] + v[2]];
    let c = GConstraints::default();
    let base = uniform_constrained_mass(&g, &m, &c, DEFAULT_CAP, f).unwrap();
    for _ in 0..5 {
        let k: Vec<usize> = (0..m.vertex_count()).map(|_| rng.random_range(0..6)).collect();
        let moved = uniform_constrained_mass(&g, &m, &c, DEFAULT_CAP, |v| {
            let h = HolonomyConfig::new(&g, &m, v.to_vec()).unwrap().gauge(&g, &m, &k);
            f(h.values())
        })
        .unwrap();
        assert!((moved - base).abs() < 1e-12);
    }
}

#[test]
fn mark_disintegration() {
    let g = group("S3");
    let k = symmetric_kernel(&g, 1.0);
    let (m, _) = torus().split_face(0, 0, 2, None).unwrap();
    let m = m.with_areas(vec![0.4, 0.9]).unwrap();
    let free = partition_graph(&m, &GConstraints::default(), &k, DEFAULT_CAP).unwrap();
    let mut acc = 0.0;
    for x in 0..g.order() {
        let c = GConstraints::default().with_mark(vec![d(0)], g.classes().class_of(x));
        acc += partition_graph(&m, &c, &k, DEFAULT_CAP).unwrap() / g.order() as f64;
    }
    assert!((acc - free).abs() < 1e-12);
}

#[test]
fn constraint_errors() {
    let g = group("Z3");
    let m = standard_map(true, 0, 2).unwrap();
    assert!(GConstraints::boundary(vec![0]).validate(&g, &m).is_err());
    assert!(GConstraints::boundary(vec![0, 7]).validate(&g, &m).is_err());
    let overlapping = GConstraints::boundary(vec![0, 0]).with_mark(m.boundary_circuits()[0].clone(), 1);
    assert!(overlapping.validate(&g, &m).is_err());
    let t = torus();
    let not_closed = GConstraints::default().with_mark(vec![d(0), d(1)], 0);
    assert!(not_closed.validate(&g, &t).is_err());
    let cap = uniform_constrained_mass(&g, &standard_map(true, 4, 0).unwrap(), &GConstraints::default(), 10.0, |_| 1.0);
    assert!(matches!(cap, Err(Error::CapExceeded { .. })));
}

#[test]
fn df_weight_examples() {
    let g = group("S3");
    let k = symmetric_kernel(&g, 0.8);
    let q = k.density(0.7).unwrap();
    let m = disk().with_areas(vec![0.7]).unwrap();
    for x in 0..6 {
        let h = HolonomyConfig::new(&g, &m, vec![x]).unwrap();
        assert!((df_weight(&h, &m, &k).unwrap() - q.value(x)).abs() < 1e-14);
    }
    // non-orientable map needs a symmetric kernel
    let p = projective().with_areas(vec![1.0]).unwrap();
    let h = HolonomyConfig::new(&group("Z3"), &p, vec![1]).unwrap();
    assert!(matches!(df_weight(&h, &p, &chiral_kernel()), Err(Error::InversionRequired)));
    assert!(df_weight(&h, &torus(), &chiral_kernel()).is_err());
}

#[test]
fn weight_ignores_face_base_points_and_vertex_flips() {
    let k = chiral_kernel();
    let g = k.group().clone();
    let m = standard_map(true, 2, 2).unwrap().with_proportional_areas(1.5).unwrap();
    let (m, _) = m.split_face(0, 1, 4, Some((0.5, 1.0))).unwrap();
    let c = GConstraints::boundary(vec![1, 2]);
    let z = partition_graph(&m, &c, &k, DEFAULT_CAP).unwrap();
    for v in 0..m.vertex_count() {
        if let Ok(f) = m.flip_vertex(v) {
            let zf = partition_graph(&f, &c, &k, DEFAULT_CAP).unwrap();
            assert!((z - zf).abs() < 1e-12, "vertex {v}: {z} vs {zf}");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = DfWeight::new(&m, &k).unwrap();
    for _ in 0..50 {
        let values: Vec<usize> = (0..m.edge_count()).map(|_| rng.random_range(0..3)).collect();
        let direct = w.weight(&values);
        // rotate every face loop and re-evaluate
        let mut prod = 1.0;
        for (f, l) in w.face_loops().iter().enumerate() {
            let shift = rng.random_range(0..l.len());
            let rotated: Vec<Dart> = l[shift..].iter().chain(&l[..shift]).copied().collect();
            let x = holonomy_of_darts(&g, &values, &rotated).unwrap();
            prod *= k.density(m.areas().unwrap()[f]).unwrap().value(x);
        }
        assert!((direct - prod).abs() < 1e-12);
    }
}

#[test]
fn non_orientable_weight_ignores_reversal() {
    let g = group("S3");
    let k = symmetric_kernel(&g, 1.1);
    let m = klein().with_areas(vec![0.6]).unwrap();
    let q = k.density(0.6).unwrap();
    let loop_ = m.face(0).darts();
    for x in 0..6 {
        for y in 0..6 {
            let v = [x, y];
            let h = holonomy_of_darts(&g, &v, &loop_).unwrap();
            let hr = holonomy_of_darts(&g, &v, &crate::loops::invert(&loop_)).unwrap();
            assert!((q.value(h) - q.value(hr)).abs() < 1e-13);
        }
    }
}

#[test]
fn partition_examples() {
    let z2 = group("Z2");
    let k = HeatKernel::new(JumpMeasure::uniform_nonidentity(z2.clone(), 1.0).unwrap()).unwrap();
    let t = torus().with_areas(vec![1.0]).unwrap();
    let z = partition_graph(&t, &GConstraints::default(), &k, DEFAULT_CAP).unwrap();
    assert!((z - (1.0 + (-2.0f64).exp())).abs() < 1e-12);

    let g = group("S3");
    let k = symmetric_kernel(&g, 1.0);
    for c in 0..3 {
        let m = disk().with_areas(vec![0.9]).unwrap();
        let z = partition_graph(&m, &GConstraints::boundary(vec![c]), &k, DEFAULT_CAP).unwrap();
        let x = g.classes().representative(c);
        assert!((z - k.density(0.9).unwrap().value(x)).abs() < 1e-12);
    }
    let sphere = loop_sphere(0.3, 0.5);
    let z = partition_graph(&sphere, &GConstraints::default(), &k, DEFAULT_CAP).unwrap();
    assert!((z - k.density(0.8).unwrap().value(0)).abs() < 1e-12);
}

#[test]
fn graph_matches_oracle_and_formula() {
    let cases: Vec<(Arc<FiniteGroup>, Box<dyn Kernel>)> = vec![
        (group("Z3"), Box::new(chiral_kernel())),
        (group("S3"), Box::new(symmetric_kernel(&group("S3"), 0.9))),
        (group("Z4"), Box::new(symmetric_kernel(&group("Z4"), 1.4))),
    ];
    for (g, k) in &cases {
        for (o, genus, p) in [(true, 0, 1), (true, 0, 2), (true, 2, 0), (true, 2, 1), (false, 1, 0), (false, 1, 1), (false, 2, 0)] {
            if !o && !k.inversion_invariant() {
                continue;
            }
            let nc = g.classes().count();
            let classes: Vec<usize> = (0..p).map(|i| (i + 1) % nc).collect();
            let spec = SurfaceSpec::new(o, genus, classes.clone(), 1.3).unwrap();
            let formula = partition_formula(k.as_ref(), &spec).unwrap();
            let c = GConstraints::boundary(classes.clone());
            let m = spec.standard_map().unwrap();
            let graph = partition_graph(&m, &c, k.as_ref(), DEFAULT_CAP).unwrap();
            assert!((graph - formula).abs() < 1e-10, "{o} {genus} {p}: {graph} vs {formula}");
            if m.edge_count() * (g.order() as f64).log2() as usize <= 16 {
                let oracle = oracle_partition(&m, &classes, k.as_ref());
                assert!((graph - oracle).abs() < 1e-10);
            }
            // refined graphs
            let (sub, _) = m.subdivide_edge(0).unwrap();
            let len = m.face(0).len();
            let (split, _) = m.split_face(0, 0, len / 2, Some((0.4, 0.9))).unwrap();
            for r in [sub, split] {
                let z = partition_graph(&r, &c, k.as_ref(), DEFAULT_CAP).unwrap();
                assert!((z - formula).abs() < 1e-10, "refined {o} {genus} {p}");
            }
        }
    }
}

#[test]
fn measure_m_examples() {
    let s3 = group("S3");
    let sphere = measure_m_exact(&s3, &SurfaceSpec::new(true, 0, vec![], 1.0).unwrap()).unwrap();
    assert_eq!(sphere.weights(), crate::group::delta_class::<num_rational::BigRational>(&s3, 0).unwrap().weights());
    let z4 = group("Z4");
    let torus = measure_m_exact(&z4, &SurfaceSpec::new(true, 2, vec![], 1.0).unwrap()).unwrap();
    assert_eq!(torus.weights(), crate::group::delta_class::<num_rational::BigRational>(&z4, 0).unwrap().weights());
    let rp2 = measure_m_exact(&s3, &SurfaceSpec::new(false, 1, vec![], 1.0).unwrap()).unwrap();
    assert_eq!(rp2.weights(), crate::group::kappa_measure(&s3).weights());
    for o in [true, false] {
        for genus in 1..5 {
            if o && genus % 2 == 1 {
                continue;
            }
            let m = measure_m(&s3, &SurfaceSpec::new(o, genus, vec![1, 2], 1.0).unwrap()).unwrap();
            assert!(m.is_probability());
            assert!(m.is_inversion_invariant() || o);
        }
    }
}

#[test]
fn z_function_examples() {
    let g = group("S3");
    let k = symmetric_kernel(&g, 1.0);
    let z = z_function(&k, true, 1, 0, 0.7).unwrap();
    let q = k.density(0.7).unwrap();
    for x in 0..6 {
        assert!((z.at(&[x]) - q.value(x)).abs() < 1e-12);
    }
    // a density: (1/n) Σ_x Z⁺_{1,0,t}(x) = 1
    let mean: f64 = (0..6).map(|x| z.at(&[x])).sum::<f64>() / 6.0;
    assert!((mean - 1.0).abs() < 1e-12);
    let z3 = z_function(&k, true, 3, 2, 0.7).unwrap();
    assert!(z3.symmetry_defect() < 1e-12);

    let z2 = group("Z2");
    let k2 = symmetric_kernel(&z2, 0.6);
    let klein = z_function(&k2, false, 0, 2, 1.1).unwrap();
    assert!((klein.at(&[]) - k2.density(1.1).unwrap().value(0)).abs() < 1e-12);
    assert!(z_function(&chiral_kernel(), false, 0, 1, 1.0).is_err());
    assert!(z_function(&k, true, 0, 1, 1.0).is_err());
}

#[test]
fn surgery_identities() {
    for name in ["S3", "Z4"] {
        let g = group(name);
        let k = symmetric_kernel(&g, 1.2);
        let t = 1.0;
        for (p, genus) in [(1, 0), (2, 2), (2, 0), (3, 0)] {
            let zp = z_function(&k, true, p, genus, t).unwrap();
            let lhs = upsilon(&zp).unwrap();
            let rhs = z_function(&k, false, p - 1, genus + 1, t).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-10, "{name} υ {p} {genus}");
        }
        for (p, genus) in [(2, 0), (3, 2), (2, 2)] {
            let lhs = beta1(&z_function(&k, true, p, genus, t).unwrap()).unwrap();
            let rhs = z_function(&k, true, p - 2, genus + 2, t).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-10, "{name} β₁ {p} {genus}");
        }
        let (s, u) = (0.4, 0.9);
        let lhs = beta2(
            &z_function(&k, true, 1, 0, s).unwrap(),
            &z_function(&k, true, 1, 0, u).unwrap(),
        )
        .unwrap();
        let rhs = z_function(&k, true, 0, 0, s + u).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        let lhs = beta2(
            &z_function(&k, true, 2, 2, s).unwrap(),
            &z_function(&k, false, 2, 1, u).unwrap(),
        )
        .unwrap();
        let rhs = z_function(&k, false, 2, 3, s + u).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        let z0 = z_function(&k, true, 0, 0, t).unwrap();
        assert!(upsilon(&z0).is_err() && beta1(&z_function(&k, true, 1, 0, t).unwrap()).is_err());
    }
}

#[test]
fn uniform_marginals() {
    let g = group("Z3");
    let t = torus();
    let tame = tame_generators(&t, 0).unwrap();
    let m = marginal_generators(&g, &t, &GConstraints::default(), None, &tame.a, DEFAULT_CAP).unwrap();
    for x in &m.masses {
        assert!((x - 1.0 / 9.0).abs() < 1e-15);
    }
    let s3 = group("S3");
    let dk = disk();
    let tame = tame_generators(&dk, 0).unwrap();
    let m = marginal_generators(&s3, &dk, &GConstraints::boundary(vec![2]), None, &tame.c, DEFAULT_CAP).unwrap();
    for x in 0..6 {
        let expect = if s3.classes().class_of(x) == 2 { 0.5 } else { 0.0 };
        assert!((m.mass(&[x]) - expect).abs() < 1e-15);
    }
}

#[test]
fn tame_closed_form_matches_summation() {
    let s3 = group("S3");
    let z3 = group("Z3");
    let chiral = chiral_kernel();
    let sym3 = symmetric_kernel(&z3, 0.7);
    let sym_s3 = symmetric_kernel(&s3, 0.9);
    let two_face_torus = torus().split_face(0, 0, 2, None).unwrap().0.with_areas(vec![0.3, 0.8]).unwrap();
    let cases: Vec<(RibbonMap, Vec<usize>, &dyn Kernel)> = vec![
        (two_face_torus.clone(), vec![], &chiral),
        (two_face_torus.clone(), vec![], &sym3),
        (two_face_torus, vec![], &sym_s3),
        (klein().with_areas(vec![1.0]).unwrap(), vec![], &sym_s3),
        (standard_map(true, 0, 2).unwrap().with_proportional_areas(1.0).unwrap(), vec![1, 2], &chiral),
        (standard_map(false, 1, 1).unwrap().with_proportional_areas(1.0).unwrap(), vec![1], &sym_s3),
        (
            standard_map(true, 2, 1).unwrap().flip_vertex(0).unwrap().with_proportional_areas(1.0).unwrap(),
            vec![2],
            &chiral,
        ),
    ];
    for (m, classes, k) in cases {
        let c = GConstraints::boundary(classes);
        for base in 0..m.vertex_count() {
            let tame = tame_generators(&m, base).unwrap();
            let lhs = tame_marginal(&m, &tame, &c, k, DEFAULT_CAP).unwrap();
            let rhs = tame_closed_form(&m, &tame, &c, k, DEFAULT_CAP).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12, "diff {}", lhs.max_abs_diff(&rhs));
            assert!((lhs.total - partition_graph(&m, &c, k, DEFAULT_CAP).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn marginals_survive_refinement() {
    let g = group("S3");
    let k = symmetric_kernel(&g, 1.0);
    let m = standard_map(true, 0, 2).unwrap().with_proportional_areas(1.0).unwrap();
    let c = GConstraints::boundary(vec![1, 1]);
    let tame = tame_generators(&m, 0).unwrap();
    let coarse = marginal_generators(&g, &m, &c, Some(&k), &tame.c, DEFAULT_CAP).unwrap();
    let (m1, r1) = m.split_face(0, 0, 2, Some((0.25, 0.75))).unwrap();
    let (m2, r2) = m1.subdivide_edge(1).unwrap();
    let r = r1.then(&r2);
    let words: Vec<EdgeWord> = tame
        .c
        .iter()
        .map(|w| EdgeWord::new(&m2, 0, r.substitute(w.darts())).unwrap())
        .collect();
    let fine = marginal_generators(&g, &m2, &c, Some(&k), &words, DEFAULT_CAP).unwrap();
    assert!(coarse.max_abs_diff(&fine) < 1e-12);
}

#[test]
fn uniform_sampler_is_uniform() {
    let g = group("Z3");
    let t = torus();
    let mut counts = vec![0u64; 9];
    for seed in 0..10_000 {
        let h = sample_uniform_constrained(&g, &t, &GConstraints::default(), seed).unwrap();
        counts[3 * h.values()[0] + h.values()[1]] += 1;
    }
    assert!(chi_square_p(&counts, &[1.0 / 9.0; 9]) > 1e-4);
    assert_eq!(
        sample_uniform_constrained(&g, &t, &GConstraints::default(), 3).unwrap(),
        sample_uniform_constrained(&g, &t, &GConstraints::default(), 3).unwrap()
    );

    let s3 = group("S3");
    let m = standard_map(true, 2, 1).unwrap();
    let circuit = m.boundary_circuits()[0].clone();
    let mut counts = vec![0u64; 6];
    for seed in 0..10_000 {
        let h = sample_uniform_constrained(&s3, &m, &GConstraints::boundary(vec![1]), seed).unwrap();
        counts[holonomy_of_darts(&s3, h.values(), &circuit).unwrap()] += 1;
    }
    let probs: Vec<f64> = (0..6).map(|x| if s3.classes().class_of(x) == 1 { 1.0 / 3.0 } else { 0.0 }).collect();
    assert!(chi_square_p(&counts, &probs) > 1e-4);
}

#[test]
fn df_sampler_law() {
    let g = group("S3");
    let k = symmetric_kernel(&g, 1.0);
    let m = loop_sphere(0.5, 0.7);
    let mut probs: Vec<f64> = (0..6)
        .map(|x| k.density(0.5).unwrap().value(x) * k.density(0.7).unwrap().value(g.inv(x)))
        .collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    let sampler = DfSampler::new(&m, &GConstraints::default(), &k).unwrap();
    assert_eq!(sampler.method(), &SampleMethod::Exact);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut counts = vec![0u64; 6];
    for _ in 0..10_000 {
        counts[sampler.sample(&mut rng).values()[0]] += 1;
    }
    assert!(chi_square_p(&counts, &probs) > 1e-4);

    // heat bath on the same law
    let hb = DfSampler::heat_bath(&m, &GConstraints::default(), &k, 3).unwrap();
    let mut counts = vec![0u64; 6];
    for _ in 0..10_000 {
        counts[hb.sample(&mut rng).values()[0]] += 1;
    }
    assert!(chi_square_p(&counts, &probs) > 1e-4);

    // long times flatten the law
    let flat = loop_sphere(40.0, 40.0);
    let s = DfSampler::new(&flat, &GConstraints::default(), &k).unwrap();
    let mut counts = vec![0u64; 6];
    for _ in 0..10_000 {
        counts[s.sample(&mut rng).values()[0]] += 1;
    }
    assert!(chi_square_p(&counts, &[1.0 / 6.0; 6]) > 1e-4);
    assert_eq!(
        sample_df(&m, &GConstraints::default(), &k, 9).unwrap(),
        sample_df(&m, &GConstraints::default(), &k, 9).unwrap()
    );
}

/// Builds the transition matrix of one sweep and checks `πP = π`.
fn check_heat_bath_invariance(m: &RibbonMap, c: &GConstraints, k: &dyn Kernel) {
    let s = DfSampler::heat_bath(m, c, k, 1).unwrap();
    let radices = s.radices().to_vec();
    let states: usize = radices.iter().product();
    let decode = |mut idx: usize| {
        let mut v = vec![0; radices.len()];
        for (slot, &r) in v.iter_mut().zip(&radices).rev() {
            *slot = idx % r;
            idx /= r;
        }
        v
    };
    let encode = |v: &[usize]| v.iter().zip(&radices).fold(0, |acc, (&x, &r)| acc * r + x);
    let mut sweep = nalgebra::DMatrix::<f64>::identity(states, states);
    for i in 0..radices.len() {
        let mut step = nalgebra::DMatrix::<f64>::zeros(states, states);
        for a in 0..states {
            let coords = decode(a);
            for (x, p) in s.conditional(&coords, i).into_iter().enumerate() {
                let mut next = coords.clone();
                next[i] = x;
                step[(a, encode(&next))] += p;
            }
        }
        sweep *= step;
    }
    let pi: Vec<f64> = (0..states).map(|a| s.weight_of(&decode(a))).collect();
    let total: f64 = pi.iter().sum();
    let pi = nalgebra::RowDVector::from_iterator(states, pi.iter().map(|x| x / total));
    let moved = &pi * &sweep;
    assert!((moved - &pi).amax() < 1e-13);
}

#[test]
fn heat_bath_leaves_the_law_invariant() {
    let z3 = group("Z3");
    let t = torus().with_areas(vec![0.8]).unwrap();
    check_heat_bath_invariance(&t, &GConstraints::default(), &chiral_kernel());
    let (m, _) = torus().split_face(0, 0, 2, None).unwrap();
    let m = m.with_areas(vec![0.3, 0.6]).unwrap();
    check_heat_bath_invariance(&m, &GConstraints::default(), &symmetric_kernel(&z3, 1.0));
    let a = standard_map(true, 0, 2).unwrap().with_proportional_areas(1.0).unwrap();
    check_heat_bath_invariance(&a, &GConstraints::boundary(vec![1, 2]), &chiral_kernel());
}
