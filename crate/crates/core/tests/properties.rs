use std::sync::Arc;

use holofield::group::{CharacterTable, FiniteGroup};
use holofield::holonomy::{partition_formula, partition_graph, GConstraints, DEFAULT_CAP};
use holofield::levy::{heat_kernel_series, HeatKernel, JumpMeasure, Kernel, DEFAULT_TAIL_TOL};
use holofield::surface::{standard_map, SurfaceSpec};
use proptest::prelude::*;

fn group(name: &str) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::builtin(name).unwrap())
}

/// Random rates on the non-identity classes of `name`, made
/// inversion-invariant by averaging over inverse classes.
fn symmetric_rates(name: &'static str) -> impl Strategy<Value = JumpMeasure> {
    let g = group(name);
    let count = g.classes().count();
    prop::collection::vec(0.0..2.0f64, count).prop_map(move |raw| {
        let cl = g.classes();
        let mut rates: Vec<f64> = (0..count).map(|c| (raw[c] + raw[cl.inverse(c)]) / 2.0).collect();
        rates[0] = 0.0;
        JumpMeasure::from_class_rates(g.clone(), &rates).unwrap()
    })
}

fn any_rates(name: &'static str) -> impl Strategy<Value = JumpMeasure> {
    let g = group(name);
    let count = g.classes().count();
    prop::collection::vec(0.0..2.0f64, count).prop_map(move |mut rates| {
        rates[0] = 0.0;
        JumpMeasure::from_class_rates(g.clone(), &rates).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn densities_are_probabilities(pi in prop_oneof![any_rates("Z4"), any_rates("S3"), any_rates("Q8")], t in 0.01..4.0f64) {
        let q = HeatKernel::new(pi).unwrap().density(t).unwrap();
        prop_assert!(q.is_probability(1e-10));
        prop_assert!(q.values().iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn series_matches_characters(pi in prop_oneof![any_rates("Z6"), any_rates("D4")], t in 0.01..3.0f64) {
        let table = CharacterTable::compute(pi.group()).unwrap();
        let series = heat_kernel_series(&pi, t, DEFAULT_TAIL_TOL).unwrap();
        let chars = holofield::levy::heat_kernel_characters(&pi, t, &table).unwrap();
        prop_assert!(series.density.max_abs_diff(&chars) < 1e-9);
    }

    #[test]
    fn semigroup_holds(pi in any_rates("S3"), s in 0.01..2.0f64, t in 0.01..2.0f64) {
        let k = HeatKernel::new(pi).unwrap();
        let lhs = k.density(s).unwrap().density_convolve(&k.density(t).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&k.density(s + t).unwrap()) < 1e-10);
    }

    #[test]
    fn partition_ignores_face_areas(pi in symmetric_rates("S3"), split in 0.05..0.95f64, orientable in any::<bool>()) {
        let k = HeatKernel::new(pi).unwrap();
        let spec = SurfaceSpec::new(orientable, 2, vec![], 1.3).unwrap();
        let m = standard_map(orientable, 2, 0).unwrap();
        let len = m.face(0).len();
        let (m, _) = m.split_face(0, 0, len / 2, None).unwrap();
        let m = m.with_areas(vec![1.3 * split, 1.3 * (1.0 - split)]).unwrap();
        let graph = partition_graph(&m, &GConstraints::boundary(vec![]), &k, DEFAULT_CAP).unwrap();
        prop_assert!((graph - partition_formula(&k, &spec).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn chiral_annulus_matches_formula(pi in any_rates("Z3"), c1 in 0usize..3, c2 in 0usize..3) {
        let k = HeatKernel::new(pi).unwrap();
        let spec = SurfaceSpec::new(true, 0, vec![c1, c2], 0.8).unwrap();
        let m = spec.standard_map().unwrap().with_proportional_areas(0.8).unwrap();
        let graph = partition_graph(&m, &GConstraints::boundary(vec![c1, c2]), &k, DEFAULT_CAP).unwrap();
        prop_assert!((graph - partition_formula(&k, &spec).unwrap()).abs() < 1e-10);
    }
}
