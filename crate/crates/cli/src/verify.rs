//! Verification suites. Each case computes one quantity by two routes; with
//! `--perturb` the right-hand route uses a deliberately wrong kernel.

use std::sync::Arc;

use holofield::covering::{bb_mass, counting_check, monodromy_marginal, HoloMonoReport, MonodromyTuple};
use holofield::group::{eta_measure, kappa_measure, CharacterTable, FiniteGroup};
use holofield::holonomy::{
    beta1, beta2, partition_formula, partition_graph, tame_closed_form, tame_marginal, upsilon, z_function,
    GConstraints,
};
use holofield::levy::{JumpMeasure, Kernel};
use holofield::loops::tame_generators;
use holofield::surface::{RibbonMap, SurfaceSpec};
use num_rational::BigRational;
use num_traits::One;

use crate::config::{kernel, RunConfig};
use crate::report::{Case, Verification};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Surgery,
    Semigroup,
    KappaEta,
    Subdivision,
    Tame,
    HoloMono,
    Counting,
    /// Every suite in turn
    All,
}

const ALL: [Suite; 7] = [
    Suite::Surgery,
    Suite::Semigroup,
    Suite::KappaEta,
    Suite::Subdivision,
    Suite::Tame,
    Suite::HoloMono,
    Suite::Counting,
];

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Surgery => "surgery",
            Suite::Semigroup => "semigroup",
            Suite::KappaEta => "kappa-eta",
            Suite::Subdivision => "subdivision",
            Suite::Tame => "tame",
            Suite::HoloMono => "holo-mono",
            Suite::Counting => "counting",
            Suite::All => "all",
        }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    group: Arc<FiniteGroup>,
    jump: JumpMeasure,
    /// Kernel for the left-hand route.
    left: Box<dyn Kernel>,
    /// Kernel for the right-hand route, perturbed on request.
    right: Box<dyn Kernel>,
    cases: Vec<Case>,
    skipped: Vec<String>,
}

impl Ctx<'_> {
    fn symmetric(&self) -> bool {
        self.jump.inversion_invariant()
    }

    fn last_class(&self) -> usize {
        self.group.classes().count() - 1
    }

    fn time(&self) -> f64 {
        self.cfg.time.unwrap_or(1.0)
    }
}

pub fn run(cfg: &RunConfig, suite: Suite, perturb: Option<f64>) -> Result<Verification, CliError> {
    let group = cfg.group()?;
    let jump = cfg.jump(&group)?;
    let mut ctx = Ctx {
        cfg,
        left: kernel(&jump, None)?,
        right: kernel(&jump, perturb)?,
        group: group.clone(),
        jump,
        cases: Vec::new(),
        skipped: Vec::new(),
    };
    let suites = if suite == Suite::All { &ALL[..] } else { std::slice::from_ref(&suite) };
    for &s in suites {
        let before = ctx.cases.len();
        match s {
            Suite::Surgery => surgery(&mut ctx)?,
            Suite::Semigroup => semigroup(&mut ctx)?,
            Suite::KappaEta => kappa_eta(&mut ctx)?,
            Suite::Subdivision => subdivision(&mut ctx)?,
            Suite::Tame => tame(&mut ctx)?,
            Suite::HoloMono => holo_mono(&mut ctx)?,
            Suite::Counting => counting(&mut ctx)?,
            Suite::All => unreachable!(),
        }
        if suite == Suite::All {
            for c in &mut ctx.cases[before..] {
                c.name = format!("{}: {}", s.name(), c.name);
            }
        }
    }
    let mut inputs = cfg.inputs(Some(&group));
    inputs["suite"] = suite.name().into();
    inputs["perturb"] = perturb.into();
    Ok(Verification {
        command: format!("verify {}", suite.name()),
        inputs,
        tolerances: cfg.tolerances(),
        cases: ctx.cases,
        skipped: ctx.skipped,
    })
}

fn label(orientable: bool) -> char {
    if orientable {
        '+'
    } else {
        '-'
    }
}

/// Reduced genera up to 2 for each orientation.
fn genera(orientable: bool) -> &'static [usize] {
    if orientable {
        &[0, 2]
    } else {
        &[1, 2]
    }
}

fn surgery(ctx: &mut Ctx) -> Result<(), CliError> {
    let tol = ctx.cfg.tol.min(1e-10);
    let times = [0.5, 1.0];
    let orientations: &[bool] = if ctx.symmetric() { &[true, false] } else { &[true] };
    if !ctx.symmetric() {
        ctx.skipped.push("non-orientable cases need an inversion-invariant jump measure".into());
    }
    for &o in orientations {
        for &g in genera(o) {
            for p in 0..=3 {
                for &t in &times {
                    let z = z_function(ctx.left.as_ref(), o, p, g, t)?;
                    let name = |op: &str| format!("{op}(Z{}_{{{p},{g},{t}}})", label(o));
                    if p >= 1 && ctx.symmetric() {
                        let rhs = z_function(ctx.right.as_ref(), false, p - 1, g + 1, t)?;
                        ctx.cases.push(Case::new(name("upsilon"), upsilon(&z)?.values().to_vec(), rhs.values().to_vec(), tol));
                    }
                    if p >= 2 {
                        let rhs = z_function(ctx.right.as_ref(), o, p - 2, g + 2, t)?;
                        ctx.cases.push(Case::new(name("beta1"), beta1(&z)?.values().to_vec(), rhs.values().to_vec(), tol));
                    }
                }
            }
        }
    }
    let specs: Vec<(bool, usize, usize)> = orientations
        .iter()
        .flat_map(|&o| genera(o).iter().flat_map(move |&g| (1..=3).map(move |p| (o, g, p))))
        .collect();
    for &(o, g, p) in &specs {
        for &(o2, g2, p2) in &specs {
            for &t in &times {
                for &t2 in &times {
                    let f = z_function(ctx.left.as_ref(), o, p, g, t)?;
                    let h = z_function(ctx.left.as_ref(), o2, p2, g2, t2)?;
                    let rhs = z_function(ctx.right.as_ref(), o && o2, p + p2 - 2, g + g2, t + t2)?;
                    ctx.cases.push(Case::new(
                        format!("beta2(Z{}_{{{p},{g},{t}}}, Z{}_{{{p2},{g2},{t2}}})", label(o), label(o2)),
                        beta2(&f, &h)?.values().to_vec(),
                        rhs.values().to_vec(),
                        tol,
                    ));
                }
            }
        }
    }
    Ok(())
}

fn semigroup(ctx: &mut Ctx) -> Result<(), CliError> {
    let tol = ctx.cfg.tol.min(1e-10);
    for (s, t) in [(0.3, 0.7), (1.0, 2.0)] {
        let lhs = ctx.left.density(s)?.density_convolve(&ctx.left.density(t)?)?;
        let rhs = ctx.right.density(s + t)?;
        ctx.cases.push(Case::new(format!("Q_{s} * Q_{t} = Q_{}", s + t), lhs.values().to_vec(), rhs.values().to_vec(), tol));
    }
    Ok(())
}

fn kappa_eta(ctx: &mut Ctx) -> Result<(), CliError> {
    let g = &ctx.group;
    let eta = eta_measure(g);
    let kappa = kappa_measure(g);
    let lhs = kappa.convolve(&eta)?;
    let rhs = kappa.convolve_power(3);
    ctx.cases.push(Case::exact(
        "kappa * eta = kappa^3",
        lhs.to_f64().weights().to_vec(),
        rhs.to_f64().weights().to_vec(),
        lhs.weights() == rhs.weights(),
    ));
    let table = CharacterTable::compute(g)?;
    let eta_f = eta.to_f64();
    let kappa_f = kappa.to_f64();
    let mut eta_hat = Vec::new();
    let mut kappa_hat = Vec::new();
    for a in 0..table.count() {
        let e = eta_f.fourier_coefficient(&table, a)?;
        let k = kappa_f.fourier_coefficient(&table, a)?;
        eta_hat.push((e.re, e.im.abs()));
        kappa_hat.push((k.re, k.im.abs()));
    }
    let recip: Vec<f64> = table.dims().iter().map(|&d| 1.0 / d as f64).collect();
    let fs: Vec<f64> = table.indicators().iter().map(|&i| i as f64).collect();
    let tol = ctx.cfg.tol;
    let imag = |v: &[(f64, f64)]| v.iter().map(|x| x.1).fold(0.0, f64::max);
    ctx.cases.push(Case::new("eta_hat = 1/d", eta_hat.iter().map(|x| x.0).collect(), recip, tol));
    ctx.cases.push(Case::scalar("eta_hat imaginary part", imag(&eta_hat), 0.0, tol));
    ctx.cases.push(Case::new("kappa_hat = FS", kappa_hat.iter().map(|x| x.0).collect(), fs, tol));
    ctx.cases.push(Case::scalar("kappa_hat imaginary part", imag(&kappa_hat), 0.0, tol));
    Ok(())
}

/// Torus, Klein bottle, disk and three-holed sphere, with the last class on
/// every boundary component.
fn test_surfaces(ctx: &mut Ctx) -> Vec<(&'static str, SurfaceSpec)> {
    let c = ctx.last_class();
    let t = ctx.time();
    let mut out = vec![
        ("torus", SurfaceSpec::new(true, 2, vec![], t)),
        ("disk", SurfaceSpec::new(true, 0, vec![c], t)),
        ("three-holed sphere", SurfaceSpec::new(true, 0, vec![c, c, c], t)),
    ];
    if ctx.symmetric() {
        out.insert(1, ("klein bottle", SurfaceSpec::new(false, 2, vec![], t)));
    } else {
        ctx.skipped.push("klein bottle needs an inversion-invariant jump measure".into());
    }
    out.into_iter()
        .map(|(n, s)| (n, s.expect("test surfaces are valid")))
        .collect()
}

fn refinements(map: &RibbonMap) -> Result<Vec<(&'static str, RibbonMap)>, CliError> {
    let (sub, _) = map.subdivide_edge(0)?;
    let len = map.face(0).len();
    let a = map.areas().expect("areas set")[0];
    let (split, _) = map.split_face(0, 0, len / 2, Some((0.4 * a, 0.6 * a)))?;
    Ok(vec![("standard", map.clone()), ("subdivided", sub), ("split", split)])
}

fn subdivision(ctx: &mut Ctx) -> Result<(), CliError> {
    let tol = ctx.cfg.tol.min(1e-10);
    for (name, spec) in test_surfaces(ctx) {
        let rhs = partition_formula(ctx.right.as_ref(), &spec)?;
        let base = spec.standard_map()?.with_proportional_areas(spec.area)?;
        let c = GConstraints::boundary(spec.boundary.clone());
        for (kind, m) in refinements(&base)? {
            let lhs = partition_graph(&m, &c, ctx.left.as_ref(), ctx.cfg.cap)?;
            ctx.cases.push(Case::scalar(format!("{name}, {kind} map"), lhs, rhs, tol));
        }
    }
    Ok(())
}

fn tame(ctx: &mut Ctx) -> Result<(), CliError> {
    let tol = ctx.cfg.tol.min(1e-12);
    let t = ctx.time();
    let c = ctx.last_class();
    let torus = SurfaceSpec::new(true, 2, vec![], t)?.standard_map()?.without_areas();
    let len = torus.face(0).len();
    let (two_faces, _) = torus.split_face(0, 0, len / 2, None)?;
    let mut maps = vec![
        ("torus with two faces", two_faces.with_areas(vec![0.4 * t, 0.6 * t])?, vec![]),
        ("disk", SurfaceSpec::new(true, 0, vec![c], t)?.standard_map()?.with_proportional_areas(t)?, vec![c]),
        (
            "annulus",
            SurfaceSpec::new(true, 0, vec![c, c], t)?.standard_map()?.with_proportional_areas(t)?,
            vec![c, c],
        ),
    ];
    if ctx.symmetric() {
        maps.push(("klein bottle", SurfaceSpec::new(false, 2, vec![], t)?.standard_map()?.with_proportional_areas(t)?, vec![]));
    }
    for (name, m, classes) in maps {
        let constraints = GConstraints::boundary(classes);
        let tame = tame_generators(&m, 0)?;
        let lhs = tame_marginal(&m, &tame, &constraints, ctx.left.as_ref(), ctx.cfg.cap)?;
        let rhs = tame_closed_form(&m, &tame, &constraints, ctx.right.as_ref(), ctx.cfg.cap)?;
        ctx.cases.push(Case::new(name, lhs.masses, rhs.masses, tol));
    }
    Ok(())
}

fn holo_mono(ctx: &mut Ctx) -> Result<(), CliError> {
    let tol = ctx.cfg.tol;
    let t = ctx.time();
    let c = ctx.last_class();
    let mut specs = vec![("disk", SurfaceSpec::new(true, 0, vec![c], t)?), ("torus", SurfaceSpec::new(true, 2, vec![], t)?)];
    if ctx.symmetric() {
        specs.push(("klein bottle", SurfaceSpec::new(false, 2, vec![], t)?));
    } else {
        ctx.skipped.push("klein bottle needs an inversion-invariant jump measure".into());
    }
    for (name, spec) in specs {
        let m = spec.standard_map()?.with_proportional_areas(t)?;
        let constraints = GConstraints::boundary(spec.boundary.clone());
        let tame = tame_generators(&m, 0)?;
        let hf = tame_marginal(&m, &tame, &constraints, ctx.right.as_ref(), ctx.cfg.cap)?;
        let (mf, tail) = monodromy_marginal(&m, &tame, &constraints, &ctx.jump, ctx.cfg.tail_tol, ctx.cfg.cap)?;
        let r = HoloMonoReport::compare(hf, mf, tail, tol);
        let mut case = Case::new(name, r.monodromy, r.holonomy, tol);
        case.max_abs_diff = case.max_abs_diff.max(r.max_abs_diff);
        case.pass = case.max_abs_diff <= tol;
        ctx.cases.push(case);
    }
    Ok(())
}

fn counting(ctx: &mut Ctx) -> Result<(), CliError> {
    let g = ctx.group.clone();
    let pi1 = ctx
        .jump
        .normalized()
        .ok_or_else(|| CliError::Input("the jump measure has zero mass".into()))?;
    let one = |_: &MonodromyTuple| BigRational::one();
    let weight = |t: &MonodromyTuple| BigRational::from_float(t.weight(&pi1)).unwrap_or_default();
    let t = ctx.time();
    for (name, spec) in [("sphere", SurfaceSpec::new(true, 0, vec![], t)?), ("torus", SurfaceSpec::new(true, 2, vec![], t)?)] {
        for k in 0..=3 {
            for (fname, f) in [("1", &one as &dyn Fn(&MonodromyTuple) -> BigRational), ("weight", &weight)] {
                let (lhs, rhs) = counting_check(&g, &spec, k, ctx.cfg.cap, f)?;
                ctx.cases.push(Case::exact(
                    format!("{name}, k = {k}, f = {fname}"),
                    vec![to_f64(&lhs)],
                    vec![to_f64(&rhs)],
                    lhs == rhs,
                ));
            }
        }
        if ctx.symmetric() {
            let series = bb_mass(&ctx.jump, &spec, ctx.cfg.tail_tol, ctx.cfg.cap)?;
            let formula = partition_formula(ctx.right.as_ref(), &spec)?;
            ctx.cases.push(Case::scalar(format!("{name}, bundle mass"), series.mass, formula, ctx.cfg.tol));
        }
    }
    Ok(())
}

fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}
