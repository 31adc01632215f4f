//! Computation commands.

use std::io::Write;

use holofield::covering::{
    bb_mass, bb_mass_fixed, enumerate_h, sample_covering, sample_covering_map, verify_holo_mono, CoveringMode,
    WeightedBundle,
};
use holofield::group::{eta_measure, kappa_measure, CharacterTable, FiniteGroup, RationalMeasure};
use holofield::holonomy::{partition_formula, partition_graph, GConstraints};
use holofield::loops::tame_generators;
use holofield::surface::{RibbonMap, SurfaceSpec};
use serde_json::{json, Map, Value};

use crate::config::{constraints, kernel, Format, RunConfig, Via};
use crate::report::{write_json, write_value, Case, Verification};
use crate::{CliError, CoverCommand};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Annealed,
    Quenched,
}

impl Mode {
    fn covering(self) -> CoveringMode {
        match self {
            Mode::Annealed => CoveringMode::Annealed,
            Mode::Quenched => CoveringMode::Quenched,
        }
    }
}

/// Character values rounded to 12 decimals, with `-0` written as `0`.
fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn per_class(group: &FiniteGroup, m: &RationalMeasure) -> Vec<String> {
    let cl = group.classes();
    (0..cl.count()).map(|c| m.weight(cl.representative(c)).to_string()).collect()
}

pub fn group_info(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let g = cfg.group()?;
    let cl = g.classes();
    let table = CharacterTable::compute(&g)?;
    let classes: Vec<Value> = (0..cl.count())
        .map(|c| {
            json!({
                "index": c,
                "size": cl.size(c),
                "representative": g.label(cl.representative(c)),
                "members": cl.members(c).iter().map(|&x| g.label(x)).collect::<Vec<_>>(),
                "inverse": cl.inverse(c),
            })
        })
        .collect();
    let values: Vec<Vec<[f64; 2]>> = (0..table.count())
        .map(|a| table.row(a).iter().map(|z| [clean(z.re), clean(z.im)]).collect())
        .collect();
    let report = json!({
        "command": "group-info",
        "inputs": cfg.inputs(Some(&g)),
        "order": g.order(),
        "abelian": g.is_abelian(),
        "labels": g.labels(),
        "classes": classes,
        "characters": {
            "dims": table.dims(),
            "values": values,
            "indicators": table.indicators(),
        },
        "eta": per_class(&g, &eta_measure(&g)),
        "kappa": per_class(&g, &kappa_measure(&g)),
    });
    write_value(&report, cfg.format, out)?;
    Ok(true)
}

pub fn faces(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let (map, names) = cfg.map(None)?;
    let t = map.euler_and_genus()?;
    let faces: Vec<Value> = map
        .faces()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            json!({
                "darts": f.cycle.iter().map(|&(d, _)| names[d.0]).collect::<Vec<_>>(),
                "sides": f.cycle.iter().map(|&(_, s)| s).collect::<Vec<_>>(),
                "area": map.areas().map(|a| a[i]),
            })
        })
        .collect();
    let report = json!({
        "command": "faces",
        "inputs": cfg.inputs(None),
        "vertices": map.vertex_count(),
        "edges": map.edge_count(),
        "face_count": map.face_count(),
        "faces": faces,
        "euler_characteristic": t.euler_characteristic,
        "orientable": t.orientable,
        "genus": t.genus,
        "boundary_components": t.boundary_components,
    });
    write_value(&report, cfg.format, out)?;
    Ok(true)
}

/// The surface with every boundary class replaced by its inverse class.
fn inverted(group: &FiniteGroup, spec: &SurfaceSpec) -> Result<SurfaceSpec, CliError> {
    let cl = group.classes();
    Ok(SurfaceSpec::new(
        spec.orientable,
        spec.genus,
        spec.boundary.iter().map(|&c| cl.inverse(c)).collect(),
        spec.area,
    )?)
}

pub fn partition(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let g = cfg.group()?;
    let jump = cfg.jump(&g)?;
    let spec = cfg.surface(&g)?;
    let k = kernel(&jump, None)?;
    let formula = partition_formula(k.as_ref(), &spec)?;
    let mut extra = Map::new();
    let (value, case) = match cfg.via {
        Via::Formula => {
            // the bundle series integrates Q_t against inverted classes
            let series = bb_mass(&jump, &inverted(&g, &spec)?, cfg.tail_tol, cfg.cap)?;
            extra.insert("truncation".into(), json!(series.truncation));
            extra.insert("tail".into(), json!(series.tail));
            (formula, Case::scalar("formula vs bundle series", formula, series.mass, cfg.tol))
        }
        Via::Graph => {
            let map = cfg.map_or_standard(&spec)?;
            let c = constraints(&spec, &map)?;
            let graph = partition_graph(&map, &c, k.as_ref(), cfg.cap)?;
            let configs = (g.order() as f64).powi(map.edge_count() as i32);
            extra.insert("faces".into(), json!(map.face_count()));
            extra.insert("edges".into(), json!(map.edge_count()));
            extra.insert("configurations".into(), json!(configs));
            (graph, Case::scalar("graph vs formula", graph, formula, cfg.tol))
        }
    };
    let v = Verification {
        command: "partition".into(),
        inputs: cfg.inputs(Some(&g)),
        tolerances: cfg.tolerances(),
        cases: vec![case],
        skipped: vec![],
    };
    match cfg.format {
        Format::Json => {
            let mut report = v.to_json();
            let obj = report.as_object_mut().expect("report is an object");
            obj.insert("value".into(), json!(value));
            obj.insert("route".into(), json!(cfg.via.name()));
            obj.extend(extra);
            write_json(&report, out)?;
        }
        Format::Csv => v.write(Format::Csv, out)?,
    }
    Ok(v.pass())
}

fn labels(g: &FiniteGroup, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| g.label(x).to_string()).collect()
}

/// One record per line: compact JSON, or CSV with the first record's keys
/// as header.
fn write_lines(records: &[Value], format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => {
            for r in records {
                writeln!(out, "{r}")?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let keys: Vec<String> = records
                .first()
                .and_then(Value::as_object)
                .map(|o| o.keys().cloned().collect())
                .unwrap_or_default();
            w.write_record(&keys)?;
            for r in records {
                let row: Vec<String> = keys
                    .iter()
                    .map(|k| match &r[k] {
                        Value::String(s) => s.clone(),
                        Value::Array(xs) => xs
                            .iter()
                            .map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string()))
                            .collect::<Vec<_>>()
                            .join(";"),
                        other => other.to_string(),
                    })
                    .collect();
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// The map and boundary constraints for map-based covering commands.
fn covering_map(cfg: &RunConfig, group: &FiniteGroup) -> Result<(RibbonMap, GConstraints), CliError> {
    match &cfg.surface {
        Some(_) => {
            let spec = cfg.surface(group)?;
            let map = cfg.map_or_standard(&spec)?;
            let c = constraints(&spec, &map)?;
            Ok((map, c))
        }
        None => {
            let (map, _) = cfg.map(None)?;
            Ok((map, GConstraints::boundary(vec![])))
        }
    }
}

pub fn cover(cfg: &RunConfig, command: &CoverCommand, out: &mut dyn Write) -> Result<bool, CliError> {
    let g = cfg.group()?;
    let jump = cfg.jump(&g)?;
    match command {
        CoverCommand::Enumerate { k } => {
            let spec = cfg.surface(&g)?;
            let records = enumerate_h(&g, &spec, *k, cfg.cap)?
                .into_iter()
                .map(|t| {
                    let b = WeightedBundle::new(&g, &jump, t)?;
                    Ok(json!({
                        "a": labels(&g, &b.tuple.a),
                        "c": labels(&g, &b.tuple.c),
                        "d": labels(&g, &b.tuple.d),
                        "weight": b.weight,
                        "aut": b.aut,
                    }))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            write_lines(&records, cfg.format, out)?;
            Ok(true)
        }
        CoverCommand::Mass { k: Some(k) } => {
            let spec = cfg.surface(&g)?;
            let mass = bb_mass_fixed(&jump, &spec, *k, cfg.cap)?;
            let report = json!({
                "command": "cover mass",
                "inputs": cfg.inputs(Some(&g)),
                "tolerances": cfg.tolerances(),
                "k": k,
                "mass": mass,
            });
            write_value(&report, cfg.format, out)?;
            Ok(true)
        }
        CoverCommand::Mass { k: None } => {
            let spec = cfg.surface(&g)?;
            let series = bb_mass(&jump, &spec, cfg.tail_tol, cfg.cap)?;
            let formula = partition_formula(kernel(&jump, None)?.as_ref(), &inverted(&g, &spec)?)?;
            let v = Verification {
                command: "cover mass".into(),
                inputs: cfg.inputs(Some(&g)),
                tolerances: cfg.tolerances(),
                cases: vec![Case::scalar("bundle series vs formula", series.mass, formula, cfg.tol)],
                skipped: vec![],
            };
            match cfg.format {
                Format::Json => {
                    let mut report = v.to_json();
                    let obj = report.as_object_mut().expect("report is an object");
                    obj.insert("mass".into(), json!(series.mass));
                    obj.insert("truncation".into(), json!(series.truncation));
                    obj.insert("tail".into(), json!(series.tail));
                    write_json(&report, out)?;
                }
                Format::Csv => v.write(Format::Csv, out)?,
            }
            Ok(v.pass())
        }
        CoverCommand::Sample { samples, mode } => {
            let mut records = Vec::with_capacity(*samples);
            for i in 0..*samples as u64 {
                let seed = cfg.seed.wrapping_add(i);
                let record = if cfg.map.is_some() {
                    let (map, c) = covering_map(cfg, &g)?;
                    let tame = tame_generators(&map, 0)?;
                    let s = sample_covering_map(&map, &tame, &c, &jump, mode.covering(), seed)?;
                    json!({
                        "seed": seed,
                        "counts": s.counts.counts,
                        "jumps": s.jumps.iter().map(|j| labels(&g, j)).collect::<Vec<_>>(),
                        "generators": labels(&g, &s.generators),
                        "attempts": s.attempts,
                    })
                } else {
                    let spec = cfg.surface(&g)?;
                    let s = sample_covering(&jump, &spec, mode.covering(), seed)?;
                    json!({
                        "seed": seed,
                        "k": s.tuple.k(),
                        "a": labels(&g, &s.tuple.a),
                        "c": labels(&g, &s.tuple.c),
                        "d": labels(&g, &s.tuple.d),
                        "attempts": s.attempts,
                    })
                };
                records.push(record);
            }
            write_lines(&records, cfg.format, out)?;
            Ok(true)
        }
        CoverCommand::VerifyHoloMono => {
            let (map, c) = covering_map(cfg, &g)?;
            let tame = tame_generators(&map, 0)?;
            let r = verify_holo_mono(&map, &tame, &c, &jump, cfg.tol, cfg.tail_tol, cfg.cap)?;
            let v = Verification {
                command: "cover verify-holo-mono".into(),
                inputs: cfg.inputs(Some(&g)),
                tolerances: cfg.tolerances(),
                cases: vec![{
                    let mut case = Case::new("tame generators", r.monodromy.clone(), r.holonomy.clone(), cfg.tol);
                    case.max_abs_diff = r.max_abs_diff;
                    case.pass = r.pass;
                    case
                }],
                skipped: vec![],
            };
            match cfg.format {
                Format::Json => {
                    let mut report = v.to_json();
                    let obj = report.as_object_mut().expect("report is an object");
                    obj.insert("holonomy_total".into(), json!(r.holonomy_total));
                    obj.insert("monodromy_total".into(), json!(r.monodromy_total));
                    obj.insert("tail".into(), json!(r.tail));
                    write_json(&report, out)?;
                }
                Format::Csv => v.write(Format::Csv, out)?,
            }
            Ok(v.pass())
        }
    }
}
