//! Run configuration and input files.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use holofield::group::{FiniteGroup, GroupSpec, BUILTIN_NAMES};
use holofield::holonomy::GConstraints;
use holofield::levy::{HeatKernel, JumpMeasure, Kernel, LevySpec, PerturbedKernel};
use holofield::surface::{MapFile, RibbonMap, SurfaceFile, SurfaceSpec};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Via {
    Formula,
    Graph,
}

impl Via {
    pub fn name(self) -> &'static str {
        match self {
            Via::Formula => "formula",
            Via::Graph => "graph",
        }
    }
}

#[derive(Clone, Debug, clap::Args)]
pub struct RunConfig {
    /// Group file, or the name of a builtin group (Z2, S3, ...)
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Lévy file; defaults to rate 1 spread evenly over non-identity elements
    #[arg(long, global = true)]
    pub levy: Option<PathBuf>,
    #[arg(long, global = true)]
    pub surface: Option<PathBuf>,
    #[arg(long, global = true)]
    pub map: Option<PathBuf>,
    /// Total area; overrides the surface file
    #[arg(long, global = true)]
    pub time: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long = "tail-tol", global = true, default_value_t = 1e-12)]
    pub tail_tol: f64,
    /// Largest number of configurations summed by brute force
    #[arg(long, global = true, default_value_t = 1e8)]
    pub cap: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, value_enum, default_value_t = Via::Formula)]
    pub via: Via,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0) || !(self.tail_tol > 0.0) {
            return Err(CliError::Input("tolerances must be positive".into()));
        }
        if !(self.cap >= 1.0) {
            return Err(CliError::Input("the cap must be at least 1".into()));
        }
        if let Some(t) = self.time {
            if !(t > 0.0) || !t.is_finite() {
                return Err(CliError::Input(format!("time must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn group(&self) -> Result<Arc<FiniteGroup>, CliError> {
        let arg = self.group.as_deref().ok_or_else(|| CliError::Input("--group is required".into()))?;
        let path = Path::new(arg);
        let group = if path.exists() {
            let spec: GroupSpec = parse(path)?;
            FiniteGroup::from_spec(&spec)?
        } else if BUILTIN_NAMES.contains(&arg) {
            FiniteGroup::builtin(arg)?
        } else {
            return Err(CliError::Input(format!("{arg}: no such file or builtin group")));
        };
        Ok(Arc::new(group))
    }

    pub fn jump(&self, group: &Arc<FiniteGroup>) -> Result<JumpMeasure, CliError> {
        Ok(match &self.levy {
            Some(path) => JumpMeasure::from_spec(group.clone(), &parse::<LevySpec>(path)?)?,
            None => JumpMeasure::uniform_nonidentity(group.clone(), 1.0)?,
        })
    }

    pub fn surface(&self, group: &FiniteGroup) -> Result<SurfaceSpec, CliError> {
        let path = self.surface.as_ref().ok_or_else(|| CliError::Input("--surface is required".into()))?;
        let file: SurfaceFile = parse(path)?;
        Ok(file.resolve(group, self.time)?)
    }

    /// The map file with its dart names; areas fall back to `total`
    /// spread by face length.
    pub fn map(&self, total: Option<f64>) -> Result<(RibbonMap, Vec<i64>), CliError> {
        let path = self.map.as_ref().ok_or_else(|| CliError::Input("--map is required".into()))?;
        let file: MapFile = parse(path)?;
        let (map, names) = file.to_map()?;
        match (map.areas().is_some(), total.or(self.time)) {
            (false, Some(t)) => Ok((map.with_proportional_areas(t)?, names)),
            _ => Ok((map, names)),
        }
    }

    /// The map given by `--map`, or the standard map of the surface with
    /// areas proportional to face length.
    pub fn map_or_standard(&self, spec: &SurfaceSpec) -> Result<RibbonMap, CliError> {
        if self.map.is_some() {
            let (m, _) = self.map(Some(spec.area))?;
            let t = m.euler_and_genus()?;
            if (t.orientable, t.genus, t.boundary_components) != (spec.orientable, spec.genus, spec.boundary.len()) {
                return Err(CliError::Input("the map does not have the surface's type".into()));
            }
            Ok(m)
        } else {
            Ok(spec.standard_map()?.with_proportional_areas(spec.area)?)
        }
    }

    pub fn inputs(&self, group: Option<&FiniteGroup>) -> Value {
        json!({
            "group": self.group,
            "group_order": group.map(|g| g.order()),
            "levy": self.levy.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "uniform".into()),
            "surface": self.surface.as_ref().map(|p| p.display().to_string()),
            "map": self.map.as_ref().map(|p| p.display().to_string()),
            "time": self.time,
            "seed": self.seed,
            "via": self.via.name(),
        })
    }

    pub fn tolerances(&self) -> Value {
        json!({ "tol": self.tol, "tail_tol": self.tail_tol, "cap": self.cap })
    }
}

/// Boundary constraints in circuit order.
pub fn constraints(spec: &SurfaceSpec, map: &RibbonMap) -> Result<GConstraints, CliError> {
    if spec.boundary.len() != map.boundary_circuits().len() {
        return Err(CliError::Input(format!(
            "{} boundary classes for {} boundary circuits",
            spec.boundary.len(),
            map.boundary_circuits().len()
        )));
    }
    Ok(GConstraints::boundary(spec.boundary.clone()))
}

/// The heat kernel of `jump`, multiplied by `1 + ε` on the last class when
/// a perturbation is requested.
pub fn kernel(jump: &JumpMeasure, perturb: Option<f64>) -> Result<Box<dyn Kernel>, CliError> {
    let inner = HeatKernel::new(jump.clone())?;
    Ok(match perturb {
        None => Box::new(inner),
        Some(epsilon) => {
            let class = jump.group().classes().count() - 1;
            Box::new(PerturbedKernel { inner, class, epsilon })
        }
    })
}
