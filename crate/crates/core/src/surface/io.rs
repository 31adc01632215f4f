//! File formats for maps and surfaces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Dart, RibbonMap, SurfaceSpec};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// Map file. Dart names are arbitrary integers; edge `i` is the `i`-th pair
/// of `alpha`, oriented from its first dart. `lambda` is keyed by edge
/// index (missing edges have signature +1), `sigma` by vertex name, and
/// `areas` by face id.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MapFile {
    pub darts: usize,
    pub alpha: Vec<[i64; 2]>,
    pub sigma: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    pub lambda: BTreeMap<String, i8>,
    #[serde(default)]
    pub boundary: Vec<Vec<i64>>,
    #[serde(default)]
    pub areas: BTreeMap<String, f64>,
}

fn parse_index(key: &str, what: &str) -> Result<usize> {
    key.parse()
        .map_err(|_| Error::InvalidMap(format!("{what} key {key:?} is not an index")))
}

impl MapFile {
    /// Builds the map; also returns the file name of each internal dart.
    pub fn to_map(&self) -> Result<(RibbonMap, Vec<i64>)> {
        if self.darts != 2 * self.alpha.len() {
            return Err(Error::InvalidMap(format!(
                "{} darts declared but alpha pairs {} of them",
                self.darts,
                2 * self.alpha.len()
            )));
        }
        let mut internal: BTreeMap<i64, Dart> = BTreeMap::new();
        let mut names = Vec::with_capacity(self.darts);
        for (i, &[a, b]) in self.alpha.iter().enumerate() {
            if a == b {
                return Err(Error::InvalidMap(format!("alpha fixes dart {a}")));
            }
            for (k, name) in [a, b].into_iter().enumerate() {
                if internal.insert(name, Dart(2 * i + k)).is_some() {
                    return Err(Error::InvalidMap(format!("dart {name} paired twice")));
                }
                names.push(name);
            }
        }
        let lookup = |name: i64| {
            internal
                .get(&name)
                .copied()
                .ok_or_else(|| Error::InvalidMap(format!("unknown dart {name}")))
        };

        let mut vertices: Vec<(&String, &Vec<i64>)> = self.sigma.iter().collect();
        vertices.sort_by(|a, b| match (a.0.parse::<i64>(), b.0.parse::<i64>()) {
            (Ok(x), Ok(y)) => x.cmp(&y),
            _ => a.0.cmp(b.0),
        });
        let rotations = vertices
            .into_iter()
            .map(|(_, cyc)| cyc.iter().map(|&n| lookup(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;

        let mut lambda = vec![1i8; self.alpha.len()];
        for (k, &s) in &self.lambda {
            let e = parse_index(k, "lambda")?;
            if e >= lambda.len() {
                return Err(Error::InvalidMap(format!("lambda names missing edge {e}")));
            }
            lambda[e] = s;
        }
        let boundary = self
            .boundary
            .iter()
            .map(|c| c.iter().map(|&n| lookup(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;

        let mut map = RibbonMap::new(rotations, lambda, boundary)?;
        if !self.areas.is_empty() {
            let mut areas = vec![f64::NAN; map.face_count()];
            for (k, &a) in &self.areas {
                let f = parse_index(k, "areas")?;
                if f >= areas.len() {
                    return Err(Error::InvalidArea(format!("no face {f}")));
                }
                areas[f] = a;
            }
            map = map.with_areas(areas)?;
        }
        Ok((map, names))
    }

    /// Writes a map with darts named by their internal index.
    pub fn from_map(map: &RibbonMap) -> MapFile {
        let e = map.edge_count();
        MapFile {
            darts: 2 * e,
            alpha: (0..e).map(|i| [2 * i as i64, 2 * i as i64 + 1]).collect(),
            sigma: map
                .rotations()
                .iter()
                .enumerate()
                .map(|(v, r)| (v.to_string(), r.iter().map(|d| d.0 as i64).collect()))
                .collect(),
            lambda: (0..e)
                .filter(|&i| map.lambda(i) != 1)
                .map(|i| (i.to_string(), map.lambda(i)))
                .collect(),
            boundary: map
                .boundary_circuits()
                .iter()
                .map(|c| c.iter().map(|d| d.0 as i64).collect())
                .collect(),
            areas: map
                .areas()
                .map(|a| a.iter().enumerate().map(|(f, &x)| (f.to_string(), x)).collect())
                .unwrap_or_default(),
        }
    }
}

/// A boundary constraint: a class index or the label of any element in it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum BoundaryClass {
    Index(usize),
    Label(String),
}

impl BoundaryClass {
    pub fn resolve(&self, group: &FiniteGroup) -> Result<usize> {
        let cl = group.classes();
        match self {
            BoundaryClass::Index(c) if *c < cl.count() => Ok(*c),
            BoundaryClass::Index(c) => Err(Error::IndexOutOfRange {
                what: "class",
                index: *c,
                len: cl.count(),
            }),
            BoundaryClass::Label(l) => group
                .element_by_label(l)
                .map(|x| cl.class_of(x))
                .ok_or_else(|| Error::InvalidSurface(format!("no element labelled {l:?}"))),
        }
    }
}

/// Surface file: `{"orientable": true, "genus": 2, "boundary": ["(1 2)"], "area": 1.0}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurfaceFile {
    pub orientable: bool,
    pub genus: usize,
    #[serde(default)]
    pub boundary: Vec<BoundaryClass>,
    #[serde(default)]
    pub area: Option<f64>,
}

impl SurfaceFile {
    /// `time` overrides the file's area.
    pub fn resolve(&self, group: &FiniteGroup, time: Option<f64>) -> Result<SurfaceSpec> {
        let area = time.or(self.area).ok_or_else(|| {
            Error::InvalidSurface("no area given in the file or on the command line".into())
        })?;
        let boundary = self
            .boundary
            .iter()
            .map(|b| b.resolve(group))
            .collect::<Result<Vec<_>>>()?;
        SurfaceSpec::new(self.orientable, self.genus, boundary, area)
    }
}
