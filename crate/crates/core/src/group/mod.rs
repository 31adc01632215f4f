//! Finite groups given by multiplication tables.
//!
//! Elements are indices `0..n`, with `0` always the identity. Products are
//! read left to right: `mul(a, b)` is `ab`.

mod builtin;
mod characters;
mod classes;
mod measure;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builtin::BUILTIN_NAMES;
pub use characters::CharacterTable;
pub use classes::ConjugacyClassTable;
pub use measure::{
    delta_class, eta_measure, kappa_measure, ClassDensity, ClassMeasure, RationalMeasure,
};

/// Tables up to this order are checked for associativity exhaustively.
const FULL_ASSOC_LIMIT: usize = 64;
const ASSOC_SPOT_CHECKS: usize = 10_000;

/// Group description as read from a group file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Builtin {
        name: String,
    },
    Table {
        order: usize,
        table: Vec<Vec<usize>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: Option<String>,
    n: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    labels: Vec<String>,
    classes: ConjugacyClassTable,
}

impl FiniteGroup {
    /// Validates a multiplication table and builds the group.
    pub fn from_table(table: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("order 0".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::InvalidGroup(format!(
                    "row {i} contains {bad}, outside 0..{n}"
                )));
            }
        }
        for x in 0..n {
            if table[0][x] != x || table[x][0] != x {
                return Err(Error::InvalidGroup(format!(
                    "element 0 does not act as identity on {x}"
                )));
            }
        }
        let mut inv = vec![usize::MAX; n];
        for x in 0..n {
            match (0..n).find(|&y| table[x][y] == 0) {
                Some(y) if table[y][x] == 0 => inv[x] = y,
                _ => {
                    return Err(Error::InvalidGroup(format!("element {x} has no inverse")));
                }
            }
        }
        let mul: Vec<usize> = table.into_iter().flatten().collect();
        check_associative(n, &mul)?;

        let labels = match labels {
            Some(l) if l.len() != n => {
                return Err(Error::InvalidGroup(format!(
                    "{} labels for a group of order {n}",
                    l.len()
                )))
            }
            Some(l) => l,
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        let classes = ConjugacyClassTable::compute(n, &mul, &inv);
        Ok(FiniteGroup {
            name: None,
            n,
            mul,
            inv,
            labels,
            classes,
        })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let (table, labels) = builtin::table(name)?;
        let mut g = Self::from_table(table, Some(labels))?;
        g.name = Some(name.to_string());
        Ok(g)
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        match spec {
            GroupSpec::Builtin { name } => Self::builtin(name),
            GroupSpec::Table {
                order,
                table,
                labels,
            } => {
                if *order != table.len() {
                    return Err(Error::InvalidGroup(format!(
                        "declared order {order} but table has {} rows",
                        table.len()
                    )));
                }
                Self::from_table(table.clone(), labels.clone())
            }
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub const fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// `g x g⁻¹`
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv[g])
    }

    /// `a b a⁻¹ b⁻¹`
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(ab, self.inv[ba])
    }

    /// Product `xs[0] xs[1] ... xs[k-1]`.
    pub fn product<I: IntoIterator<Item = usize>>(&self, xs: I) -> usize {
        xs.into_iter().fold(0, |acc, x| self.mul(acc, x))
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn classes(&self) -> &ConjugacyClassTable {
        &self.classes
    }

    /// Raw table in row-major order.
    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Same multiplication table (labels are ignored).
    pub fn same_table(&self, other: &FiniteGroup) -> bool {
        self.n == other.n && self.mul == other.mul
    }

    /// Subgroup generated by `gens`, as a membership mask.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.n];
        inside[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    stack.push(y);
                }
            }
        }
        inside
    }

    /// Order of the centralizer of the set `xs`.
    pub fn centralizer_order(&self, xs: &[usize]) -> usize {
        (0..self.n)
            .filter(|&g| xs.iter().all(|&x| self.mul(g, x) == self.mul(x, g)))
            .count()
    }
}

pub(crate) fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || a.same_table(b)
}

fn check_associative(n: usize, mul: &[usize]) -> Result<()> {
    let m = |a: usize, b: usize| mul[a * n + b];
    let bad = |a, b, c| {
        Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})"))
    };
    if n <= FULL_ASSOC_LIMIT {
        for a in 0..n {
            for b in 0..n {
                let ab = m(a, b);
                for c in 0..n {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(bad(a, b, c));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6173_736f_6369_6174);
        for _ in 0..ASSOC_SPOT_CHECKS {
            let (a, b, c) = (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            if m(m(a, b), c) != m(a, m(b, c)) {
                return Err(bad(a, b, c));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_inverse_is_identity_map() {
        let g = FiniteGroup::builtin("Z2").unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.inv(0), 0);
        assert_eq!(g.inv(1), 1);
    }

    #[test]
    fn closure_violation_rejected() {
        let err = FiniteGroup::from_table(vec![vec![0, 1], vec![1, 2]], None).unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(_)));
    }

    #[test]
    fn non_associative_rejected() {
        // A Latin square with identity 0 that is not a group (order 5 loop).
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FiniteGroup::from_table(t, None).unwrap_err();
        assert!(err.to_string().contains("associative"), "{err}");
    }

    #[test]
    fn missing_identity_and_empty() {
        assert!(FiniteGroup::from_table(vec![], None).is_err());
        assert!(FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]], None).is_err());
    }

    #[test]
    fn every_builtin_validates() {
        for name in BUILTIN_NAMES {
            let g = FiniteGroup::builtin(name).unwrap();
            for x in 0..g.order() {
                assert_eq!(g.mul(x, g.inv(x)), 0);
            }
        }
    }

    #[test]
    fn spec_round_trip() {
        let s: GroupSpec = serde_json::from_str(r#"{"kind":"builtin","name":"S3"}"#).unwrap();
        assert_eq!(FiniteGroup::from_spec(&s).unwrap().order(), 6);
        let s: GroupSpec =
            serde_json::from_str(r#"{"kind":"table","order":2,"table":[[0,1],[1,0]],"labels":["e","s"]}"#)
                .unwrap();
        let g = FiniteGroup::from_spec(&s).unwrap();
        assert_eq!(g.label(1), "s");
        let s: GroupSpec =
            serde_json::from_str(r#"{"kind":"table","order":3,"table":[[0,1],[1,0]]}"#).unwrap();
        assert!(FiniteGroup::from_spec(&s).is_err());
    }

    #[test]
    fn centralizers() {
        let s3 = FiniteGroup::builtin("S3").unwrap();
        assert_eq!(s3.centralizer_order(&[]), 6);
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(s3.centralizer_order(&all), 1);
    }
}
