//! Character tables from class-multiplication matrices.
//!
//! With class sums `K_i K_j = Σ_k a_ijk K_k`, each irreducible character gives
//! a common eigenvector `ω_k = |C_k| χ(g_k) / d` of the matrices
//! `(M_i)_jk = a_ijk`. A random real combination of the `M_i` separates the
//! eigenvectors; orthogonality then fixes `d`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FiniteGroup;
use crate::error::{Error, Result};

const MAX_CLASSES: usize = 64;
const DRAWS: u64 = 12;
const DEFAULT_SEED: u64 = 0x6368_6172;
const ORTHO_TOL: f64 = 1e-9;
const DIM_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct CharacterTable {
    /// `values[α][c]` is `χ_α` on class `c`.
    values: Vec<Vec<Complex64>>,
    dims: Vec<usize>,
    indicators: Vec<i32>,
}

impl CharacterTable {
    pub fn compute(g: &FiniteGroup) -> Result<Self> {
        Self::compute_seeded(g, DEFAULT_SEED)
    }

    /// Tries up to a fixed number of random combinations drawn from `seed`.
    pub fn compute_seeded(g: &FiniteGroup, seed: u64) -> Result<Self> {
        let r = g.classes().count();
        if r > MAX_CLASSES {
            return Err(Error::CharacterTable(format!(
                "{r} classes, at most {MAX_CLASSES} supported"
            )));
        }
        let mats = class_matrices(g);
        let mut last = String::new();
        for draw in 0..DRAWS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(draw));
            match attempt(g, &mats, &mut rng) {
                Ok(t) => return Ok(t),
                Err(msg) => last = msg,
            }
        }
        Err(Error::CharacterTable(format!(
            "no separating combination after {DRAWS} draws (last: {last})"
        )))
    }

    /// Number of irreducible characters.
    pub fn count(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, alpha: usize) -> usize {
        self.dims[alpha]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn value(&self, alpha: usize, class: usize) -> Complex64 {
        self.values[alpha][class]
    }

    pub fn row(&self, alpha: usize) -> &[Complex64] {
        &self.values[alpha]
    }

    /// Frobenius–Schur indicator: 1 real, 0 complex, −1 quaternionic.
    pub fn indicator(&self, alpha: usize) -> i32 {
        self.indicators[alpha]
    }

    pub fn indicators(&self) -> &[i32] {
        &self.indicators
    }

    /// Largest deviation from row and column orthogonality.
    pub fn orthogonality_defect(&self, g: &FiniteGroup) -> f64 {
        let cl = g.classes();
        let n = g.order() as f64;
        let r = self.count();
        let mut worst: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                let s: Complex64 = (0..r)
                    .map(|c| cl.size(c) as f64 * self.values[a][c] * self.values[b][c].conj())
                    .sum();
                let want = if a == b { n } else { 0.0 };
                worst = worst.max((s - want).norm());
            }
        }
        for c in 0..r {
            for e in 0..r {
                let s: Complex64 = (0..r)
                    .map(|a| self.values[a][c] * self.values[a][e].conj())
                    .sum();
                let want = if c == e { n / cl.size(c) as f64 } else { 0.0 };
                worst = worst.max((s - want).norm());
            }
        }
        worst
    }
}

fn class_matrices(g: &FiniteGroup) -> Vec<DMatrix<f64>> {
    let cl = g.classes();
    let r = cl.count();
    let mut mats = vec![DMatrix::<f64>::zeros(r, r); r];
    for i in 0..r {
        for j in 0..r {
            for &x in cl.members(i) {
                for &y in cl.members(j) {
                    let z = g.mul(x, y);
                    let k = cl.class_of(z);
                    if z == cl.representative(k) {
                        mats[i][(j, k)] += 1.0;
                    }
                }
            }
        }
    }
    mats
}

fn attempt(
    g: &FiniteGroup,
    mats: &[DMatrix<f64>],
    rng: &mut ChaCha8Rng,
) -> std::result::Result<CharacterTable, String> {
    let cl = g.classes();
    let r = cl.count();
    let n = g.order() as f64;

    let mut m = DMatrix::<f64>::zeros(r, r);
    for mi in mats.iter().skip(1) {
        m += mi * rng.random_range(0.5..1.5);
    }
    let eig = m.complex_eigenvalues();
    let scale = 1.0 + eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for a in 0..r {
        for b in a + 1..r {
            if (eig[a] - eig[b]).norm() < 1e-6 * scale {
                return Err(format!("eigenvalues {a} and {b} collide"));
            }
        }
    }

    let mc: DMatrix<Complex64> = m.map(|x| Complex64::new(x, 0.0));
    let mut rows = Vec::with_capacity(r);
    for lambda in eig.iter() {
        let shifted = &mc - DMatrix::<Complex64>::identity(r, r) * *lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.ok_or("SVD returned no right vectors")?;
        let (k, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .ok_or("empty SVD")?;
        let v: Vec<Complex64> = v_t.row(k).iter().map(|z| z.conj()).collect();
        if v[0].norm() < 1e-8 {
            return Err("eigenvector vanishes on the identity class".into());
        }
        let omega: Vec<Complex64> = v.iter().map(|z| z / v[0]).collect();
        let norm: f64 = (0..r)
            .map(|c| omega[c].norm_sqr() / cl.size(c) as f64)
            .sum();
        let d_float = (n / norm).sqrt();
        let d = d_float.round();
        if (d_float - d).abs() > DIM_TOL || d < 1.0 {
            return Err(format!("non-integral dimension {d_float}"));
        }
        let mut chi: Vec<Complex64> = (0..r)
            .map(|c| omega[c] * d / cl.size(c) as f64)
            .collect();
        chi[0] = Complex64::new(d, 0.0);
        for c in 0..r {
            let ci = cl.inverse(c);
            if ci == c {
                chi[c].im = 0.0;
            } else if ci > c {
                chi[ci] = chi[c].conj();
            }
        }
        rows.push((d as usize, chi));
    }

    rows.sort_by(|(da, a), (db, b)| da.cmp(db).then_with(|| row_order(a, b)));
    let dims: Vec<usize> = rows.iter().map(|(d, _)| *d).collect();
    let values: Vec<Vec<Complex64>> = rows.into_iter().map(|(_, v)| v).collect();

    let mut indicators = Vec::with_capacity(r);
    for row in &values {
        let s: Complex64 = (0..g.order())
            .map(|x| row[cl.class_of(g.mul(x, x))])
            .sum::<Complex64>()
            / n;
        let nu = s.re.round();
        if (s - Complex64::new(nu, 0.0)).norm() > DIM_TOL {
            return Err(format!("indicator {s} is not an integer"));
        }
        indicators.push(nu as i32);
    }

    let table = CharacterTable {
        values,
        dims,
        indicators,
    };
    let defect = table.orthogonality_defect(g);
    if defect > ORTHO_TOL {
        return Err(format!("orthogonality defect {defect:e}"));
    }
    Ok(table)
}

/// Descending on values, rounded so that the order is stable under noise.
fn row_order(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    let key = |z: &Complex64| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64);
    for (x, y) in a.iter().zip(b) {
        let o = key(y).cmp(&key(x));
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::BUILTIN_NAMES;

    fn table(name: &str) -> (FiniteGroup, CharacterTable) {
        let g = FiniteGroup::builtin(name).unwrap();
        let t = CharacterTable::compute(&g).unwrap();
        (g, t)
    }

    #[test]
    fn z2_rows() {
        let (_, t) = table("Z2");
        assert!(t.row(0).iter().all(|z| (z - 1.0).norm() < 1e-12));
        assert!((t.value(1, 1) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dimensions() {
        assert_eq!(table("S3").1.dims(), &[1, 1, 2]);
        assert_eq!(table("Q8").1.dims(), &[1, 1, 1, 1, 2]);
        assert_eq!(table("S4").1.dims(), &[1, 1, 2, 3, 3]);
        assert_eq!(table("A4").1.dims(), &[1, 1, 1, 3]);
    }

    #[test]
    fn orthogonality_and_dimension_sum() {
        for name in BUILTIN_NAMES {
            let (g, t) = table(name);
            assert!(t.orthogonality_defect(&g) < 1e-9, "{name}");
            assert_eq!(t.dims().iter().map(|d| d * d).sum::<usize>(), g.order());
        }
    }

    #[test]
    fn s3_against_brute_force() {
        // independent oracle: sign and standard characters of S3 from permutations
        let (g, t) = table("S3");
        let cl = g.classes();
        let fixed_points = |x: usize| -> f64 {
            let moved = g.label(x).chars().filter(char::is_ascii_digit).count();
            3.0 - moved as f64
        };
        for c in 0..cl.count() {
            let x = cl.representative(c);
            let sign = if fixed_points(x) == 1.0 { -1.0 } else { 1.0 };
            assert!((t.value(1, c).re - sign).abs() < 1e-9);
            assert!((t.value(2, c).re - (fixed_points(x) - 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn indicators() {
        assert_eq!(table("Q8").1.indicators(), &[1, 1, 1, 1, -1]);
        assert_eq!(table("Z3").1.indicators(), &[1, 0, 0]);
        assert!(table("S4").1.indicators().iter().all(|&v| v == 1));
    }

    #[test]
    fn seed_changes_nothing() {
        let g = FiniteGroup::builtin("A4").unwrap();
        let a = CharacterTable::compute_seeded(&g, 1).unwrap();
        let b = CharacterTable::compute_seeded(&g, 99).unwrap();
        for al in 0..a.count() {
            for c in 0..a.count() {
                assert!((a.value(al, c) - b.value(al, c)).norm() < 1e-9);
            }
        }
    }
}
