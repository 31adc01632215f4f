//! Builtin groups with fixed element orderings.
//!
//! The orderings are recorded in `fixtures/builtin_groups.json`:
//! - `Zn`: element `k` is the residue `k mod n`.
//! - `S3`, `S4`: permutations of `{1..m}` in lexicographic order of their
//!   one-line notation; `(στ)(i) = σ(τ(i))`. Labels use cycle notation.
//! - `A4`: the even permutations of `S4`, in the same lexicographic order.
//! - `D4`: index `k + 4j` is `r^k s^j`, with `s r s = r⁻¹`.
//! - `Q8`: `1, -1, i, -i, j, -j, k, -k`.

use crate::error::{Error, Result};

pub const BUILTIN_NAMES: [&str; 9] = ["Z2", "Z3", "Z4", "Z6", "S3", "S4", "A4", "D4", "Q8"];

type Table = (Vec<Vec<usize>>, Vec<String>);

pub(super) fn table(name: &str) -> Result<Table> {
    match name {
        "Z2" => Ok(cyclic(2)),
        "Z3" => Ok(cyclic(3)),
        "Z4" => Ok(cyclic(4)),
        "Z6" => Ok(cyclic(6)),
        "S3" => Ok(permutation_group(3, false)),
        "S4" => Ok(permutation_group(4, false)),
        "A4" => Ok(permutation_group(4, true)),
        "D4" => Ok(dihedral4()),
        "Q8" => Ok(quaternion()),
        other => Err(Error::InvalidGroup(format!(
            "unknown builtin {other:?}; expected one of {BUILTIN_NAMES:?}"
        ))),
    }
}

fn cyclic(n: usize) -> Table {
    let t = (0..n)
        .map(|a| (0..n).map(|b| (a + b) % n).collect())
        .collect();
    (t, (0..n).map(|k| k.to_string()).collect())
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in 0..m {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(m, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(m, &mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

fn is_even(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

fn cycle_label(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        let mut first = true;
        while !seen[x] {
            seen[x] = true;
            if !first {
                out.push(' ');
            }
            out.push_str(&(x + 1).to_string());
            first = false;
            x = p[x];
        }
        out.push(')');
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

fn permutation_group(m: usize, even_only: bool) -> Table {
    let elems: Vec<Vec<usize>> = permutations(m)
        .into_iter()
        .filter(|p| !even_only || is_even(p))
        .collect();
    let index = |p: &[usize]| elems.iter().position(|q| q == p).unwrap();
    let t = elems
        .iter()
        .map(|s| {
            elems
                .iter()
                .map(|tau| {
                    let comp: Vec<usize> = (0..m).map(|i| s[tau[i]]).collect();
                    index(&comp)
                })
                .collect()
        })
        .collect();
    (t, elems.iter().map(|p| cycle_label(p)).collect())
}

fn dihedral4() -> Table {
    // r^a s^b · r^c s^d = r^(a + (-1)^b c) s^(b + d)
    let idx = |k: usize, j: usize| k + 4 * j;
    let mut t = vec![vec![0; 8]; 8];
    for a in 0..4 {
        for b in 0..2 {
            for c in 0..4 {
                for d in 0..2 {
                    let k = if b == 0 { a + c } else { a + 4 - c };
                    t[idx(a, b)][idx(c, d)] = idx(k % 4, (b + d) % 2);
                }
            }
        }
    }
    let labels = ["e", "r", "r2", "r3", "s", "rs", "r2s", "r3s"];
    (t, labels.iter().map(|s| s.to_string()).collect())
}

fn quaternion() -> Table {
    // unit index u ∈ {1, i, j, k} = 0..4, element index 2u + (sign bit)
    fn unit_mul(u: usize, v: usize) -> (usize, bool) {
        match (u, v) {
            (0, v) => (v, false),
            (u, 0) => (u, false),
            (u, v) if u == v => (0, true),
            (1, 2) => (3, false),
            (2, 3) => (1, false),
            (3, 1) => (2, false),
            (2, 1) => (3, true),
            (3, 2) => (1, true),
            (1, 3) => (2, true),
            _ => unreachable!(),
        }
    }
    let mut t = vec![vec![0; 8]; 8];
    for x in 0..8 {
        for y in 0..8 {
            let (w, neg) = unit_mul(x / 2, y / 2);
            let sign = (x % 2) ^ (y % 2) ^ usize::from(neg);
            t[x][y] = 2 * w + sign;
        }
    }
    let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
    (t, labels.iter().map(|s| s.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::super::FiniteGroup;
    use super::*;

    #[derive(serde::Deserialize)]
    struct Fixture {
        name: String,
        order: usize,
        labels: Vec<String>,
        class_sizes: Vec<usize>,
    }

    #[test]
    fn fixture_orderings_match() {
        let raw = include_str!("../../fixtures/builtin_groups.json");
        let fixtures: Vec<Fixture> = serde_json::from_str(raw).unwrap();
        assert_eq!(fixtures.len(), BUILTIN_NAMES.len());
        for f in fixtures {
            let g = FiniteGroup::builtin(&f.name).unwrap();
            assert_eq!(g.order(), f.order, "{}", f.name);
            assert_eq!(g.labels(), &f.labels[..], "{}", f.name);
            let sizes: Vec<usize> = (0..g.classes().count())
                .map(|c| g.classes().size(c))
                .collect();
            assert_eq!(sizes, f.class_sizes, "{}", f.name);
        }
    }

    #[test]
    fn s3_composition_convention() {
        let g = FiniteGroup::builtin("S3").unwrap();
        let a = g.element_by_label("(1 2)").unwrap();
        let b = g.element_by_label("(2 3)").unwrap();
        // right factor acts first
        assert_eq!(g.label(g.mul(a, b)), "(1 2 3)");
    }

    #[test]
    fn quaternion_relations() {
        let g = FiniteGroup::builtin("Q8").unwrap();
        let e = |l: &str| g.element_by_label(l).unwrap();
        assert_eq!(g.mul(e("i"), e("j")), e("k"));
        assert_eq!(g.mul(e("j"), e("i")), e("-k"));
        assert_eq!(g.mul(e("k"), e("k")), e("-1"));
        assert_eq!(g.product([e("i"), e("j"), e("k")]), e("-1"));
    }

    #[test]
    fn dihedral_relation() {
        let g = FiniteGroup::builtin("D4").unwrap();
        let (r, s) = (1, 4);
        assert_eq!(g.product([s, r, s]), g.inv(r));
        assert_eq!(g.mul(r, s), 5);
    }
}
