/// Conjugacy classes, ordered by their smallest element (identity class first).
/// The representative of a class is its smallest element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClassTable {
    class_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    inverse_class: Vec<usize>,
}

impl ConjugacyClassTable {
    pub(super) fn compute(n: usize, mul: &[usize], inv: &[usize]) -> Self {
        let m = |a: usize, b: usize| mul[a * n + b];
        let mut class_of = vec![usize::MAX; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let c = members.len();
            let mut orbit: Vec<usize> = (0..n).map(|g| m(m(g, x), inv[g])).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                class_of[y] = c;
            }
            members.push(orbit);
        }
        let inverse_class = members.iter().map(|c| class_of[inv[c[0]]]).collect();
        ConjugacyClassTable {
            class_of,
            members,
            inverse_class,
        }
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn size(&self, c: usize) -> usize {
        self.members[c].len()
    }

    pub fn representative(&self, c: usize) -> usize {
        self.members[c][0]
    }

    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    pub fn inverse(&self, c: usize) -> usize {
        self.inverse_class[c]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }
}

#[cfg(test)]
mod tests {
    use crate::group::{FiniteGroup, BUILTIN_NAMES};

    #[test]
    fn partition_and_involution() {
        for name in BUILTIN_NAMES {
            let g = FiniteGroup::builtin(name).unwrap();
            let cl = g.classes();
            assert_eq!(cl.sizes().iter().sum::<usize>(), g.order());
            assert_eq!(cl.members(0), &[0]);
            for c in 0..cl.count() {
                assert_eq!(cl.inverse(cl.inverse(c)), c);
                for &x in cl.members(c) {
                    assert_eq!(cl.class_of(x), c);
                    for h in 0..g.order() {
                        assert_eq!(cl.class_of(g.conj(h, x)), c);
                    }
                }
            }
        }
    }

    #[test]
    fn documented_class_sizes() {
        let sizes = |n: &str| FiniteGroup::builtin(n).unwrap().classes().sizes();
        assert_eq!(sizes("Z4"), vec![1, 1, 1, 1]);
        assert_eq!(sizes("S3"), vec![1, 3, 2]);
        let mut q8 = sizes("Q8");
        q8.sort();
        assert_eq!(q8, vec![1, 1, 2, 2, 2]);
    }
}
