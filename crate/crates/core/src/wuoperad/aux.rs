//! Small complexes from the collapse argument for `O → Assoc₊`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::exactlinalg::{GradedComplex, Scalar, SparseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ComplexKind {
    /// the alternating `id / 0` pattern complex
    Kplain,
    /// cobar of the cofree coalgebra on `p_1, p_2, …`
    K2,
}

#[derive(Clone, Debug)]
pub struct ProofComplex {
    pub kind: ComplexKind,
    /// `i_max` for `Kplain`, `n_max` for `K2`
    pub bound: usize,
    pub complex: GradedComplex,
    pub basis: BTreeMap<i32, Vec<String>>,
    /// degrees where the truncation can create spurious cohomology
    pub edge_degrees: Vec<i32>,
}

/// Compositions of `n` (ordered tuples of positive integers).
fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn word_degree(w: &[usize]) -> i32 {
    -(w.iter().map(|&n| n as i32 - 1).sum::<i32>())
}

fn word_name(w: &[usize]) -> String {
    w.iter().map(|n| format!("p{n}")).collect::<Vec<_>>().join("⊗")
}

/// `d(p_{n_1}⊗…⊗p_{n_k}) = Σ_i (-1)^{Σ_{j<i}(n_j-1)} …⊗d(p_{n_i})⊗…`
/// with `d p_n = Σ_{1≤i≤n-1} (-1)^{i-1} p_i⊗p_{n-i}`.
pub(crate) fn cobar_word_differential(w: &[usize]) -> Vec<(i64, Vec<usize>)> {
    let mut out = Vec::new();
    let mut shift = 0usize;
    for (pos, &n) in w.iter().enumerate() {
        for i in 1..n {
            let sign = if (shift + i - 1) % 2 == 0 { 1 } else { -1 };
            let mut v = w[..pos].to_vec();
            v.push(i);
            v.push(n - i);
            v.extend_from_slice(&w[pos + 1..]);
            out.push((sign, v));
        }
        shift += n - 1;
    }
    out
}

/// Words with `Σ n_i ≤ n_max`. The differential preserves `Σ n_i`, so
/// every truncation is a direct summand and has no edge.
pub fn cofree_cobar_complex(n_max: usize) -> ProofComplex {
    assert!(n_max >= 1);
    let lo = -(n_max as i32 - 1);
    let mut basis: BTreeMap<i32, Vec<Vec<usize>>> = (lo..=0).map(|d| (d, Vec::new())).collect();
    for n in 1..=n_max {
        for w in compositions(n) {
            basis.get_mut(&word_degree(&w)).unwrap().push(w);
        }
    }
    for v in basis.values_mut() {
        v.sort();
    }
    let index: HashMap<&Vec<usize>, usize> = basis
        .values()
        .flat_map(|v| v.iter().enumerate().map(|(i, w)| (w, i)))
        .collect();
    let mut diffs = BTreeMap::new();
    for d in lo..0 {
        let mut entries = Vec::new();
        for (j, w) in basis[&d].iter().enumerate() {
            for (s, v) in cobar_word_differential(w) {
                entries.push((index[&v], j, Scalar::int(s)));
            }
        }
        diffs.insert(d, SparseMatrix::from_entries(basis[&(d + 1)].len(), basis[&d].len(), entries));
    }
    let dims = basis.values().map(Vec::len).collect();
    let complex = GradedComplex::new(lo, dims, diffs).expect("cobar differential squares to zero");
    ProofComplex {
        kind: ComplexKind::K2,
        bound: n_max,
        complex,
        basis: basis
            .into_iter()
            .map(|(d, v)| (d, v.iter().map(|w| word_name(w)).collect()))
            .collect(),
        edge_degrees: Vec::new(),
    }
}

/// `k` in each degree `-1, …, -i_max`; the map out of degree `-i` is the
/// identity for even `i` and zero for odd `i`. Degree `-i_max` is an edge.
pub fn type_i_segment_complex(i_max: usize) -> ProofComplex {
    assert!(i_max >= 1);
    let lo = -(i_max as i32);
    let mut diffs = BTreeMap::new();
    for i in 2..=i_max {
        let m = if i % 2 == 0 {
            SparseMatrix::identity(1)
        } else {
            SparseMatrix::zeros(1, 1)
        };
        diffs.insert(-(i as i32), m);
    }
    let complex = GradedComplex::new(lo, vec![1; i_max], diffs).expect("pattern complex squares to zero");
    ProofComplex {
        kind: ComplexKind::Kplain,
        bound: i_max,
        complex,
        basis: (1..=i_max).map(|i| (-(i as i32), vec![format!("e{i}")])).collect(),
        edge_degrees: vec![lo],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::{cohomology_dims, Dim};

    #[test]
    fn cobar_small() {
        assert!(cobar_word_differential(&[1]).is_empty());
        assert_eq!(cobar_word_differential(&[2]), vec![(1, vec![1, 1])]);
        assert_eq!(cobar_word_differential(&[3]), vec![(1, vec![1, 2]), (-1, vec![2, 1])]);
        let k = cofree_cobar_complex(4);
        let h = cohomology_dims(&k.complex);
        assert_eq!(h.get(0), Dim::Known(1));
        assert!(h.is_zero_on((-3, -1)));
    }

    #[test]
    fn segment() {
        let k = type_i_segment_complex(1);
        assert_eq!(cohomology_dims(&k.complex).get(-1), Dim::Known(1));
        let k = type_i_segment_complex(6);
        assert!(cohomology_dims(&k.complex).is_zero_on((-6, -1)));
        let k = type_i_segment_complex(5);
        let h = cohomology_dims(&k.complex);
        assert_eq!(h.get(-5), Dim::Known(1));
        assert!(h.is_zero_on((-4, -1)));
    }
}
