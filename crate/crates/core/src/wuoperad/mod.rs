//! The dg operads `O` and `O'` on normal-form trees: differential,
//! truncated complexes and cohomology, the projection to `Assoc₊`, and the
//! auxiliary complexes used in the collapse argument.

mod aux;
mod differential;

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactlinalg::{cohomology_dims_in, solve, ComplexError, Field, GradedComplex, Scalar, SparseMatrix};
use crate::treeops::{enumerate_trees, GenTree, Mode};

pub use aux::{cofree_cobar_complex, type_i_segment_complex, ComplexKind, ProofComplex};
pub use differential::{generator_terms, Chain, Differential, Fault};

#[derive(Debug, Error)]
pub enum OperadError {
    #[error("d∘d ≠ 0 on basis tree {tree} (degree {degree}): {witness}")]
    SquareNonzero {
        tree: String,
        degree: i32,
        witness: String,
    },
    #[error("differential of {tree} leaves the truncated basis at {term}")]
    Escaped { tree: String, term: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("elements of different arity or degree cannot be added")]
    Inhomogeneous,
}

/// Homogeneous linear combination of normal-form trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadElement {
    pub mode: Mode,
    pub terms: BTreeMap<GenTree, Scalar>,
}

impl OperadElement {
    pub fn zero(mode: Mode) -> Self {
        OperadElement {
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn tree(mode: Mode, t: GenTree) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(t, Scalar::one());
        OperadElement { mode, terms }
    }

    pub fn from_chain(mode: Mode, c: &Chain) -> Self {
        OperadElement {
            mode,
            terms: c.iter().map(|(t, v)| (t.clone(), Scalar::int(*v))).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(arity, degree)` or `None` for the zero element.
    pub fn grading(&self) -> Option<(usize, i32)> {
        self.terms.keys().next().map(|t| (t.arity(), t.degree()))
    }

    pub fn is_homogeneous(&self) -> bool {
        let g = self.grading();
        self.terms.keys().all(|t| Some((t.arity(), t.degree())) == g)
    }

    pub fn add_scaled(&mut self, other: &OperadElement, s: &Scalar) -> Result<(), OperadError> {
        if let (Some(a), Some(b)) = (self.grading(), other.grading()) {
            if a != b {
                return Err(OperadError::Inhomogeneous);
            }
        }
        for (t, v) in &other.terms {
            let e = self.terms.entry(t.clone()).or_insert_with(Scalar::zero);
            *e += &(v * s);
        }
        self.terms.retain(|_, v| !v.is_zero());
        Ok(())
    }

    pub fn differential(&self, d: &Differential) -> OperadElement {
        let mut out = OperadElement::zero(self.mode);
        for (t, v) in &self.terms {
            for (s, c) in d.of_tree(t) {
                let e = out.terms.entry(s).or_insert_with(Scalar::zero);
                *e += &(v * &Scalar::int(c));
            }
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    pub fn max_unit_weight(&self) -> usize {
        self.terms.keys().map(GenTree::unit_weight).max().unwrap_or(0)
    }
}

/// Differential of a single tree as an element.
pub fn differential(x: &OperadElement) -> OperadElement {
    x.differential(&Differential::new(x.mode))
}

/// `Assoc₊(N) = k`: one coefficient per arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocPlusElement {
    pub arity: usize,
    pub coefficient: Scalar,
}

/// Sends `m ↦ m`, `j ↦ 1`, every `p` to 0.
pub fn project_assoc(x: &OperadElement) -> AssocPlusElement {
    let arity = x.grading().map_or(0, |g| g.0);
    let mut c = Scalar::zero();
    for (t, v) in &x.terms {
        if t.degree() == 0 && !t.has_p() {
            c += v;
        }
    }
    AssocPlusElement { arity, coefficient: c }
}

/// `♯(T) - ♯_p(T)`.
pub fn filtration_level(t: &GenTree) -> usize {
    t.filtration_level()
}

/// The part of `d t` at the same filtration level and the part one level
/// lower. Any other change of level is an error: it is returned as the
/// offending term.
pub fn split_by_level(d: &Differential, t: &GenTree) -> Result<(Chain, Chain), GenTree> {
    let l = t.filtration_level() as i64;
    let (mut same, mut lower) = (Chain::new(), Chain::new());
    for (s, c) in d.of_tree(t) {
        match s.filtration_level() as i64 - l {
            0 => {
                same.insert(s, c);
            }
            -1 => {
                lower.insert(s, c);
            }
            _ => return Err(s),
        }
    }
    Ok((same, lower))
}

/// Truncated piece of `O(N)` or `O'(N)` with its named basis.
#[derive(Clone, Debug)]
pub struct OperadComplex {
    pub arity: usize,
    pub q_max: usize,
    pub degree_min: i32,
    pub mode: Mode,
    pub complex: GradedComplex,
    pub basis: BTreeMap<i32, Vec<GenTree>>,
    /// degrees whose cohomology is not certified by the truncation
    pub edge_degrees: Vec<i32>,
}

impl OperadComplex {
    pub fn basis_size(&self) -> usize {
        self.basis.values().map(Vec::len).sum()
    }

    pub fn index_of(&self, t: &GenTree) -> Option<(i32, usize)> {
        let d = t.degree();
        self.basis.get(&d)?.iter().position(|x| x == t).map(|i| (d, i))
    }
}

/// Span of `enumerate_trees(N, Q_max, degree_min - 1)` in degrees
/// `[degree_min - 1, 1]`, with the assembled differential. Fails if
/// `d∘d ≠ 0`.
pub fn operad_complex(arity: usize, q_max: usize, degree_min: i32, mode: Mode) -> Result<OperadComplex, OperadError> {
    operad_complex_with(&Differential::new(mode), arity, q_max, degree_min)
}

pub fn operad_complex_with(
    d: &Differential,
    arity: usize,
    q_max: usize,
    degree_min: i32,
) -> Result<OperadComplex, OperadError> {
    let mode = d.mode();
    let lo = degree_min - 1;
    let trees = enumerate_trees(arity, q_max, lo, mode);
    let mut basis: BTreeMap<i32, Vec<GenTree>> = (lo..=1).map(|k| (k, Vec::new())).collect();
    for t in trees {
        basis.get_mut(&t.degree()).unwrap().push(t);
    }
    let index: HashMap<&GenTree, usize> = basis
        .values()
        .flat_map(|v| v.iter().enumerate().map(|(i, t)| (t, i)))
        .collect();
    let images: BTreeMap<i32, Vec<Chain>> = basis
        .iter()
        .map(|(k, v)| (*k, v.par_iter().map(|t| d.of_tree(t)).collect()))
        .collect();
    let mut diffs = BTreeMap::new();
    for k in lo..1 {
        let src = &basis[&k];
        let mut entries = Vec::new();
        for (j, img) in images[&k].iter().enumerate() {
            for (s, c) in img {
                let Some(&i) = index.get(s) else {
                    return Err(OperadError::Escaped {
                        tree: src[j].encode(),
                        term: s.encode(),
                    });
                };
                entries.push((i, j, Scalar::int(*c)));
            }
        }
        diffs.insert(k, SparseMatrix::from_entries(basis[&(k + 1)].len(), src.len(), entries));
    }
    // d∘d = 0 tree by tree so a failure names its witness
    for k in lo..0 {
        for (j, img) in images[&k].iter().enumerate() {
            let mut dd = Chain::new();
            for (s, c) in img {
                let i = index[s];
                for (u, e) in &images[&(k + 1)][i] {
                    differential::add_term(&mut dd, u.clone(), c * e);
                }
            }
            if !dd.is_empty() {
                let witness: Vec<String> = dd.iter().map(|(t, c)| format!("{c}·{t}")).collect();
                return Err(OperadError::SquareNonzero {
                    tree: basis[&k][j].encode(),
                    degree: k,
                    witness: witness.join(" + "),
                });
            }
        }
    }
    let dims = basis.values().map(Vec::len).collect();
    let complex = GradedComplex::new(lo, dims, diffs)?;
    Ok(OperadComplex {
        arity,
        q_max,
        degree_min,
        mode,
        complex,
        basis,
        edge_degrees: vec![lo],
    })
}

/// One row of a truncated cohomology computation.
#[derive(Clone, Debug, Serialize)]
pub struct CohomologyRow {
    pub mode: Mode,
    pub arity: usize,
    pub q_max: usize,
    pub degree: i32,
    pub dim: usize,
    pub stabilized: bool,
    pub basis_size: usize,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncatedCohomology {
    pub mode: Mode,
    pub arity: usize,
    pub window: (i32, i32),
    /// `per_q[q][degree]`, for `q = 0..=q_max`
    pub per_q: Vec<BTreeMap<i32, usize>>,
    pub basis_sizes: Vec<usize>,
    pub millis: Vec<u128>,
}

impl TruncatedCohomology {
    pub fn q_max(&self) -> usize {
        self.per_q.len() - 1
    }

    pub fn at_top(&self) -> &BTreeMap<i32, usize> {
        self.per_q.last().unwrap()
    }

    /// Whether `H^d` agrees between truncation levels `q - 1` and `q`.
    pub fn stabilized_at(&self, q: usize, d: i32) -> bool {
        q >= 1 && self.per_q[q].get(&d) == self.per_q[q - 1].get(&d)
    }

    /// Smallest `q` from which every degree of the window stays constant
    /// up to `q_max`, provided `q < q_max`.
    pub fn stable_from(&self) -> Option<usize> {
        let top = self.q_max();
        let mut q = top;
        while q >= 1 && self.per_q[q - 1] == self.per_q[top] {
            q -= 1;
        }
        (q < top).then_some(q)
    }

    pub fn rows(&self) -> Vec<CohomologyRow> {
        let mut out = Vec::new();
        for (q, h) in self.per_q.iter().enumerate() {
            for (&d, &dim) in h {
                out.push(CohomologyRow {
                    mode: self.mode,
                    arity: self.arity,
                    q_max: q,
                    degree: d,
                    dim,
                    stabilized: self.stabilized_at(q, d),
                    basis_size: self.basis_sizes[q],
                    millis: self.millis[q],
                });
            }
        }
        out
    }
}

/// Cohomology of the truncated complexes for `Q = 0..=q_max` in the
/// degrees of `window` (which must not contain the edge degree).
pub fn truncated_cohomology(
    arity: usize,
    q_max: usize,
    window: (i32, i32),
    mode: Mode,
    field: Field,
) -> Result<TruncatedCohomology, OperadError> {
    truncated_cohomology_with(&Differential::new(mode), arity, q_max, window, field)
}

pub fn truncated_cohomology_with(
    d: &Differential,
    arity: usize,
    q_max: usize,
    window: (i32, i32),
    field: Field,
) -> Result<TruncatedCohomology, OperadError> {
    let mut per_q = Vec::new();
    let mut sizes = Vec::new();
    let mut millis = Vec::new();
    for q in 0..=q_max {
        let t0 = Instant::now();
        let c = operad_complex_with(d, arity, q, window.0)?;
        let h = cohomology_dims_in(&c.complex, field);
        per_q.push((window.0..=window.1).map(|k| (k, h.dims.get(&k).copied().unwrap_or(0))).collect());
        sizes.push(c.basis_size());
        millis.push(t0.elapsed().as_millis());
    }
    Ok(TruncatedCohomology {
        mode: d.mode(),
        arity,
        window,
        per_q,
        basis_sizes: sizes,
        millis,
    })
}

/// The p-free representative of the unit class: `m_N`, `id` or `j`.
pub fn assoc_representative(arity: usize) -> GenTree {
    match arity {
        0 => GenTree::J,
        1 => GenTree::Leaf,
        n => GenTree::m_leaves(n),
    }
}

/// Whether the p-free representative spans `H⁰`: it is a cocycle, it is
/// not a coboundary, and `dim H⁰ = 1` over `field`.
pub fn h0_class_check(c: &OperadComplex, field: Field) -> bool {
    let rep = assoc_representative(c.arity);
    let Some((0, i)) = c.index_of(&rep) else {
        return false;
    };
    let h = cohomology_dims_in(&c.complex, field);
    if h.dims.get(&0) != Some(&1) {
        return false;
    }
    let n0 = c.complex.dim(0);
    let mut e = vec![field.zero(); n0];
    e[i] = field.one();
    let closed = c.complex.diff(0).to_field(field).apply(&e).iter().all(Scalar::is_zero);
    closed && solve(&c.complex.diff(-1).to_field(field), &e).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_complexes() {
        let c = operad_complex(2, 0, 0, Mode::O).unwrap();
        assert_eq!(c.basis[&0], vec![GenTree::m_leaves(2)]);
        assert!(c.complex.stored_diffs().values().all(SparseMatrix::is_zero));
        let c = operad_complex(0, 2, -1, Mode::O).unwrap();
        assert_eq!(c.basis[&0], vec![GenTree::J]);
        let enc: Vec<String> = c.basis[&-1].iter().map(GenTree::encode).collect();
        assert_eq!(enc, vec!["(p 2 [1]) (j)", "(p 2 [2]) (j)"]);
    }

    #[test]
    fn projection_examples() {
        let m3 = OperadElement::tree(Mode::O, GenTree::m_leaves(3));
        assert_eq!(project_assoc(&m3).coefficient, Scalar::one());
        let p = OperadElement::tree(Mode::O, GenTree::p(3, &[2]));
        assert!(project_assoc(&p).coefficient.is_zero());
    }

    #[test]
    fn h0_is_the_unit_class() {
        for n in 0..=3 {
            let c = operad_complex(n, 2, 0, Mode::O).unwrap();
            assert!(h0_class_check(&c, Field::Rational), "N={n}");
        }
    }

    #[test]
    fn type_i_groups() {
        let d = Differential::new(Mode::O);
        // an inner group of two unit slots: three merges collapse to one tree
        let (same, lower) = split_by_level(&d, &GenTree::p(4, &[2, 3])).unwrap();
        let want: Chain = [(GenTree::p(3, &[2]), 1)].into_iter().collect();
        assert_eq!(same, want);
        assert!(lower.keys().all(|t| t.filtration_level() == 0));
        // three slots: four alternating merges cancel
        let (same, _) = split_by_level(&d, &GenTree::p(5, &[2, 3, 4])).unwrap();
        assert!(same.is_empty());
        // a leftmost single slot (type II, odd) keeps `id` with coefficient 1
        let (same, _) = split_by_level(&d, &GenTree::p(2, &[1])).unwrap();
        assert_eq!(same.get(&GenTree::Leaf), Some(&1));
    }

    #[test]
    fn levels() {
        assert_eq!(filtration_level(&GenTree::m_leaves(2)), 0);
        assert_eq!(filtration_level(&GenTree::p(3, &[1, 3])), 0);
        assert_eq!(filtration_level(&GenTree::p(3, &[1])), 1);
    }
}
