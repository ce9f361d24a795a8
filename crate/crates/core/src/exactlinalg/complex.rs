use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::matrix::{rank_in, SparseMatrix};
use super::scalar::{Field, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("d∘d is nonzero from degree {degree}")]
    SquareNonzero { degree: i32 },
    #[error("differential at degree {degree} has shape {got:?}, expected {want:?}")]
    Shape {
        degree: i32,
        got: (usize, usize),
        want: (usize, usize),
    },
    #[error("degree {degree} outside the stored window")]
    OutsideWindow { degree: i32 },
    #[error("component at degree {degree} does not commute with the differentials")]
    NotChainMap { degree: i32 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Cochain complex over a contiguous window of degrees, differential of
/// degree +1. `diff(d)` has shape `dim(d+1) x dim(d)`; a missing map is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    lo: i32,
    dims: Vec<usize>,
    diffs: BTreeMap<i32, SparseMatrix>,
}

impl GradedComplex {
    /// Validates shapes and d∘d = 0.
    pub fn new(lo: i32, dims: Vec<usize>, diffs: BTreeMap<i32, SparseMatrix>) -> Result<Self, ComplexError> {
        let c = GradedComplex { lo, dims, diffs };
        for (&d, m) in &c.diffs {
            if !c.contains(d) || !c.contains(d + 1) {
                return Err(ComplexError::OutsideWindow { degree: d });
            }
            let want = (c.dim(d + 1), c.dim(d));
            if (m.rows(), m.cols()) != want {
                return Err(ComplexError::Shape {
                    degree: d,
                    got: (m.rows(), m.cols()),
                    want,
                });
            }
        }
        for (&d, m) in &c.diffs {
            if let Some(n) = c.diffs.get(&(d + 1)) {
                if !n.mul(m).is_zero() {
                    return Err(ComplexError::SquareNonzero { degree: d });
                }
            }
        }
        Ok(c)
    }

    /// Variant keyed by an explicit dims map; degrees between the extremes
    /// missing from `dims` get dimension 0.
    pub fn from_maps(dims: &BTreeMap<i32, usize>, diffs: BTreeMap<i32, SparseMatrix>) -> Result<Self, ComplexError> {
        let (Some(&lo), Some(&hi)) = (dims.keys().next(), dims.keys().next_back()) else {
            return Self::new(0, Vec::new(), diffs);
        };
        let v = (lo..=hi).map(|d| dims.get(&d).copied().unwrap_or(0)).collect();
        Self::new(lo, v, diffs)
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn contains(&self, d: i32) -> bool {
        !self.dims.is_empty() && d >= self.lo && d <= self.hi()
    }

    /// Dimension at `d`; zero outside the window.
    pub fn dim(&self, d: i32) -> usize {
        if self.contains(d) {
            self.dims[(d - self.lo) as usize]
        } else {
            0
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// The differential leaving degree `d` (zero matrix if not stored).
    pub fn diff(&self, d: i32) -> SparseMatrix {
        self.diffs
            .get(&d)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.dim(d + 1), self.dim(d)))
    }

    pub fn stored_diffs(&self) -> &BTreeMap<i32, SparseMatrix> {
        &self.diffs
    }

    pub fn field(&self) -> Field {
        self.diffs
            .values()
            .map(SparseMatrix::field)
            .find(|f| *f != Field::Rational)
            .unwrap_or(Field::Rational)
    }

    pub fn to_field(&self, field: Field) -> GradedComplex {
        GradedComplex {
            lo: self.lo,
            dims: self.dims.clone(),
            diffs: self.diffs.iter().map(|(d, m)| (*d, m.to_field(field))).collect(),
        }
    }

    /// Shift so that degree `d` of the result is degree `d + n` of `self`,
    /// with differential multiplied by `(-1)^n`.
    pub fn shift(&self, n: i32) -> GradedComplex {
        let sign = if n.rem_euclid(2) == 1 { Scalar::int(-1) } else { Scalar::int(1) };
        GradedComplex {
            lo: self.lo - n,
            dims: self.dims.clone(),
            diffs: self.diffs.iter().map(|(d, m)| (*d - n, m.scale(&sign))).collect(),
        }
    }

    /// Serialize as a `dims` header followed by `d r c num/den` entries.
    pub fn to_text(&self) -> String {
        let mut s = String::from("dims");
        for d in self.degrees() {
            s.push_str(&format!(" {d}:{}", self.dim(d)));
        }
        s.push('\n');
        for (d, m) in &self.diffs {
            for (r, c, v) in m.entries() {
                s.push_str(&format!("{d} {r} {c} {}\n", v.to_text()));
            }
        }
        s
    }

    pub fn from_text(text: &str, field: Field) -> Result<Self, ComplexError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(ComplexError::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let mut it = header.split_whitespace();
        if it.next() != Some("dims") {
            return Err(ComplexError::Parse {
                line: 1,
                msg: "expected `dims` header".into(),
            });
        }
        let mut dims = BTreeMap::new();
        for tok in it {
            let (d, n) = tok.split_once(':').ok_or(ComplexError::Parse {
                line: 1,
                msg: format!("bad token {tok:?}"),
            })?;
            let d: i32 = d.parse().map_err(|_| ComplexError::Parse { line: 1, msg: format!("bad degree {d:?}") })?;
            let n: usize = n.parse().map_err(|_| ComplexError::Parse { line: 1, msg: format!("bad dim {n:?}") })?;
            dims.insert(d, n);
        }
        let mut entries: BTreeMap<i32, Vec<(usize, usize, Scalar)>> = BTreeMap::new();
        for (i, l) in lines {
            let err = |msg: &str| ComplexError::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 4 {
                return Err(err("expected `d r c value`"));
            }
            let d: i32 = t[0].parse().map_err(|_| err("bad degree"))?;
            let r: usize = t[1].parse().map_err(|_| err("bad row"))?;
            let c: usize = t[2].parse().map_err(|_| err("bad column"))?;
            let v = Scalar::parse(t[3], field).ok_or_else(|| err("bad value"))?;
            let rows = dims.get(&(d + 1)).copied().unwrap_or(0);
            let cols = dims.get(&d).copied().unwrap_or(0);
            if r >= rows || c >= cols {
                return Err(err("entry outside the declared shape"));
            }
            entries.entry(d).or_default().push((r, c, v));
        }
        let diffs = entries
            .into_iter()
            .map(|(d, e)| {
                let m = SparseMatrix::from_entries(dims[&(d + 1)], dims[&d], e);
                (d, m)
            })
            .collect();
        Self::from_maps(&dims, diffs)
    }
}

/// A cohomology dimension, or `Unknown` outside the computed window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Dim {
    Known(usize),
    Unknown,
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::Known(n) => write!(f, "{n}"),
            Dim::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cohomology {
    pub dims: BTreeMap<i32, usize>,
}

impl Cohomology {
    pub fn get(&self, d: i32) -> Dim {
        self.dims.get(&d).map_or(Dim::Unknown, |n| Dim::Known(*n))
    }

    pub fn is_zero_on(&self, window: (i32, i32)) -> bool {
        (window.0..=window.1).all(|d| self.get(d) == Dim::Known(0))
    }
}

/// `dim H^d = dim ker diff(d) - rank diff(d-1)` for every stored degree,
/// computed over the field of the entries.
pub fn cohomology_dims(c: &GradedComplex) -> Cohomology {
    cohomology_dims_in(c, c.field())
}

pub fn cohomology_dims_in(c: &GradedComplex, field: Field) -> Cohomology {
    let degs: Vec<i32> = c.degrees().collect();
    let ranks: BTreeMap<i32, usize> = degs
        .par_iter()
        .map(|&d| (d, if c.stored_diffs().contains_key(&d) { rank_in(&c.diff(d), field) } else { 0 }))
        .collect();
    let dims = degs
        .iter()
        .map(|&d| {
            let out = ranks[&d];
            let inc = ranks.get(&(d - 1)).copied().unwrap_or(0);
            (d, c.dim(d) - out - inc)
        })
        .collect();
    Cohomology { dims }
}

/// Degree-0 chain map between complexes: `components[d]` has shape
/// `target.dim(d) x source.dim(d)`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub components: BTreeMap<i32, SparseMatrix>,
}

impl ChainMap {
    pub fn identity(c: &GradedComplex) -> Self {
        ChainMap {
            components: c.degrees().map(|d| (d, SparseMatrix::identity(c.dim(d)))).collect(),
        }
    }

    pub fn component(&self, d: i32, source: &GradedComplex, target: &GradedComplex) -> SparseMatrix {
        self.components
            .get(&d)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(target.dim(d), source.dim(d)))
    }
}

/// Checks `d f = f d` at every degree where either side is nonzero.
pub fn check_chain_map(f: &ChainMap, source: &GradedComplex, target: &GradedComplex) -> Result<(), ComplexError> {
    let lo = source.lo().min(target.lo());
    let hi = source.hi().max(target.hi());
    for d in lo..=hi {
        let lhs = target.diff(d).mul(&f.component(d, source, target));
        let rhs = f.component(d + 1, source, target).mul(&source.diff(d));
        if lhs != rhs && !lhs.sub(&rhs).is_zero() {
            return Err(ComplexError::NotChainMap { degree: d });
        }
    }
    Ok(())
}

/// The cone: `Cone^d = source^{d+1} ⊕ target^d`, `d(c, e) = (-dc, f c + de)`.
pub fn cone(f: &ChainMap, source: &GradedComplex, target: &GradedComplex) -> GradedComplex {
    let lo = (source.lo() - 1).min(target.lo());
    let hi = (source.hi() - 1).max(target.hi());
    let dims: Vec<usize> = (lo..=hi).map(|d| source.dim(d + 1) + target.dim(d)).collect();
    let mut diffs = BTreeMap::new();
    for d in lo..hi {
        let a = source.diff(d + 1).scale(&Scalar::int(-1));
        let b = SparseMatrix::zeros(source.dim(d + 2), target.dim(d));
        let c = f.component(d + 1, source, target);
        let e = target.diff(d);
        diffs.insert(d, SparseMatrix::block(&a, &b, &c, &e));
    }
    GradedComplex::new(lo, dims, diffs).expect("cone of a chain map is a complex")
}

/// Whether `f` induces isomorphisms on cohomology in degrees `window`
/// (inclusive), decided by acyclicity of the cone in that window.
pub fn is_quasi_iso(
    f: &ChainMap,
    source: &GradedComplex,
    target: &GradedComplex,
    window: (i32, i32),
) -> Result<bool, ComplexError> {
    check_chain_map(f, source, target)?;
    let c = cone(f, source, target);
    let h = cohomology_dims(&c);
    // H^d(f) iso for d in window <=> H^d(cone) = 0 for d in [lo-1, hi]
    Ok((window.0 - 1..=window.1).all(|d| !matches!(h.get(d), Dim::Known(n) if n > 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_to_k() -> GradedComplex {
        let mut diffs = BTreeMap::new();
        diffs.insert(0, SparseMatrix::identity(1));
        GradedComplex::new(0, vec![1, 1], diffs).unwrap()
    }

    /// positions 1..=4 in degrees -4..=-1, maps id, 0, id
    fn complexk_pattern() -> GradedComplex {
        let mut diffs = BTreeMap::new();
        diffs.insert(-4, SparseMatrix::identity(1));
        diffs.insert(-2, SparseMatrix::identity(1));
        GradedComplex::new(-4, vec![1, 1, 1, 1], diffs).unwrap()
    }

    #[test]
    fn acyclic_examples() {
        let h = cohomology_dims(&k_to_k());
        assert!(h.is_zero_on((0, 1)));
        assert_eq!(h.get(5), Dim::Unknown);
        assert!(cohomology_dims(&complexk_pattern()).is_zero_on((-4, -1)));
    }

    #[test]
    fn single_k() {
        let c = GradedComplex::new(0, vec![1], BTreeMap::new()).unwrap();
        assert_eq!(cohomology_dims(&c).get(0), Dim::Known(1));
    }

    #[test]
    fn rejects_nonzero_square() {
        let mut diffs = BTreeMap::new();
        diffs.insert(0, SparseMatrix::identity(1));
        diffs.insert(1, SparseMatrix::identity(1));
        let e = GradedComplex::new(0, vec![1, 1, 1], diffs).unwrap_err();
        assert_eq!(e, ComplexError::SquareNonzero { degree: 0 });
    }

    #[test]
    fn quasi_iso_examples() {
        let c = k_to_k();
        assert!(is_quasi_iso(&ChainMap::identity(&c), &c, &c, (0, 1)).unwrap());
        let zero = GradedComplex::new(-4, vec![0, 0, 0, 0], BTreeMap::new()).unwrap();
        let k = complexk_pattern();
        let f = ChainMap { components: BTreeMap::new() };
        assert!(is_quasi_iso(&f, &zero, &k, (-4, -1)).unwrap());
        let k0 = GradedComplex::new(0, vec![1], BTreeMap::new()).unwrap();
        let z0 = GradedComplex::new(0, vec![0], BTreeMap::new()).unwrap();
        assert!(!is_quasi_iso(&f, &k0, &z0, (0, 0)).unwrap());
    }

    #[test]
    fn rejects_non_chain_map() {
        let c = k_to_k();
        let mut comps = BTreeMap::new();
        comps.insert(0, SparseMatrix::identity(1));
        let f = ChainMap { components: comps };
        assert!(matches!(is_quasi_iso(&f, &c, &c, (0, 1)), Err(ComplexError::NotChainMap { .. })));
    }

    #[test]
    fn text_roundtrip() {
        let c = complexk_pattern();
        let t = c.to_text();
        assert!(t.starts_with("dims -4:1 -3:1 -2:1 -1:1\n"));
        assert_eq!(GradedComplex::from_text(&t, Field::Rational).unwrap(), c);
    }

    #[test]
    fn shift_places_field_in_negative_degree() {
        let k = GradedComplex::new(0, vec![1], BTreeMap::new()).unwrap();
        let k3 = k.shift(3);
        assert_eq!(k3.lo(), -3);
        assert_eq!(k3.dim(-3), 1);
    }
}
