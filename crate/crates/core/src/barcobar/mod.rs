//! Truncated bar and cobar constructions of a finite strictly unital dg
//! category, the weak unit tower on `Cobar₊(Bar₊(A))` and the passage
//! between unital A∞ maps and functors out of it.
//!
//! Conventions (cohomological, `s` of degree −1):
//!
//! ```text
//! b[a₁|…|a_ℓ] = Σ_i (−1)^{ε_{i−1}+1} […|da_i|…] + Σ_i (−1)^{ε_{i−1}+|a_i|} […|a_i a_{i+1}|…]
//! δ(s⁻¹ω) = −s⁻¹(bω) − Σ (−1)^{|ω′|} s⁻¹ω′ ⊠ s⁻¹ω″,   Δω = Σ ω′ ⊗ ω″
//! ```
//!
//! with `ε_i = Σ_{j≤i} (|a_j| − 1)`, extended over `⊠` as a derivation.
//! Words are truncated by their total number of letters; every
//! differential is non-increasing in it, so the truncations are
//! subcomplexes and composition is partial.

pub mod ainf;
pub mod projection;
pub mod tower;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::dgcat::{check_wu_axioms, FinWuDgCat, HomSpace};
use crate::exactlinalg::{Field, Scalar, SparseMatrix};

pub use ainf::{ainf_map_residual, random_unital_ainf, unital_ainf_correspondence, AinfMap, Correspondence};
pub use projection::{check_projection, ProjectionReport};
pub use tower::{check_ainf_functor, weak_unit_p, weak_unit_word, AinfReport, PArg};

/// A basis morphism `idx` of `A(src, tgt)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Letter {
    pub src: usize,
    pub tgt: usize,
    pub idx: usize,
}

/// `a₁⊗…⊗a_ℓ`, `ℓ ≥ 1`, with `src(a_i) = tgt(a_{i+1})`.
pub type BarWord = Vec<Letter>;
/// `ω₁⊠…⊠ω_k`, `k ≥ 1`, composable in the same order.
pub type CobarWord = Vec<BarWord>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BarCobarError {
    #[error("input is not a strictly unital dg category: {0}")]
    NotStrict(String),
    #[error("the unit of {0} is not a basis element")]
    UnitNotBasis(String),
    #[error("truncation length must be at least 1")]
    Length,
    #[error("{0}")]
    Precondition(String),
}

pub(crate) fn pm(field: Field, e: i32) -> Scalar {
    field.from_i64(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// The input category with its differential columns and unit letters.
#[derive(Clone, Debug)]
pub struct Source {
    pub cat: FinWuDgCat,
    pub ids: Vec<Letter>,
    dcols: BTreeMap<(usize, usize), Vec<Vec<(usize, Scalar)>>>,
}

impl Source {
    pub fn new(a: &FinWuDgCat) -> Result<Self, BarCobarError> {
        if a.partial {
            return Err(BarCobarError::NotStrict("partial composition".into()));
        }
        let r = check_wu_axioms(a, 1);
        if let Some(f) = r.failures().first() {
            return Err(BarCobarError::NotStrict(format!(
                "{}: {}",
                f.name,
                f.witness.clone().unwrap_or_default()
            )));
        }
        if !r.strict {
            return Err(BarCobarError::NotStrict("units are not strict or the tower is nonzero".into()));
        }
        let mut ids = Vec::new();
        for x in 0..a.n_objects() {
            let u = a.id(x);
            let nz: Vec<usize> = (0..u.len()).filter(|&i| !u[i].is_zero()).collect();
            if nz.len() != 1 || !u[nz[0]].is_one() {
                return Err(BarCobarError::UnitNotBasis(a.objects[x].clone()));
            }
            ids.push(Letter { src: x, tgt: x, idx: nz[0] });
        }
        let mut dcols = BTreeMap::new();
        for (&(x, y), h) in &a.homs {
            let mut cols = vec![Vec::new(); h.dim()];
            for (r, k, s) in h.d.entries() {
                cols[k].push((r, s.to_field(a.field)));
            }
            dcols.insert((x, y), cols);
        }
        Ok(Source { cat: a.clone(), ids, dcols })
    }

    pub fn degree(&self, l: &Letter) -> i32 {
        self.cat.degree(l.src, l.tgt, l.idx)
    }

    pub fn name(&self, l: &Letter) -> &str {
        &self.cat.hom(l.src, l.tgt).names[l.idx]
    }

    pub fn is_id(&self, l: &Letter) -> bool {
        self.ids.get(l.src) == Some(l)
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.cat
            .homs
            .iter()
            .flat_map(|(&(src, tgt), h)| (0..h.dim()).map(move |idx| Letter { src, tgt, idx }))
            .collect()
    }

    fn d_letter(&self, l: &Letter) -> &[(usize, Scalar)] {
        &self.dcols[&(l.src, l.tgt)][l.idx]
    }

    /// `a ∘ b` as `(letter, coefficient)` terms.
    fn product(&self, a: &Letter, b: &Letter) -> Vec<(Letter, Scalar)> {
        let v = self
            .cat
            .compose_basis(b.src, a.src, a.tgt, a.idx, b.idx)
            .expect("total composition");
        v.into_iter()
            .enumerate()
            .filter(|(_, s)| !s.is_zero())
            .map(|(idx, s)| (Letter { src: b.src, tgt: a.tgt, idx }, s))
            .collect()
    }

    pub fn bar_degree(&self, w: &[Letter]) -> i32 {
        w.iter().map(|l| self.degree(l) - 1).sum()
    }

    pub fn cobar_degree(&self, c: &[BarWord]) -> i32 {
        c.iter().map(|w| self.bar_degree(w) + 1).sum()
    }

    pub fn bar_name(&self, w: &[Letter]) -> String {
        let parts: Vec<&str> = w.iter().map(|l| self.name(l)).collect();
        format!("[{}]", parts.join("|"))
    }

    pub fn cobar_name(&self, c: &[BarWord]) -> String {
        let parts: Vec<String> = c.iter().map(|w| self.bar_name(w)).collect();
        parts.join("⊠")
    }

    /// The bar differential of a word.
    pub fn bar_d(&self, w: &[Letter]) -> Vec<(BarWord, Scalar)> {
        let f = self.cat.field;
        let mut out = Vec::new();
        let mut eps = 0;
        for i in 0..w.len() {
            for (k, s) in self.d_letter(&w[i]) {
                let mut v = w.to_vec();
                v[i].idx = *k;
                out.push((v, &pm(f, eps + 1) * s));
            }
            if i + 1 < w.len() {
                let sg = pm(f, eps + self.degree(&w[i]));
                for (l, s) in self.product(&w[i], &w[i + 1]) {
                    let mut v = w[..i].to_vec();
                    v.push(l);
                    v.extend_from_slice(&w[i + 2..]);
                    out.push((v, &sg * &s));
                }
            }
            eps += self.degree(&w[i]) - 1;
        }
        out
    }
}

pub(crate) fn chains(src: &Source, len: usize) -> Vec<BarWord> {
    let letters = src.letters();
    let mut out: Vec<BarWord> = letters.iter().map(|l| vec![*l]).collect();
    let mut last = out.clone();
    for _ in 1..len {
        let mut next = Vec::new();
        for w in &last {
            let s = w.last().unwrap().src;
            for l in letters.iter().filter(|l| l.tgt == s) {
                let mut v = w.clone();
                v.push(*l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        last = next;
    }
    out
}

fn add_term<K: Ord>(m: &mut BTreeMap<K, Scalar>, k: K, s: Scalar) {
    if s.is_zero() {
        return;
    }
    let e = m.entry(k);
    match e {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(s);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let t = o.get() + &s;
            if t.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = t;
            }
        }
    }
}

/// `Bar₊(A)` on words of at most `len` letters: a non-counital dg
/// cocategory on the objects of `A`.
#[derive(Clone, Debug)]
pub struct BarCoalgebra {
    pub source: Source,
    pub len: usize,
    pub words: Vec<BarWord>,
    pub index: BTreeMap<BarWord, usize>,
    pub degrees: Vec<i32>,
    /// `d w_i = Σ c · w_j` as `(j, c)`
    pub d: Vec<Vec<(usize, Scalar)>>,
    /// `Δ w_i = Σ w_j ⊗ w_k` as `(j, k)`
    pub delta: Vec<Vec<(usize, usize)>>,
}

pub fn bar_plus(a: &FinWuDgCat, len: usize) -> Result<BarCoalgebra, BarCobarError> {
    if len == 0 {
        return Err(BarCobarError::Length);
    }
    let source = Source::new(a)?;
    let words = chains(&source, len);
    let index: BTreeMap<BarWord, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let degrees = words.iter().map(|w| source.bar_degree(w)).collect();
    let mut d = Vec::with_capacity(words.len());
    let mut delta = Vec::with_capacity(words.len());
    for w in &words {
        let mut m = BTreeMap::new();
        for (v, s) in source.bar_d(w) {
            add_term(&mut m, index[&v], s);
        }
        d.push(m.into_iter().collect());
        delta.push((1..w.len()).map(|l| (index[&w[..l].to_vec()], index[&w[l..].to_vec()])).collect());
    }
    Ok(BarCoalgebra {
        source,
        len,
        words,
        index,
        degrees,
        d,
        delta,
    })
}

impl BarCoalgebra {
    pub fn field(&self) -> Field {
        self.source.cat.field
    }

    pub fn weight(&self, i: usize) -> usize {
        self.words[i].len()
    }

    pub fn src(&self, i: usize) -> usize {
        self.words[i].last().unwrap().src
    }

    pub fn tgt(&self, i: usize) -> usize {
        self.words[i][0].tgt
    }

    pub fn name(&self, i: usize) -> String {
        self.source.bar_name(&self.words[i])
    }

    fn apply_d(&self, v: &BTreeMap<usize, Scalar>) -> BTreeMap<usize, Scalar> {
        let mut out = BTreeMap::new();
        for (i, c) in v {
            for (j, s) in &self.d[*i] {
                add_term(&mut out, *j, c * s);
            }
        }
        out
    }

    /// First word with `d²w ≠ 0`.
    pub fn d_squared_witness(&self) -> Option<String> {
        (0..self.words.len()).find_map(|i| {
            let dd = self.apply_d(&self.apply_d(&BTreeMap::from([(i, self.field().one())])));
            (!dd.is_empty()).then(|| format!("d²{} ≠ 0", self.name(i)))
        })
    }

    /// First word where `Δd ≠ (d⊗1 + 1⊗d)Δ`.
    pub fn coderivation_witness(&self) -> Option<String> {
        let f = self.field();
        (0..self.words.len()).find_map(|i| {
            let mut lhs = BTreeMap::new();
            for (j, c) in &self.d[i] {
                for &(u, v) in &self.delta[*j] {
                    add_term(&mut lhs, (u, v), c.clone());
                }
            }
            let mut rhs = BTreeMap::new();
            for &(u, v) in &self.delta[i] {
                for (t, c) in &self.d[u] {
                    add_term(&mut rhs, (*t, v), c.clone());
                }
                let s = pm(f, self.degrees[u]);
                for (t, c) in &self.d[v] {
                    add_term(&mut rhs, (u, *t), &s * c);
                }
            }
            (lhs != rhs).then(|| format!("Δd{} ≠ (d⊗1 + 1⊗d)Δ", self.name(i)))
        })
    }
}

/// `Cobar₊(B)` on words of total weight at most `len`, as a partial
/// dg category; `words[(x, y)][i]` lists the factors of basis element `i`.
#[derive(Clone, Debug)]
pub struct CobarCategory {
    pub bar: BarCoalgebra,
    pub len: usize,
    pub cat: FinWuDgCat,
    pub words: BTreeMap<(usize, usize), Vec<Vec<usize>>>,
    pub index: BTreeMap<Vec<usize>, (usize, usize, usize)>,
}

fn cobar_words(b: &BarCoalgebra, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, usize)> = (0..b.words.len())
        .filter(|&i| b.weight(i) <= len)
        .map(|i| (vec![i], b.weight(i)))
        .collect();
    stack.reverse();
    while let Some((w, wt)) = stack.pop() {
        let s = b.src(*w.last().unwrap());
        let mut ext: Vec<(Vec<usize>, usize)> = (0..b.words.len())
            .filter(|&i| b.tgt(i) == s && wt + b.weight(i) <= len)
            .map(|i| {
                let mut v = w.clone();
                v.push(i);
                (v, wt + b.weight(i))
            })
            .collect();
        out.push(w);
        ext.reverse();
        stack.extend(ext);
    }
    out
}

pub fn cobar_plus(b: &BarCoalgebra, len: usize) -> Result<CobarCategory, BarCobarError> {
    if len == 0 {
        return Err(BarCobarError::Length);
    }
    if len > b.len {
        return Err(BarCobarError::Precondition(format!(
            "cobar length {len} exceeds the bar truncation {}",
            b.len
        )));
    }
    let f = b.field();
    let src = &b.source;
    let mut words: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
    for w in cobar_words(b, len) {
        let key = (b.src(*w.last().unwrap()), b.tgt(w[0]));
        words.entry(key).or_default().push(w);
    }
    let mut index = BTreeMap::new();
    for (&(x, y), ws) in &words {
        for (i, w) in ws.iter().enumerate() {
            index.insert(w.clone(), (x, y, i));
        }
    }
    let weight = |w: &[usize]| -> usize { w.iter().map(|&i| b.weight(i)).sum() };
    let degree = |w: &[usize]| -> i32 { w.iter().map(|&i| b.degrees[i] + 1).sum() };
    let mut cat = FinWuDgCat::new(f, src.cat.objects.clone(), 1);
    cat.partial = true;
    for (&(x, y), ws) in &words {
        let mut entries = Vec::new();
        for (col, w) in ws.iter().enumerate() {
            let mut m = BTreeMap::new();
            let mut p = 0;
            for j in 0..w.len() {
                let bj = w[j];
                for (t, c) in &b.d[bj] {
                    let mut v = w.clone();
                    v[j] = *t;
                    add_term(&mut m, v, &pm(f, p + 1) * c);
                }
                for &(u, t) in &b.delta[bj] {
                    let mut v = w[..j].to_vec();
                    v.push(u);
                    v.push(t);
                    v.extend_from_slice(&w[j + 1..]);
                    add_term(&mut m, v, pm(f, p + 1 + b.degrees[u]));
                }
                p += b.degrees[bj] + 1;
            }
            for (v, c) in m {
                entries.push((index[&v].2, col, c));
            }
        }
        let degrees = ws.iter().map(|w| degree(w)).collect();
        let names = ws
            .iter()
            .map(|w| {
                let parts: Vec<String> = w.iter().map(|&i| b.name(i)).collect();
                parts.join("⊠")
            })
            .collect();
        let d = SparseMatrix::from_entries(ws.len(), ws.len(), entries);
        cat.set_hom(x, y, HomSpace::new(degrees, names, d));
    }
    for (&(y, z), outer) in &words {
        for (&(x, y2), inner) in &words {
            if y2 != y {
                continue;
            }
            for (a, u) in outer.iter().enumerate() {
                for (bi, v) in inner.iter().enumerate() {
                    if weight(u) + weight(v) > len {
                        continue;
                    }
                    let mut w = u.clone();
                    w.extend_from_slice(v);
                    let mut val = cat.zero(x, z);
                    val[index[&w].2] = f.one();
                    cat.set_comp(x, y, z, a, bi, val);
                }
            }
        }
    }
    for (x, id) in src.ids.iter().enumerate() {
        let mut u = cat.zero(x, x);
        u[index[&vec![b.index[&vec![*id]]]].2] = f.one();
        cat.set_unit(x, u);
    }
    Ok(CobarCategory {
        bar: b.clone(),
        len,
        cat,
        words,
        index,
    })
}

impl CobarCategory {
    pub fn source(&self) -> &Source {
        &self.bar.source
    }

    /// The basis element `i` of `(x, y)` spelled out in letters.
    pub fn cobar_word(&self, x: usize, y: usize, i: usize) -> CobarWord {
        self.words[&(x, y)][i].iter().map(|&j| self.bar.words[j].clone()).collect()
    }

    pub fn weight_of(&self, x: usize, y: usize, i: usize) -> usize {
        self.words[&(x, y)][i].iter().map(|&j| self.bar.weight(j)).sum()
    }

    /// `(x, y, i)` of a cobar word, if it lies in the truncation.
    pub fn locate(&self, c: &[BarWord]) -> Option<(usize, usize, usize)> {
        let ids: Option<Vec<usize>> = c.iter().map(|w| self.bar.index.get(w).copied()).collect();
        self.index.get(&ids?).copied()
    }

    /// First basis element with `d² ≠ 0`.
    pub fn d_squared_witness(&self) -> Option<String> {
        for (&(x, y), h) in &self.cat.homs {
            let dd = h.d.mul(&h.d);
            let bad = dd.entries().find(|(_, _, s)| !s.is_zero()).map(|(_, k, _)| k);
            if let Some(k) = bad {
                return Some(format!("d²{} ≠ 0", self.cat.hom(x, y).names[k]));
            }
        }
        None
    }
}

/// `Bar₊` and `Cobar₊` at the same length.
pub fn cobar_bar(a: &FinWuDgCat, len: usize) -> Result<CobarCategory, BarCobarError> {
    cobar_plus(&bar_plus(a, len)?, len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::construct::{dual_numbers, ground_field, interval_category, matrix_algebra};
    use crate::exactlinalg::Scalar;

    #[test]
    fn word_counts() {
        let b = bar_plus(&dual_numbers(Field::Rational, 0), 4).unwrap();
        assert_eq!(b.words.len(), 2 + 4 + 8 + 16);
        let c = cobar_plus(&b, 4).unwrap();
        // compositions of m into bar words: 2^{m−1} · 2^m
        assert_eq!(c.cat.total_dim(), 2 + 8 + 32 + 128);
        let k = cobar_bar(&ground_field(Field::Rational), 3).unwrap();
        assert_eq!(k.cat.total_dim(), 1 + 2 + 4);
    }

    #[test]
    fn differentials_square_to_zero() {
        for f in [Field::Rational, Field::prime()] {
            for (a, len) in [
                (dual_numbers(f, 0), 4),
                (dual_numbers(f, 1), 4),
                (dual_numbers(f, -1), 4),
                (interval_category(f), 4),
                (dual_numbers(f, 2), 3),
            ] {
                let b = bar_plus(&a, len).unwrap();
                assert_eq!(b.d_squared_witness(), None);
                assert_eq!(b.coderivation_witness(), None);
                let c = cobar_plus(&b, len).unwrap();
                assert_eq!(c.d_squared_witness(), None);
            }
        }
    }

    #[test]
    fn degrees_and_names() {
        let c = cobar_bar(&dual_numbers(Field::Rational, 0), 2).unwrap();
        let h = c.cat.hom(0, 0);
        let i = h.names.iter().position(|n| n == "[1|x]").unwrap();
        assert_eq!(h.degrees[i], -1);
        let j = h.names.iter().position(|n| n == "[x]⊠[x]").unwrap();
        assert_eq!(h.degrees[j], 0);
        // d[1|x] = −[x] + [1]⊠[x]
        let dv = c.cat.diff(0, 0, &c.cat.basis(0, 0, i));
        let x = h.names.iter().position(|n| n == "[x]").unwrap();
        let one_x = h.names.iter().position(|n| n == "[1]⊠[x]").unwrap();
        assert_eq!(dv[x], Scalar::int(-1));
        assert!(dv[one_x].is_one());
        assert_eq!(dv.iter().filter(|s| !s.is_zero()).count(), 2);
    }

    #[test]
    fn rejects_non_strict_input() {
        let mut a = dual_numbers(Field::Rational, 0);
        a.set_unit(0, vec![Scalar::int(1), Scalar::int(1)]);
        assert!(bar_plus(&a, 2).is_err());
        // the unit of M_2 is E11 + E22, not a basis element
        assert!(matches!(bar_plus(&matrix_algebra(Field::Rational), 2), Err(BarCobarError::UnitNotBasis(_))));
        assert_eq!(bar_plus(&dual_numbers(Field::Rational, 0), 0).unwrap_err(), BarCobarError::Length);
    }
}
