//! The Kontsevich category `K`: two objects, generators
//! `f: 0→1`, `g: 1→0` (degree 0), `h₀: 0→0`, `h₁: 1→1` (degree −1),
//! `r: 0→1` (degree −2) with
//!
//! ```text
//! df = dg = 0,  dh₀ = gf − id₀,  dh₁ = fg − id₁,  dr = h₁f − fh₀.
//! ```
//!
//! Hom complexes are infinite; everything here is cut at word length `L`.

mod drinfeld;
mod lift;

pub use drinfeld::{drinfeld_fragment_check, DrinfeldReport, RelationTrace};
pub use lift::{lift_equivalence, random_lift_input, KImages, LiftError, LiftInput, LiftReport, RelationCheck};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dgcat::{FinWuDgCat, HomSpace};
use crate::exactlinalg::{solve, Field, Scalar, SparseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum KGen {
    F,
    G,
    H0,
    H1,
    R,
}

pub const GENERATORS: [KGen; 5] = [KGen::F, KGen::G, KGen::H0, KGen::H1, KGen::R];

impl KGen {
    pub fn src(self) -> usize {
        match self {
            KGen::F | KGen::H0 | KGen::R => 0,
            KGen::G | KGen::H1 => 1,
        }
    }

    pub fn tgt(self) -> usize {
        match self {
            KGen::G | KGen::H0 => 0,
            KGen::F | KGen::H1 | KGen::R => 1,
        }
    }

    pub fn degree(self) -> i32 {
        match self {
            KGen::F | KGen::G => 0,
            KGen::H0 | KGen::H1 => -1,
            KGen::R => -2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KGen::F => "f",
            KGen::G => "g",
            KGen::H0 => "h0",
            KGen::H1 => "h1",
            KGen::R => "r",
        }
    }

    /// `d` of the generator, as signed words (letters in composition
    /// order, the empty word being the identity).
    pub fn differential(self) -> Vec<(i64, Vec<KGen>)> {
        use KGen::*;
        match self {
            F | G => vec![],
            H0 => vec![(1, vec![G, F]), (-1, vec![])],
            H1 => vec![(1, vec![F, G]), (-1, vec![])],
            R => vec![(1, vec![H1, F]), (-1, vec![F, H0])],
        }
    }
}

/// A composable word `a₁ ∘ … ∘ a_k: src → tgt`; empty words are the
/// identities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct KWord {
    pub src: usize,
    pub tgt: usize,
    pub letters: Vec<KGen>,
}

impl KWord {
    pub fn id(x: usize) -> Self {
        KWord { src: x, tgt: x, letters: Vec::new() }
    }

    pub fn new(letters: Vec<KGen>) -> Option<Self> {
        let (src, tgt) = (letters.last()?.src(), letters.first()?.tgt());
        let ok = letters.windows(2).all(|w| w[0].src() == w[1].tgt());
        ok.then_some(KWord { src, tgt, letters })
    }

    pub fn gen(a: KGen) -> Self {
        KWord::new(vec![a]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn degree(&self) -> i32 {
        self.letters.iter().map(|a| a.degree()).sum()
    }

    /// `self ∘ other`
    pub fn then_after(&self, other: &KWord) -> Option<KWord> {
        (self.src == other.tgt).then(|| {
            let mut letters = self.letters.clone();
            letters.extend_from_slice(&other.letters);
            KWord {
                src: other.src,
                tgt: self.tgt,
                letters,
            }
        })
    }

    /// Leibniz: `d(a₁…a_k) = Σ (−1)^{|a₁|+…+|a_{i−1}|} a₁…d(a_i)…a_k`.
    pub fn differential(&self) -> WordChain {
        let mut out = WordChain::new();
        let mut before = 0i32;
        for (i, a) in self.letters.iter().enumerate() {
            let sign = if before.rem_euclid(2) == 0 { 1 } else { -1 };
            for (c, mid) in a.differential() {
                let mut letters = self.letters[..i].to_vec();
                letters.extend(mid);
                letters.extend_from_slice(&self.letters[i + 1..]);
                let w = KWord {
                    src: self.src,
                    tgt: self.tgt,
                    letters,
                };
                add(&mut out, w, &Scalar::int(sign * c));
            }
            before += a.degree();
        }
        out
    }
}

impl fmt::Display for KWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "id{}", self.src);
        }
        let names: Vec<&str> = self.letters.iter().map(|a| a.name()).collect();
        write!(f, "{}", names.join("·"))
    }
}

pub type WordChain = BTreeMap<KWord, Scalar>;

pub fn add(acc: &mut WordChain, w: KWord, s: &Scalar) {
    if s.is_zero() {
        return;
    }
    let e = acc.entry(w.clone()).or_insert_with(Scalar::zero);
    *e = e.clone() + s.clone();
    if e.is_zero() {
        acc.remove(&w);
    }
}

pub fn chain(terms: &[(i64, &[KGen])]) -> WordChain {
    let mut out = WordChain::new();
    for (c, ls) in terms {
        add(&mut out, KWord::new(ls.to_vec()).expect("composable"), &Scalar::int(*c));
    }
    out
}

pub fn chain_differential(c: &WordChain) -> WordChain {
    let mut out = WordChain::new();
    for (w, s) in c {
        for (v, t) in w.differential() {
            add(&mut out, v, &(s.clone() * t));
        }
    }
    out
}

pub fn chain_text(c: &WordChain) -> String {
    if c.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (w, s)) in c.iter().enumerate() {
        let neg = s.to_string().starts_with('-');
        let abs = if neg { -s.clone() } else { s.clone() };
        match (i, neg) {
            (0, true) => out.push('−'),
            (0, false) => {}
            (_, true) => out.push_str(" − "),
            (_, false) => out.push_str(" + "),
        }
        if !abs.is_one() {
            out.push_str(&format!("{abs}·"));
        }
        out.push_str(&w.to_string());
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KError {
    #[error("word length bound L = {0} is too small (need L ≥ 2)")]
    InsufficientLength(usize),
    #[error("target is not closed: d(target) = {0}")]
    NotClosed(String),
    #[error("target is not homogeneous of degree {degree} in K({x}, {y})")]
    NotHomogeneous { x: usize, y: usize, degree: i32 },
}

/// All words of length `≤ len` from `x` to `y`.
pub fn words(x: usize, y: usize, len: usize) -> Vec<KWord> {
    let mut out = Vec::new();
    if x == y {
        out.push(KWord::id(x));
    }
    // grow from the source end
    let mut frontier: Vec<Vec<KGen>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &frontier {
            let at = w.first().map_or(x, |a| a.tgt());
            for a in GENERATORS {
                if a.src() == at {
                    let mut v = vec![a];
                    v.extend_from_slice(w);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().filter(|w| w[0].tgt() == y).map(|w| KWord::new(w.clone()).unwrap()));
        frontier = next;
    }
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

/// `K` cut at word length `len`, realized as a partial finite category
/// with strict units. Words whose differential leaves the bound are edge
/// elements; composites longer than `len` are undefined.
#[derive(Clone, Debug)]
pub struct SemiFreeCat {
    pub len: usize,
    pub cat: FinWuDgCat,
    pub basis: BTreeMap<(usize, usize), Vec<KWord>>,
    index: HashMap<KWord, usize>,
}

impl SemiFreeCat {
    pub fn index_of(&self, w: &KWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn vector(&self, c: &WordChain, x: usize, y: usize) -> Option<Vec<Scalar>> {
        let mut v = vec![self.cat.field.zero(); self.cat.dim(x, y)];
        for (w, s) in c {
            if (w.src, w.tgt) != (x, y) {
                return None;
            }
            v[self.index_of(w)?] = s.to_field(self.cat.field);
        }
        Some(v)
    }

    /// Interior words: those of length `≤ len − 1`.
    pub fn interior(&self) -> impl Iterator<Item = &KWord> {
        self.basis.values().flatten().filter(move |w| w.len() < self.len)
    }
}

pub fn build_k(len: usize, field: Field) -> Result<SemiFreeCat, KError> {
    if len < 2 {
        return Err(KError::InsufficientLength(len));
    }
    let mut cat = FinWuDgCat::new(field, vec!["0".into(), "1".into()], 1);
    cat.partial = true;
    let mut basis = BTreeMap::new();
    let mut index = HashMap::new();
    for x in 0..2 {
        for y in 0..2 {
            let ws = words(x, y, len);
            for (i, w) in ws.iter().enumerate() {
                index.insert(w.clone(), i);
            }
            basis.insert((x, y), ws);
        }
    }
    for (&(x, y), ws) in &basis {
        let mut entries = Vec::new();
        let mut edge = std::collections::BTreeSet::new();
        for (k, w) in ws.iter().enumerate() {
            for (v, s) in w.differential() {
                match index.get(&v) {
                    Some(&r) => entries.push((r, k, s.to_field(field))),
                    None => {
                        edge.insert(k);
                    }
                }
            }
        }
        let d = SparseMatrix::from_entries(ws.len(), ws.len(), entries);
        let mut h = HomSpace::new(ws.iter().map(KWord::degree).collect(), ws.iter().map(|w| w.to_string()).collect(), d);
        h.edge = edge;
        cat.set_hom(x, y, h);
    }
    for x in 0..2 {
        let mut u = vec![field.zero(); cat.dim(x, x)];
        u[index[&KWord::id(x)]] = field.one();
        cat.set_unit(x, u);
    }
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let n = cat.dim(x, z);
                for (a, wa) in basis[&(y, z)].iter().enumerate() {
                    for (b, wb) in basis[&(x, y)].iter().enumerate() {
                        if wa.len() + wb.len() > len {
                            continue;
                        }
                        let w = wa.then_after(wb).unwrap();
                        let mut v = vec![field.zero(); n];
                        v[index[&w]] = field.one();
                        cat.set_comp(x, y, z, a, b, v);
                    }
                }
            }
        }
    }
    Ok(SemiFreeCat { len, cat, basis, index })
}

#[derive(Clone, Debug, Serialize)]
pub struct KReport {
    pub len: usize,
    pub words: usize,
    pub interior_words: usize,
    pub relations: Vec<(String, bool)>,
    pub d_squared_zero: bool,
    pub witness: Option<String>,
}

impl KReport {
    pub fn passed(&self) -> bool {
        self.d_squared_zero && self.relations.iter().all(|r| r.1)
    }
}

/// Checks the defining relations through the realized differential and
/// `d² = 0` on every interior word.
pub fn verify_k(k: &SemiFreeCat) -> KReport {
    use KGen::*;
    let mut relations = Vec::new();
    let rel = |name: &str, w: KGen, want: WordChain| {
        let (x, y) = (w.src(), w.tgt());
        let i = k.index_of(&KWord::gen(w)).unwrap();
        let got = k.cat.diff(x, y, &k.cat.basis(x, y, i));
        (name.to_string(), k.vector(&want, x, y).is_some_and(|v| v == got))
    };
    relations.push(rel("df = 0", F, WordChain::new()));
    relations.push(rel("dg = 0", G, WordChain::new()));
    let mut gf = chain(&[(1, &[G, F])]);
    add(&mut gf, KWord::id(0), &Scalar::int(-1));
    relations.push(rel("dh0 = gf − id0", H0, gf));
    let mut fg = chain(&[(1, &[F, G])]);
    add(&mut fg, KWord::id(1), &Scalar::int(-1));
    relations.push(rel("dh1 = fg − id1", H1, fg));
    relations.push(rel("dr = h1f − fh0", R, chain(&[(1, &[H1, F]), (-1, &[F, H0])])));
    let mut witness = None;
    let mut interior = 0;
    for w in k.interior() {
        interior += 1;
        let dd = chain_differential(&w.differential());
        // the realized matrix must agree as well
        let (x, y) = (w.src, w.tgt);
        let e = k.cat.basis(x, y, k.index_of(w).unwrap());
        let m = k.cat.diff(x, y, &k.cat.diff(x, y, &e));
        if (!dd.is_empty() || m.iter().any(|s| !s.is_zero())) && witness.is_none() {
            witness = Some(format!("d²({w}) = {}", chain_text(&dd)));
        }
    }
    KReport {
        len: k.len,
        words: k.basis.values().map(Vec::len).sum(),
        interior_words: interior,
        relations,
        d_squared_zero: witness.is_none(),
        witness,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Coboundary {
    pub len: usize,
    pub unknowns: usize,
    pub solution: Option<BTreeMap<String, String>>,
    #[serde(skip)]
    pub chain: Option<WordChain>,
}

/// Solves `ds = target` for `s` a combination of words of length `≤ len`
/// in `K(x, y)`, with `d` computed exactly (no truncation on the image).
pub fn solve_coboundary(target: &WordChain, x: usize, y: usize, degree: i32, len: usize) -> Result<Coboundary, KError> {
    if target.keys().any(|w| (w.src, w.tgt) != (x, y) || w.degree() != degree) {
        return Err(KError::NotHomogeneous { x, y, degree });
    }
    let dt = chain_differential(target);
    if !dt.is_empty() {
        return Err(KError::NotClosed(chain_text(&dt)));
    }
    let unknowns: Vec<KWord> = words(x, y, len).into_iter().filter(|w| w.degree() == degree - 1).collect();
    if target.is_empty() {
        return Ok(Coboundary {
            len,
            unknowns: unknowns.len(),
            solution: Some(BTreeMap::new()),
            chain: Some(WordChain::new()),
        });
    }
    let images: Vec<WordChain> = unknowns.iter().map(KWord::differential).collect();
    let mut rows: BTreeMap<KWord, usize> = BTreeMap::new();
    for w in images.iter().flat_map(|c| c.keys()).chain(target.keys()) {
        let n = rows.len();
        rows.entry(w.clone()).or_insert(n);
    }
    let m = SparseMatrix::from_entries(
        rows.len(),
        unknowns.len(),
        images.iter().enumerate().flat_map(|(k, c)| c.iter().map(|(w, s)| (rows[w], k, s.clone())).collect::<Vec<_>>()),
    );
    let mut rhs = vec![Scalar::zero(); rows.len()];
    for (w, s) in target {
        rhs[rows[w]] = s.clone();
    }
    let chain = solve(&m, &rhs).map(|sol| {
        let mut c = WordChain::new();
        for (w, s) in unknowns.iter().zip(sol) {
            add(&mut c, w.clone(), &s);
        }
        c
    });
    if let Some(c) = &chain {
        assert_eq!(&chain_differential(c), target, "solver returned a non-solution");
    }
    Ok(Coboundary {
        len,
        unknowns: unknowns.len(),
        solution: chain.as_ref().map(|c| c.iter().map(|(w, s)| (w.to_string(), s.to_string())).collect()),
        chain,
    })
}

/// `h₀g − gh₁ ∈ K(1, 0)`, a closed element of degree −1.
pub fn footnote_target() -> WordChain {
    chain(&[(1, &[KGen::H0, KGen::G]), (-1, &[KGen::G, KGen::H1])])
}

/// The smallest `L ≤ len_max` at which `solve_coboundary` succeeds.
pub fn first_coboundary(target: &WordChain, x: usize, y: usize, degree: i32, len_max: usize) -> Result<Option<Coboundary>, KError> {
    for len in 1..=len_max {
        let c = solve_coboundary(target, x, y, degree, len)?;
        if c.chain.is_some() {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::check_wu_axioms;
    use KGen::*;

    #[test]
    fn word_counts() {
        // from 0: f, h0, r leave 0; from 1: g, h1
        assert_eq!(words(0, 0, 1).len(), 2);
        assert_eq!(words(0, 1, 1).len(), 2);
        assert_eq!(words(1, 0, 1).len(), 1);
        // brute force over all letter strings
        for len in 0..=4 {
            let mut n = 0;
            let mut stack: Vec<Vec<KGen>> = vec![vec![]];
            while let Some(w) = stack.pop() {
                if !w.is_empty() && KWord::new(w.clone()).is_some_and(|k| (k.src, k.tgt) == (0, 1)) {
                    n += 1;
                }
                if w.len() < len {
                    for a in GENERATORS {
                        let mut v = w.clone();
                        v.push(a);
                        stack.push(v);
                    }
                }
            }
            assert_eq!(words(0, 1, len).len(), n, "len {len}");
        }
    }

    #[test]
    fn defining_relations() {
        assert_eq!(KWord::gen(H0).differential(), {
            let mut c = chain(&[(1, &[G, F])]);
            add(&mut c, KWord::id(0), &Scalar::int(-1));
            c
        });
        assert_eq!(KWord::gen(R).differential(), chain(&[(1, &[H1, F]), (-1, &[F, H0])]));
        for len in 2..=4 {
            let k = build_k(len, Field::Rational).unwrap();
            let r = verify_k(&k);
            assert!(r.passed(), "L={len}: {:?}", r.witness);
        }
        assert_eq!(build_k(1, Field::Rational).unwrap_err(), KError::InsufficientLength(1));
    }

    #[test]
    fn k_is_a_partial_dg_category() {
        let k = build_k(3, Field::Rational).unwrap();
        let r = check_wu_axioms(&k.cat, 1);
        assert!(r.passed(), "{:?}", r.failures());
        assert!(r.strict);
    }

    #[test]
    fn footnote_exercise() {
        let t = footnote_target();
        assert!(chain_differential(&t).is_empty());
        let c = first_coboundary(&t, 1, 0, -1, 4).unwrap().expect("a primitive within L ≤ 4");
        assert_eq!(chain_differential(c.chain.as_ref().unwrap()), t);
        // stability: any two solutions differ by a closed element
        let s4 = solve_coboundary(&t, 1, 0, -1, 4).unwrap().chain.unwrap();
        let diff = {
            let mut d = s4.clone();
            for (w, s) in c.chain.as_ref().unwrap() {
                add(&mut d, w.clone(), &-s.clone());
            }
            d
        };
        assert!(chain_differential(&diff).is_empty());
    }

    #[test]
    fn coboundary_edge_cases() {
        let z = solve_coboundary(&WordChain::new(), 1, 0, -1, 2).unwrap();
        assert_eq!(z.chain, Some(WordChain::new()));
        let bad = chain(&[(1, &[H0, G])]);
        assert!(matches!(solve_coboundary(&bad, 1, 0, -1, 3), Err(KError::NotClosed(_))));
        assert!(matches!(
            solve_coboundary(&chain(&[(1, &[G])]), 1, 0, -1, 3),
            Err(KError::NotHomogeneous { .. })
        ));
    }
}
