//! Finite weakly unital dg categories with explicit composition and
//! weak-unit tower tables.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlinalg::{Field, GradedComplex, Scalar, SparseMatrix};

use super::vector::{self, Vector};

/// An argument of `p_n`: the formal unit `1_x` or a basis morphism
/// `src → tgt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arg {
    One(usize),
    Mor { src: usize, tgt: usize, idx: usize },
}

impl Arg {
    pub fn src(&self) -> usize {
        match *self {
            Arg::One(x) => x,
            Arg::Mor { src, .. } => src,
        }
    }

    pub fn tgt(&self) -> usize {
        match *self {
            Arg::One(x) => x,
            Arg::Mor { tgt, .. } => tgt,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Arg::One(_))
    }
}

/// Arguments `(a_1, …, a_n)` compose as `a_1 ∘ … ∘ a_n`.
pub fn composable(args: &[Arg]) -> bool {
    args.windows(2).all(|w| w[0].src() == w[1].tgt())
}

/// Raised when a value falls outside a truncated (partial) structure.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("undefined in the truncation: {0}")]
pub struct Undefined(pub String);

/// A graded hom space: basis degrees and names, and the differential as a
/// `dim × dim` matrix raising degree by one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSpace {
    pub degrees: Vec<i32>,
    pub names: Vec<String>,
    pub d: SparseMatrix,
    /// basis elements at a truncation edge whose stored differential is
    /// not the true one; checks skip them
    pub edge: BTreeSet<usize>,
}

impl HomSpace {
    pub fn new(degrees: Vec<i32>, names: Vec<String>, d: SparseMatrix) -> Self {
        assert_eq!(degrees.len(), names.len());
        assert_eq!((d.rows(), d.cols()), (degrees.len(), degrees.len()));
        HomSpace {
            degrees,
            names,
            d,
            edge: BTreeSet::new(),
        }
    }

    /// Whether `v` has a component along an edge element.
    pub fn touches_edge(&self, v: &[Scalar]) -> bool {
        self.edge.iter().any(|&i| !v[i].is_zero())
    }

    pub fn zero_differential(degrees: Vec<i32>, names: Vec<String>) -> Self {
        let n = degrees.len();
        HomSpace::new(degrees, names, SparseMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn in_degree(&self, k: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == k).collect()
    }

    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let lo = *self.degrees.iter().min()?;
        let hi = *self.degrees.iter().max()?;
        Some((lo, hi))
    }

    /// The hom complex as a `GradedComplex`, with coordinates ordered by
    /// degree and then by basis index.
    pub fn complex(&self) -> GradedComplex {
        let Some((lo, hi)) = self.degree_range() else {
            return GradedComplex::new(0, vec![0], BTreeMap::new()).unwrap();
        };
        let pos: Vec<(i32, usize)> = (0..self.dim())
            .map(|i| {
                let k = self.degrees[i];
                (k, self.in_degree(k).iter().position(|&j| j == i).unwrap())
            })
            .collect();
        let mut diffs = BTreeMap::new();
        for k in lo..hi {
            let src = self.in_degree(k);
            let tgt = self.in_degree(k + 1);
            let entries = self
                .d
                .entries()
                .filter(|(r, c, _)| self.degrees[*c] == k && self.degrees[*r] == k + 1)
                .map(|(r, c, v)| (pos[r].1, pos[c].1, v.clone()));
            diffs.insert(k, SparseMatrix::from_entries(tgt.len(), src.len(), entries));
        }
        let dims = (lo..=hi).map(|k| self.in_degree(k).len()).collect();
        GradedComplex::new(lo, dims, diffs).expect("hom differential squares to zero")
    }
}

/// A homogeneous element of `(C ⊕ k_C)(src, tgt)`: a multiple of the
/// formal unit (only when `src == tgt` and degree 0) plus a morphism.
#[derive(Clone, Debug)]
pub struct Val {
    pub src: usize,
    pub tgt: usize,
    pub degree: i32,
    pub unit: Scalar,
    pub vec: Vector,
}

/// A finite weakly unital dg category. Composition `a ∘ b` for
/// `a: y → z`, `b: x → y` is stored under `(x, y, z)` and `(a, b)`.
/// `ptower` stores `p_n` for `2 ≤ n ≤ n_max` on basis tuples; `p_1` is
/// the identity on morphisms and sends `1_x` to `id_x`.
///
/// In a partial category (a truncation of an infinite one) a missing
/// composition or tower entry is undefined rather than zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinWuDgCat {
    pub field: Field,
    pub objects: Vec<String>,
    pub homs: BTreeMap<(usize, usize), HomSpace>,
    pub comp: BTreeMap<(usize, usize, usize), BTreeMap<(usize, usize), Vector>>,
    pub units: Vec<Vector>,
    pub ptower: BTreeMap<Vec<Arg>, Vector>,
    pub n_max: usize,
    pub partial: bool,
}

static EMPTY_HOM: std::sync::OnceLock<HomSpace> = std::sync::OnceLock::new();

fn empty_hom() -> &'static HomSpace {
    EMPTY_HOM.get_or_init(|| HomSpace::new(Vec::new(), Vec::new(), SparseMatrix::zeros(0, 0)))
}

impl FinWuDgCat {
    pub fn new(field: Field, objects: Vec<String>, n_max: usize) -> Self {
        let n = objects.len();
        FinWuDgCat {
            field,
            objects,
            homs: BTreeMap::new(),
            comp: BTreeMap::new(),
            units: vec![Vec::new(); n],
            ptower: BTreeMap::new(),
            n_max,
            partial: false,
        }
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn hom(&self, x: usize, y: usize) -> &HomSpace {
        self.homs.get(&(x, y)).unwrap_or_else(|| empty_hom())
    }

    pub fn dim(&self, x: usize, y: usize) -> usize {
        self.hom(x, y).dim()
    }

    pub fn total_dim(&self) -> usize {
        self.homs.values().map(HomSpace::dim).sum()
    }

    pub fn degree(&self, x: usize, y: usize, i: usize) -> i32 {
        self.hom(x, y).degrees[i]
    }

    pub fn arg_degree(&self, a: &Arg) -> i32 {
        match *a {
            Arg::One(_) => 0,
            Arg::Mor { src, tgt, idx } => self.degree(src, tgt, idx),
        }
    }

    pub fn zero(&self, x: usize, y: usize) -> Vector {
        vector::zeros(self.field, self.dim(x, y))
    }

    pub fn basis(&self, x: usize, y: usize, i: usize) -> Vector {
        let mut v = self.zero(x, y);
        v[i] = self.field.one();
        v
    }

    pub fn id(&self, x: usize) -> &Vector {
        &self.units[x]
    }

    pub fn set_hom(&mut self, x: usize, y: usize, h: HomSpace) {
        let n = h.dim();
        self.homs.insert((x, y), h);
        if x == y && self.units[x].len() != n {
            self.units[x] = vector::zeros(self.field, n);
        }
    }

    pub fn set_unit(&mut self, x: usize, v: Vector) {
        assert_eq!(v.len(), self.dim(x, x));
        self.units[x] = v;
    }

    pub fn set_comp(&mut self, x: usize, y: usize, z: usize, a: usize, b: usize, v: Vector) {
        assert_eq!(v.len(), self.dim(x, z));
        self.comp.entry((x, y, z)).or_default().insert((a, b), v);
    }

    pub fn set_p(&mut self, args: Vec<Arg>, v: Vector) {
        assert!(args.len() >= 2 && composable(&args));
        assert_eq!(v.len(), self.dim(args.last().unwrap().src(), args[0].tgt()));
        if vector::is_zero(&v) && !self.partial {
            self.ptower.remove(&args);
        } else {
            self.ptower.insert(args, v);
        }
    }

    pub fn diff(&self, x: usize, y: usize, v: &[Scalar]) -> Vector {
        self.hom(x, y).d.apply(v).into_iter().map(|s| s.to_field(self.field)).collect()
    }

    pub fn compose_basis(&self, x: usize, y: usize, z: usize, a: usize, b: usize) -> Result<Vector, Undefined> {
        match self.comp.get(&(x, y, z)).and_then(|t| t.get(&(a, b))) {
            Some(v) => Ok(v.clone()),
            None if self.partial => Err(Undefined(format!(
                "{} ∘ {}",
                self.hom(y, z).names[a],
                self.hom(x, y).names[b]
            ))),
            None => Ok(self.zero(x, z)),
        }
    }

    /// `u ∘ v` for `u ∈ C(y, z)`, `v ∈ C(x, y)`.
    pub fn compose(&self, x: usize, y: usize, z: usize, u: &[Scalar], v: &[Scalar]) -> Result<Vector, Undefined> {
        let mut out = self.zero(x, z);
        for (a, ca) in u.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in v.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let w = self.compose_basis(x, y, z, a, b)?;
                vector::add_scaled(&mut out, &w, &(ca * cb));
            }
        }
        Ok(out)
    }

    /// Composite of a chain `u_1 ∘ … ∘ u_k` given with its objects
    /// `objs[0] ← objs[1] ← … ← objs[k]`, each `u_i: objs[i] → objs[i-1]`.
    pub fn compose_chain(&self, objs: &[usize], us: &[&[Scalar]]) -> Result<Vector, Undefined> {
        assert_eq!(objs.len(), us.len() + 1);
        let k = us.len();
        let mut acc = us[k - 1].to_vec();
        for i in (0..k - 1).rev() {
            acc = self.compose(objs[k], objs[i + 1], objs[i], us[i], &acc)?;
        }
        Ok(acc)
    }

    pub fn p_basis(&self, args: &[Arg]) -> Result<Vector, Undefined> {
        let n = args.len();
        let (x, y) = (args[n - 1].src(), args[0].tgt());
        if n == 1 {
            return Ok(match args[0] {
                Arg::One(x) => self.units[x].clone(),
                Arg::Mor { src, tgt, idx } => self.basis(src, tgt, idx),
            });
        }
        if n > self.n_max {
            return Ok(self.zero(x, y));
        }
        match self.ptower.get(args) {
            Some(v) => Ok(v.clone()),
            None if self.partial && args.iter().any(Arg::is_one) => {
                Err(Undefined(format!("p_{n} on {}", self.args_text(args))))
            }
            None => Ok(self.zero(x, y)),
        }
    }

    /// Multilinear extension of `p_n` to homogeneous values.
    pub fn p_vals(&self, vals: &[Val]) -> Result<Vector, Undefined> {
        let n = vals.len();
        let (x, y) = (vals[n - 1].src, vals[0].tgt);
        let mut out = self.zero(x, y);
        let expansions: Vec<Vec<(Arg, Scalar)>> = vals.iter().map(|v| self.expand(v)).collect();
        if expansions.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        let mut idx = vec![0usize; n];
        loop {
            let args: Vec<Arg> = (0..n).map(|i| expansions[i][idx[i]].0).collect();
            let mut c = self.field.one();
            for i in 0..n {
                c = &c * &expansions[i][idx[i]].1;
            }
            let w = self.p_basis(&args)?;
            vector::add_scaled(&mut out, &w, &c);
            let mut k = n;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < expansions[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn expand(&self, v: &Val) -> Vec<(Arg, Scalar)> {
        let mut out = Vec::new();
        if !v.unit.is_zero() {
            out.push((Arg::One(v.src), v.unit.clone()));
        }
        for (i, c) in v.vec.iter().enumerate() {
            if !c.is_zero() {
                out.push((
                    Arg::Mor {
                        src: v.src,
                        tgt: v.tgt,
                        idx: i,
                    },
                    c.clone(),
                ));
            }
        }
        out
    }

    pub fn arg_val(&self, a: &Arg) -> Val {
        match *a {
            Arg::One(x) => Val {
                src: x,
                tgt: x,
                degree: 0,
                unit: self.field.one(),
                vec: self.zero(x, x),
            },
            Arg::Mor { src, tgt, idx } => Val {
                src,
                tgt,
                degree: self.degree(src, tgt, idx),
                unit: self.field.zero(),
                vec: self.basis(src, tgt, idx),
            },
        }
    }

    /// Product in `C ⊕ k_C`.
    pub fn mul_args(&self, a: &Arg, b: &Arg) -> Result<Val, Undefined> {
        Ok(match (*a, *b) {
            (Arg::One(_), _) => self.arg_val(b),
            (_, Arg::One(_)) => self.arg_val(a),
            (Arg::Mor { src: y, tgt: z, idx: i }, Arg::Mor { src: x, idx: j, .. }) => Val {
                src: x,
                tgt: z,
                degree: self.degree(y, z, i) + self.degree(x, y, j),
                unit: self.field.zero(),
                vec: self.compose_basis(x, y, z, i, j)?,
            },
        })
    }

    /// `LHS − RHS` of the A∞-functor identity for `p` on a composable
    /// tuple, `n ≥ 1`:
    ///
    /// ```text
    /// d p_n(x) − (−1)^{n−1} Σ_i (−1)^{|x_1|+…+|x_{i−1}|} p_n(…, dx_i, …)
    ///   = Σ_{r=1}^{n−1} (−1)^{r−1} p_{n−1}(…, x_r x_{r+1}, …)
    ///   − Σ_{l=1}^{n−1} (−1)^{l−1} (−1)^{(1−n+l)(|x_1|+…+|x_l|)} p_l(x_1..x_l) ∘ p_{n−l}(x_{l+1}..x_n)
    /// ```
    pub fn ainf_residual(&self, args: &[Arg]) -> Result<Vector, Undefined> {
        let n = args.len();
        let (x, y) = (args[n - 1].src(), args[0].tgt());
        let degs: Vec<i32> = args.iter().map(|a| self.arg_degree(a)).collect();
        let vals: Vec<Val> = args.iter().map(|a| self.arg_val(a)).collect();
        let pn = self.p_basis(args)?;
        let mut res = self.diff(x, y, &pn);
        let mut before = 0;
        for i in 0..n {
            if let Arg::Mor { src, tgt, .. } = args[i] {
                let dv = self.diff(src, tgt, &vals[i].vec);
                if !vector::is_zero(&dv) {
                    let mut vs = vals.clone();
                    vs[i] = Val {
                        src,
                        tgt,
                        degree: degs[i] + 1,
                        unit: self.field.zero(),
                        vec: dv,
                    };
                    let w = self.p_vals(&vs)?;
                    let s = sign((n as i32 - 1) + before + 1);
                    vector::add_scaled(&mut res, &w, &s);
                }
            }
            before += degs[i];
        }
        for r in 1..n {
            let mut vs = vals[..r - 1].to_vec();
            vs.push(self.mul_args(&args[r - 1], &args[r])?);
            vs.extend_from_slice(&vals[r + 1..]);
            let w = self.p_vals(&vs)?;
            vector::add_scaled(&mut res, &w, &sign(r as i32));
        }
        let mut prefix = 0;
        for l in 1..n {
            prefix += degs[l - 1];
            let a = self.p_basis(&args[..l])?;
            let b = self.p_basis(&args[l..])?;
            let mid = args[l - 1].src();
            let w = self.compose(x, mid, y, &a, &b)?;
            let e = (l as i32 - 1) + (1 - n as i32 + l as i32) * prefix;
            vector::add_scaled(&mut res, &w, &sign(e));
        }
        Ok(res)
    }

    pub fn args_text(&self, args: &[Arg]) -> String {
        let parts: Vec<String> = args
            .iter()
            .map(|a| match *a {
                Arg::One(x) => format!("1_{}", self.objects[x]),
                Arg::Mor { src, tgt, idx } => self.hom(src, tgt).names[idx].clone(),
            })
            .collect();
        format!("({})", parts.join(", "))
    }

    pub fn vec_text(&self, x: usize, y: usize, v: &[Scalar]) -> String {
        let names = &self.hom(x, y).names;
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}·{}", c, names[i]))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Calls `f` on every composable tuple of length `n`, optionally
    /// only those containing at least one formal unit.
    pub fn for_each_tuple<F: FnMut(&[Arg])>(&self, n: usize, with_unit: bool, mut f: F) {
        let mut cur = Vec::with_capacity(n);
        for y in 0..self.n_objects() {
            self.tuples_from(y, n, with_unit, &mut cur, &mut f);
        }
    }

    fn tuples_from<F: FnMut(&[Arg])>(&self, tgt: usize, n: usize, with_unit: bool, cur: &mut Vec<Arg>, f: &mut F) {
        if cur.len() == n {
            if !with_unit || cur.iter().any(Arg::is_one) {
                f(cur);
            }
            return;
        }
        cur.push(Arg::One(tgt));
        self.tuples_from(tgt, n, with_unit, cur, f);
        cur.pop();
        for src in 0..self.n_objects() {
            for idx in 0..self.dim(src, tgt) {
                cur.push(Arg::Mor { src, tgt, idx });
                self.tuples_from(src, n, with_unit, cur, f);
                cur.pop();
            }
        }
    }

    /// Whether a tuple involves an edge element, as an argument or in the
    /// value of `p_n`.
    pub fn touches_edge(&self, args: &[Arg]) -> bool {
        let n = args.len();
        let arg_edge = args.iter().any(|a| match *a {
            Arg::One(_) => false,
            Arg::Mor { src, tgt, idx } => self.hom(src, tgt).edge.contains(&idx),
        });
        arg_edge
            || self
                .p_basis(args)
                .map_or(false, |v| self.hom(args[n - 1].src(), args[0].tgt()).touches_edge(&v))
    }

    /// Every hom basis element as an argument.
    pub fn all_morphisms(&self) -> Vec<Arg> {
        self.homs
            .iter()
            .flat_map(|(&(src, tgt), h)| (0..h.dim()).map(move |idx| Arg::Mor { src, tgt, idx }))
            .collect()
    }

    pub fn to_field(&self, field: Field) -> FinWuDgCat {
        let conv = |v: &Vector| vector::to_field(v, field);
        FinWuDgCat {
            field,
            objects: self.objects.clone(),
            homs: self
                .homs
                .iter()
                .map(|(k, h)| {
                    let mut g = h.clone();
                    g.d = h.d.to_field(field);
                    (*k, g)
                })
                .collect(),
            comp: self
                .comp
                .iter()
                .map(|(k, t)| (*k, t.iter().map(|(ab, v)| (*ab, conv(v))).collect()))
                .collect(),
            units: self.units.iter().map(conv).collect(),
            ptower: self.ptower.iter().map(|(k, v)| (k.clone(), conv(v))).collect(),
            n_max: self.n_max,
            partial: self.partial,
        }
    }
}

pub(crate) fn sign(e: i32) -> Scalar {
    if e.rem_euclid(2) == 0 {
        Scalar::int(1)
    } else {
        Scalar::int(-1)
    }
}
