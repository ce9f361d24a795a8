//! Free weakly unital dg categories on dg graphs, truncated.
//!
//! A basis element of `F(Γ)(x, y)` is a normal-form tree `T` of arity `n`
//! together with a chain `(a_1, …, a_n)` of graph basis elements,
//! `a_i: o_i → o_{i−1}`, `o_0 = y`, `o_n = x`; it stands for
//! `T(a_1, …, a_n)` and has degree `|T| + Σ |a_i|`. Trees are cut at unit
//! weight `q_max` and degree `degree_min`, chains at length `len`, so the
//! result is a partial category.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exactlinalg::{Field, Scalar, SparseMatrix};
use crate::treeops::{enumerate_trees, graft, normalize, GenTree, Mode};
use crate::wuoperad::Differential;

use super::category::{sign, Arg, FinWuDgCat, HomSpace, Val};
use super::functor::WuFunctor;
use super::vector::{self, Vector};

/// A dg graph: objects and a hom complex for each ordered pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgGraph {
    pub field: Field,
    pub objects: Vec<String>,
    pub homs: BTreeMap<(usize, usize), HomSpace>,
}

impl DgGraph {
    pub fn new(field: Field, objects: Vec<String>) -> Self {
        DgGraph {
            field,
            objects,
            homs: BTreeMap::new(),
        }
    }

    pub fn set_hom(&mut self, x: usize, y: usize, h: HomSpace) {
        self.homs.insert((x, y), h);
    }

    pub fn dim(&self, x: usize, y: usize) -> usize {
        self.homs.get(&(x, y)).map_or(0, HomSpace::dim)
    }

    pub fn degree(&self, e: Edge) -> i32 {
        self.homs[&(e.src, e.tgt)].degrees[e.idx]
    }

    pub fn name(&self, e: Edge) -> &str {
        &self.homs[&(e.src, e.tgt)].names[e.idx]
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.homs
            .iter()
            .flat_map(|(&(src, tgt), h)| (0..h.dim()).map(move |idx| Edge { src, tgt, idx }))
            .collect()
    }

    /// Every hom satisfies `d² = 0` and `d` raises degree by one.
    pub fn is_valid(&self) -> bool {
        self.homs.values().all(|h| {
            h.d.mul(&h.d).is_zero()
                && h.d.entries().all(|(r, c, _)| h.degrees[r] == h.degrees[c] + 1)
        })
    }
}

/// A graph basis element `(src, tgt, idx)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: usize,
    pub tgt: usize,
    pub idx: usize,
}

/// The forgetful graph of a category.
pub fn forgetful_u(c: &FinWuDgCat) -> DgGraph {
    DgGraph {
        field: c.field,
        objects: c.objects.clone(),
        homs: c.homs.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub q_max: usize,
    pub degree_min: i32,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FreeError {
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("the graph is not a dg graph: {0}")]
    Graph(String),
}

#[derive(Clone, Debug)]
pub struct FreeCategory {
    pub graph: DgGraph,
    pub cat: FinWuDgCat,
    pub mode: Mode,
    pub trunc: Truncation,
    pub basis: BTreeMap<(usize, usize), Vec<(GenTree, Vec<Edge>)>>,
    index: BTreeMap<(GenTree, Vec<Edge>, usize, usize), usize>,
}

/// Chains `(a_1, …, a_n)` from `x` to `y`, target first.
pub fn chains(g: &DgGraph, x: usize, y: usize, n: usize) -> Vec<Vec<Edge>> {
    fn rec(g: &DgGraph, at: usize, x: usize, left: usize, cur: &mut Vec<Edge>, out: &mut Vec<Vec<Edge>>) {
        if left == 0 {
            if at == x {
                out.push(cur.clone());
            }
            return;
        }
        for src in 0..g.objects.len() {
            for idx in 0..g.dim(src, at) {
                cur.push(Edge { src, tgt: at, idx });
                rec(g, src, x, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(g, y, x, n, &mut Vec::new(), &mut out);
    out
}

fn chain_degree(g: &DgGraph, c: &[Edge]) -> i32 {
    c.iter().map(|e| g.degree(*e)).sum()
}

fn element_name(g: &DgGraph, t: &GenTree, c: &[Edge], x: usize) -> String {
    match (t, c.len()) {
        (GenTree::Leaf, 1) => g.name(c[0]).to_string(),
        (GenTree::J, 0) => format!("id_{}", g.objects[x]),
        (_, 0) => format!("{}@{}", t.encode(), g.objects[x]),
        _ => {
            let names: Vec<&str> = c.iter().map(|e| g.name(*e)).collect();
            format!("{}({})", t.encode(), names.join(","))
        }
    }
}

impl FreeCategory {
    pub fn lookup(&self, x: usize, y: usize, t: &GenTree, c: &[Edge]) -> Option<usize> {
        self.index.get(&(t.clone(), c.to_vec(), x, y)).copied()
    }

    /// The generator `a` as the element `Leaf(a)`.
    pub fn generator(&self, e: Edge) -> Vector {
        let i = self.lookup(e.src, e.tgt, &GenTree::Leaf, &[e]).expect("generators lie in the truncation");
        self.cat.basis(e.src, e.tgt, i)
    }

    /// The graph-map counterpart of a functor: its values on generators.
    pub fn restrict(&self, f: &WuFunctor, d: &FinWuDgCat) -> GraphMap {
        let images = self
            .graph
            .edges()
            .into_iter()
            .map(|e| (e, f.apply(d, e.src, e.tgt, &self.generator(e))))
            .collect();
        GraphMap { obj: f.obj.clone(), images }
    }

    /// The functor `F(Γ) → D` extending a graph map `Γ → U(D)`: a basis
    /// element `T(a_1, …, a_n)` goes to `T` evaluated in `D` on the images.
    pub fn extend(&self, phi: &GraphMap, d: &FinWuDgCat) -> Result<WuFunctor, String> {
        let mut maps = BTreeMap::new();
        for (&(x, y), elems) in &self.basis {
            let mut cols = Vec::with_capacity(elems.len());
            for (t, c) in elems {
                cols.push(self.evaluate(phi, d, t, c, y)?);
            }
            maps.insert((x, y), SparseMatrix::from_columns(d.dim(phi.obj[x], phi.obj[y]), &cols));
        }
        Ok(WuFunctor { obj: phi.obj.clone(), maps })
    }

    fn evaluate(&self, phi: &GraphMap, d: &FinWuDgCat, t: &GenTree, c: &[Edge], y: usize) -> Result<Vector, String> {
        // o_0 = y, o_i = src(a_i)
        let mut objs = vec![phi.obj[y]];
        objs.extend(c.iter().map(|e| phi.obj[e.src]));
        let leaves: Vec<Val> = c
            .iter()
            .enumerate()
            .map(|(i, e)| Val {
                src: objs[i + 1],
                tgt: objs[i],
                degree: self.graph.degree(*e),
                unit: d.field.zero(),
                vec: vector::to_field(&phi.images[e], d.field),
            })
            .collect();
        let mut pos = 0;
        let v = eval(d, t, &leaves, &objs, &mut pos).map_err(|u| u.0)?;
        let s = koszul(t, &leaves, &mut 0, &mut 0);
        Ok(if s { vector::scale(&v.vec, &-d.field.one()) } else { v.vec })
    }
}

/// Sign of evaluating a tree on graded arguments: each `p` vertex passes
/// the arguments whose leaves come before it in preorder.
fn koszul(t: &GenTree, leaves: &[Val], pos: &mut usize, seen: &mut i32) -> bool {
    match t {
        GenTree::Leaf => {
            *seen += leaves[*pos].degree;
            *pos += 1;
            false
        }
        GenTree::J => false,
        GenTree::M(ch) => ch.iter().fold(false, |acc, c| acc ^ koszul(c, leaves, pos, seen)),
        GenTree::P { n, children, .. } => {
            let own = ((1 - *n as i32) * *seen).rem_euclid(2) == 1;
            children.iter().fold(own, |acc, c| acc ^ koszul(c, leaves, pos, seen))
        }
    }
}

fn eval(d: &FinWuDgCat, t: &GenTree, leaves: &[Val], objs: &[usize], pos: &mut usize) -> Result<Val, super::category::Undefined> {
    let here = objs[*pos];
    match t {
        GenTree::Leaf => {
            let v = leaves[*pos].clone();
            *pos += 1;
            Ok(v)
        }
        GenTree::J => Ok(Val {
            src: here,
            tgt: here,
            degree: 0,
            unit: d.field.zero(),
            vec: d.id(here).clone(),
        }),
        GenTree::M(ch) => {
            let vals: Vec<Val> = ch.iter().map(|c| eval(d, c, leaves, objs, pos)).collect::<Result<_, _>>()?;
            let mut os: Vec<usize> = vals.iter().map(|v| v.tgt).collect();
            os.push(vals.last().unwrap().src);
            let us: Vec<&[Scalar]> = vals.iter().map(|v| v.vec.as_slice()).collect();
            let vec = d.compose_chain(&os, &us)?;
            Ok(Val {
                src: *os.last().unwrap(),
                tgt: os[0],
                degree: vals.iter().map(|v| v.degree).sum(),
                unit: d.field.zero(),
                vec,
            })
        }
        GenTree::P { n, slots, children } => {
            let mut vals = Vec::with_capacity(*n);
            let mut kids = children.iter();
            for i in 1..=*n {
                if slots.contains(&i) {
                    let o = objs[*pos];
                    vals.push(d.arg_val(&Arg::One(o)));
                } else {
                    vals.push(eval(d, kids.next().unwrap(), leaves, objs, pos)?);
                }
            }
            let vec = d.p_vals(&vals)?;
            Ok(Val {
                src: vals[*n - 1].src,
                tgt: vals[0].tgt,
                degree: vals.iter().map(|v| v.degree).sum::<i32>() + 1 - *n as i32,
                unit: d.field.zero(),
                vec,
            })
        }
    }
}

/// Object map and generator images of a graph map `Γ → U(D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMap {
    pub obj: Vec<usize>,
    pub images: BTreeMap<Edge, Vector>,
}

impl GraphMap {
    /// Degree 0 and commuting with `d`.
    pub fn is_valid(&self, g: &DgGraph, d: &FinWuDgCat) -> bool {
        g.edges().into_iter().all(|e| {
            let (x, y) = (self.obj[e.src], self.obj[e.tgt]);
            let v = &self.images[&e];
            let h = d.hom(x, y);
            let deg_ok = v.iter().enumerate().all(|(i, s)| s.is_zero() || h.degrees[i] == g.degree(e));
            let de = g.homs[&(e.src, e.tgt)].d.apply(&super::subspace::unit(g.field, g.dim(e.src, e.tgt), e.idx));
            let mut rhs = d.zero(x, y);
            for (k, s) in de.iter().enumerate() {
                if !s.is_zero() {
                    vector::add_scaled(&mut rhs, &self.images[&Edge { idx: k, ..e }], s);
                }
            }
            deg_ok && vector::is_zero(&vector::sub(&d.diff(x, y, v), &rhs))
        })
    }

    pub fn equals(&self, other: &GraphMap) -> bool {
        self.obj == other.obj
            && self.images.iter().all(|(e, v)| vector::is_zero(&vector::sub(v, &other.images[e])))
    }
}

pub fn free_wu_category(g: &DgGraph, trunc: Truncation, mode: Mode) -> Result<FreeCategory, FreeError> {
    if trunc.q_max == 0 {
        return Err(FreeError::Truncation("q_max = 0 leaves out the units".into()));
    }
    if trunc.len == 0 && g.homs.values().any(|h| h.dim() > 0) {
        return Err(FreeError::Truncation("len = 0 leaves out the generators".into()));
    }
    if trunc.degree_min > 0 {
        return Err(FreeError::Truncation("degree_min must be nonpositive".into()));
    }
    if !g.is_valid() {
        return Err(FreeError::Graph("d² ≠ 0 or d does not raise degree".into()));
    }
    let field = g.field;
    let no = g.objects.len();
    let trees: Vec<Vec<GenTree>> = (0..=trunc.len)
        .map(|n| enumerate_trees(n, trunc.q_max, trunc.degree_min, mode))
        .collect();
    let mut basis = BTreeMap::new();
    let mut index = BTreeMap::new();
    for x in 0..no {
        for y in 0..no {
            let mut elems = Vec::new();
            for n in 0..=trunc.len {
                for c in chains(g, x, y, n) {
                    for t in &trees[n] {
                        index.insert((t.clone(), c.clone(), x, y), elems.len());
                        elems.push((t.clone(), c.clone()));
                    }
                }
            }
            basis.insert((x, y), elems);
        }
    }
    let mut cat = FinWuDgCat::new(field, g.objects.clone(), trunc.q_max + trunc.len);
    cat.partial = true;
    let mut fc = FreeCategory {
        graph: g.clone(),
        cat: FinWuDgCat::new(field, Vec::new(), 0),
        mode,
        trunc,
        basis,
        index,
    };
    let diff = Differential::new(mode);
    for x in 0..no {
        for y in 0..no {
            let elems = &fc.basis[&(x, y)];
            let degrees: Vec<i32> = elems.iter().map(|(t, c)| t.degree() + chain_degree(g, c)).collect();
            let names: Vec<String> = elems.iter().map(|(t, c)| element_name(g, t, c, x)).collect();
            let mut entries = Vec::new();
            for (col, (t, c)) in elems.iter().enumerate() {
                for (s, k) in diff.of_tree(t) {
                    let row = fc.lookup(x, y, &s, c).ok_or_else(|| {
                        FreeError::Truncation(format!("d{} leaves the truncation", s.encode()))
                    })?;
                    entries.push((row, col, field.from_i64(k)));
                }
                // (−1)^{|T|} T ⊗ d c
                let mut before = t.degree();
                for i in 0..c.len() {
                    let e = c[i];
                    let h = &g.homs[&(e.src, e.tgt)];
                    for (r, v) in h.d.entries().filter(|(_, cc, _)| *cc == e.idx).map(|(r, _, v)| (r, v.clone())) {
                        let mut c2 = c.clone();
                        c2[i] = Edge { idx: r, ..e };
                        let row = fc.lookup(x, y, t, &c2).expect("same shape");
                        entries.push((row, col, &sign(before) * &v.to_field(field)));
                    }
                    before += g.degree(e);
                }
            }
            let d = SparseMatrix::from_entries(elems.len(), elems.len(), entries);
            cat.set_hom(x, y, HomSpace::new(degrees, names, d));
        }
    }
    for x in 0..no {
        let i = fc.lookup(x, x, &GenTree::J, &[]).expect("q_max ≥ 1");
        cat.set_unit(x, cat.basis(x, x, i));
    }
    let m2 = GenTree::m_leaves(2);
    for x in 0..no {
        for y in 0..no {
            for z in 0..no {
                for (a, (tu, cu)) in fc.basis[&(y, z)].iter().enumerate() {
                    for (b, (tv, cv)) in fc.basis[&(x, y)].iter().enumerate() {
                        let (neg, raw) = graft(&m2, &[tu.clone(), tv.clone()]);
                        let Some(t) = normalize(&raw, mode) else {
                            cat.set_comp(x, y, z, a, b, cat.zero(x, z));
                            continue;
                        };
                        let mut c = cu.clone();
                        c.extend_from_slice(cv);
                        if let Some(i) = fc.lookup(x, z, &t, &c) {
                            let odd = neg ^ ((tv.degree() * chain_degree(g, cu)).rem_euclid(2) == 1);
                            let s = if odd { -field.one() } else { field.one() };
                            cat.set_comp(x, y, z, a, b, vector::scale(&cat.basis(x, z, i), &s));
                        }
                    }
                }
            }
        }
    }
    let n_max = cat.n_max;
    for n in 2..=n_max {
        let mut found = Vec::new();
        cat.for_each_tuple(n, true, |args| {
            let slots: Vec<usize> = (1..=n).filter(|&i| args[i - 1].is_one()).collect();
            let mut kids = Vec::new();
            let mut chain = Vec::new();
            let mut odd = false;
            let mut chain_deg = 0;
            for a in args {
                if let Arg::Mor { src, tgt, idx } = *a {
                    let (t, c) = &fc.basis[&(src, tgt)][idx];
                    odd ^= (t.degree() * chain_deg).rem_euclid(2) == 1;
                    chain_deg += chain_degree(g, c);
                    kids.push(t.clone());
                    chain.extend_from_slice(c);
                }
            }
            let (x, y) = (args[n - 1].src(), args[0].tgt());
            let gen = GenTree::p(n, &slots);
            let (neg, raw) = graft(&gen, &kids);
            match normalize(&raw, mode) {
                None => found.push((args.to_vec(), None)),
                Some(t) => {
                    if let Some(i) = fc.lookup(x, y, &t, &chain) {
                        found.push((args.to_vec(), Some((i, odd ^ neg))));
                    }
                }
            }
        });
        for (args, v) in found {
            let (x, y) = (args[n - 1].src(), args[0].tgt());
            let val = match v {
                None => cat.zero(x, y),
                Some((i, odd)) => {
                    let s = if odd { -field.one() } else { field.one() };
                    vector::scale(&cat.basis(x, y, i), &s)
                }
            };
            cat.set_p(args, val);
        }
    }
    fc.cat = cat;
    Ok(fc)
}

/// `dim F(Γ)(x, y)` from tree counts and chain counts, the chain counts
/// taken from powers of the matrix of hom dimensions.
pub fn dimension_count(g: &DgGraph, trunc: Truncation, mode: Mode, x: usize, y: usize) -> usize {
    let no = g.objects.len();
    // paths[o] = number of chains of the current length from x to o
    let mut paths = vec![0usize; no];
    paths[x] = 1;
    let mut total = 0;
    for n in 0..=trunc.len {
        total += paths[y] * crate::treeops::count_by_brute_force(n, trunc.q_max, trunc.degree_min, mode);
        let mut next = vec![0usize; no];
        for (a, &k) in paths.iter().enumerate() {
            for (b, slot) in next.iter_mut().enumerate() {
                *slot += k * g.dim(a, b);
            }
        }
        paths = next;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::{check_functor, check_wu_axioms};

    fn one_edge(field: Field, deg: i32) -> DgGraph {
        let mut g = DgGraph::new(field, vec!["x".into(), "y".into()]);
        g.set_hom(0, 1, HomSpace::zero_differential(vec![deg], vec!["e".into()]));
        g
    }

    /// `x → y` with `u` of degree `−n` and `v = du`.
    fn disk(field: Field, n: i32) -> DgGraph {
        let mut g = DgGraph::new(field, vec!["0".into(), "1".into()]);
        let d = SparseMatrix::from_entries(2, 2, [(1, 0, field.one())]);
        g.set_hom(0, 1, HomSpace::new(vec![-n, 1 - n], vec!["u".into(), "v".into()], d));
        g
    }

    const T: Truncation = Truncation {
        q_max: 2,
        degree_min: -2,
        len: 2,
    };

    #[test]
    fn edgeless_vertex() {
        let g = DgGraph::new(Field::Rational, vec!["x".into()]);
        let f = free_wu_category(&g, T, Mode::O).unwrap();
        let h = f.cat.hom(0, 0);
        assert_eq!(h.in_degree(0).len(), 1);
        assert_eq!(h.names[h.in_degree(0)[0]], "id_x");
        assert_eq!(h.dim(), dimension_count(&g, T, Mode::O, 0, 0));
    }

    #[test]
    fn single_edge_slice() {
        let g = one_edge(Field::Rational, 0);
        let f = free_wu_category(&g, T, Mode::O).unwrap();
        let q0: Vec<&(GenTree, Vec<Edge>)> = f.basis[&(0, 1)].iter().filter(|(t, _)| t.unit_weight() == 0).collect();
        assert_eq!(q0.len(), 1);
        assert_eq!(q0[0].0, GenTree::Leaf);
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(f.cat.dim(x, y), dimension_count(&g, T, Mode::O, x, y));
            }
        }
    }

    #[test]
    fn free_category_axioms() {
        let f = free_wu_category(&disk(Field::Rational, 1), T, Mode::O).unwrap();
        let r = check_wu_axioms(&f.cat, 3);
        assert!(r.passed(), "{:?}", r.failures());
        // without m(j, j) = j the unit is not idempotent
        let f = free_wu_category(&disk(Field::Rational, 1), T, Mode::OPrime).unwrap();
        let r = check_wu_axioms(&f.cat, 3);
        let names: Vec<&str> = r.failures().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, vec!["unit idempotent"]);
    }

    #[test]
    fn unit_of_adjunction_extends_to_identity() {
        let g = disk(Field::Rational, 1);
        let f = free_wu_category(&g, T, Mode::O).unwrap();
        let id = WuFunctor::identity(&f.cat);
        let eta = f.restrict(&id, &f.cat);
        assert!(eta.is_valid(&g, &f.cat));
        let back = f.extend(&eta, &f.cat).unwrap();
        assert!(back.same_as(&id, &f.cat, &f.cat));
        let u = forgetful_u(&f.cat);
        assert_eq!(u.objects, g.objects);
        for e in g.edges() {
            let v = f.generator(e);
            assert_eq!(u.homs[&(e.src, e.tgt)].degrees[v.iter().position(|s| !s.is_zero()).unwrap()], g.degree(e));
        }
        assert!(check_functor(&back, &f.cat, &f.cat, 3).passed());
    }
}
