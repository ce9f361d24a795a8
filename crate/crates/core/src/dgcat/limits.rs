//! Subcategories, quotients, equalizers, products and coproducts.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::exactlinalg::{kernel_basis, select_columns, Field, Scalar, SparseMatrix};

use super::category::{Arg, FinWuDgCat, HomSpace, Val};
use super::functor::WuFunctor;
use super::subspace::{unit, Subspace};
use super::vector::{self, Vector};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("{what} leaves the subspace at {at}")]
    NotClosed { what: String, at: String },
    #[error("functors have different source or target")]
    Mismatch,
    #[error("partial categories are not supported here")]
    Partial,
}

/// Kernel of `m` restricted to homogeneous coordinates, as a subspace.
pub fn homogeneous_kernel(m: &SparseMatrix, degrees: &[i32], field: Field) -> Subspace {
    let mut s = Subspace::new(field, degrees.len());
    let ds: BTreeSet<i32> = degrees.iter().copied().collect();
    for k in ds {
        let cols: Vec<usize> = (0..degrees.len()).filter(|&i| degrees[i] == k).collect();
        let sub = select_columns(m, &cols).to_field(field);
        for v in kernel_basis(&sub) {
            let mut full = vector::zeros(field, degrees.len());
            for (c, x) in cols.iter().zip(v) {
                full[*c] = x.to_field(field);
            }
            s.insert(&full);
        }
    }
    s
}

fn row_degree(h: &HomSpace, v: &[Scalar]) -> i32 {
    let i = v.iter().position(|s| !s.is_zero()).expect("nonzero basis vector");
    h.degrees[i]
}

fn row_name(c: &FinWuDgCat, x: usize, y: usize, v: &Vector) -> String {
    let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
    if nz.len() == 1 && v[nz[0]].is_one() {
        c.hom(x, y).names[nz[0]].clone()
    } else {
        format!("[{}]", c.vec_text(x, y, v))
    }
}

/// The subcategory on `objs` with homs `spaces[(x, y)]` (indexed by the
/// objects of `c`; missing pairs are zero), and its inclusion. Fails if
/// the subspaces are not closed under the structure.
pub fn sub_category(
    c: &FinWuDgCat,
    objs: &[usize],
    spaces: &BTreeMap<(usize, usize), Subspace>,
) -> Result<(FinWuDgCat, WuFunctor), LimitError> {
    if c.partial {
        return Err(LimitError::Partial);
    }
    let f = c.field;
    let names = objs.iter().map(|&x| c.objects[x].clone()).collect();
    let mut s = FinWuDgCat::new(f, names, c.n_max);
    let k = objs.len();
    let mut own = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            let (x, y) = (objs[i], objs[j]);
            let sp = spaces.get(&(x, y)).cloned().unwrap_or_else(|| Subspace::new(f, c.dim(x, y)));
            own.insert((i, j), sp);
        }
    }
    let space = |i: usize, j: usize| &own[&(i, j)];
    let not_closed = |what: &str, at: String| LimitError::NotClosed { what: what.into(), at };
    let mut maps = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            let sp = space(i, j);
            let (x, y) = (objs[i], objs[j]);
            let h = c.hom(x, y);
            let rows = sp.basis();
            let degrees: Vec<i32> = rows.iter().map(|r| row_degree(h, r)).collect();
            let names: Vec<String> = rows.iter().map(|r| row_name(c, x, y, r)).collect();
            let mut entries = Vec::new();
            for (col, r) in rows.iter().enumerate() {
                let dr = c.diff(x, y, r);
                let co = sp.coords(&dr).ok_or_else(|| not_closed("differential", names[col].clone()))?;
                entries.extend(co.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(r, v)| (r, col, v)));
            }
            let n = rows.len();
            s.set_hom(i, j, HomSpace::new(degrees, names, SparseMatrix::from_entries(n, n, entries)));
            maps.insert((i, j), SparseMatrix::from_columns(h.dim(), rows));
        }
    }
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                let (a_sp, b_sp, out) = (space(j, l), space(i, j), space(i, l));
                for (a, ra) in a_sp.basis().iter().enumerate() {
                    for (b, rb) in b_sp.basis().iter().enumerate() {
                        let v = c.compose(objs[i], objs[j], objs[l], ra, rb).expect("total category");
                        if vector::is_zero(&v) {
                            continue;
                        }
                        let co = out.coords(&v).ok_or_else(|| {
                            not_closed("composition", format!("{} ∘ {}", s.hom(j, l).names[a], s.hom(i, j).names[b]))
                        })?;
                        s.set_comp(i, j, l, a, b, co);
                    }
                }
            }
        }
    }
    for i in 0..k {
        let co = space(i, i)
            .coords(c.id(objs[i]))
            .ok_or_else(|| not_closed("unit", s.objects[i].clone()))?;
        s.set_unit(i, co);
    }
    let incl = WuFunctor {
        obj: objs.to_vec(),
        maps,
    };
    for n in 2..=c.n_max {
        let mut found = Vec::new();
        let mut err = None;
        s.for_each_tuple(n, true, |args| {
            if err.is_some() {
                return;
            }
            let vals: Vec<Val> = args.iter().map(|a| incl.apply_arg(&s, c, a)).collect();
            let v = c.p_vals(&vals).expect("total category");
            if vector::is_zero(&v) {
                return;
            }
            let (i, j) = (args[n - 1].src(), args[0].tgt());
            match space(i, j).coords(&v) {
                Some(co) => found.push((args.to_vec(), co)),
                None => err = Some(not_closed("tower", s.args_text(args))),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        for (args, co) in found {
            s.set_p(args, co);
        }
    }
    Ok((s, incl))
}

/// The quotient by a dg ideal given per hom, with the projection. The hom
/// basis of `c / I` is the set of coordinates outside the pivots of `I`.
/// The ideal conditions are assumed, not checked.
pub fn quotient_category(
    c: &FinWuDgCat,
    ideal: &BTreeMap<(usize, usize), Subspace>,
) -> Result<(FinWuDgCat, WuFunctor), LimitError> {
    if c.partial {
        return Err(LimitError::Partial);
    }
    let f = c.field;
    let no = c.n_objects();
    let mut q = FinWuDgCat::new(f, c.objects.clone(), c.n_max);
    let sp = |x: usize, y: usize| ideal.get(&(x, y)).cloned().unwrap_or_else(|| Subspace::new(f, c.dim(x, y)));
    let mut keep = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for (&(x, y), h) in &c.homs {
        let s = sp(x, y);
        let cols = s.complement();
        let degrees = cols.iter().map(|&i| h.degrees[i]).collect();
        let names = cols.iter().map(|&i| h.names[i].clone()).collect();
        q.set_hom(x, y, HomSpace::zero_differential(degrees, names));
        // projection: reduce, then read off the complement coordinates
        let proj_cols: Vec<Vec<Scalar>> = (0..h.dim())
            .map(|i| {
                let r = s.reduce(&unit(f, h.dim(), i));
                cols.iter().map(|&k| r[k].clone()).collect()
            })
            .collect();
        maps.insert((x, y), SparseMatrix::from_columns(cols.len(), &proj_cols));
        keep.insert((x, y), cols);
    }
    let proj = WuFunctor {
        obj: (0..no).collect(),
        maps,
    };
    let lift = |x: usize, y: usize, i: usize| unit(f, c.dim(x, y), keep[&(x, y)][i]);
    for (&(x, y), cols) in &keep {
        let n = cols.len();
        let mut entries = Vec::new();
        for i in 0..n {
            let v = proj.apply(&q, x, y, &c.diff(x, y, &lift(x, y, i)));
            entries.extend(v.into_iter().enumerate().filter(|(_, s)| !s.is_zero()).map(|(r, s)| (r, i, s)));
        }
        q.homs.get_mut(&(x, y)).unwrap().d = SparseMatrix::from_entries(n, n, entries);
    }
    for x in 0..no {
        for y in 0..no {
            for z in 0..no {
                for a in 0..q.dim(y, z) {
                    for b in 0..q.dim(x, y) {
                        let v = c.compose(x, y, z, &lift(y, z, a), &lift(x, y, b)).expect("total category");
                        let w = proj.apply(&q, x, z, &v);
                        if !vector::is_zero(&w) {
                            q.set_comp(x, y, z, a, b, w);
                        }
                    }
                }
            }
        }
    }
    for x in 0..no {
        let u = proj.apply(&q, x, x, c.id(x));
        q.set_unit(x, u);
    }
    for n in 2..=c.n_max {
        let mut found = Vec::new();
        q.for_each_tuple(n, true, |args| {
            let vals: Vec<Val> = args
                .iter()
                .map(|a| match *a {
                    Arg::One(x) => c.arg_val(&Arg::One(x)),
                    Arg::Mor { src, tgt, idx } => c.arg_val(&Arg::Mor {
                        src,
                        tgt,
                        idx: keep[&(src, tgt)][idx],
                    }),
                })
                .collect();
            let v = c.p_vals(&vals).expect("total category");
            let (x, y) = (args[n - 1].src(), args[0].tgt());
            let w = proj.apply(&q, x, y, &v);
            if !vector::is_zero(&w) {
                found.push((args.to_vec(), w));
            }
        });
        for (args, w) in found {
            q.set_p(args, w);
        }
    }
    Ok((q, proj))
}

/// The smallest family of subspaces containing `gens` and closed under
/// `d` and composition with arbitrary morphisms on either side; with
/// `tower`, also under `p_n` with one argument in the ideal.
pub fn saturate_ideal(
    c: &FinWuDgCat,
    gens: &[(usize, usize, Vector)],
    tower: bool,
) -> BTreeMap<(usize, usize), Subspace> {
    let f = c.field;
    let no = c.n_objects();
    let mut ideal: BTreeMap<(usize, usize), Subspace> = c
        .homs
        .iter()
        .map(|(&k, h)| (k, Subspace::new(f, h.dim())))
        .collect();
    let mut work: Vec<(usize, usize, Vector)> = gens.to_vec();
    while let Some((x, y, v)) = work.pop() {
        if vector::is_zero(&v) {
            continue;
        }
        let Some(sp) = ideal.get_mut(&(x, y)) else {
            continue;
        };
        if !sp.insert(&v) {
            continue;
        }
        work.push((x, y, c.diff(x, y, &v)));
        for z in 0..no {
            for a in 0..c.dim(y, z) {
                let w = c.compose(x, y, z, &c.basis(y, z, a), &v).expect("total category");
                work.push((x, z, w));
            }
            for b in 0..c.dim(z, x) {
                let w = c.compose(z, x, y, &v, &c.basis(z, x, b)).expect("total category");
                work.push((z, y, w));
            }
        }
        if tower {
            for (tx, ty, w) in tower_images(c, x, y, &v) {
                work.push((tx, ty, w));
            }
        }
    }
    ideal
}

/// `p_n(…, v, …)` for every position of `v` and basis or unit arguments
/// elsewhere, `2 ≤ n ≤ n_max`.
pub fn tower_images(c: &FinWuDgCat, x: usize, y: usize, v: &[Scalar]) -> Vec<(usize, usize, Vector)> {
    let mut out = Vec::new();
    let terms: Vec<(usize, Scalar)> =
        v.iter().enumerate().filter(|(_, s)| !s.is_zero()).map(|(i, s)| (i, s.clone())).collect();
    if terms.is_empty() {
        return out;
    }
    for n in 2..=c.n_max {
        c.for_each_tuple(n, false, |args| {
            for pos in 0..n {
                if args[pos] != (Arg::Mor { src: x, tgt: y, idx: terms[0].0 }) {
                    continue;
                }
                if args.iter().all(|a| !a.is_one()) {
                    continue;
                }
                let mut vals: Vec<Val> = args.iter().map(|a| c.arg_val(a)).collect();
                vals[pos] = Val {
                    src: x,
                    tgt: y,
                    degree: c.degree(x, y, terms[0].0),
                    unit: c.field.zero(),
                    vec: vector::to_field(v, c.field),
                };
                let w = c.p_vals(&vals).expect("total category");
                out.push((args[n - 1].src(), args[0].tgt(), w));
            }
        });
    }
    out
}

#[derive(Clone, Debug)]
pub struct Equalizer {
    pub cat: FinWuDgCat,
    pub incl: WuFunctor,
}

/// `Eq(F, G)`: objects with `F(x) = G(x)` and morphisms with
/// `F(f) = G(f)`.
pub fn equalizer(f: &WuFunctor, g: &WuFunctor, c: &FinWuDgCat, d: &FinWuDgCat) -> Result<Equalizer, LimitError> {
    if f.obj.len() != c.n_objects() || g.obj.len() != c.n_objects() {
        return Err(LimitError::Mismatch);
    }
    let objs: Vec<usize> = (0..c.n_objects()).filter(|&x| f.obj[x] == g.obj[x]).collect();
    let mut spaces = BTreeMap::new();
    for &x in &objs {
        for &y in &objs {
            let diff = f.map(c, d, x, y).sub(&g.map(c, d, x, y));
            spaces.insert((x, y), homogeneous_kernel(&diff, &c.hom(x, y).degrees, c.field));
        }
    }
    let (cat, incl) = sub_category(c, &objs, &spaces)?;
    Ok(Equalizer { cat, incl })
}

/// The unique `M: T → Eq` with `incl ∘ M = H`, if `H` factors.
pub fn factor_through_sub(h: &WuFunctor, t: &FinWuDgCat, c: &FinWuDgCat, sub: &FinWuDgCat, incl: &WuFunctor) -> Option<WuFunctor> {
    let obj: Option<Vec<usize>> = h.obj.iter().map(|y| incl.obj.iter().position(|x| x == y)).collect();
    let obj = obj?;
    let mut maps = BTreeMap::new();
    for &(x, y) in t.homs.keys() {
        let (i, j) = (obj[x], obj[y]);
        let inc = incl.map(sub, c, i, j);
        let cols: Vec<Vector> = inc.transpose().to_dense();
        let sp = Subspace::spanned(c.field, c.dim(h.obj[x], h.obj[y]), cols);
        let hm = h.map(t, c, x, y);
        let mut out_cols = Vec::new();
        for k in 0..t.dim(x, y) {
            let v = hm.apply(&t.basis(x, y, k));
            out_cols.push(sp.coords(&v)?);
        }
        maps.insert((x, y), SparseMatrix::from_columns(sub.dim(i, j), &out_cols));
    }
    Some(WuFunctor { obj, maps })
}

#[derive(Clone, Debug)]
pub struct Product {
    pub cat: FinWuDgCat,
    pub projections: Vec<WuFunctor>,
    /// the factor objects of each product object
    pub tuples: Vec<Vec<usize>>,
}

fn tuple_name(parts: Vec<String>) -> String {
    if parts.len() == 1 {
        parts.into_iter().next().unwrap()
    } else {
        format!("({})", parts.join(","))
    }
}

pub fn product(cats: &[&FinWuDgCat]) -> Result<Product, LimitError> {
    assert!(!cats.is_empty(), "empty product");
    if cats.iter().any(|c| c.partial) {
        return Err(LimitError::Partial);
    }
    let field = cats[0].field;
    let k = cats.len();
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for c in cats {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..c.n_objects()).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    let names = tuples
        .iter()
        .map(|t| tuple_name((0..k).map(|j| cats[j].objects[t[j]].clone()).collect()))
        .collect();
    let n_max = cats.iter().map(|c| c.n_max).max().unwrap();
    let mut p = FinWuDgCat::new(field, names, n_max);
    let offset = |u: &[usize], v: &[usize], j: usize| (0..j).map(|i| cats[i].dim(u[i], v[i])).sum::<usize>();
    let nobj = tuples.len();
    for u in 0..nobj {
        for v in 0..nobj {
            let (tu, tv) = (&tuples[u], &tuples[v]);
            let mut degrees = Vec::new();
            let mut names = Vec::new();
            let mut entries = Vec::new();
            for j in 0..k {
                let h = cats[j].hom(tu[j], tv[j]);
                let off = degrees.len();
                degrees.extend_from_slice(&h.degrees);
                names.extend(h.names.iter().map(|s| if k == 1 { s.clone() } else { format!("{s}[{j}]") }));
                entries.extend(h.d.entries().map(|(r, c, s)| (r + off, c + off, s.clone())));
            }
            let n = degrees.len();
            p.set_hom(u, v, HomSpace::new(degrees, names, SparseMatrix::from_entries(n, n, entries)));
        }
    }
    for u in 0..nobj {
        for v in 0..nobj {
            for w in 0..nobj {
                let (tu, tv, tw) = (&tuples[u], &tuples[v], &tuples[w]);
                for j in 0..k {
                    let c = cats[j];
                    let (oa, ob, oc) = (offset(tv, tw, j), offset(tu, tv, j), offset(tu, tw, j));
                    for a in 0..c.dim(tv[j], tw[j]) {
                        for b in 0..c.dim(tu[j], tv[j]) {
                            let r = c.compose_basis(tu[j], tv[j], tw[j], a, b).unwrap();
                            if vector::is_zero(&r) {
                                continue;
                            }
                            let mut out = p.zero(u, w);
                            out[oc..oc + r.len()].clone_from_slice(&r);
                            p.set_comp(u, v, w, oa + a, ob + b, out);
                        }
                    }
                }
            }
        }
    }
    for u in 0..nobj {
        let mut id = Vec::new();
        for j in 0..k {
            id.extend(cats[j].id(tuples[u][j]).iter().cloned());
        }
        p.set_unit(u, id);
    }
    // p_n on tuples whose morphisms all lie in factor j; other factors
    // see only units and vanish unless every argument is a unit
    for n in 2..=n_max {
        let mut found = Vec::new();
        p.for_each_tuple(n, true, |args| {
            let mut objs: Vec<usize> = args.iter().map(Arg::tgt).collect();
            objs.push(args[n - 1].src());
            let (x, y) = (objs[n], objs[0]);
            let mut out = p.zero(x, y);
            let mut any = false;
            for j in 0..k {
                let c = cats[j];
                let mut fa = Vec::with_capacity(n);
                let mut ok = true;
                for a in args {
                    match *a {
                        Arg::One(o) => fa.push(Arg::One(tuples[o][j])),
                        Arg::Mor { src, tgt, idx } => {
                            let off = offset(&tuples[src], &tuples[tgt], j);
                            let dj = c.dim(tuples[src][j], tuples[tgt][j]);
                            if idx < off || idx >= off + dj {
                                ok = false;
                                break;
                            }
                            fa.push(Arg::Mor {
                                src: tuples[src][j],
                                tgt: tuples[tgt][j],
                                idx: idx - off,
                            });
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let r = c.p_basis(&fa).unwrap();
                if !vector::is_zero(&r) {
                    let oc = offset(&tuples[x], &tuples[y], j);
                    out[oc..oc + r.len()].clone_from_slice(&r);
                    any = true;
                }
            }
            if any {
                found.push((args.to_vec(), out));
            }
        });
        for (args, v) in found {
            p.set_p(args, v);
        }
    }
    let projections = (0..k)
        .map(|j| {
            let maps = p
                .homs
                .keys()
                .map(|&(u, v)| {
                    let off = offset(&tuples[u], &tuples[v], j);
                    let dj = cats[j].dim(tuples[u][j], tuples[v][j]);
                    let m = SparseMatrix::from_entries(
                        dj,
                        p.dim(u, v),
                        (0..dj).map(|i| (i, off + i, field.one())),
                    );
                    ((u, v), m)
                })
                .collect();
            WuFunctor {
                obj: tuples.iter().map(|t| t[j]).collect(),
                maps,
            }
        })
        .collect();
    Ok(Product {
        cat: p,
        projections,
        tuples,
    })
}

/// The mediating functor `T → ∏ C_j` of a cone `H_j: T → C_j`.
pub fn pair(cones: &[WuFunctor], t: &FinWuDgCat, cats: &[&FinWuDgCat], prod: &Product) -> WuFunctor {
    let obj: Vec<usize> = (0..t.n_objects())
        .map(|x| {
            let tup: Vec<usize> = cones.iter().map(|h| h.obj[x]).collect();
            prod.tuples.iter().position(|u| *u == tup).expect("product object")
        })
        .collect();
    let maps = t
        .homs
        .keys()
        .map(|&(x, y)| {
            let mut entries = Vec::new();
            let mut off = 0;
            for (j, h) in cones.iter().enumerate() {
                let m = h.map(t, cats[j], x, y);
                entries.extend(m.entries().map(|(r, c, s)| (r + off, c, s.clone())));
                off += m.rows();
            }
            ((x, y), SparseMatrix::from_entries(off, t.dim(x, y), entries))
        })
        .collect();
    WuFunctor { obj, maps }
}

#[derive(Clone, Debug)]
pub struct Coproduct {
    pub cat: FinWuDgCat,
    pub injections: Vec<WuFunctor>,
    pub offsets: Vec<usize>,
}

pub fn coproduct(cats: &[&FinWuDgCat]) -> Result<Coproduct, LimitError> {
    assert!(!cats.is_empty(), "empty coproduct");
    if cats.iter().any(|c| c.partial) {
        return Err(LimitError::Partial);
    }
    let field = cats[0].field;
    let mut offsets = Vec::new();
    let mut names = Vec::new();
    for (j, c) in cats.iter().enumerate() {
        offsets.push(names.len());
        names.extend(c.objects.iter().map(|o| if cats.len() == 1 { o.clone() } else { format!("{o}[{j}]") }));
    }
    let n_max = cats.iter().map(|c| c.n_max).max().unwrap();
    let mut out = FinWuDgCat::new(field, names, n_max);
    let mut injections = Vec::new();
    for (j, c) in cats.iter().enumerate() {
        let o = offsets[j];
        for (&(x, y), h) in &c.homs {
            out.set_hom(x + o, y + o, h.clone());
        }
        for (&(x, y, z), t) in &c.comp {
            for (&(a, b), v) in t {
                out.set_comp(x + o, y + o, z + o, a, b, v.clone());
            }
        }
        for x in 0..c.n_objects() {
            out.set_unit(x + o, c.id(x).clone());
        }
        for (args, v) in &c.ptower {
            let shifted = args
                .iter()
                .map(|a| match *a {
                    Arg::One(x) => Arg::One(x + o),
                    Arg::Mor { src, tgt, idx } => Arg::Mor {
                        src: src + o,
                        tgt: tgt + o,
                        idx,
                    },
                })
                .collect();
            out.set_p(shifted, v.clone());
        }
        injections.push(WuFunctor {
            obj: (0..c.n_objects()).map(|x| x + o).collect(),
            maps: c.homs.iter().map(|(&k, h)| (k, SparseMatrix::identity(h.dim()))).collect(),
        });
    }
    Ok(Coproduct {
        cat: out,
        injections,
        offsets,
    })
}

/// The mediating functor `∐ C_j → T` of a cocone `H_j: C_j → T`.
pub fn copair(cocone: &[WuFunctor], co: &Coproduct) -> WuFunctor {
    let mut obj = Vec::new();
    let mut maps = BTreeMap::new();
    for (j, h) in cocone.iter().enumerate() {
        obj.extend_from_slice(&h.obj);
        let o = co.offsets[j];
        for (&(x, y), m) in &h.maps {
            maps.insert((x + o, y + o), m.clone());
        }
    }
    WuFunctor { obj, maps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::construct::{dual_numbers, ground_field, interval_category, inverse, random_wu_category, ChainSpace, EndModel};
    use crate::dgcat::{check_functor, check_wu_axioms};

    fn spaces(field: Field) -> Vec<ChainSpace> {
        let acyclic = SparseMatrix::from_entries(2, 2, [(1, 0, field.one())]);
        vec![
            ChainSpace::new(vec![0, 0], SparseMatrix::zeros(2, 2)),
            ChainSpace::new(vec![-1, 0], acyclic.clone()),
            ChainSpace::new(vec![-1, 0], acyclic),
        ]
    }

    /// `f ↦ u_y f u_x⁻¹`, with `σ` on objects.
    fn conjugation(m: &EndModel, us: &[SparseMatrix], sigma: &[usize]) -> WuFunctor {
        let c = &m.cat;
        let maps = c
            .homs
            .keys()
            .map(|&(x, y)| {
                let ux_inv = inverse(&us[x]);
                let cols: Vec<Vector> = (0..c.dim(x, y))
                    .map(|i| m.vec_of(sigma[x], sigma[y], &us[y].mul(&m.mat_of(x, y, &c.basis(x, y, i))).mul(&ux_inv)))
                    .collect();
                ((x, y), SparseMatrix::from_columns(c.dim(sigma[x], sigma[y]), &cols))
            })
            .collect();
        WuFunctor { obj: sigma.to_vec(), maps }
    }

    fn jordan(field: Field) -> Vec<SparseMatrix> {
        let f = |rows: &[&[i64]]| SparseMatrix::from_int_rows(rows).to_field(field);
        vec![f(&[&[1, 1], &[0, 1]]), f(&[&[2, 0], &[0, 2]]), SparseMatrix::identity(2)]
    }

    /// Number of `v ∈ C(x, y)` over `F_3` with `F v = G v`, by enumeration.
    fn brute_count(f: &WuFunctor, g: &WuFunctor, c: &FinWuDgCat, x: usize, y: usize) -> usize {
        let n = c.dim(x, y);
        let (mf, mg) = (f.map(c, c, x, y), g.map(c, c, x, y));
        let mut count = 0;
        for code in 0..3usize.pow(n as u32) {
            let v: Vector = (0..n).map(|k| c.field.from_i64(((code / 3usize.pow(k as u32)) % 3) as i64)).collect();
            if mf.apply(&v) == mg.apply(&v) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn equalizer_of_equal_functors_is_everything() {
        let c = random_wu_category(1, Field::Rational, &[1, 1], 3).unwrap();
        let id = WuFunctor::identity(c.cat());
        let e = equalizer(&id, &id, c.cat(), c.cat()).unwrap();
        assert_eq!(e.cat.total_dim(), c.cat().total_dim());
        assert!(check_wu_axioms(&e.cat, 3).passed());
    }

    #[test]
    fn equalizer_matches_enumeration() {
        let field = Field::Prime(3);
        let m = EndModel::new(field, &["a", "b", "c"], spaces(field), 2);
        let c = &m.cat;
        let id = WuFunctor::identity(c);
        let g = conjugation(&m, &jordan(field), &[0, 1, 2]);
        assert!(check_functor(&g, c, c, 2).passed());
        let e = equalizer(&id, &g, c, c).unwrap();
        assert!(check_functor(&e.incl, &e.cat, c, 2).passed());
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(3usize.pow(e.cat.dim(x, y) as u32), brute_count(&id, &g, c, x, y), "({x},{y})");
            }
        }
        // the commutant of a Jordan block
        assert_eq!(e.cat.dim(0, 0), 2);
        assert_eq!(e.cat.dim(1, 0), 0);

        let swap = conjugation(&m, &[SparseMatrix::identity(2), SparseMatrix::identity(2), SparseMatrix::identity(2)], &[0, 2, 1]);
        assert!(check_functor(&swap, c, c, 2).passed());
        let e2 = equalizer(&id, &swap, c, c).unwrap();
        assert_eq!(e2.cat.objects, vec!["a".to_string()]);
        assert_eq!(e2.cat.dim(0, 0), 4);
    }

    #[test]
    fn equalizer_universal_property() {
        let field = Field::Rational;
        let m = EndModel::new(field, &["a", "b", "c"], spaces(field), 2);
        let c = &m.cat;
        let id = WuFunctor::identity(c);
        let g = conjugation(&m, &jordan(field), &[0, 1, 2]);
        let e = equalizer(&id, &g, c, c).unwrap();
        // the point k → C at a, sending 1 to id_a
        let k = ground_field(field);
        let mut maps = BTreeMap::new();
        maps.insert((0, 0), SparseMatrix::from_columns(4, &[c.id(0).clone()]));
        let h = WuFunctor { obj: vec![0], maps };
        assert!(check_functor(&h, &k, c, 2).passed());
        let med = factor_through_sub(&h, &k, c, &e.cat, &e.incl).unwrap();
        assert!(med.then(&e.incl, &k, &e.cat, c).same_as(&h, &k, c));
        assert!(check_functor(&med, &k, &e.cat, 2).passed());
        // a morphism outside the equalizer does not factor
        let mut maps = BTreeMap::new();
        maps.insert((0, 0), SparseMatrix::from_columns(4, &[c.basis(0, 0, 2)]));
        let bad = WuFunctor { obj: vec![0], maps };
        assert!(factor_through_sub(&bad, &k, c, &e.cat, &e.incl).is_none());
        // incl itself factors through the identity
        let self_med = factor_through_sub(&e.incl, &e.cat, c, &e.cat, &e.incl).unwrap();
        assert!(self_med.same_as(&WuFunctor::identity(&e.cat), &e.cat, &e.cat));
    }

    #[test]
    fn product_and_coproduct() {
        let field = Field::Rational;
        let a = interval_category(field);
        let b = dual_numbers(field, -1);
        let w = random_wu_category(2, field, &[1, 1], 3).unwrap();
        let p = product(&[&a, &b, w.cat()]).unwrap();
        assert_eq!(p.cat.n_objects(), 4);
        assert!(check_wu_axioms(&p.cat, 3).passed());
        for (j, c) in [&a, &b, w.cat()].into_iter().enumerate() {
            assert!(check_functor(&p.projections[j], &p.cat, c, 3).passed());
        }
        let x = p.tuples.iter().position(|t| t == &vec![0, 0, 0]).unwrap();
        let y = p.tuples.iter().position(|t| t == &vec![1, 0, 1]).unwrap();
        assert_eq!(p.cat.dim(x, y), a.dim(0, 1) + b.dim(0, 0) + w.cat().dim(0, 1));
        let med = pair(&p.projections, &p.cat, &[&a, &b, w.cat()], &p);
        assert!(med.same_as(&WuFunctor::identity(&p.cat), &p.cat, &p.cat));
        let single = product(&[&a]).unwrap();
        assert_eq!(single.cat.objects, a.objects);
        assert_eq!(single.cat.total_dim(), a.total_dim());

        let co = coproduct(&[&a, w.cat()]).unwrap();
        assert_eq!(co.cat.n_objects(), 4);
        assert_eq!(co.cat.dim(0, 2), 0);
        assert!(check_wu_axioms(&co.cat, 3).passed());
        for (j, c) in [&a, w.cat()].into_iter().enumerate() {
            assert!(check_functor(&co.injections[j], c, &co.cat, 3).passed());
        }
        let med = copair(&co.injections, &co);
        assert!(med.same_as(&WuFunctor::identity(&co.cat), &co.cat, &co.cat));
    }

    #[test]
    fn quotient_by_boundary() {
        let field = Field::Rational;
        let c = interval_category(field);
        let ideal = saturate_ideal(&c, &[(0, 1, c.basis(0, 1, 1))], true);
        assert_eq!(ideal[&(0, 1)].rank(), 1);
        let (q, proj) = quotient_category(&c, &ideal).unwrap();
        assert_eq!(q.dim(0, 1), 1);
        assert_eq!(q.hom(0, 1).names, vec!["u".to_string()]);
        assert!(check_wu_axioms(&q, 1).passed());
        assert!(check_functor(&proj, &c, &q, 1).passed());
        let all = saturate_ideal(&c, &[(0, 1, c.basis(0, 1, 0))], true);
        assert_eq!(all[&(0, 1)].rank(), 2);
        assert_eq!(all[&(0, 0)].rank(), 0);
    }

    #[test]
    fn sub_category_rejects_non_closed() {
        let field = Field::Rational;
        let c = interval_category(field);
        let mut spaces = BTreeMap::new();
        spaces.insert((0, 1), Subspace::spanned(field, 2, [c.basis(0, 1, 0)]));
        spaces.insert((0, 0), Subspace::full(field, 1));
        spaces.insert((1, 1), Subspace::full(field, 1));
        assert!(matches!(sub_category(&c, &[0, 1], &spaces), Err(LimitError::NotClosed { .. })));
    }
}
