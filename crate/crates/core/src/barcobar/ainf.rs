//! Unital A∞ maps `A → D` against functors `Cobar₊(Bar₊(A)) → D` that
//! respect the towers, `D` strictly unital.
//!
//! A map with Taylor coefficients `f_n` gives the functor
//! `F(s⁻¹[a₁|…|a_n]) = (−1)^{n−1+Σ_i (n−i)|a_i|} f_n(a₁, …, a_n)`, extended
//! multiplicatively over `⊠`. `F` is a chain map exactly when `f`
//! satisfies
//!
//! ```text
//! d f_n(a) − (−1)^{n−1} Σ_i (−1)^{|a_1|+…+|a_{i−1}|} f_n(…, da_i, …)
//!   = Σ_r (−1)^{r−1} f_{n−1}(…, a_r a_{r+1}, …)
//!   − Σ_l (−1)^{l−1} (−1)^{(1−n+l)(|a_1|+…+|a_l|)} f_l(a_1..a_l) f_{n−l}(a_{l+1}..a_n),
//! ```
//!
//! and it respects the towers exactly when `f` is unital.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::tower::weak_unit_category;
use super::{chains, pm, BarCobarError, CobarCategory, Letter, Source};
use crate::dgcat::{check_functor, check_wu_axioms, vector, FinWuDgCat, Val, Vector, WuFunctor};
use crate::exactlinalg::{kernel_basis, select_columns, solve, Field, Scalar, SparseMatrix};

/// Taylor coefficients on composable basis tuples; absent tuples are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AinfMap {
    pub obj: Vec<usize>,
    pub n_max: usize,
    pub taylor: BTreeMap<Vec<Letter>, Vector>,
}

impl AinfMap {
    /// A strict dg functor as an A∞ map with `f_n = 0` for `n ≥ 2`.
    pub fn strict(a: &FinWuDgCat, d: &FinWuDgCat, g: &WuFunctor, n_max: usize) -> Self {
        let mut taylor = BTreeMap::new();
        for (&(x, y), h) in &a.homs {
            for idx in 0..h.dim() {
                taylor.insert(vec![Letter { src: x, tgt: y, idx }], g.apply_basis(a, d, x, y, idx));
            }
        }
        AinfMap {
            obj: g.obj.clone(),
            n_max,
            taylor,
        }
    }

    pub fn get(&self, d: &FinWuDgCat, w: &[Letter]) -> Vector {
        let (x, y) = (self.obj[w[w.len() - 1].src], self.obj[w[0].tgt]);
        self.taylor.get(w).cloned().unwrap_or_else(|| d.zero(x, y))
    }

    /// Drops zero coefficients.
    pub fn normalized(&self) -> AinfMap {
        AinfMap {
            obj: self.obj.clone(),
            n_max: self.n_max,
            taylor: self
                .taylor
                .iter()
                .filter(|(_, v)| !vector::is_zero(v))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    fn eval(&self, d: &FinWuDgCat, x: usize, y: usize, args: &[Vec<(Letter, Scalar)>]) -> Vector {
        let mut out = d.zero(self.obj[x], self.obj[y]);
        if args.iter().any(Vec::is_empty) {
            return out;
        }
        let n = args.len();
        let mut idx = vec![0usize; n];
        loop {
            let w: Vec<Letter> = (0..n).map(|i| args[i][idx[i]].0).collect();
            let mut c = d.field.one();
            for i in 0..n {
                c = &c * &args[i][idx[i]].1;
            }
            vector::add_scaled(&mut out, &self.get(d, &w), &c);
            let mut k = n;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < args[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

fn terms(v: &[Scalar], src: usize, tgt: usize) -> Vec<(Letter, Scalar)> {
    v.iter()
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .map(|(idx, s)| (Letter { src, tgt, idx }, s.clone()))
        .collect()
}

/// Left side minus right side of the A∞ relation on a composable tuple.
pub fn ainf_map_residual(a: &FinWuDgCat, d: &FinWuDgCat, f: &AinfMap, args: &[Letter]) -> Vector {
    let fd = d.field;
    let n = args.len();
    let (x, y) = (args[n - 1].src, args[0].tgt);
    let single: Vec<Vec<(Letter, Scalar)>> = args.iter().map(|l| vec![(*l, fd.one())]).collect();
    let mut res = d.diff(f.obj[x], f.obj[y], &f.get(d, args));
    let degs: Vec<i32> = args.iter().map(|l| a.degree(l.src, l.tgt, l.idx)).collect();
    let mut before = 0;
    for i in 0..n {
        let l = args[i];
        let dl = terms(&a.diff(l.src, l.tgt, &a.basis(l.src, l.tgt, l.idx)), l.src, l.tgt);
        if !dl.is_empty() {
            let mut vs = single.clone();
            vs[i] = dl;
            let w = f.eval(d, x, y, &vs);
            vector::add_scaled(&mut res, &w, &pm(fd, n as i32 + before));
        }
        before += degs[i];
    }
    for r in 1..n {
        let (u, v) = (args[r - 1], args[r]);
        let uv = a.compose_basis(v.src, u.src, u.tgt, u.idx, v.idx).expect("total composition");
        let mut vs = single[..r - 1].to_vec();
        vs.push(terms(&uv, v.src, u.tgt));
        vs.extend_from_slice(&single[r + 1..]);
        let w = f.eval(d, x, y, &vs);
        vector::add_scaled(&mut res, &w, &pm(fd, r as i32));
    }
    let mut prefix = 0;
    for l in 1..n {
        prefix += degs[l - 1];
        let mid = args[l - 1].src;
        let w = d
            .compose(f.obj[x], f.obj[mid], f.obj[y], &f.get(d, &args[..l]), &f.get(d, &args[l..]))
            .expect("total composition");
        let e = (l as i32 - 1) + (1 - n as i32 + l as i32) * prefix;
        vector::add_scaled(&mut res, &w, &pm(fd, e));
    }
    res
}

/// The first failure of `f_1(1) = 1` or `f_n(…, 1, …) = 0` for `n ≥ 2`.
pub fn unitality_violation(src: &Source, d: &FinWuDgCat, f: &AinfMap) -> Option<String> {
    for (x, id) in src.ids.iter().enumerate() {
        let v = f.get(d, &[*id]);
        if &v != d.id(f.obj[x]) && !vector::is_zero(&vector::sub(&v, d.id(f.obj[x]))) {
            return Some(format!("f_1({}) = {}", src.name(id), d.vec_text(f.obj[x], f.obj[x], &v)));
        }
    }
    for (w, v) in &f.taylor {
        if w.len() >= 2 && w.iter().any(|l| src.is_id(l)) && !vector::is_zero(v) {
            let names: Vec<&str> = w.iter().map(|l| src.name(l)).collect();
            let (x, y) = (f.obj[w[w.len() - 1].src], f.obj[w[0].tgt]);
            return Some(format!("f_{}({}) = {}", w.len(), names.join(", "), d.vec_text(x, y, v)));
        }
    }
    None
}

fn bar_sign(src: &Source, w: &[Letter]) -> Scalar {
    let n = w.len() as i32;
    let mut e = n - 1;
    for (i, l) in w.iter().enumerate() {
        e += (n - 1 - i as i32) * src.degree(l);
    }
    pm(src.cat.field, e)
}

fn check_target(d: &FinWuDgCat) -> Result<(), BarCobarError> {
    let r = check_wu_axioms(d, 1);
    if !r.passed() || !r.strict || d.partial {
        return Err(BarCobarError::NotStrict(format!("target {}", d.objects.join(","))));
    }
    Ok(())
}

/// The functor of a unital A∞ map; needs `cc.len ≤ f.n_max`.
pub fn ainf_to_functor(cc: &CobarCategory, d: &FinWuDgCat, f: &AinfMap) -> Result<WuFunctor, BarCobarError> {
    let src = cc.source();
    if cc.len > f.n_max {
        return Err(BarCobarError::Precondition(format!(
            "words of {} letters need f_n through n = {}, got {}",
            cc.len, cc.len, f.n_max
        )));
    }
    if let Some(v) = unitality_violation(src, d, f) {
        return Err(BarCobarError::Precondition(format!("not unital: {v}")));
    }
    let mut maps = BTreeMap::new();
    for (&(x, y), ws) in &cc.words {
        let mut cols = Vec::with_capacity(ws.len());
        for i in 0..ws.len() {
            let c = cc.cobar_word(x, y, i);
            let mut objs = vec![f.obj[c[0][0].tgt]];
            let vs: Vec<Vector> = c
                .iter()
                .map(|w| {
                    objs.push(f.obj[w[w.len() - 1].src]);
                    vector::scale(&f.get(d, w), &bar_sign(src, w))
                })
                .collect();
            let refs: Vec<&[Scalar]> = vs.iter().map(|v| v.as_slice()).collect();
            cols.push(d.compose_chain(&objs, &refs).expect("total composition"));
        }
        maps.insert((x, y), SparseMatrix::from_columns(d.dim(f.obj[x], f.obj[y]), &cols));
    }
    Ok(WuFunctor {
        obj: f.obj.clone(),
        maps,
    })
}

/// The first failure of `F` as a functor respecting the towers: degrees,
/// chain map, composition, units, and `F(p_n(…)) = p_n(F…)` on every
/// stored tower entry.
pub fn functor_violation(cc: &CobarCategory, d: &FinWuDgCat, g: &WuFunctor) -> Option<String> {
    let c = &cc.cat;
    if let Some(w) = check_functor(g, c, d, 1).first_failure() {
        return Some(w);
    }
    for (args, v) in &c.ptower {
        let (x, y) = (args[args.len() - 1].src(), args[0].tgt());
        let lhs = g.apply(d, x, y, v);
        let vals: Vec<Val> = args.iter().map(|t| g.apply_arg(c, d, t)).collect();
        let rhs = d.p_vals(&vals).expect("total");
        if !vector::is_zero(&vector::sub(&lhs, &rhs)) {
            return Some(format!("F(p{}) = {}", c.args_text(args), d.vec_text(g.obj[x], g.obj[y], &lhs)));
        }
    }
    None
}

/// Taylor coefficients of a functor out of `Cobar₊(Bar₊(A))`, through
/// `n = cc.len`; rejects functors that do not respect the towers.
pub fn functor_to_ainf(cc: &CobarCategory, d: &FinWuDgCat, g: &WuFunctor) -> Result<AinfMap, BarCobarError> {
    check_target(d)?;
    if let Some(w) = functor_violation(cc, d, g) {
        return Err(BarCobarError::Precondition(format!("not a functor respecting the towers: {w}")));
    }
    let src = cc.source();
    let mut taylor = BTreeMap::new();
    for (i, w) in cc.bar.words.iter().enumerate() {
        let (x, y, k) = cc.index[&vec![i]];
        let v = g.apply_basis(&cc.cat, d, x, y, k);
        taylor.insert(w.clone(), vector::scale(&v, &bar_sign(src, w)));
    }
    let f = AinfMap {
        obj: g.obj.clone(),
        n_max: cc.len,
        taylor,
    };
    if let Some(v) = unitality_violation(src, d, &f) {
        return Err(BarCobarError::Precondition(format!("not unital: {v}")));
    }
    Ok(f)
}

#[derive(Clone, Debug, Serialize)]
pub struct Correspondence {
    pub len: usize,
    pub n_max: usize,
    pub coefficients: usize,
    pub ainf_checked: usize,
    pub ainf_witness: Option<String>,
    pub functor_witness: Option<String>,
    pub round_trip: bool,
    #[serde(skip)]
    pub functor: WuFunctor,
}

impl Correspondence {
    pub fn passed(&self) -> bool {
        self.ainf_witness.is_none() && self.functor_witness.is_none() && self.round_trip
    }
}

/// Checks the A∞ relations of `f`, builds its functor on the truncation at
/// `len = f.n_max`, checks it, and reads the coefficients back.
pub fn unital_ainf_correspondence(a: &FinWuDgCat, d: &FinWuDgCat, f: &AinfMap) -> Result<Correspondence, BarCobarError> {
    let src = Source::new(a)?;
    check_target(d)?;
    if let Some(v) = unitality_violation(&src, d, f) {
        return Err(BarCobarError::Precondition(format!("not unital: {v}")));
    }
    let len = f.n_max;
    let mut ainf_checked = 0;
    let mut ainf_witness = None;
    for w in chains(&src, len) {
        ainf_checked += 1;
        let r = ainf_map_residual(a, d, f, &w);
        if !vector::is_zero(&r) {
            let (x, y) = (f.obj[w[w.len() - 1].src], f.obj[w[0].tgt]);
            ainf_witness.get_or_insert(format!("at ({}): {}", src.bar_name(&w), d.vec_text(x, y, &r)));
        }
    }
    let cc = weak_unit_category(a, len, len)?;
    let functor = ainf_to_functor(&cc, d, f)?;
    let functor_witness = functor_violation(&cc, d, &functor);
    let round_trip = match functor_to_ainf(&cc, d, &functor) {
        Ok(back) => back.normalized() == f.normalized(),
        Err(_) => false,
    };
    Ok(Correspondence {
        len,
        n_max: f.n_max,
        coefficients: f.normalized().taylor.len(),
        ainf_checked,
        ainf_witness,
        functor_witness,
        round_trip,
        functor,
    })
}

fn random_scalar<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    field.from_i64(rng.gen_range(-2..=2))
}

/// A random unital A∞ map `A → D` over the object map `obj`, for `A` with
/// zero differential: `f_1` is the unit plus random boundaries, and each
/// `f_n` solves its relation with a random cycle added. Fails when an
/// obstruction is not a boundary in `D`.
pub fn random_unital_ainf(
    a: &FinWuDgCat,
    d: &FinWuDgCat,
    obj: Vec<usize>,
    n_max: usize,
    seed: u64,
) -> Result<AinfMap, BarCobarError> {
    let src = Source::new(a)?;
    check_target(d)?;
    if a.homs.values().any(|h| !h.d.is_zero()) {
        return Err(BarCobarError::Precondition("random A∞ maps need a zero differential on A".into()));
    }
    let fd = d.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = AinfMap {
        obj,
        n_max,
        taylor: BTreeMap::new(),
    };
    for w in chains(&src, n_max) {
        let (x, y) = (f.obj[w[w.len() - 1].src], f.obj[w[0].tgt]);
        if w.len() == 1 && src.is_id(&w[0]) {
            f.taylor.insert(w, d.id(x).clone());
            continue;
        }
        if w.iter().any(|l| src.is_id(l)) {
            continue;
        }
        let deg: i32 = w.iter().map(|l| src.degree(l)).sum::<i32>() + 1 - w.len() as i32;
        let h = d.hom(x, y);
        let cols = h.in_degree(deg);
        let m = select_columns(&h.d, &cols);
        let mut value = d.zero(x, y);
        if w.len() == 1 {
            let below = h.in_degree(deg - 1);
            let mut u = d.zero(x, y);
            for &i in &below {
                u[i] = random_scalar(&mut rng, fd);
            }
            value = d.diff(x, y, &u);
        } else {
            f.taylor.insert(w.clone(), d.zero(x, y));
            let target = vector::scale(&ainf_map_residual(a, d, &f, &w), &fd.from_i64(-1));
            let Some(sol) = solve(&m, &target) else {
                return Err(BarCobarError::Precondition(format!(
                    "obstruction at ({}) is not a boundary",
                    src.bar_name(&w)
                )));
            };
            for (k, &i) in cols.iter().enumerate() {
                value[i] = sol[k].to_field(fd);
            }
            for z in kernel_basis(&m) {
                let s = random_scalar(&mut rng, fd);
                for (k, &i) in cols.iter().enumerate() {
                    value[i] = &value[i] + &(&s * &z[k].to_field(fd));
                }
            }
        }
        f.taylor.insert(w, value);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::construct::{dual_numbers, interval_category, padded_end};
    use crate::dgcat::WuFunctor;

    fn end_target(field: Field) -> FinWuDgCat {
        padded_end(field)
    }

    #[test]
    fn identity_map_gives_the_projection() {
        let a = dual_numbers(Field::Rational, 0);
        let f = AinfMap::strict(&a, &a, &WuFunctor::identity(&a), 3);
        let r = unital_ainf_correspondence(&a, &a, &f).unwrap();
        assert!(r.passed(), "{r:#?}");
        let cc = weak_unit_category(&a, 3, 3).unwrap();
        assert_eq!(r.functor, super::super::projection::projection(&cc));
    }

    #[test]
    fn random_maps_round_trip() {
        let a = dual_numbers(Field::Rational, 0);
        for field in [Field::Rational, Field::prime()] {
            let a = a.to_field(field);
            let d = end_target(field);
            let mut nontrivial = 0;
            for seed in 0..6 {
                let f = random_unital_ainf(&a, &d, vec![0], 3, seed).unwrap();
                let x = Letter { src: 0, tgt: 0, idx: 1 };
                if !vector::is_zero(&f.get(&d, &[x, x, x])) {
                    nontrivial += 1;
                }
                let r = unital_ainf_correspondence(&a, &d, &f).unwrap();
                assert!(r.passed(), "seed {seed}: {r:#?}");
            }
            assert!(nontrivial > 0);
        }
    }

    #[test]
    fn wrong_sign_breaks_the_chain_map() {
        let a = dual_numbers(Field::Rational, 0);
        let d = end_target(Field::Rational);
        let mut f = random_unital_ainf(&a, &d, vec![0], 3, 1).unwrap();
        let x = Letter { src: 0, tgt: 0, idx: 1 };
        let v = f.get(&d, &[x, x]);
        assert!(!vector::is_zero(&v));
        f.taylor.insert(vec![x, x], vector::scale(&v, &Scalar::int(-1)));
        let r = unital_ainf_correspondence(&a, &d, &f).unwrap();
        assert!(r.ainf_witness.is_some());
        assert!(r.functor_witness.is_some());
    }

    #[test]
    fn rejects_non_unital_data() {
        let a = dual_numbers(Field::Rational, 0);
        let d = end_target(Field::Rational);
        let mut f = random_unital_ainf(&a, &d, vec![0], 3, 2).unwrap();
        let one = Letter { src: 0, tgt: 0, idx: 0 };
        let x = Letter { src: 0, tgt: 0, idx: 1 };
        let mut v = d.zero(0, 0);
        v[1] = Scalar::int(1);
        f.taylor.insert(vec![one, x], v);
        let e = unital_ainf_correspondence(&a, &d, &f).unwrap_err();
        assert!(e.to_string().contains("f_2(1, x)"), "{e}");
        // a functor that sends [1|x] somewhere is outside the towers
        let g = random_unital_ainf(&a, &d, vec![0], 3, 2).unwrap();
        let cc = weak_unit_category(&a, 3, 3).unwrap();
        let mut functor = ainf_to_functor(&cc, &d, &g).unwrap();
        let w = cc.locate(&[vec![one, x]]).unwrap();
        let m = functor.maps.get_mut(&(0, 0)).unwrap();
        *m = m.add(&SparseMatrix::from_entries(m.rows(), m.cols(), [(1, w.2, Scalar::int(1))]));
        assert!(functor_to_ainf(&cc, &d, &functor).is_err());
    }

    #[test]
    fn two_object_strict_map() {
        let a = interval_category(Field::Rational);
        let f = AinfMap::strict(&a, &a, &WuFunctor::identity(&a), 3);
        let r = unital_ainf_correspondence(&a, &a, &f).unwrap();
        assert!(r.passed(), "{r:#?}");
    }
}
