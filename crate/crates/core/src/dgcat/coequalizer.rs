//! Coequalizers of good pairs (functors that are the identity on objects)
//! as hom-wise quotients.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::exactlinalg::SparseMatrix;

use super::category::FinWuDgCat;
use super::functor::WuFunctor;
use super::limits::{factor_through_sub, pair, product, quotient_category, sub_category, tower_images, LimitError};
use super::subspace::Subspace;
use super::vector::{self, Vector};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CoeqError {
    #[error("not a good pair: {0}; only pairs that are the identity on objects are supported")]
    NotGood(String),
    #[error("the given section does not split both functors: {0}")]
    BadSection(String),
    #[error("condition ({condition}) fails: {witness}")]
    Condition { condition: u8, witness: String },
    #[error(transparent)]
    Limit(#[from] LimitError),
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    /// the image of `F − G` is a two-sided ideal
    pub ideal: bool,
    /// `p_n` with one argument in the image stays in the image
    pub tower: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct GoodCoequalizer {
    pub cat: FinWuDgCat,
    pub proj: WuFunctor,
    pub ideal: BTreeMap<(usize, usize), Subspace>,
    /// conditions taken from the section rather than checked
    pub by_section: bool,
    pub conditions: Option<ConditionReport>,
}

/// `J(x, y) = span{F(f) − G(f)}` for basis `f ∈ A(x, y)`, together with
/// the generators labelled by `f`.
pub fn difference_image(
    f: &WuFunctor,
    g: &WuFunctor,
    a: &FinWuDgCat,
    b: &FinWuDgCat,
) -> (BTreeMap<(usize, usize), Subspace>, Vec<(usize, usize, String, Vector)>) {
    let mut ideal: BTreeMap<(usize, usize), Subspace> = b
        .homs
        .iter()
        .map(|(&k, h)| (k, Subspace::new(b.field, h.dim())))
        .collect();
    let mut gens = Vec::new();
    for (&(x, y), h) in &a.homs {
        for i in 0..h.dim() {
            let v = vector::sub(&f.apply_basis(a, b, x, y, i), &g.apply_basis(a, b, x, y, i));
            if vector::is_zero(&v) {
                continue;
            }
            ideal.entry((x, y)).or_insert_with(|| Subspace::new(b.field, v.len())).insert(&v);
            gens.push((x, y, h.names[i].clone(), v));
        }
    }
    (ideal, gens)
}

fn ensure_good(f: &WuFunctor, g: &WuFunctor, a: &FinWuDgCat, b: &FinWuDgCat) -> Result<(), CoeqError> {
    if a.n_objects() != b.n_objects() {
        return Err(CoeqError::NotGood("the categories have different objects".into()));
    }
    for x in 0..a.n_objects() {
        if f.obj[x] != x || g.obj[x] != x {
            return Err(CoeqError::NotGood(format!("object {} is moved", a.objects[x])));
        }
    }
    Ok(())
}

/// Checks both conditions on spanning sets: `u ∘ j`, `j ∘ u` for basis
/// morphisms `u` and generators `j = F(f) − G(f)`, and `p_n` with one
/// argument `j` and basis or unit arguments elsewhere.
pub fn check_conditions(f: &WuFunctor, g: &WuFunctor, a: &FinWuDgCat, b: &FinWuDgCat) -> ConditionReport {
    let (ideal, gens) = difference_image(f, g, a, b);
    let no = b.n_objects();
    let mut rep = ConditionReport {
        ideal: true,
        tower: true,
        checked: 0,
        witness: None,
    };
    let inside = |x: usize, y: usize, v: &[crate::exactlinalg::Scalar]| {
        ideal.get(&(x, y)).map_or(vector::is_zero(v), |s| s.contains(v))
    };
    for (x, y, name, j) in &gens {
        let (x, y) = (*x, *y);
        for z in 0..no {
            for u in 0..b.dim(y, z) {
                rep.checked += 1;
                let w = b.compose(x, y, z, &b.basis(y, z, u), j).expect("total category");
                if rep.ideal && !inside(x, z, &w) {
                    rep.ideal = false;
                    rep.witness = Some(format!(
                        "{}∘(F({name})−G({name})) = {} is not in the image",
                        b.hom(y, z).names[u],
                        b.vec_text(x, z, &w)
                    ));
                }
            }
            for u in 0..b.dim(z, x) {
                rep.checked += 1;
                let w = b.compose(z, x, y, j, &b.basis(z, x, u)).expect("total category");
                if rep.ideal && !inside(z, y, &w) {
                    rep.ideal = false;
                    rep.witness = Some(format!(
                        "(F({name})−G({name}))∘{} = {} is not in the image",
                        b.hom(z, x).names[u],
                        b.vec_text(z, y, &w)
                    ));
                }
            }
        }
        for (tx, ty, w) in tower_images(b, x, y, j) {
            rep.checked += 1;
            if rep.tower && !inside(tx, ty, &w) {
                rep.tower = false;
                if rep.witness.is_none() {
                    rep.witness = Some(format!(
                        "p_n with argument F({name})−G({name}) gives {} outside the image",
                        b.vec_text(tx, ty, &w)
                    ));
                }
            }
        }
    }
    rep
}

/// The coequalizer of a good pair `F, G: A → B`. With a section `H`
/// (`F H = G H = id`) the conditions are certified by the section;
/// without one they are checked and a failure is returned with a witness.
pub fn good_coequalizer(
    f: &WuFunctor,
    g: &WuFunctor,
    a: &FinWuDgCat,
    b: &FinWuDgCat,
    section: Option<&WuFunctor>,
) -> Result<GoodCoequalizer, CoeqError> {
    ensure_good(f, g, a, b)?;
    let by_section = match section {
        Some(h) => {
            let id = WuFunctor::identity(b);
            for (name, k) in [("F", f), ("G", g)] {
                if !h.then(k, b, a, b).same_as(&id, b, b) {
                    return Err(CoeqError::BadSection(format!("{name}∘H ≠ id")));
                }
            }
            true
        }
        None => false,
    };
    let conditions = if by_section {
        None
    } else {
        let r = check_conditions(f, g, a, b);
        if !r.ideal || !r.tower {
            return Err(CoeqError::Condition {
                condition: if r.ideal { 2 } else { 1 },
                witness: r.witness.unwrap_or_default(),
            });
        }
        Some(r)
    };
    let (ideal, _) = difference_image(f, g, a, b);
    let (cat, proj) = quotient_category(b, &ideal)?;
    Ok(GoodCoequalizer {
        cat,
        proj,
        ideal,
        by_section,
        conditions,
    })
}

/// A reflexive pair from a wu-ideal `I` of `B`: the kernel pair
/// `A = B ×_{B/I} B ⇉ B` of the projection, with the diagonal section.
#[derive(Clone, Debug)]
pub struct ReflexivePair {
    pub a: FinWuDgCat,
    pub f: WuFunctor,
    pub g: WuFunctor,
    pub section: WuFunctor,
}

pub fn kernel_pair(b: &FinWuDgCat, ideal: &BTreeMap<(usize, usize), Subspace>) -> Result<ReflexivePair, LimitError> {
    let field = b.field;
    let no = b.n_objects();
    let prod = product(&[b, b])?;
    let diag: Vec<usize> = (0..no)
        .map(|x| prod.tuples.iter().position(|t| t == &vec![x, x]).unwrap())
        .collect();
    let mut spaces = BTreeMap::new();
    for x in 0..no {
        for y in 0..no {
            let n = b.dim(x, y);
            let mut s = Subspace::new(field, 2 * n);
            for i in 0..n {
                let mut v = vector::zeros(field, 2 * n);
                v[i] = field.one();
                v[n + i] = field.one();
                s.insert(&v);
            }
            if let Some(sp) = ideal.get(&(x, y)) {
                for j in sp.basis() {
                    let mut v = j.clone();
                    v.extend(vector::zeros(field, n));
                    s.insert(&v);
                }
            }
            spaces.insert((diag[x], diag[y]), s);
        }
    }
    let (a, incl) = sub_category(&prod.cat, &diag, &spaces)?;
    let f = incl.then(&prod.projections[0], &a, &prod.cat, b);
    let g = incl.then(&prod.projections[1], &a, &prod.cat, b);
    let id = WuFunctor::identity(b);
    let delta = pair(&[id.clone(), id], b, &[b, b], &prod);
    let section = factor_through_sub(&delta, b, &prod.cat, &a, &incl).expect("the diagonal lies in the kernel pair");
    Ok(ReflexivePair { a, f, g, section })
}

/// A functor between one-object categories given by the images of the
/// basis of `A(0, 0)` in `B(0, 0)`.
pub fn algebra_map(b: &FinWuDgCat, images: &[Vector]) -> WuFunctor {
    let mut maps = BTreeMap::new();
    maps.insert((0, 0), SparseMatrix::from_columns(b.dim(0, 0), images));
    WuFunctor { obj: vec![0], maps }
}

/// The pair `k[a]/(a²) ⇉ M₂` with `F(a) = E12` and `G(a) = 0`. Both are
/// strict functors, but the image of `F − G` is not an ideal.
pub fn matrix_counterexample(field: crate::exactlinalg::Field) -> (FinWuDgCat, FinWuDgCat, WuFunctor, WuFunctor) {
    let a = super::construct::dual_numbers(field, 0);
    let b = super::construct::matrix_algebra(field);
    let id = b.id(0).clone();
    let e12 = super::subspace::unit(field, 4, 1);
    let f = algebra_map(&b, &[id.clone(), e12]);
    let g = algebra_map(&b, &[id, vector::zeros(field, 4)]);
    (a, b, f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::construct::{dual_numbers, interval_category, random_wu_category};
    use crate::dgcat::limits::{coproduct, saturate_ideal};
    use crate::dgcat::{check_functor, check_wu_axioms};
    use crate::exactlinalg::Field;

    fn assert_pair_ok(p: &ReflexivePair, b: &FinWuDgCat, n: usize) {
        assert!(check_wu_axioms(&p.a, n).passed());
        for h in [&p.f, &p.g] {
            assert!(check_functor(h, &p.a, b, n).passed());
        }
        assert!(check_functor(&p.section, b, &p.a, n).passed());
    }

    #[test]
    fn non_ideal_image_is_rejected() {
        let (a, b, f, g) = matrix_counterexample(Field::Rational);
        assert!(check_functor(&f, &a, &b, 2).passed());
        assert!(check_functor(&g, &a, &b, 2).passed());
        match good_coequalizer(&f, &g, &a, &b, None) {
            Err(CoeqError::Condition { condition: 1, witness }) => {
                assert!(witness.starts_with("E21∘(F(x)−G(x))"), "{witness}");
                assert!(witness.contains("E22"), "{witness}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dual_numbers_mod_x() {
        let f = Field::Rational;
        let b = dual_numbers(f, 0);
        let ideal = saturate_ideal(&b, &[(0, 0, vector::from_ints(f, &[0, 1]))], true);
        let p = kernel_pair(&b, &ideal).unwrap();
        assert_pair_ok(&p, &b, 2);
        assert_eq!(p.a.dim(0, 0), 3);
        let q = good_coequalizer(&p.f, &p.g, &p.a, &b, Some(&p.section)).unwrap();
        assert!(q.by_section);
        assert_eq!(q.cat.dim(0, 0), 1);
        let r = check_conditions(&p.f, &p.g, &p.a, &b);
        assert!(r.ideal && r.tower);
        assert!(check_functor(&q.proj, &b, &q.cat, 2).passed());
    }

    #[test]
    fn kernel_pair_of_weak_coproduct() {
        let f = Field::Rational;
        let w = random_wu_category(3, f, &[1], 3).unwrap();
        let i = interval_category(f);
        let co = coproduct(&[w.cat(), &i]).unwrap();
        let b = co.cat;
        let ideal = saturate_ideal(&b, &[(0, 0, b.basis(0, 0, 0))], true);
        assert!(ideal[&(0, 0)].is_full());
        assert_eq!(ideal[&(1, 1)].rank(), 0);
        let p = kernel_pair(&b, &ideal).unwrap();
        assert_pair_ok(&p, &b, 3);
        let q = good_coequalizer(&p.f, &p.g, &p.a, &b, Some(&p.section)).unwrap();
        assert_eq!(q.cat.dim(0, 0), 0);
        assert_eq!(q.cat.dim(1, 2), 2);
        assert!(check_wu_axioms(&q.cat, 3).passed());
        let r = check_conditions(&p.f, &p.g, &p.a, &b);
        assert!(r.ideal && r.tower, "{:?}", r.witness);
    }

    #[test]
    fn bad_section_and_moved_objects() {
        let f = Field::Rational;
        let b = dual_numbers(f, 0);
        let ideal = saturate_ideal(&b, &[(0, 0, vector::from_ints(f, &[0, 1]))], true);
        let p = kernel_pair(&b, &ideal).unwrap();
        let mut bad = p.section.clone();
        bad.maps.insert((0, 0), SparseMatrix::zeros(3, 2));
        assert!(matches!(
            good_coequalizer(&p.f, &p.g, &p.a, &b, Some(&bad)),
            Err(CoeqError::BadSection(_))
        ));
        let i = interval_category(f);
        let swap = WuFunctor {
            obj: vec![1, 1],
            maps: BTreeMap::new(),
        };
        assert!(matches!(
            good_coequalizer(&swap, &WuFunctor::identity(&i), &i, &i, None),
            Err(CoeqError::NotGood(_))
        ));
    }
}
