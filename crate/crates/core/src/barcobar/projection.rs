//! The projection `Cobar₊(Bar₊(A)) → A`, `[a] ↦ a`, zero on longer bar
//! words, and its cohomology comparison.
//!
//! Filtering by the number of letters, the associated graded pieces of
//! weight `m ≥ 2` only carry the internal differential and the cuts. A
//! degree `k` is certified when every such piece has no cohomology in
//! degrees `k − 1` and `k`; there the inclusion of one-letter words is a
//! cohomology isomorphism, hence so is the projection.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::tower::weak_unit_category;
use super::{BarCobarError, CobarCategory};
use crate::dgcat::{check_functor, vector, FinWuDgCat, HomSpace, Val, WuFunctor};
use crate::exactlinalg::{cohomology_dims_in, SparseMatrix};

#[derive(Clone, Debug, Serialize)]
pub struct HomCohomology {
    pub src: String,
    pub tgt: String,
    pub of_a: BTreeMap<i32, usize>,
    pub of_cobar: BTreeMap<i32, usize>,
    pub certified: Vec<i32>,
    pub uncertified: Vec<i32>,
    /// dimensions agree on every certified degree
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    pub len: usize,
    pub chain_map_witness: Option<String>,
    pub section_witness: Option<String>,
    pub functor_witness: Option<String>,
    pub tower_witness: Option<String>,
    pub homs: Vec<HomCohomology>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.chain_map_witness.is_none()
            && self.section_witness.is_none()
            && self.functor_witness.is_none()
            && self.tower_witness.is_none()
            && self.homs.iter().all(|h| h.agree)
    }
}

pub fn projection(cc: &CobarCategory) -> WuFunctor {
    let a = &cc.source().cat;
    let mut maps = BTreeMap::new();
    for (&(x, y), ws) in &cc.words {
        let mut cols = Vec::with_capacity(ws.len());
        for i in 0..ws.len() {
            let c = cc.cobar_word(x, y, i);
            if c.iter().any(|w| w.len() > 1) {
                cols.push(a.zero(x, y));
                continue;
            }
            let mut objs = vec![c[0][0].tgt];
            let vs: Vec<_> = c
                .iter()
                .map(|w| {
                    objs.push(w[0].src);
                    a.basis(w[0].src, w[0].tgt, w[0].idx)
                })
                .collect();
            let refs: Vec<&[_]> = vs.iter().map(|v| v.as_slice()).collect();
            cols.push(a.compose_chain(&objs, &refs).expect("total composition"));
        }
        maps.insert((x, y), SparseMatrix::from_columns(a.dim(x, y), &cols));
    }
    WuFunctor {
        obj: (0..a.n_objects()).collect(),
        maps,
    }
}

fn graded_piece(cc: &CobarCategory, x: usize, y: usize, m: usize) -> HomSpace {
    let h = cc.cat.hom(x, y);
    let keep: Vec<usize> = (0..h.dim()).filter(|&i| cc.weight_of(x, y, i) == m).collect();
    let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let d = SparseMatrix::from_entries(
        keep.len(),
        keep.len(),
        h.d.entries()
            .filter_map(|(r, c, s)| Some((*pos.get(&r)?, *pos.get(&c)?, s.clone()))),
    );
    HomSpace::new(
        keep.iter().map(|&i| h.degrees[i]).collect(),
        keep.iter().map(|&i| h.names[i].clone()).collect(),
        d,
    )
}

pub fn check_projection(a: &FinWuDgCat, n_max: usize, len: usize) -> Result<ProjectionReport, BarCobarError> {
    let cc = weak_unit_category(a, n_max, len)?;
    let c = &cc.cat;
    let f = a.field;
    let pi = projection(&cc);
    let mut chain_map_witness = None;
    for &(x, y) in cc.words.keys() {
        for i in 0..c.dim(x, y) {
            let lhs = a.diff(x, y, &pi.apply_basis(c, a, x, y, i));
            let rhs = pi.apply(a, x, y, &c.diff(x, y, &c.basis(x, y, i)));
            if !vector::is_zero(&vector::sub(&lhs, &rhs)) {
                chain_map_witness.get_or_insert(format!("dπ({}) ≠ π(d…)", c.hom(x, y).names[i]));
            }
        }
    }
    let mut section_witness = None;
    for l in cc.source().letters() {
        let one = |l: &super::Letter| -> Option<usize> { cc.locate(&[vec![*l]]).map(|t| t.2) };
        let (x, y) = (l.src, l.tgt);
        let mut lhs = c.zero(x, y);
        lhs[one(&l).unwrap()] = f.one();
        lhs = c.diff(x, y, &lhs);
        let mut rhs = c.zero(x, y);
        for (k, s) in a.diff(x, y, &a.basis(x, y, l.idx)).into_iter().enumerate() {
            if !s.is_zero() {
                rhs[one(&super::Letter { src: x, tgt: y, idx: k }).unwrap()] = s;
            }
        }
        if lhs != rhs {
            section_witness.get_or_insert(format!("d[{}] ≠ [d{0}]", cc.source().name(&l)));
        }
    }
    let functor_witness = check_functor(&pi, c, a, 1).first_failure();
    let mut tower_witness = None;
    for (args, v) in &c.ptower {
        let (x, y) = (args[args.len() - 1].src(), args[0].tgt());
        let lhs = pi.apply(a, x, y, v);
        let vals: Vec<Val> = args.iter().map(|t| pi.apply_arg(c, a, t)).collect();
        let rhs = a.p_vals(&vals).expect("total");
        if !vector::is_zero(&vector::sub(&lhs, &rhs)) {
            tower_witness.get_or_insert(format!("π(p{}) ≠ p(π…)", c.args_text(args)));
        }
    }
    let mut homs = Vec::new();
    for &(x, y) in cc.words.keys() {
        let of_a = cohomology_dims_in(&a.hom(x, y).complex(), f).dims;
        let of_cobar = cohomology_dims_in(&c.hom(x, y).complex(), f).dims;
        let mut bad = BTreeSet::new();
        for m in 2..=len {
            let g = graded_piece(&cc, x, y, m);
            if g.dim() == 0 {
                continue;
            }
            for (k, n) in cohomology_dims_in(&g.complex(), f).dims {
                if n > 0 {
                    bad.insert(k);
                    bad.insert(k + 1);
                }
            }
        }
        let degs: BTreeSet<i32> = of_a.keys().chain(of_cobar.keys()).copied().collect();
        let (certified, uncertified): (Vec<i32>, Vec<i32>) = degs.into_iter().partition(|k| !bad.contains(k));
        let agree = certified
            .iter()
            .all(|k| of_a.get(k).copied().unwrap_or(0) == of_cobar.get(k).copied().unwrap_or(0));
        homs.push(HomCohomology {
            src: c.objects[x].clone(),
            tgt: c.objects[y].clone(),
            of_a,
            of_cobar,
            certified,
            uncertified,
            agree,
        });
    }
    Ok(ProjectionReport {
        len,
        chain_map_witness,
        section_witness,
        functor_witness,
        tower_witness,
        homs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::construct::{dual_numbers, ground_field, interval_category};
    use crate::exactlinalg::Field;

    #[test]
    fn projection_is_a_quasi_isomorphism() {
        for f in [Field::Rational, Field::prime()] {
            for a in [ground_field(f), dual_numbers(f, 0), dual_numbers(f, 1), interval_category(f)] {
                let r = check_projection(&a, 3, 4).unwrap();
                assert!(r.passed(), "{r:#?}");
                assert!(r.homs.iter().all(|h| h.uncertified.is_empty()));
            }
        }
    }

    #[test]
    fn interval_cohomology() {
        let r = check_projection(&interval_category(Field::Rational), 2, 3).unwrap();
        let xy = r.homs.iter().find(|h| h.src == "x" && h.tgt == "y").unwrap();
        assert!(xy.of_cobar.values().all(|&n| n == 0));
        let xx = r.homs.iter().find(|h| h.src == "x" && h.tgt == "x").unwrap();
        assert_eq!(xx.of_cobar.get(&0), Some(&1));
    }
}
