//! The homotopy category `H⁰`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactlinalg::{solve, Scalar, SparseMatrix};

use super::category::{FinWuDgCat, HomSpace};
use super::subspace::{unit, Subspace};
use super::vector::{self, Vector};

/// `H⁰(C)` as a strict category concentrated in degree 0, with chosen
/// cycle representatives of each basis class.
#[derive(Clone, Debug)]
pub struct H0Category {
    pub cat: FinWuDgCat,
    pub reps: BTreeMap<(usize, usize), Vec<Vector>>,
    boundaries: BTreeMap<(usize, usize), Vec<Vector>>,
}

impl H0Category {
    /// Class of a closed degree-0 element of `C(x, y)`, or `None` if `v`
    /// is not such an element.
    pub fn class_of(&self, c: &FinWuDgCat, x: usize, y: usize, v: &[Scalar]) -> Option<Vector> {
        let h = c.hom(x, y);
        if v.iter().enumerate().any(|(i, s)| !s.is_zero() && (h.degrees[i] != 0 || h.edge.contains(&i))) {
            return None;
        }
        if !vector::is_zero(&c.diff(x, y, v)) {
            return None;
        }
        let bs = &self.boundaries[&(x, y)];
        let rs = &self.reps[&(x, y)];
        let cols: Vec<Vector> = bs.iter().chain(rs).cloned().collect();
        let m = SparseMatrix::from_columns(h.dim(), &cols);
        let sol = solve(&m, &vector::to_field(v, c.field))?;
        Some(sol[bs.len()..].iter().map(|s| s.to_field(c.field)).collect())
    }

    pub fn rep(&self, x: usize, y: usize, class: &[Scalar]) -> Vector {
        let rs = &self.reps[&(x, y)];
        let mut out = vector::zeros(self.cat.field, rs.first().map_or(0, Vec::len));
        if rs.is_empty() {
            return out;
        }
        for (r, c) in rs.iter().zip(class) {
            vector::add_scaled(&mut out, r, c);
        }
        out
    }

    pub fn dim(&self, x: usize, y: usize) -> usize {
        self.cat.dim(x, y)
    }

    /// Solves for a two-sided inverse of the class `u ∈ H⁰(x, y)`.
    pub fn inverse(&self, x: usize, y: usize, u: &[Scalar]) -> Option<Vector> {
        let c = &self.cat;
        let n = c.dim(y, x);
        let (dx, dy) = (c.dim(x, x), c.dim(y, y));
        // rows: v ∘ u = id_x, then u ∘ v = id_y
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let e = c.basis(y, x, k);
            let mut col = c.compose(x, y, x, &e, u).ok()?;
            col.extend(c.compose(y, x, y, u, &e).ok()?);
            cols.push(col);
        }
        let m = SparseMatrix::from_columns(dx + dy, &cols);
        let mut rhs = c.id(x).clone();
        rhs.extend(c.id(y).iter().cloned());
        solve(&m, &rhs).map(|v| vector::to_field(&v, c.field))
    }

    /// Searches for an isomorphism `x → y` among the basis classes and a
    /// few seeded random combinations. A `None` is not a proof that none
    /// exists.
    pub fn find_iso(&self, x: usize, y: usize, seed: u64) -> Option<(Vector, Vector)> {
        for u in self.candidates(x, y, seed) {
            if let Some(v) = self.inverse(x, y, &u) {
                return Some((u, v));
            }
        }
        None
    }

    pub fn candidates(&self, x: usize, y: usize, seed: u64) -> Vec<Vector> {
        let f = self.cat.field;
        let n = self.cat.dim(x, y);
        let mut out: Vec<Vector> = (0..n).map(|i| unit(f, n, i)).collect();
        if n > 1 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((x as u64) << 32) ^ y as u64);
            for _ in 0..4 {
                out.push((0..n).map(|_| f.from_i64(rng.gen_range(-3..=3))).collect());
            }
        }
        out
    }
}

pub fn h0_category(c: &FinWuDgCat) -> H0Category {
    let f = c.field;
    let no = c.n_objects();
    let mut h0 = FinWuDgCat::new(f, c.objects.clone(), 1);
    h0.partial = c.partial;
    let mut reps = BTreeMap::new();
    let mut boundaries = BTreeMap::new();
    for x in 0..no {
        for y in 0..no {
            let h = c.hom(x, y);
            let (bs, rs) = cohomology_reps(c, x, y, h);
            h0.set_hom(x, y, HomSpace::zero_differential(vec![0; rs.len()], (0..rs.len()).map(|i| format!("[{}]", name_of(c, x, y, &rs[i]))).collect()));
            boundaries.insert((x, y), bs);
            reps.insert((x, y), rs);
        }
    }
    let mut out = H0Category {
        cat: h0,
        reps,
        boundaries,
    };
    let mut comps = Vec::new();
    for x in 0..no {
        for y in 0..no {
            for z in 0..no {
                for a in 0..out.dim(y, z) {
                    for b in 0..out.dim(x, y) {
                        let ra = &out.reps[&(y, z)][a];
                        let rb = &out.reps[&(x, y)][b];
                        if let Ok(v) = c.compose(x, y, z, ra, rb) {
                            if let Some(cl) = out.class_of(c, x, z, &v) {
                                comps.push((x, y, z, a, b, cl));
                            }
                        }
                    }
                }
            }
        }
    }
    for (x, y, z, a, b, v) in comps {
        out.cat.set_comp(x, y, z, a, b, v);
    }
    for x in 0..no {
        let u = out.class_of(c, x, x, c.id(x)).unwrap_or_else(|| vector::zeros(f, out.dim(x, x)));
        out.cat.set_unit(x, u);
    }
    out
}

fn name_of(c: &FinWuDgCat, x: usize, y: usize, v: &Vector) -> String {
    c.vec_text(x, y, v)
}

/// Boundaries `d C⁻¹` and representatives of a basis of `H⁰`, using only
/// non-edge elements.
fn cohomology_reps(c: &FinWuDgCat, x: usize, y: usize, h: &HomSpace) -> (Vec<Vector>, Vec<Vector>) {
    let f = c.field;
    let n = h.dim();
    let bs: Vec<Vector> = (0..n)
        .filter(|i| h.degrees[*i] == -1 && !h.edge.contains(i))
        .map(|i| c.diff(x, y, &unit(f, n, i)))
        .filter(|v| !vector::is_zero(v))
        .collect();
    let zero_cols: Vec<usize> = (0..n).filter(|i| h.degrees[*i] == 0 && !h.edge.contains(i)).collect();
    let dm = crate::exactlinalg::select_columns(&h.d, &zero_cols).to_field(f);
    let mut span = Subspace::spanned(f, n, bs.iter().cloned());
    let mut rs = Vec::new();
    for k in crate::exactlinalg::kernel_basis(&dm) {
        let mut z = vector::zeros(f, n);
        for (i, s) in zero_cols.iter().zip(k) {
            z[*i] = s.to_field(f);
        }
        if span.insert(&z) {
            rs.push(z);
        }
    }
    (bs, rs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::construct::{ground_field, interval_category, random_wu_category};
    use crate::dgcat::check_wu_axioms;
    use crate::exactlinalg::Field;

    #[test]
    fn ground_field_h0() {
        let c = ground_field(Field::Rational);
        let h = h0_category(&c);
        assert_eq!(h.dim(0, 0), 1);
        assert!(check_wu_axioms(&h.cat, 1).strict);
    }

    #[test]
    fn acyclic_hom_vanishes() {
        let h = h0_category(&interval_category(Field::Rational));
        assert_eq!((h.dim(0, 0), h.dim(0, 1), h.dim(1, 1)), (1, 0, 1));
    }

    #[test]
    fn weak_units_become_strict() {
        let w = random_wu_category(7, Field::Rational, &[2, 2], 2).unwrap();
        let h = h0_category(w.cat());
        let r = check_wu_axioms(&h.cat, 1);
        assert!(r.passed() && r.strict, "{:?}", r.failures());
        assert_eq!(h.dim(0, 1), 4);
        assert!(h.find_iso(0, 1, 1).is_some());
    }
}
