//! The strictification `L` and its right adjoint `R`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactlinalg::{solve, SparseMatrix};

use super::category::FinWuDgCat;
use super::functor::{check_functor, WuFunctor};
use super::limits::{quotient_category, saturate_ideal, LimitError};
use super::subspace::Subspace;
use super::vector::{self, Vector};

/// `R(A)`: a strict dg category as a weakly unital one, with `p_n = 0`
/// for `n ≥ 2` and `p_1(1_x) = id_x`. The formal units stay implicit, so
/// `(A ⊕ k_A)(x, x)` is `A(x, x) ⊕ k·1_x` as in `augmented_dim`.
pub fn r_unitize(a: &FinWuDgCat) -> FinWuDgCat {
    let mut r = a.clone();
    r.ptower.clear();
    r
}

/// `dim (C ⊕ k_C)(x, y)`.
pub fn augmented_dim(c: &FinWuDgCat, x: usize, y: usize) -> usize {
    c.dim(x, y) + usize::from(x == y)
}

/// All values `p_n(…)`, `2 ≤ n ≤ n_max`, on tuples with a unit.
pub fn tower_values(c: &FinWuDgCat) -> Vec<(usize, usize, Vector)> {
    let mut out = Vec::new();
    for n in 2..=c.n_max {
        c.for_each_tuple(n, true, |args| {
            let v = c.p_basis(args).expect("total category");
            if !vector::is_zero(&v) {
                out.push((args[n - 1].src(), args[0].tgt(), v));
            }
        });
    }
    out
}

#[derive(Clone, Debug)]
pub struct Strictification {
    pub cat: FinWuDgCat,
    pub proj: WuFunctor,
    pub ideal: BTreeMap<(usize, usize), Subspace>,
}

/// `L(C) = C / I` with `I` the dg ideal generated by the tower values.
pub fn l_quotient(c: &FinWuDgCat) -> Result<Strictification, LimitError> {
    let gens = tower_values(c);
    let ideal = saturate_ideal(c, &gens, false);
    let (mut cat, proj) = quotient_category(c, &ideal)?;
    cat.ptower.clear();
    Ok(Strictification { cat, proj, ideal })
}

impl Strictification {
    /// The strict functor `L(C) → A` through which `G: C → R(A)` factors,
    /// if `G` kills the ideal.
    pub fn factor(&self, g: &WuFunctor, c: &FinWuDgCat, a: &FinWuDgCat) -> Option<WuFunctor> {
        let mut maps = BTreeMap::new();
        for (&(x, y), m) in &self.proj.maps {
            let gm = g.map(c, a, x, y);
            if let Some(sp) = self.ideal.get(&(x, y)) {
                if sp.basis().iter().any(|v| !vector::is_zero(&gm.apply(v))) {
                    return None;
                }
            }
            // the quotient basis is a set of coordinates of C(x, y)
            let keep = self.ideal.get(&(x, y)).map_or_else(|| (0..m.cols()).collect(), Subspace::complement);
            maps.insert((x, y), crate::exactlinalg::select_columns(&gm, &keep));
        }
        Some(WuFunctor { obj: g.obj.clone(), maps })
    }
}

/// A two-sided inverse of `u ∈ C(x, x)`, solved exactly.
pub fn exact_inverse(c: &FinWuDgCat, x: usize, u: &[crate::exactlinalg::Scalar]) -> Option<Vector> {
    let n = c.dim(x, x);
    let cols: Vec<Vector> = (0..n)
        .map(|k| {
            let e = c.basis(x, x, k);
            let mut col = c.compose(x, x, x, &e, u).expect("total category");
            col.extend(c.compose(x, x, x, u, &e).expect("total category"));
            col
        })
        .collect();
    let m = SparseMatrix::from_columns(2 * n, &cols);
    let mut rhs = c.id(x).clone();
    rhs.extend(c.id(x).iter().cloned());
    solve(&m, &rhs).map(|v| vector::to_field(&v, c.field))
}

/// Random invertible closed degree-0 elements `u_x`, one per object;
/// `id_x` where none is found.
pub fn random_units(c: &FinWuDgCat, seed: u64) -> Vec<(Vector, Vector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = c.field;
    (0..c.n_objects())
        .map(|x| {
            let h = c.hom(x, x);
            let zero_deg = h.in_degree(0);
            for _ in 0..8 {
                let mut u = c.id(x).clone();
                for &i in &zero_deg {
                    let s = f.from_i64(rng.gen_range(-2..=2));
                    vector::add_scaled(&mut u, &c.basis(x, x, i), &s);
                }
                if !vector::is_zero(&c.diff(x, x, &u)) {
                    continue;
                }
                if let Some(v) = exact_inverse(c, x, &u) {
                    return (u, v);
                }
            }
            (c.id(x).clone(), c.id(x).clone())
        })
        .collect()
}

/// `f ↦ u_y ∘ f ∘ u_x⁻¹`, a strict automorphism of a strict category.
pub fn conjugation(c: &FinWuDgCat, units: &[(Vector, Vector)]) -> WuFunctor {
    let maps = c
        .homs
        .keys()
        .map(|&(x, y)| {
            let cols: Vec<Vector> = (0..c.dim(x, y))
                .map(|i| {
                    let fu = c.compose(x, x, y, &c.basis(x, y, i), &units[x].1).expect("total category");
                    c.compose(x, y, y, &units[y].0, &fu).expect("total category")
                })
                .collect();
            ((x, y), SparseMatrix::from_columns(c.dim(x, y), &cols))
        })
        .collect();
    WuFunctor {
        obj: (0..c.n_objects()).collect(),
        maps,
    }
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct AdjunctionProbe {
    pub probes: usize,
    /// `G = Φ ∘ π` is a wu-functor `C → R(A)`
    pub transpose_is_functor: bool,
    /// the factorization of `Φ ∘ π` gives back `Φ`
    pub round_trip_strict: bool,
    /// `factor(G) ∘ π = G`
    pub round_trip_wu: bool,
    /// every `G` sends the tower values to 0
    pub kills_tower: bool,
    pub witness: Option<String>,
}

impl AdjunctionProbe {
    pub fn passed(&self) -> bool {
        self.transpose_is_functor && self.round_trip_strict && self.round_trip_wu && self.kills_tower
    }
}

/// Probes the bijection between wu-functors `C → R(L(C))` and strict
/// functors `L(C) → L(C)`, on conjugations by random units of `L(C)`.
pub fn probe_adjunction(c: &FinWuDgCat, seeds: &[u64]) -> Result<AdjunctionProbe, LimitError> {
    let l = l_quotient(c)?;
    let a = &l.cat;
    let ra = r_unitize(a);
    let tower = tower_values(c);
    let mut rep = AdjunctionProbe {
        transpose_is_functor: true,
        round_trip_strict: true,
        round_trip_wu: true,
        kills_tower: true,
        ..Default::default()
    };
    let fail = |rep: &mut AdjunctionProbe, w: String| {
        if rep.witness.is_none() {
            rep.witness = Some(w);
        }
    };
    for &seed in seeds {
        rep.probes += 1;
        let phi = conjugation(a, &random_units(a, seed));
        let g = l.proj.then(&phi, c, a, &ra);
        let fr = check_functor(&g, c, &ra, c.n_max);
        if !fr.passed() {
            rep.transpose_is_functor = false;
            fail(&mut rep, format!("seed {seed}: {}", fr.first_failure().unwrap_or_default()));
        }
        if tower.iter().any(|(x, y, v)| !vector::is_zero(&g.apply(&ra, *x, *y, v))) {
            rep.kills_tower = false;
            fail(&mut rep, format!("seed {seed}: a tower value survives"));
        }
        match l.factor(&g, c, &ra) {
            Some(back) => {
                if !back.same_as(&phi, a, a) {
                    rep.round_trip_strict = false;
                    fail(&mut rep, format!("seed {seed}: factor(Φ∘π) ≠ Φ"));
                }
                if !l.proj.then(&back, c, a, &ra).same_as(&g, c, &ra) {
                    rep.round_trip_wu = false;
                    fail(&mut rep, format!("seed {seed}: factor(G)∘π ≠ G"));
                }
            }
            None => {
                rep.round_trip_strict = false;
                fail(&mut rep, format!("seed {seed}: Φ∘π does not kill the ideal"));
            }
        }
    }
    Ok(rep)
}

/// `F(p_n(args))` for every tuple with a unit, which must vanish for any
/// wu-functor into `R(A)`.
pub fn tower_kill_residual(g: &WuFunctor, c: &FinWuDgCat, ra: &FinWuDgCat) -> Option<String> {
    for n in 2..=c.n_max {
        let mut bad = None;
        c.for_each_tuple(n, true, |args| {
            if bad.is_some() {
                return;
            }
            let v = c.p_basis(args).expect("total category");
            let img = g.apply(ra, args[n - 1].src(), args[0].tgt(), &v);
            if !vector::is_zero(&img) {
                bad = Some(c.args_text(args));
            }
        });
        if bad.is_some() {
            return bad;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::construct::{dual_numbers, ground_field, interval_category, random_wu_category};
    use crate::dgcat::limits::{coproduct, product};
    use crate::dgcat::{check_wu_axioms, strict_units};
    use crate::exactlinalg::Field;

    #[test]
    fn r_of_ground_field() {
        let k = ground_field(Field::Rational);
        let r = r_unitize(&k);
        assert_eq!(augmented_dim(&r, 0, 0), 2);
        assert_eq!(r.p_basis(&[super::super::Arg::One(0)]).unwrap(), r.id(0).clone());
        let rep = check_wu_axioms(&r, 3);
        assert!(rep.passed() && rep.strict);
    }

    #[test]
    fn l_of_r_is_identity() {
        let a = interval_category(Field::Rational);
        let l = l_quotient(&r_unitize(&a)).unwrap();
        assert_eq!(l.cat.total_dim(), a.total_dim());
        assert!(l.proj.same_as(&WuFunctor::identity(&a), &a, &a));
    }

    #[test]
    fn strictification_of_products() {
        let f = Field::Rational;
        for seed in 0..3 {
            let w = random_wu_category(seed, f, &[1], 3).unwrap();
            let s = interval_category(f);
            let p = product(&[w.cat(), &s]).unwrap();
            let l = l_quotient(&p.cat).unwrap();
            assert!(strict_units(&l.cat));
            assert!(check_wu_axioms(&l.cat, 3).passed());
            // the weak factor is killed, the strict one survives
            assert_eq!(l.cat.total_dim(), s.total_dim());
            let rep = probe_adjunction(&p.cat, &[1, 2, 3]).unwrap();
            assert!(rep.passed(), "{:?}", rep.witness);
            let co = coproduct(&[w.cat(), &dual_numbers(f, -1)]).unwrap();
            let rep = probe_adjunction(&co.cat, &[4, 5]).unwrap();
            assert!(rep.passed(), "{:?}", rep.witness);
        }
    }

    #[test]
    fn functors_into_r_kill_the_tower() {
        let f = Field::Rational;
        let w = random_wu_category(0, f, &[1], 3).unwrap();
        let p = product(&[w.cat(), &interval_category(f)]).unwrap();
        let proj = &p.projections[1];
        let ra = r_unitize(&interval_category(f));
        assert!(check_functor(proj, &p.cat, &ra, 3).passed());
        assert_eq!(tower_kill_residual(proj, &p.cat, &ra), None);
        let l = l_quotient(&p.cat).unwrap();
        let back = l.factor(proj, &p.cat, &ra).unwrap();
        assert!(check_functor(&back, &l.cat, &ra, 3).passed());
        // the projection to the weak factor is not a functor into R of anything strict
        assert!(tower_kill_residual(&p.projections[0], &p.cat, w.cat()).is_some());
    }
}
