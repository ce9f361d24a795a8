//! Weak equivalences, fibrations and the related predicates on functors.

use serde::Serialize;

use crate::exactlinalg::{is_quasi_iso, rank, select_columns, ChainMap, Field, SparseMatrix};

use super::category::FinWuDgCat;
use super::functor::WuFunctor;
use super::h0::{h0_category, H0Category};
use super::vector::{self, Vector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub holds: bool,
    pub witness: Option<String>,
}

impl Flag {
    fn yes() -> Self {
        Flag {
            holds: true,
            witness: None,
        }
    }

    fn no(w: String) -> Self {
        Flag {
            holds: false,
            witness: Some(w),
        }
    }

}

#[derive(Clone, Debug, Serialize)]
pub struct Predicates {
    /// each hom map is a quasi-isomorphism
    pub w1: Flag,
    /// `H⁰(F)` is an equivalence
    pub w2: Flag,
    /// each hom map is surjective
    pub f1: Flag,
    /// isomorphisms `F(x) → z` in `H⁰` lift, on the probed candidates
    pub f2: Flag,
    /// surjective on objects and `F1`
    pub surj: Flag,
    pub weak_equivalence: bool,
    pub fibration: bool,
    pub trivial_fibration: bool,
    /// `Fib ∩ W` agrees with `Surj ∩ W1`
    pub consistent: bool,
}

/// The hom map `C(x, y) → D(Fx, Fy)` as a chain map between the graded
/// complexes of the two homs.
pub fn hom_chain_map(f: &WuFunctor, c: &FinWuDgCat, d: &FinWuDgCat, x: usize, y: usize) -> ChainMap {
    let (hc, hd) = (c.hom(x, y), d.hom(f.obj[x], f.obj[y]));
    let m = f.map(c, d, x, y);
    let mut degs: Vec<i32> = hc.degrees.iter().chain(&hd.degrees).copied().collect();
    degs.sort_unstable();
    degs.dedup();
    let components = degs
        .into_iter()
        .map(|k| {
            let cols = hc.in_degree(k);
            let rows = hd.in_degree(k);
            let block = select_columns(&m.transpose(), &rows).transpose();
            (k, select_columns(&block, &cols))
        })
        .collect();
    ChainMap { components }
}

fn hom_label(c: &FinWuDgCat, x: usize, y: usize) -> String {
    format!("({}, {})", c.objects[x], c.objects[y])
}

pub fn w1(f: &WuFunctor, c: &FinWuDgCat, d: &FinWuDgCat) -> Flag {
    for &(x, y) in c.homs.keys() {
        let (hc, hd) = (c.hom(x, y), d.hom(f.obj[x], f.obj[y]));
        let (sc, sd) = (hc.complex(), hd.complex());
        let lo = sc.lo().min(sd.lo());
        let hi = sc.hi().max(sd.hi());
        let map = hom_chain_map(f, c, d, x, y);
        match is_quasi_iso(&map, &sc, &sd, (lo, hi + 1)) {
            Ok(true) => {}
            Ok(false) => return Flag::no(format!("not a quasi-isomorphism on {}", hom_label(c, x, y))),
            Err(e) => return Flag::no(format!("{} on {}", e, hom_label(c, x, y))),
        }
    }
    // objects of D outside the image impose nothing on W1
    Flag::yes()
}

pub fn f1(f: &WuFunctor, c: &FinWuDgCat, d: &FinWuDgCat) -> Flag {
    for &(x, y) in c.homs.keys() {
        let target = d.dim(f.obj[x], f.obj[y]);
        if rank(&f.map(c, d, x, y)) < target {
            return Flag::no(format!("not surjective on {}", hom_label(c, x, y)));
        }
    }
    Flag::yes()
}

/// `H⁰(F)` on `H⁰C(x, y)`, in the chosen class bases.
pub fn h0_map(f: &WuFunctor, d: &FinWuDgCat, hc: &H0Category, hd: &H0Category, x: usize, y: usize) -> SparseMatrix {
    let (fx, fy) = (f.obj[x], f.obj[y]);
    let cols: Vec<Vector> = hc.reps[&(x, y)]
        .iter()
        .map(|r| hd.class_of(d, fx, fy, &f.apply(d, x, y, r)).expect("functors preserve closed degree-0 elements"))
        .collect();
    SparseMatrix::from_columns(hd.dim(fx, fy), &cols)
}

struct Ctx<'a> {
    f: &'a WuFunctor,
    c: &'a FinWuDgCat,
    d: &'a FinWuDgCat,
    hc: H0Category,
    hd: H0Category,
    seed: u64,
}

impl Ctx<'_> {
    fn w2(&self) -> Flag {
        let (f, c) = (self.f, self.c);
        for &(x, y) in c.homs.keys() {
            let m = h0_map(f, self.d, &self.hc, &self.hd, x, y);
            let (a, b) = (self.hc.dim(x, y), self.hd.dim(f.obj[x], f.obj[y]));
            if a != b || rank(&m) != a {
                return Flag::no(format!("H⁰(F) is not bijective on {}", hom_label(c, x, y)));
            }
        }
        for z in 0..self.d.n_objects() {
            if f.obj.contains(&z) {
                continue;
            }
            let hit = (0..c.n_objects()).any(|x| self.hd.find_iso(f.obj[x], z, self.seed).is_some());
            if !hit {
                return Flag::no(format!("no F(x) found isomorphic to {} in H⁰", self.d.objects[z]));
            }
        }
        Flag::yes()
    }

    /// For each `x`, `z` and each probed isomorphism `g: F(x) → z` of
    /// `H⁰(D)`, looks for `y` with `F(y) = z` and an isomorphism
    /// `f: x → y` of `H⁰(C)` with `H⁰(F)(f) = g`.
    fn f2(&self) -> Flag {
        let (f, c, d) = (self.f, self.c, self.d);
        for x in 0..c.n_objects() {
            let fx = f.obj[x];
            for z in 0..d.n_objects() {
                for g in self.hd.candidates(fx, z, self.seed) {
                    if self.hd.inverse(fx, z, &g).is_none() {
                        continue;
                    }
                    let lifted = (0..c.n_objects()).filter(|&y| f.obj[y] == z).any(|y| self.lift_iso(x, y, &g));
                    if !lifted {
                        return Flag::no(format!(
                            "the isomorphism {} : {} → {} of H⁰ does not lift",
                            self.hd.cat.vec_text(fx, z, &g),
                            d.objects[fx],
                            d.objects[z]
                        ));
                    }
                }
            }
        }
        Flag::yes()
    }

    fn lift_iso(&self, x: usize, y: usize, g: &Vector) -> bool {
        let m = h0_map(self.f, self.d, &self.hc, &self.hd, x, y);
        let Some(p) = crate::exactlinalg::solve(&m, g) else {
            return false;
        };
        let field = self.c.field;
        let p = vector::to_field(&p, field);
        let mut tries = vec![p.clone()];
        // other lifts differ by the kernel; probe a few of them
        let ker = crate::exactlinalg::kernel_basis(&m);
        for k in &ker {
            tries.push(vector::add(&p, &vector::to_field(k, field)));
        }
        if !ker.is_empty() {
            let mut s = vector::zeros(field, p.len());
            for (i, k) in ker.iter().enumerate() {
                vector::add_scaled(&mut s, &vector::to_field(k, field), &field.from_i64(i as i64 + 2));
            }
            tries.push(vector::add(&p, &s));
        }
        tries.iter().any(|t| self.hc.inverse(x, y, t).is_some())
    }
}

/// All predicates of `F: C → D`. Isomorphism probes in `H⁰` are seeded;
/// a negative `F2` or essential surjectivity answer can be a probe miss.
pub fn predicates(f: &WuFunctor, c: &FinWuDgCat, d: &FinWuDgCat, seed: u64) -> Predicates {
    let ctx = Ctx {
        f,
        c,
        d,
        hc: h0_category(c),
        hd: h0_category(d),
        seed,
    };
    let w1 = w1(f, c, d);
    let w2 = ctx.w2();
    let f1 = f1(f, c, d);
    let f2 = ctx.f2();
    let missing = (0..d.n_objects()).find(|z| !f.obj.contains(z));
    let surj = match missing {
        Some(z) => Flag::no(format!("{} is not in the image", d.objects[z])),
        None => f1.clone(),
    };
    let weak_equivalence = w1.holds && w2.holds;
    let fibration = f1.holds && f2.holds;
    let trivial_fibration = fibration && weak_equivalence;
    let consistent = trivial_fibration == (surj.holds && w1.holds);
    Predicates {
        w1,
        w2,
        f1,
        f2,
        surj,
        weak_equivalence,
        fibration,
        trivial_fibration,
        consistent,
    }
}

impl Predicates {
    pub fn summary(&self) -> String {
        let b = |x: bool| if x { "1" } else { "0" };
        format!(
            "W1={} W2={} F1={} F2={} Surj={} W={} Fib={} TrivFib={}",
            b(self.w1.holds),
            b(self.w2.holds),
            b(self.f1.holds),
            b(self.f2.holds),
            b(self.surj.holds),
            b(self.weak_equivalence),
            b(self.fibration),
            b(self.trivial_fibration)
        )
    }
}

/// A functor `F: C → D` with a label.
#[derive(Clone, Debug)]
pub struct Sample {
    pub name: String,
    pub c: FinWuDgCat,
    pub d: FinWuDgCat,
    pub f: WuFunctor,
}

fn sample(name: &str, c: &FinWuDgCat, d: &FinWuDgCat, f: WuFunctor) -> Sample {
    Sample {
        name: name.into(),
        c: c.clone(),
        d: d.clone(),
        f,
    }
}

/// Seeded functors between small categories: identities, inclusions,
/// projections onto quotients, limit and colimit legs, kernel-pair legs,
/// and a few that fail each predicate.
pub fn sample_family(field: Field, seed: u64) -> Vec<Sample> {
    use super::coequalizer::{kernel_pair, matrix_counterexample};
    use super::construct::{dual_numbers, ground_field, interval_category, random_wu_category};
    use super::limits::{coproduct, product, quotient_category, saturate_ideal, sub_category};
    use super::subspace::Subspace;
    use std::collections::BTreeMap;

    let mut out = Vec::new();
    let w = random_wu_category(seed, field, &[1, 1], 3).expect("tower solvable");
    let w = w.cat();
    out.push(sample("identity of a weak category", w, w, WuFunctor::identity(w)));

    // the full subcategory on x0; x1 is isomorphic to it in H⁰
    let mut spaces = BTreeMap::new();
    spaces.insert((0, 0), Subspace::full(field, w.dim(0, 0)));
    let (sub, incl) = sub_category(w, &[0], &spaces).expect("full subcategory");
    out.push(sample("full subcategory inclusion", &sub, w, incl));

    let i = interval_category(field);
    out.push(sample("identity of the interval", &i, &i, WuFunctor::identity(&i)));
    let acyclic = saturate_ideal(&i, &[(0, 1, i.basis(0, 1, 0))], true);
    let (q, proj) = quotient_category(&i, &acyclic).expect("total");
    out.push(sample("quotient by an acyclic ideal", &i, &q, proj));

    let dn = dual_numbers(field, 0);
    let xi = saturate_ideal(&dn, &[(0, 0, vector::from_ints(field, &[0, 1]))], true);
    let (q, proj) = quotient_category(&dn, &xi).expect("total");
    out.push(sample("k[x]/(x²) → k", &dn, &q, proj));

    let (a, b, f, _) = matrix_counterexample(field);
    out.push(sample("k[a]/(a²) → M₂", &a, &b, f));

    let k = ground_field(field);
    let mut maps = BTreeMap::new();
    maps.insert((0, 0), SparseMatrix::from_columns(1, &[vector::from_ints(field, &[1])]));
    maps.insert((0, 1), SparseMatrix::zeros(1, 2));
    maps.insert((1, 1), SparseMatrix::from_columns(1, &[vector::from_ints(field, &[1])]));
    let collapse = WuFunctor { obj: vec![0, 0], maps };
    out.push(sample("interval → k", &i, &k, collapse));
    let mut maps = BTreeMap::new();
    maps.insert((0, 0), SparseMatrix::from_columns(1, &[vector::from_ints(field, &[1])]));
    out.push(sample("k → interval at x", &k, &i, WuFunctor { obj: vec![0], maps }));

    let p = product(&[&i, w]).expect("total");
    out.push(sample("product projection", &p.cat, &i, p.projections[0].clone()));
    out.push(sample("product projection to the weak factor", &p.cat, w, p.projections[1].clone()));
    let co = coproduct(&[&dn, w]).expect("total");
    out.push(sample("coproduct injection", w, &co.cat, co.injections[1].clone()));

    let kp = kernel_pair(&dn, &xi).expect("wu-ideal");
    out.push(sample("kernel pair leg", &kp.a, &dn, kp.f.clone()));
    out.push(sample("kernel pair section", &dn, &kp.a, kp.section.clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::check_functor;

    fn find<'a>(fam: &'a [Sample], name: &str) -> &'a Sample {
        fam.iter().find(|s| s.name == name).unwrap()
    }

    #[test]
    fn family_is_consistent() {
        for seed in 0..3 {
            for s in sample_family(Field::Rational, seed) {
                assert!(check_functor(&s.f, &s.c, &s.d, 3).passed(), "{}", s.name);
                let p = predicates(&s.f, &s.c, &s.d, seed);
                assert!(p.consistent, "{}: {}", s.name, p.summary());
            }
        }
    }

    #[test]
    fn expected_flags() {
        let fam = sample_family(Field::Rational, 0);
        let pred = |n: &str| {
            let s = find(&fam, n);
            predicates(&s.f, &s.c, &s.d, 0)
        };
        let id = pred("identity of a weak category");
        assert_eq!(id.summary(), "W1=1 W2=1 F1=1 F2=1 Surj=1 W=1 Fib=1 TrivFib=1");
        let incl = pred("full subcategory inclusion");
        assert!(incl.weak_equivalence && !incl.surj.holds && !incl.fibration);
        let q = pred("quotient by an acyclic ideal");
        assert!(q.w1.holds && q.f1.holds && q.trivial_fibration);
        let dn = pred("k[x]/(x²) → k");
        assert!(dn.f1.holds && !dn.w1.holds);
        let m2 = pred("k[a]/(a²) → M₂");
        assert!(!m2.w1.holds && !m2.f1.holds);
        let collapse = pred("interval → k");
        assert!(!collapse.w1.holds && !collapse.f1.holds);
        let pt = pred("k → interval at x");
        assert!(pt.w1.holds && !pt.w2.holds);
        assert!(pred("kernel pair section").weak_equivalence == pred("kernel pair leg").weak_equivalence);
    }
}
