use std::collections::BTreeMap;

use serde::Serialize;

use crate::exactlinalg::{Scalar, SparseMatrix};

use super::axioms::AxiomCheck;
use super::category::{Arg, FinWuDgCat, Val};
use super::vector::{self, Vector};

/// A weakly unital dg functor: an object map and one matrix per hom,
/// `maps[(x, y)]` of shape `dim D(Fx, Fy) × dim C(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WuFunctor {
    pub obj: Vec<usize>,
    pub maps: BTreeMap<(usize, usize), SparseMatrix>,
}

impl WuFunctor {
    pub fn identity(c: &FinWuDgCat) -> Self {
        WuFunctor {
            obj: (0..c.n_objects()).collect(),
            maps: c.homs.iter().map(|(k, h)| (*k, SparseMatrix::identity(h.dim()))).collect(),
        }
    }

    /// The matrix on `C(x, y)`, zero if none is stored.
    pub fn map(&self, c: &FinWuDgCat, d: &FinWuDgCat, x: usize, y: usize) -> SparseMatrix {
        self.maps
            .get(&(x, y))
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(d.dim(self.obj[x], self.obj[y]), c.dim(x, y)))
    }

    pub fn apply(&self, d: &FinWuDgCat, x: usize, y: usize, v: &[Scalar]) -> Vector {
        match self.maps.get(&(x, y)) {
            Some(m) => vector::to_field(&m.apply(v), d.field),
            None => d.zero(self.obj[x], self.obj[y]),
        }
    }

    pub fn apply_basis(&self, c: &FinWuDgCat, d: &FinWuDgCat, x: usize, y: usize, i: usize) -> Vector {
        self.apply(d, x, y, &c.basis(x, y, i))
    }

    /// `G ∘ F` for `F: C → D`, `G: D → E`.
    pub fn then(&self, g: &WuFunctor, c: &FinWuDgCat, d: &FinWuDgCat, e: &FinWuDgCat) -> WuFunctor {
        let obj = self.obj.iter().map(|&y| g.obj[y]).collect();
        let maps = c
            .homs
            .keys()
            .map(|&(x, y)| {
                let f = self.map(c, d, x, y);
                let gm = g.map(d, e, self.obj[x], self.obj[y]);
                ((x, y), gm.mul(&f))
            })
            .collect();
        WuFunctor { obj, maps }
    }

    /// `F(a)` as a value of `D ⊕ k_D`.
    pub fn apply_arg(&self, c: &FinWuDgCat, d: &FinWuDgCat, a: &Arg) -> Val {
        match *a {
            Arg::One(x) => d.arg_val(&Arg::One(self.obj[x])),
            Arg::Mor { src, tgt, idx } => Val {
                src: self.obj[src],
                tgt: self.obj[tgt],
                degree: c.degree(src, tgt, idx),
                unit: d.field.zero(),
                vec: self.apply_basis(c, d, src, tgt, idx),
            },
        }
    }

    pub fn same_as(&self, other: &WuFunctor, c: &FinWuDgCat, d: &FinWuDgCat) -> bool {
        self.obj == other.obj
            && c.homs.keys().all(|&(x, y)| {
                let a = self.map(c, d, x, y);
                let b = other.map(c, d, x, y);
                a == b || a.sub(&b).is_zero()
            })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctorReport {
    pub n_max: usize,
    pub checks: Vec<AxiomCheck>,
}

impl FunctorReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<String> {
        self.checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()))
    }
}

fn check(name: &str) -> AxiomCheck {
    AxiomCheck {
        name: name.into(),
        passed: true,
        checked: 0,
        skipped: 0,
        witness: None,
    }
}

fn fail(c: &mut AxiomCheck, w: String) {
    if c.passed {
        c.witness = Some(w);
    }
    c.passed = false;
}

/// Checks that `F: C → D` preserves degrees, differentials, composition,
/// weak units, and the tower through `n_max` on tuples containing a unit.
pub fn check_functor(f: &WuFunctor, c: &FinWuDgCat, d: &FinWuDgCat, n_max: usize) -> FunctorReport {
    let mut checks = Vec::new();
    let mut shape = check("object map and shapes");
    shape.checked += 1;
    if f.obj.len() != c.n_objects() || f.obj.iter().any(|&y| y >= d.n_objects()) {
        fail(&mut shape, "object map out of range".into());
        return FunctorReport {
            n_max,
            checks: vec![shape],
        };
    }
    for (&(x, y), m) in &f.maps {
        shape.checked += 1;
        if (m.rows(), m.cols()) != (d.dim(f.obj[x], f.obj[y]), c.dim(x, y)) {
            fail(&mut shape, format!("matrix on ({}, {})", c.objects[x], c.objects[y]));
        }
    }
    let ok = shape.passed;
    checks.push(shape);
    if !ok {
        return FunctorReport { n_max, checks };
    }

    let mut deg = check("degree 0");
    let mut chain = check("chain map");
    for &(x, y) in c.homs.keys() {
        let (fx, fy) = (f.obj[x], f.obj[y]);
        let hd = d.hom(fx, fy);
        for i in 0..c.dim(x, y) {
            deg.checked += 1;
            chain.checked += 1;
            let k = c.degree(x, y, i);
            let img = f.apply_basis(c, d, x, y, i);
            if img.iter().enumerate().any(|(j, s)| !s.is_zero() && hd.degrees[j] != k) {
                fail(&mut deg, format!("F({})", c.hom(x, y).names[i]));
            }
            let lhs = d.diff(fx, fy, &img);
            let rhs = f.apply(d, x, y, &c.diff(x, y, &c.basis(x, y, i)));
            if !vector::is_zero(&vector::sub(&lhs, &rhs)) {
                fail(&mut chain, format!("dF({}) ≠ F(d{0})", c.hom(x, y).names[i]));
            }
        }
    }
    checks.push(deg);
    checks.push(chain);

    let mut comp = check("composition");
    let no = c.n_objects();
    for x in 0..no {
        for y in 0..no {
            for z in 0..no {
                for a in 0..c.dim(y, z) {
                    for b in 0..c.dim(x, y) {
                        let Ok(ab) = c.compose_basis(x, y, z, a, b) else {
                            comp.skipped += 1;
                            continue;
                        };
                        let lhs = f.apply(d, x, z, &ab);
                        let fa = f.apply_basis(c, d, y, z, a);
                        let fb = f.apply_basis(c, d, x, y, b);
                        match d.compose(f.obj[x], f.obj[y], f.obj[z], &fa, &fb) {
                            Ok(rhs) => {
                                comp.checked += 1;
                                if !vector::is_zero(&vector::sub(&lhs, &rhs)) {
                                    fail(
                                        &mut comp,
                                        format!("F({} ∘ {})", c.hom(y, z).names[a], c.hom(x, y).names[b]),
                                    );
                                }
                            }
                            Err(_) => comp.skipped += 1,
                        }
                    }
                }
            }
        }
    }
    checks.push(comp);

    let mut unit = check("units");
    for x in 0..no {
        unit.checked += 1;
        let img = f.apply(d, x, x, c.id(x));
        if !vector::is_zero(&vector::sub(&img, d.id(f.obj[x]))) {
            fail(&mut unit, format!("F(id_{}) ≠ id", c.objects[x]));
        }
    }
    checks.push(unit);

    let mut tower = check("tower");
    for n in 2..=n_max {
        c.for_each_tuple(n, true, |args| {
            let (x, y) = (args[n - 1].src(), args[0].tgt());
            let lhs = c.p_basis(args).map(|v| f.apply(d, x, y, &v));
            let vals: Vec<Val> = args.iter().map(|a| f.apply_arg(c, d, a)).collect();
            let rhs = d.p_vals(&vals);
            match (lhs, rhs) {
                (Ok(l), Ok(r)) => {
                    tower.checked += 1;
                    if !vector::is_zero(&vector::sub(&l, &r)) {
                        fail(&mut tower, format!("F(p_{n}{}) ≠ p_{n}(F…)", c.args_text(args)));
                    }
                }
                _ => tower.skipped += 1,
            }
        });
    }
    checks.push(tower);
    FunctorReport { n_max, checks }
}
