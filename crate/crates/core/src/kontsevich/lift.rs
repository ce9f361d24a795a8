//! Lifting a homotopy equivalence `ξ: x → y` of a weakly unital category
//! to images of the generators of `K`.
//!
//! With `ξ' = 1_y ξ 1_x`, `η' = 1_x η 1_y`, `h'_x = 1_x h_x 1_x`,
//! `h'_y = 1_y h_y 1_y`, and inputs satisfying
//! `η ξ' = 1_x + d h_x`, `ξ' η = 1_y + d h_y`, the images are
//!
//! ```text
//! f = ξ',  g = η',  h₀ = h'_x,
//! h₁ = h'_y + ξ' h'_x η' − h'_y ξ' η',
//! r  = h'_y ξ' h'_x − ξ' h'_x h'_x.
//! ```
//!
//! The report also carries `h₁ = h'_y − ξ' h'_x η' − h'_y ξ' η'` and
//! `r = −h₁ ξ' h'_x + ξ' h'_x h'_x` evaluated literally, with their own
//! relation checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dgcat::construct::random_wu_keeping;
use crate::dgcat::{h0_category, FinWuDgCat, Vector};
use crate::exactlinalg::{kernel_basis, select_columns, solve, Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftInput {
    pub x: usize,
    pub y: usize,
    pub xi: Vector,
    pub eta: Vector,
    pub h_x: Vector,
    pub h_y: Vector,
}

/// Images of `f, g, h₀, h₁, r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KImages {
    pub f: Vector,
    pub g: Vector,
    pub h0: Vector,
    pub h1: Vector,
    pub r: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub holds: bool,
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub images: KImages,
    pub relations: Vec<RelationCheck>,
    pub printed: KImages,
    pub printed_relations: Vec<RelationCheck>,
    /// `ξ' = ξ` on the nose
    pub xi_unchanged: bool,
    /// `b` with `ξ' − ξ = db`
    pub class_witness: Option<Vector>,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.relations.iter().all(|r| r.holds) && self.class_witness.is_some()
    }

    pub fn printed_passed(&self) -> bool {
        self.printed_relations.iter().all(|r| r.holds)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LiftError {
    #[error("bad input: {0}")]
    Shape(String),
    #[error("input fails {which}: residual {residual}")]
    Kcat3 { which: String, residual: String },
    #[error("undefined composite: {0}")]
    Undefined(String),
}

struct Ctx<'a> {
    c: &'a FinWuDgCat,
    x: usize,
    y: usize,
}

impl Ctx<'_> {
    /// `u₁ ∘ … ∘ u_k` along `objs[0] ← … ← objs[k]`.
    fn mul(&self, objs: &[usize], us: &[&Vector]) -> Result<Vector, LiftError> {
        let us: Vec<&[Scalar]> = us.iter().map(|v| v.as_slice()).collect();
        self.c.compose_chain(objs, &us).map_err(|u| LiftError::Undefined(u.0))
    }

    fn sub(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        a.iter().zip(b).map(|(s, t)| s - t).collect()
    }

    fn add(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        a.iter().zip(b).map(|(s, t)| s + t).collect()
    }

    fn check(&self, name: &str, obj: (usize, usize), residual: Vector) -> RelationCheck {
        let holds = residual.iter().all(Scalar::is_zero);
        RelationCheck {
            name: name.into(),
            holds,
            residual: (!holds).then(|| self.c.vec_text(obj.0, obj.1, &residual)),
        }
    }

    fn relations(&self, k: &KImages) -> Result<Vec<RelationCheck>, LiftError> {
        let (c, x, y) = (self.c, self.x, self.y);
        let (ux, uy) = (c.id(x).clone(), c.id(y).clone());
        let mut out = vec![
            self.check("df = 0", (x, y), c.diff(x, y, &k.f)),
            self.check("dg = 0", (y, x), c.diff(y, x, &k.g)),
        ];
        let gf = self.mul(&[x, y, x], &[&k.g, &k.f])?;
        out.push(self.check("gf = id0 + dh0", (x, x), self.sub(&self.sub(&gf, &ux), &c.diff(x, x, &k.h0))));
        let fg = self.mul(&[y, x, y], &[&k.f, &k.g])?;
        out.push(self.check("fg = id1 + dh1", (y, y), self.sub(&self.sub(&fg, &uy), &c.diff(y, y, &k.h1))));
        let h1f = self.mul(&[y, y, x], &[&k.h1, &k.f])?;
        let fh0 = self.mul(&[y, x, x], &[&k.f, &k.h0])?;
        out.push(self.check("dr = h1f − fh0", (x, y), self.sub(&c.diff(x, y, &k.r), &self.sub(&h1f, &fh0))));
        let mut sandwiched = true;
        for (v, s, t) in [(&k.f, x, y), (&k.g, y, x), (&k.h0, x, x), (&k.h1, y, y), (&k.r, x, y)] {
            let w = self.mul(&[t, t, s, s], &[c.id(t), v, c.id(s)])?;
            sandwiched &= w == *v;
        }
        out.push(RelationCheck {
            name: "1·a·1 = a on every image".into(),
            holds: sandwiched,
            residual: None,
        });
        Ok(out)
    }
}

fn degree_ok(c: &FinWuDgCat, x: usize, y: usize, v: &[Scalar], deg: i32) -> bool {
    v.len() == c.dim(x, y) && v.iter().enumerate().all(|(i, s)| s.is_zero() || c.degree(x, y, i) == deg)
}

/// Solves `db = target` with `b` in degree `deg` of `C(x, y)`.
pub fn primitive(c: &FinWuDgCat, x: usize, y: usize, deg: i32, target: &[Scalar]) -> Option<Vector> {
    let h = c.hom(x, y);
    let cols = h.in_degree(deg);
    let sol = solve(&select_columns(&h.d, &cols).to_field(c.field), &crate::dgcat::vector::to_field(target, c.field))?;
    let mut b = c.zero(x, y);
    for (i, s) in cols.iter().zip(sol) {
        b[*i] = s.to_field(c.field);
    }
    Some(b)
}

pub fn lift_equivalence(c: &FinWuDgCat, inp: &LiftInput) -> Result<LiftReport, LiftError> {
    let (x, y) = (inp.x, inp.y);
    if x >= c.n_objects() || y >= c.n_objects() {
        return Err(LiftError::Shape("object out of range".into()));
    }
    for (name, v, s, t, deg) in [
        ("ξ", &inp.xi, x, y, 0),
        ("η", &inp.eta, y, x, 0),
        ("h_x", &inp.h_x, x, x, -1),
        ("h_y", &inp.h_y, y, y, -1),
    ] {
        if !degree_ok(c, s, t, v, deg) {
            return Err(LiftError::Shape(format!("{name} is not of degree {deg}")));
        }
    }
    if c.diff(x, y, &inp.xi).iter().any(|s| !s.is_zero()) {
        return Err(LiftError::Shape("ξ is not closed".into()));
    }
    let ctx = Ctx { c, x, y };
    let (ux, uy) = (c.id(x).clone(), c.id(y).clone());
    let xi1 = ctx.mul(&[y, y, x, x], &[&uy, &inp.xi, &ux])?;
    let ex = ctx.mul(&[x, y, x], &[&inp.eta, &xi1])?;
    let rx = ctx.sub(&ctx.sub(&ex, &ux), &c.diff(x, x, &inp.h_x));
    if rx.iter().any(|s| !s.is_zero()) {
        return Err(LiftError::Kcat3 {
            which: "η·ξ' = 1_x + dh_x".into(),
            residual: c.vec_text(x, x, &rx),
        });
    }
    let ey = ctx.mul(&[y, x, y], &[&xi1, &inp.eta])?;
    let ry = ctx.sub(&ctx.sub(&ey, &uy), &c.diff(y, y, &inp.h_y));
    if ry.iter().any(|s| !s.is_zero()) {
        return Err(LiftError::Kcat3 {
            which: "ξ'·η = 1_y + dh_y".into(),
            residual: c.vec_text(y, y, &ry),
        });
    }
    let eta1 = ctx.mul(&[x, x, y, y], &[&ux, &inp.eta, &uy])?;
    let hx1 = ctx.mul(&[x, x, x, x], &[&ux, &inp.h_x, &ux])?;
    let hy1 = ctx.mul(&[y, y, y, y], &[&uy, &inp.h_y, &uy])?;

    let xhe = ctx.mul(&[y, x, x, y], &[&xi1, &hx1, &eta1])?;
    let hxe = ctx.mul(&[y, y, x, y], &[&hy1, &xi1, &eta1])?;
    let xhh = ctx.mul(&[y, x, x, x], &[&xi1, &hx1, &hx1])?;

    let h1 = ctx.sub(&ctx.add(&hy1, &xhe), &hxe);
    let r = ctx.sub(&ctx.mul(&[y, y, x, x], &[&hy1, &xi1, &hx1])?, &xhh);
    let images = KImages {
        f: xi1.clone(),
        g: eta1.clone(),
        h0: hx1.clone(),
        h1,
        r,
    };

    let h1p = ctx.sub(&ctx.sub(&hy1, &xhe), &hxe);
    let rp = ctx.sub(&xhh, &ctx.mul(&[y, y, x, x], &[&h1p, &xi1, &hx1])?);
    let printed = KImages {
        f: xi1.clone(),
        g: eta1,
        h0: hx1,
        h1: h1p,
        r: rp,
    };

    let relations = ctx.relations(&images)?;
    let printed_relations = ctx.relations(&printed)?;
    let delta = ctx.sub(&xi1, &inp.xi);
    Ok(LiftReport {
        images,
        relations,
        printed,
        printed_relations,
        xi_unchanged: delta.iter().all(Scalar::is_zero),
        class_witness: primitive(c, x, y, -1, &delta),
    })
}

fn random_cycle(c: &FinWuDgCat, x: usize, y: usize, deg: i32, rng: &mut ChaCha8Rng) -> Vector {
    let h = c.hom(x, y);
    let cols = h.in_degree(deg);
    let mut v = c.zero(x, y);
    for z in kernel_basis(&select_columns(&h.d, &cols).to_field(c.field)) {
        let s = c.field.from_i64(rng.gen_range(-2..=2));
        for (j, t) in z.iter().enumerate() {
            v[cols[j]] = &v[cols[j]] + &(&s * t);
        }
    }
    v
}

fn random_boundary(c: &FinWuDgCat, x: usize, y: usize, rng: &mut ChaCha8Rng) -> Vector {
    let mut b = c.zero(x, y);
    for i in c.hom(x, y).in_degree(-1) {
        b[i] = c.field.from_i64(rng.gen_range(-2..=2));
    }
    c.diff(x, y, &b)
}

/// A random weakly unital category with non-strict units and a lifting
/// problem in it: `ξ: x₀ → x₁` a perturbed homotopy equivalence, `η` a
/// perturbed inverse, and homotopies solved from the first two.
pub fn random_lift_input(seed: u64, field: Field) -> Option<(FinWuDgCat, LiftInput)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=2);
    let c = random_wu_keeping(seed, field, &[k, k], 1, 2).ok()?.model.cat;
    let h0 = h0_category(&c);
    let (u, v) = h0.find_iso(0, 1, seed)?;
    let (x, y) = (0, 1);
    let add = |a: &Vector, b: &Vector| -> Vector { a.iter().zip(b).map(|(s, t)| s + t).collect() };
    let xi = add(&h0.rep(x, y, &u), &random_boundary(&c, x, y, &mut rng));
    let eta = add(&h0.rep(y, x, &v), &random_boundary(&c, y, x, &mut rng));
    let ctx = Ctx { c: &c, x, y };
    let xi1 = ctx.mul(&[y, y, x, x], &[c.id(y), &xi, c.id(x)]).ok()?;
    let tx = ctx.sub(&ctx.mul(&[x, y, x], &[&eta, &xi1]).ok()?, c.id(x));
    let ty = ctx.sub(&ctx.mul(&[y, x, y], &[&xi1, &eta]).ok()?, c.id(y));
    let h_x = add(&primitive(&c, x, x, -1, &tx)?, &random_cycle(&c, x, x, -1, &mut rng));
    let h_y = add(&primitive(&c, y, y, -1, &ty)?, &random_cycle(&c, y, y, -1, &mut rng));
    Some((c, LiftInput { x, y, xi, eta, h_x, h_y }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::construct::{ChainSpace, EndModel};
    use crate::exactlinalg::SparseMatrix;

    fn strict_pair(field: Field) -> EndModel {
        let z = |n| SparseMatrix::zeros(n, n);
        EndModel::new(
            field,
            &["a", "b"],
            vec![ChainSpace::new(vec![0, 0], z(2)), ChainSpace::new(vec![0, 0], z(2))],
            1,
        )
    }

    #[test]
    fn strict_case_collapses() {
        let m = strict_pair(Field::Rational);
        let c = &m.cat;
        let xi = m.vec_of(0, 1, &SparseMatrix::from_int_rows(&[&[1, 1], &[0, 1]]));
        let eta = m.vec_of(1, 0, &SparseMatrix::from_int_rows(&[&[1, -1], &[0, 1]]));
        let inp = LiftInput {
            x: 0,
            y: 1,
            xi: xi.clone(),
            eta,
            h_x: c.zero(0, 0),
            h_y: c.zero(1, 1),
        };
        let r = lift_equivalence(c, &inp).unwrap();
        assert!(r.passed() && r.printed_passed());
        assert!(r.xi_unchanged);
        assert_eq!(r.images.f, xi);
        assert!(r.images.h1.iter().all(Scalar::is_zero));
        assert!(r.images.r.iter().all(Scalar::is_zero));
    }

    #[test]
    fn rejects_bad_homotopies() {
        let m = strict_pair(Field::Rational);
        let c = &m.cat;
        let xi = m.vec_of(0, 1, &SparseMatrix::from_int_rows(&[&[1, 0], &[0, 1]]));
        let eta = m.vec_of(1, 0, &SparseMatrix::from_int_rows(&[&[2, 0], &[0, 1]]));
        let inp = LiftInput {
            x: 0,
            y: 1,
            xi,
            eta,
            h_x: c.zero(0, 0),
            h_y: c.zero(1, 1),
        };
        assert!(matches!(lift_equivalence(c, &inp), Err(LiftError::Kcat3 { .. })));
    }

    #[test]
    fn random_weak_lifts() {
        let mut n = 0;
        let mut printed_fails = 0;
        for seed in 0..40 {
            for field in [Field::Rational, Field::prime()] {
                let Some((c, inp)) = random_lift_input(seed, field) else { continue };
                let r = lift_equivalence(&c, &inp).unwrap();
                assert!(r.passed(), "seed {seed}: {:?}", r.relations);
                printed_fails += usize::from(!r.printed_passed());
                n += 1;
            }
        }
        assert!(n >= 20, "only {n} samples");
        // the literal formulas break as soon as the homotopies are generic
        assert!(printed_fails > 0);
    }
}
