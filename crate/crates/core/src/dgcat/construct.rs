//! Concrete categories: endomorphism categories of small complexes,
//! algebras given by structure constants, weak-unit towers solved by
//! linear algebra, and random weakly unital categories.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactlinalg::{solve, Field, Scalar, SparseMatrix};

use super::category::{sign, Arg, FinWuDgCat, HomSpace};
use super::vector::{self, Vector};

/// A finite cochain complex with a chosen homogeneous basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpace {
    pub degrees: Vec<i32>,
    /// `dim × dim`, raising degree by one
    pub d: SparseMatrix,
}

impl ChainSpace {
    pub fn new(degrees: Vec<i32>, d: SparseMatrix) -> Self {
        assert_eq!((d.rows(), d.cols()), (degrees.len(), degrees.len()));
        ChainSpace { degrees, d }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }
}

/// A full subcategory of complexes and graded linear maps, with the
/// coordinates of `Hom(V_x, V_y)` given by matrix entries `(i, j)` at
/// index `i · dim V_x + j`.
#[derive(Clone, Debug)]
pub struct EndModel {
    pub spaces: Vec<ChainSpace>,
    pub cat: FinWuDgCat,
}

impl EndModel {
    pub fn new(field: Field, names: &[&str], spaces: Vec<ChainSpace>, n_max: usize) -> Self {
        assert_eq!(names.len(), spaces.len());
        let spaces: Vec<ChainSpace> = spaces
            .into_iter()
            .map(|s| ChainSpace::new(s.degrees, s.d.to_field(field)))
            .collect();
        let mut cat = FinWuDgCat::new(field, names.iter().map(|s| s.to_string()).collect(), n_max);
        let no = spaces.len();
        for x in 0..no {
            for y in 0..no {
                let (vx, vy) = (&spaces[x], &spaces[y]);
                let (nx, ny) = (vx.dim(), vy.dim());
                let mut degrees = Vec::with_capacity(nx * ny);
                let mut names = Vec::with_capacity(nx * ny);
                for i in 0..ny {
                    for j in 0..nx {
                        degrees.push(vy.degrees[i] - vx.degrees[j]);
                        names.push(format!("E{i},{j}"));
                    }
                }
                // D(E_ij) = d_y E_ij − (−1)^{|E_ij|} E_ij d_x
                let mut entries = Vec::new();
                for i in 0..ny {
                    for j in 0..nx {
                        let col = i * nx + j;
                        let s = sign(degrees[col] + 1);
                        for (k, v) in vy.d.entries().filter(|(_, c, _)| *c == i).map(|(r, _, v)| (r, v.clone())) {
                            entries.push((k * nx + j, col, v));
                        }
                        for (l, v) in vx.d.row(j).iter() {
                            // (E_ij d_x) = Σ_l d_x[j][l] E_il
                            entries.push((i * nx + l, col, &s * v));
                        }
                    }
                }
                let d = SparseMatrix::from_entries(nx * ny, nx * ny, entries);
                cat.set_hom(x, y, HomSpace::new(degrees, names, d));
            }
        }
        for x in 0..no {
            for y in 0..no {
                for z in 0..no {
                    let (nx, ny, nz) = (spaces[x].dim(), spaces[y].dim(), spaces[z].dim());
                    for a in 0..nz {
                        for b in 0..ny {
                            for c in 0..nx {
                                let mut v = vector::zeros(field, nx * nz);
                                v[a * nx + c] = field.one();
                                cat.set_comp(x, y, z, a * ny + b, b * nx + c, v);
                            }
                        }
                    }
                }
            }
        }
        for x in 0..no {
            let id = SparseMatrix::identity(spaces[x].dim());
            let v = vec_of_dims(field, spaces[x].dim(), spaces[x].dim(), &id);
            cat.set_unit(x, v);
        }
        EndModel { spaces, cat }
    }

    pub fn vec_of(&self, x: usize, y: usize, m: &SparseMatrix) -> Vector {
        vec_of_dims(self.cat.field, self.spaces[x].dim(), self.spaces[y].dim(), m)
    }

    pub fn mat_of(&self, x: usize, y: usize, v: &[Scalar]) -> SparseMatrix {
        let (nx, ny) = (self.spaces[x].dim(), self.spaces[y].dim());
        SparseMatrix::from_entries(
            ny,
            nx,
            v.iter()
                .enumerate()
                .filter(|(_, s)| !s.is_zero())
                .map(|(k, s)| (k / nx, k % nx, s.clone())),
        )
    }
}

fn vec_of_dims(field: Field, nx: usize, ny: usize, m: &SparseMatrix) -> Vector {
    assert_eq!((m.rows(), m.cols()), (ny, nx));
    let mut v = vector::zeros(field, nx * ny);
    for (i, j, s) in m.entries() {
        v[i * nx + j] = s.to_field(field);
    }
    v
}

/// Solves the A∞-functor identities for `p_2, …, p_n_max` on all tuples
/// containing a formal unit, given the units and the lower tower. Each
/// block of tuples sharing their unit positions and objects is one linear
/// system.
pub fn complete_tower(c: &mut FinWuDgCat, n_max: usize) -> Result<(), String> {
    c.n_max = n_max;
    for n in 2..=n_max {
        let mut blocks: BTreeMap<(Vec<bool>, Vec<usize>), Vec<Vec<Arg>>> = BTreeMap::new();
        c.for_each_tuple(n, true, |args| {
            let ones = args.iter().map(Arg::is_one).collect();
            let mut objs: Vec<usize> = args.iter().map(Arg::tgt).collect();
            objs.push(args[n - 1].src());
            blocks.entry((ones, objs)).or_default().push(args.to_vec());
        });
        for tuples in blocks.values() {
            solve_block(c, tuples)?;
        }
    }
    Ok(())
}

fn solve_block(c: &mut FinWuDgCat, tuples: &[Vec<Arg>]) -> Result<(), String> {
    let n = tuples[0].len();
    let (x, y) = (tuples[0][n - 1].src(), tuples[0][0].tgt());
    let hom = c.hom(x, y).clone();
    let dim = hom.dim();
    let index: BTreeMap<&Vec<Arg>, usize> = tuples.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let out_deg = |t: &[Arg]| t.iter().map(|a| c.arg_degree(a)).sum::<i32>() - n as i32 + 1;
    let mut cols: Vec<(usize, usize)> = Vec::new();
    let mut col_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (ti, t) in tuples.iter().enumerate() {
        for k in hom.in_degree(out_deg(t)) {
            col_of.insert((ti, k), cols.len());
            cols.push((ti, k));
        }
    }
    if cols.is_empty() {
        for t in tuples {
            let r = c.ainf_residual(t).map_err(|e| e.to_string())?;
            if !vector::is_zero(&r) {
                return Err(format!("no room for p_{n}{}", c.args_text(t)));
            }
        }
        return Ok(());
    }
    let mut rhs = vec![c.field.zero(); tuples.len() * dim];
    let mut entries = Vec::new();
    for (ti, t) in tuples.iter().enumerate() {
        let known = c.ainf_residual(t).map_err(|e| e.to_string())?;
        for (k, v) in known.iter().enumerate() {
            rhs[ti * dim + k] = -v;
        }
        for k in hom.in_degree(out_deg(t)) {
            let col = col_of[&(ti, k)];
            for (r, v) in hom.d.entries().filter(|(_, cc, _)| *cc == k).map(|(r, _, v)| (r, v.clone())) {
                entries.push((ti * dim + r, col, v));
            }
        }
        let mut before = 0;
        for i in 0..n {
            if let Arg::Mor { src, tgt, idx } = t[i] {
                let s = sign(n as i32 - 1 + before + 1);
                let h = c.hom(src, tgt);
                for (m, v) in h.d.entries().filter(|(_, cc, _)| *cc == idx).map(|(r, _, v)| (r, v.clone())) {
                    let mut t2 = t.clone();
                    t2[i] = Arg::Mor { src, tgt, idx: m };
                    let tj = index[&t2];
                    for k in hom.in_degree(out_deg(&t2)) {
                        entries.push((ti * dim + k, col_of[&(tj, k)], &s * &v));
                    }
                }
            }
            before += c.arg_degree(&t[i]);
        }
    }
    let m = SparseMatrix::from_entries(tuples.len() * dim, cols.len(), entries);
    let sol = solve(&m, &rhs).ok_or_else(|| format!("tower obstructed at p_{n}{}", c.args_text(&tuples[0])))?;
    let mut vals = vec![c.zero(x, y); tuples.len()];
    for (col, &(ti, k)) in cols.iter().enumerate() {
        vals[ti][k] = sol[col].to_field(c.field);
    }
    for (t, v) in tuples.iter().zip(vals) {
        c.set_p(t.clone(), v);
    }
    Ok(())
}

/// One-object category from structure constants: `mult[(a, b)]` is the
/// coordinate vector of `a · b`.
pub fn algebra(
    field: Field,
    object: &str,
    basis: &[(&str, i32)],
    d: SparseMatrix,
    mult: &BTreeMap<(usize, usize), Vec<i64>>,
    unit: usize,
) -> FinWuDgCat {
    let mut c = FinWuDgCat::new(field, vec![object.to_string()], 1);
    let h = HomSpace::new(
        basis.iter().map(|b| b.1).collect(),
        basis.iter().map(|b| b.0.to_string()).collect(),
        d.to_field(field),
    );
    let n = h.dim();
    c.set_hom(0, 0, h);
    for (&(a, b), v) in mult {
        c.set_comp(0, 0, 0, a, b, vector::from_ints(field, v));
    }
    let mut u = vector::zeros(field, n);
    u[unit] = field.one();
    c.set_unit(0, u);
    c
}

pub fn ground_field(field: Field) -> FinWuDgCat {
    let mut m = BTreeMap::new();
    m.insert((0, 0), vec![1]);
    algebra(field, "0", &[("id", 0)], SparseMatrix::zeros(1, 1), &m, 0)
}

/// `k[x]/(x²)` with `x` in degree `deg`.
pub fn dual_numbers(field: Field, deg: i32) -> FinWuDgCat {
    let mut m = BTreeMap::new();
    m.insert((0, 0), vec![1, 0]);
    m.insert((0, 1), vec![0, 1]);
    m.insert((1, 0), vec![0, 1]);
    algebra(field, "0", &[("1", 0), ("x", deg)], SparseMatrix::zeros(2, 2), &m, 0)
}

/// `End(V)` for `V = k ⊕ (w⁻² → w⁻¹) ⊕ (v⁻¹ → v⁰)`: cohomology `k` in
/// degree 0 with acyclic room in degrees −2 … 2.
pub fn padded_end(field: Field) -> FinWuDgCat {
    let d = SparseMatrix::from_entries(5, 5, [(2, 1, Scalar::int(1)), (4, 3, Scalar::int(1))]);
    EndModel::new(field, &["V"], vec![ChainSpace::new(vec![0, -2, -1, -1, 0], d)], 1).cat
}

/// `M_2(k)` with basis `E11, E12, E21, E22`.
pub fn matrix_algebra(field: Field) -> FinWuDgCat {
    let mut m = BTreeMap::new();
    for i in 0..2 {
        for j in 0..2 {
            for l in 0..2 {
                let mut v = vec![0; 4];
                v[2 * i + l] = 1;
                m.insert((2 * i + j, 2 * j + l), v);
            }
        }
    }
    let mut c = algebra(
        field,
        "0",
        &[("E11", 0), ("E12", 0), ("E21", 0), ("E22", 0)],
        SparseMatrix::zeros(4, 4),
        &m,
        0,
    );
    c.set_unit(0, vector::from_ints(field, &[1, 0, 0, 1]));
    c
}

/// Objects `x`, `y` with `C(x, y) = {u, du}`, `|u| = −1`, and identities.
pub fn interval_category(field: Field) -> FinWuDgCat {
    let mut c = FinWuDgCat::new(field, vec!["x".into(), "y".into()], 1);
    for o in 0..2 {
        c.set_hom(o, o, HomSpace::zero_differential(vec![0], vec![format!("id_{}", c.objects[o])]));
        c.set_unit(o, vec![field.one()]);
    }
    let d = SparseMatrix::from_entries(2, 2, [(1, 0, field.one())]);
    c.set_hom(0, 1, HomSpace::new(vec![-1, 0], vec!["u".into(), "du".into()], d));
    c.set_comp(0, 0, 0, 0, 0, vec![field.one()]);
    c.set_comp(1, 1, 1, 0, 0, vec![field.one()]);
    for b in 0..2 {
        c.set_comp(0, 1, 1, 0, b, c.basis(0, 1, b));
        c.set_comp(0, 0, 1, b, 0, c.basis(0, 1, b));
    }
    c
}

/// `V = H ⊕ W` with `H` in degree 0 and `W` a sum of acyclic pairs
/// `w⁻ → w⁰`, written in a random degree-preserving basis. `proj` is the
/// projection onto `H` along `W` and `homotopy` the map `w⁰ ↦ w⁻`, so
/// `id − proj = d·homotopy + homotopy·d`.
#[derive(Clone, Debug)]
pub struct SplitSpace {
    pub space: ChainSpace,
    pub proj: SparseMatrix,
    pub homotopy: SparseMatrix,
    pub h_dim: usize,
    /// the degree-preserving change of basis applied to the normal form
    pub change: SparseMatrix,
}

impl SplitSpace {
    /// Projection onto `H` and the first `pairs` acyclic pairs, along the
    /// remaining pairs; a closed idempotent homotopic to the identity.
    pub fn proj_keeping(&self, pairs: usize) -> SparseMatrix {
        let n = self.space.dim();
        let keep = (self.h_dim + 2 * pairs).min(n);
        let e = SparseMatrix::from_entries(n, n, (0..keep).map(|i| (i, i, Scalar::int(1))));
        let field = self.proj.field();
        self.change.mul(&e).mul(&inverse(&self.change)).to_field(field)
    }
}

pub fn random_split_space<R: Rng>(rng: &mut R, field: Field, h_dim: usize, pairs: usize) -> SplitSpace {
    let n = h_dim + 2 * pairs;
    let mut degrees = vec![0; h_dim];
    let mut d = Vec::new();
    let mut s = Vec::new();
    for k in 0..pairs {
        let lo = h_dim + 2 * k;
        degrees.push(-1);
        degrees.push(0);
        d.push((lo + 1, lo, Scalar::int(1)));
        s.push((lo, lo + 1, Scalar::int(1)));
    }
    let d = SparseMatrix::from_entries(n, n, d);
    let s = SparseMatrix::from_entries(n, n, s);
    let e = SparseMatrix::from_entries(n, n, (0..h_dim).map(|i| (i, i, Scalar::int(1))));
    // unitriangular change of basis within each degree
    let mut g = Vec::new();
    for i in 0..n {
        g.push((i, i, Scalar::int(1)));
        for j in 0..i {
            if degrees[i] == degrees[j] && rng.gen_bool(0.5) {
                g.push((i, j, Scalar::int(rng.gen_range(-2..=2))));
            }
        }
    }
    let g = SparseMatrix::from_entries(n, n, g);
    let gi = inverse(&g);
    let conj = |m: &SparseMatrix| g.mul(m).mul(&gi).to_field(field);
    SplitSpace {
        space: ChainSpace::new(degrees, conj(&d)),
        proj: conj(&e),
        homotopy: conj(&s),
        h_dim,
        change: g,
    }
}

pub fn inverse(m: &SparseMatrix) -> SparseMatrix {
    let n = m.rows();
    let cols: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut e = vec![Scalar::int(0); n];
            e[i] = Scalar::int(1);
            solve(m, &e).expect("invertible matrix")
        })
        .collect();
    SparseMatrix::from_columns(n, &cols)
}

/// A random weakly unital dg category with non-strict units: the
/// endomorphism category of split spaces, with `id_x` the projection onto
/// `H_x` and the tower through `n_max` solved for.
#[derive(Clone, Debug)]
pub struct RandomWu {
    pub model: EndModel,
    pub split: Vec<SplitSpace>,
}

impl RandomWu {
    pub fn cat(&self) -> &FinWuDgCat {
        &self.model.cat
    }
}

pub fn random_wu_category(seed: u64, field: Field, h_dims: &[usize], n_max: usize) -> Result<RandomWu, String> {
    random_wu_keeping(seed, field, h_dims, 0, n_max)
}

/// As `random_wu_category`, with `kept + 1` acyclic pairs per object and
/// `id_x` keeping `kept` of them, so `1·C·1` is not minimal.
pub fn random_wu_keeping(seed: u64, field: Field, h_dims: &[usize], kept: usize, n_max: usize) -> Result<RandomWu, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let split: Vec<SplitSpace> = h_dims
        .iter()
        .map(|&h| random_split_space(&mut rng, field, h, kept + 1))
        .collect();
    let names: Vec<String> = (0..h_dims.len()).map(|i| format!("x{i}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut model = EndModel::new(field, &names, split.iter().map(|s| s.space.clone()).collect(), n_max);
    for (x, s) in split.iter().enumerate() {
        let v = model.vec_of(x, x, &s.proj_keeping(kept));
        model.cat.set_unit(x, v);
    }
    complete_tower(&mut model.cat, n_max)?;
    Ok(RandomWu { model, split })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::check_wu_axioms;

    #[test]
    fn algebras_are_strict() {
        for f in [Field::Rational, Field::prime()] {
            for c in [ground_field(f), dual_numbers(f, 0), matrix_algebra(f), interval_category(f)] {
                let r = check_wu_axioms(&c, 3);
                assert!(r.passed(), "{:?}", r.failures());
                assert!(r.strict && !r.cat_prime);
            }
        }
    }

    #[test]
    fn end_category_is_dg() {
        let f = Field::Rational;
        let d = SparseMatrix::from_entries(2, 2, [(1, 0, Scalar::int(1))]);
        let m = EndModel::new(
            f,
            &["a", "b"],
            vec![ChainSpace::new(vec![-1, 0], d), ChainSpace::new(vec![0], SparseMatrix::zeros(1, 1))],
            1,
        );
        let r = check_wu_axioms(&m.cat, 1);
        assert!(r.passed(), "{:?}", r.failures());
        assert!(r.strict);
        assert_eq!(m.cat.dim(0, 1), 2);
    }

    #[test]
    fn random_units_are_weak() {
        for seed in 0..3 {
            let w = random_wu_category(seed, Field::Rational, &[1, 2], 3).unwrap();
            let r = check_wu_axioms(w.cat(), 3);
            assert!(r.passed(), "seed {seed}: {:?}", r.failures());
            assert!(!r.strict);
            assert!(!w.cat().ptower.is_empty());
        }
        let w = random_wu_keeping(4, Field::Rational, &[1, 1], 1, 3).unwrap();
        let r = check_wu_axioms(w.cat(), 3);
        assert!(r.passed() && !r.strict, "{:?}", r.failures());
    }
}
