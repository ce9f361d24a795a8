//! The generating objects `A`, `B`, `𝒫(n)`, `𝒞(n)`, the maps `α(n)`,
//! `β(n)`, and probes of their lifting description: functors out of
//! `𝒫(n)` are degree `−n` morphisms, functors out of `𝒞(n)` are closed
//! degree `−n+1` morphisms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exactlinalg::{kernel_basis, rank, Field, SparseMatrix};
use crate::treeops::Mode;

use super::axioms::check_wu_axioms;
use super::category::{FinWuDgCat, HomSpace};
use super::free::{free_wu_category, DgGraph, Edge, FreeCategory, FreeError, GraphMap, Truncation};
use super::functor::{check_functor, WuFunctor};
use super::vector::Vector;

/// One object, no morphisms besides the unit.
pub fn point_graph(field: Field) -> DgGraph {
    DgGraph::new(field, vec!["0".into()])
}

/// Two objects, no morphisms besides the units.
pub fn two_points(field: Field) -> DgGraph {
    DgGraph::new(field, vec!["0".into(), "1".into()])
}

/// `u: 0 → 1` of degree `−n` and `v = du`.
pub fn disk_graph(field: Field, n: i32) -> DgGraph {
    let mut g = two_points(field);
    let d = SparseMatrix::from_entries(2, 2, [(1, 0, field.one())]);
    g.set_hom(0, 1, HomSpace::new(vec![-n, 1 - n], vec!["u".into(), "v".into()], d));
    g
}

/// One closed generator `s: 0 → 1` of degree `−n+1`.
pub fn sphere_graph(field: Field, n: i32) -> DgGraph {
    let mut g = two_points(field);
    g.set_hom(0, 1, HomSpace::zero_differential(vec![1 - n], vec!["s".into()]));
    g
}

pub const U: Edge = Edge { src: 0, tgt: 1, idx: 0 };
pub const V: Edge = Edge { src: 0, tgt: 1, idx: 1 };

#[derive(Clone, Debug)]
pub struct GeneratingSet {
    pub n: i32,
    pub a: FreeCategory,
    pub b: FreeCategory,
    pub disk: FreeCategory,
    pub sphere: FreeCategory,
    /// `α(n): B → 𝒫(n)`
    pub alpha: WuFunctor,
    /// `β(n): 𝒞(n) → 𝒫(n)`, `s ↦ v`
    pub beta: WuFunctor,
}

pub fn generating_set(field: Field, n: i32, trunc: Truncation, mode: Mode) -> Result<GeneratingSet, FreeError> {
    let a = free_wu_category(&point_graph(field), trunc, mode)?;
    let b = free_wu_category(&two_points(field), trunc, mode)?;
    let disk = free_wu_category(&disk_graph(field, n), trunc, mode)?;
    let sphere = free_wu_category(&sphere_graph(field, n), trunc, mode)?;
    let ext = |src: &FreeCategory, phi: &GraphMap| src.extend(phi, &disk.cat).map_err(FreeError::Graph);
    let alpha = ext(&b, &GraphMap { obj: vec![0, 1], images: Default::default() })?;
    let beta = ext(
        &sphere,
        &GraphMap {
            obj: vec![0, 1],
            images: [(U, disk.generator(V))].into_iter().collect(),
        },
    )?;
    Ok(GeneratingSet { n, a, b, disk, sphere, alpha, beta })
}

/// Dimension of the space of graph maps `Γ → U(D)` with the given object
/// map, as the kernel of the degree and `d`-compatibility conditions.
pub fn graph_map_space_dim(g: &DgGraph, d: &FinWuDgCat, obj: &[usize]) -> usize {
    let edges = g.edges();
    let mut offsets = Vec::with_capacity(edges.len());
    let mut unknowns = 0;
    for e in &edges {
        offsets.push(unknowns);
        unknowns += d.dim(obj[e.src], obj[e.tgt]);
    }
    let f = d.field;
    let mut rows: Vec<Vec<(usize, crate::exactlinalg::Scalar)>> = Vec::new();
    for (k, e) in edges.iter().enumerate() {
        let (x, y) = (obj[e.src], obj[e.tgt]);
        let h = d.hom(x, y);
        for (i, &deg) in h.degrees.iter().enumerate() {
            if deg != g.degree(*e) {
                rows.push(vec![(offsets[k] + i, f.one())]);
            }
        }
        // d(φ(e)) − φ(de) = 0, coordinate by coordinate
        let de = g.homs[&(e.src, e.tgt)].d.apply(&super::subspace::unit(f, g.dim(e.src, e.tgt), e.idx));
        for r in 0..h.dim() {
            let mut row: Vec<(usize, crate::exactlinalg::Scalar)> =
                h.d.row(r).iter().map(|(c, s)| (offsets[k] + c, s.to_field(f))).collect();
            for (j, s) in de.iter().enumerate() {
                if !s.is_zero() {
                    let kk = edges.iter().position(|e2| *e2 == Edge { idx: j, ..*e }).unwrap();
                    row.push((offsets[kk] + r, -s.clone()));
                }
            }
            rows.push(row);
        }
    }
    let m = SparseMatrix::from_entries(
        rows.len(),
        unknowns,
        rows.into_iter().enumerate().flat_map(|(r, row)| row.into_iter().map(move |(c, s)| (r, c, s))),
    );
    kernel_basis(&m.to_field(f)).len()
}

/// Closed elements of degree `k` in `D(x, y)`, counted as
/// `dim D^k − rank(d|D^k)`.
pub fn cycle_dim(d: &FinWuDgCat, x: usize, y: usize, k: i32) -> usize {
    let h = d.hom(x, y);
    let cols = h.in_degree(k);
    h.in_degree(k).len() - rank(&crate::exactlinalg::select_columns(&h.d, &cols))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GenSetProbe {
    pub n: i32,
    pub cat_prime_target: bool,
    pub mode: String,
    pub pairs: usize,
    pub functors: usize,
    pub disk_dims: bool,
    pub sphere_dims: bool,
    pub functor_axioms: bool,
    pub round_trip: bool,
    pub beta_compatible: bool,
    pub alpha_on_objects: bool,
    pub witness: Option<String>,
}

impl GenSetProbe {
    pub fn passed(&self) -> bool {
        self.disk_dims && self.sphere_dims && self.functor_axioms && self.round_trip && self.beta_compatible && self.alpha_on_objects
    }

    fn fail(&mut self, w: String) {
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }
}

fn random_in_degree(d: &FinWuDgCat, x: usize, y: usize, k: i32, rng: &mut ChaCha8Rng) -> Vector {
    let mut v = d.zero(x, y);
    for i in d.hom(x, y).in_degree(k) {
        v[i] = d.field.from_i64(rng.gen_range(-3..=3));
    }
    v
}

fn random_cycle(d: &FinWuDgCat, x: usize, y: usize, k: i32, rng: &mut ChaCha8Rng) -> Vector {
    let h = d.hom(x, y);
    let cols = h.in_degree(k);
    let ker = kernel_basis(&crate::exactlinalg::select_columns(&h.d, &cols).to_field(d.field));
    let mut v = d.zero(x, y);
    for z in ker {
        let s = d.field.from_i64(rng.gen_range(-3..=3));
        for (j, c) in z.iter().enumerate() {
            v[cols[j]] = v[cols[j]].clone() + s.clone() * c.clone();
        }
    }
    v
}

/// Probes the lifting description of `β(n)` against `D` on every ordered
/// pair of objects. The free categories are taken over `O` when `D` is in
/// `Cat` and over `O'` when `D` only lies in `Cat'`.
pub fn probe_generating_set(d: &FinWuDgCat, n: i32, trunc: Truncation, seed: u64) -> Result<GenSetProbe, FreeError> {
    let cat_prime = check_wu_axioms(d, d.n_max.max(2)).cat_prime;
    let mode = if cat_prime { Mode::OPrime } else { Mode::O };
    let gs = generating_set(d.field, n, trunc, mode)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = 3.min(gs.disk.cat.n_max);
    let mut rep = GenSetProbe {
        n,
        cat_prime_target: cat_prime,
        mode: format!("{mode:?}"),
        disk_dims: true,
        sphere_dims: true,
        functor_axioms: true,
        round_trip: true,
        beta_compatible: true,
        alpha_on_objects: true,
        ..Default::default()
    };
    let no = d.n_objects();
    for x in 0..no {
        for y in 0..no {
            rep.pairs += 1;
            let obj = vec![x, y];
            let dd = graph_map_space_dim(&gs.disk.graph, d, &obj);
            if dd != d.hom(x, y).in_degree(-n).len() {
                rep.disk_dims = false;
                rep.fail(format!("({x}, {y}): {dd} disk maps, dim D^{} = {}", -n, d.hom(x, y).in_degree(-n).len()));
            }
            let sd = graph_map_space_dim(&gs.sphere.graph, d, &obj);
            if sd != cycle_dim(d, x, y, 1 - n) {
                rep.sphere_dims = false;
                rep.fail(format!("({x}, {y}): {sd} sphere maps, dim Z^{} = {}", 1 - n, cycle_dim(d, x, y, 1 - n)));
            }
            let a = random_in_degree(d, x, y, -n, &mut rng);
            let da = d.diff(x, y, &a);
            let phi = GraphMap {
                obj: obj.clone(),
                images: [(U, a.clone()), (V, da.clone())].into_iter().collect(),
            };
            let fa = match gs.disk.extend(&phi, d) {
                Ok(f) => f,
                Err(e) => {
                    rep.functor_axioms = false;
                    rep.fail(format!("({x}, {y}): extension failed: {e}"));
                    continue;
                }
            };
            rep.functors += 1;
            let r = check_functor(&fa, &gs.disk.cat, d, nf);
            if !r.passed() {
                rep.functor_axioms = false;
                rep.fail(format!("({x}, {y}): Φ_a: {}", r.first_failure().unwrap_or_default()));
            }
            if !gs.disk.restrict(&fa, d).equals(&phi) {
                rep.round_trip = false;
                rep.fail(format!("({x}, {y}): restrict(Φ_a) ≠ a"));
            }
            let fb = gs.beta.then(&fa, &gs.sphere.cat, &gs.disk.cat, d);
            let want = GraphMap {
                obj: obj.clone(),
                images: [(U, da)].into_iter().collect(),
            };
            if !gs.sphere.restrict(&fb, d).equals(&want) {
                rep.beta_compatible = false;
                rep.fail(format!("({x}, {y}): Φ_a∘β ≠ Φ_da"));
            }
            let fo = gs.alpha.then(&fa, &gs.b.cat, &gs.disk.cat, d);
            if fo.obj != obj || !check_functor(&fo, &gs.b.cat, d, nf).passed() {
                rep.alpha_on_objects = false;
                rep.fail(format!("({x}, {y}): Φ_a∘α is not the object pair"));
            }
            let z = random_cycle(d, x, y, 1 - n, &mut rng);
            let psi = GraphMap {
                obj: obj.clone(),
                images: [(U, z)].into_iter().collect(),
            };
            match gs.sphere.extend(&psi, d) {
                Ok(fz) => {
                    rep.functors += 1;
                    let r = check_functor(&fz, &gs.sphere.cat, d, nf);
                    if !r.passed() {
                        rep.functor_axioms = false;
                        rep.fail(format!("({x}, {y}): Φ_z: {}", r.first_failure().unwrap_or_default()));
                    }
                    if !gs.sphere.restrict(&fz, d).equals(&psi) {
                        rep.round_trip = false;
                        rep.fail(format!("({x}, {y}): restrict(Φ_z) ≠ z"));
                    }
                }
                Err(e) => {
                    rep.functor_axioms = false;
                    rep.fail(format!("({x}, {y}): extension failed: {e}"));
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::construct::{interval_category, random_wu_category};

    const T: Truncation = Truncation {
        q_max: 2,
        degree_min: -2,
        len: 2,
    };

    #[test]
    fn generating_objects() {
        let f = Field::Rational;
        let gs = generating_set(f, 1, T, Mode::O).unwrap();
        assert_eq!(gs.a.cat.n_objects(), 1);
        assert_eq!(gs.b.cat.dim(0, 1), 0);
        // β sends s to v = du
        let img = gs.beta.apply(&gs.disk.cat, 0, 1, &gs.sphere.generator(U));
        assert_eq!(img, gs.disk.generator(V));
        assert!(check_functor(&gs.beta, &gs.sphere.cat, &gs.disk.cat, 3).passed());
        assert!(check_functor(&gs.alpha, &gs.b.cat, &gs.disk.cat, 3).passed());
    }

    #[test]
    fn space_dims_on_the_interval() {
        let i = interval_category(Field::Rational);
        // I(x, y) = ⟨u, du⟩ in degrees −1, 0
        assert_eq!(graph_map_space_dim(&disk_graph(Field::Rational, 1), &i, &[0, 1]), 1);
        assert_eq!(graph_map_space_dim(&sphere_graph(Field::Rational, 1), &i, &[0, 1]), 1);
        assert_eq!(graph_map_space_dim(&sphere_graph(Field::Rational, 2), &i, &[0, 1]), 0);
        assert_eq!(cycle_dim(&i, 0, 1, -1), 0);
    }

    #[test]
    fn lifting_probes() {
        let i = interval_category(Field::Rational);
        for n in 0..=2 {
            let r = probe_generating_set(&i, n, T, 7).unwrap();
            assert!(r.passed(), "interval n={n}: {:?}", r.witness);
            assert_eq!(r.mode, "O");
        }
        for seed in 0..2 {
            let w = random_wu_category(seed, Field::Rational, &[1, 2], 3).unwrap();
            for n in 0..=2 {
                let r = probe_generating_set(w.cat(), n, T, seed).unwrap();
                assert!(r.passed(), "seed {seed} n={n}: {:?}", r.witness);
            }
        }
    }
}
