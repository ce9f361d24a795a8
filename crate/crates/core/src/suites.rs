//! Batch runs over the modules: the operad cohomology grid and the
//! category suites, with serializable reports. Shared by the command line
//! tool and the acceptance target.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::barcobar::{
    check_ainf_functor, check_projection, random_unital_ainf, unital_ainf_correspondence, AinfMap, BarCobarError, Letter,
};
use crate::dgcat::adjunction::{conjugation, l_quotient, probe_adjunction, r_unitize, random_units, tower_kill_residual};
use crate::dgcat::construct::{dual_numbers, ground_field, interval_category, padded_end, random_wu_category, ChainSpace, EndModel};
use crate::dgcat::free::Truncation;
use crate::dgcat::gensets::probe_generating_set;
use crate::dgcat::limits::{copair, coproduct, equalizer, factor_through_sub, pair, product, saturate_ideal};
use crate::dgcat::{
    check_conditions, check_functor, check_wu_axioms, good_coequalizer, kernel_pair, matrix_counterexample, predicates,
    sample_family, strict_units, vector, CoeqError, FinWuDgCat, WuFunctor,
};
use crate::exactlinalg::{cohomology_dims_in, rank, Field, SparseMatrix};
use crate::kontsevich::{
    build_k, drinfeld_fragment_check, first_coboundary, footnote_target, lift_equivalence, random_lift_input, verify_k,
    KError, LiftError,
};
use crate::treeops::Mode;
use crate::wuoperad::{
    cofree_cobar_complex, h0_class_check, operad_complex_with, truncated_cohomology_with, type_i_segment_complex,
    CohomologyRow, Differential, Fault, OperadError,
};

/// Configuration or precondition errors, as opposed to failed checks.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error("precondition: {0}")]
    Precondition(String),
}

pub fn field_name(f: Field) -> String {
    match f {
        Field::Rational => "rational".into(),
        Field::Prime(p) => format!("prime {p}"),
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub field: String,
    pub checks: Vec<Check>,
    /// field-independent numbers, compared between field modes
    pub invariants: BTreeMap<String, String>,
}

impl SuiteReport {
    fn new(suite: &str, field: Field) -> Self {
        SuiteReport {
            suite: suite.into(),
            field: field_name(field),
            checks: Vec::new(),
            invariants: BTreeMap::new(),
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.invariants.insert(key.into(), value.to_string());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn detail(w: &Option<String>) -> String {
    w.clone().unwrap_or_default()
}

fn failures(r: &crate::dgcat::WuReport) -> String {
    r.failures().iter().map(|c| format!("{}: {}", c.name, c.witness.as_deref().unwrap_or(""))).collect::<Vec<_>>().join("; ")
}

// ---------------------------------------------------------------- operad

#[derive(Clone, Debug)]
pub struct OperadGrid {
    pub arities: Vec<usize>,
    pub q_max: usize,
    pub window: (i32, i32),
    pub modes: Vec<Mode>,
    pub field: Field,
    pub fault: Fault,
}

impl OperadGrid {
    pub fn validate(&self) -> Result<(), SuiteError> {
        let (lo, hi) = self.window;
        if lo > hi {
            return Err(SuiteError::Precondition(format!("empty degree window [{lo}, {hi}]")));
        }
        if hi > 1 {
            return Err(SuiteError::Precondition(format!("window top {hi} exceeds the top degree 1")));
        }
        if self.q_max == 0 {
            return Err(SuiteError::Precondition("stabilization needs Q_max ≥ 1".into()));
        }
        if self.arities.is_empty() || self.modes.is_empty() {
            return Err(SuiteError::Precondition("empty grid".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct OperadCase {
    pub mode: Mode,
    pub arity: usize,
    pub q_max: usize,
    pub at_top: BTreeMap<i32, usize>,
    /// smallest `Q` from which every window degree is constant
    pub stable_from: Option<usize>,
    /// degrees with `H` unchanged between `Q_max − 1` and `Q_max`
    pub stabilized: Vec<i32>,
    /// every stabilized degree has the `Assoc₊` value
    pub matches_pattern: bool,
    /// the p-free representative spans `H⁰`
    pub h0_class: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    SquareNonzero {
        mode: Mode,
        arity: usize,
        q_max: usize,
        tree: String,
        degree: i32,
        witness: String,
    },
    Escaped {
        mode: Mode,
        arity: usize,
        q_max: usize,
        tree: String,
        term: String,
    },
    Pattern {
        mode: Mode,
        arity: usize,
        q_max: usize,
        degree: i32,
        dim: usize,
        expected: usize,
    },
    H0Class {
        mode: Mode,
        arity: usize,
        q_max: usize,
    },
    Other {
        mode: Mode,
        arity: usize,
        message: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct OperadRun {
    pub field: String,
    pub window: (i32, i32),
    pub q_max: usize,
    pub cases: Vec<OperadCase>,
    #[serde(skip)]
    pub rows: Vec<CohomologyRow>,
    pub first_failure: Option<Counterexample>,
}

impl OperadRun {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// `dim H^d` of `Assoc₊(N)`, concentrated in degree 0.
pub fn assoc_dim(d: i32) -> usize {
    usize::from(d == 0)
}

fn operad_error(mode: Mode, arity: usize, e: OperadError) -> Counterexample {
    match e {
        OperadError::SquareNonzero { tree, degree, witness } => Counterexample::SquareNonzero {
            mode,
            arity,
            q_max: 0,
            tree,
            degree,
            witness,
        },
        OperadError::Escaped { tree, term } => Counterexample::Escaped {
            mode,
            arity,
            q_max: 0,
            tree,
            term,
        },
        e => Counterexample::Other {
            mode,
            arity,
            message: e.to_string(),
        },
    }
}

/// The `Q` at which a failing build happened, found by rebuilding.
fn with_failing_q(d: &Differential, c: Counterexample, arity: usize, q_max: usize, lo: i32) -> Counterexample {
    let q = (0..=q_max).find(|&q| operad_complex_with(d, arity, q, lo).is_err()).unwrap_or(q_max);
    match c {
        Counterexample::SquareNonzero {
            mode,
            arity,
            tree,
            degree,
            witness,
            ..
        } => Counterexample::SquareNonzero {
            mode,
            arity,
            q_max: q,
            tree,
            degree,
            witness,
        },
        Counterexample::Escaped { mode, arity, tree, term, .. } => Counterexample::Escaped {
            mode,
            arity,
            q_max: q,
            tree,
            term,
        },
        c => c,
    }
}

/// One grid point: cohomology for `Q = 0..=q_max` and the `H⁰` class.
pub fn operad_case(grid: &OperadGrid, mode: Mode, arity: usize) -> Result<(OperadCase, Vec<CohomologyRow>), Counterexample> {
    let d = Differential::with_fault(mode, grid.fault);
    let tc = truncated_cohomology_with(&d, arity, grid.q_max, grid.window, grid.field)
        .map_err(|e| with_failing_q(&d, operad_error(mode, arity, e), arity, grid.q_max, grid.window.0))?;
    let top = grid.q_max;
    let stabilized: Vec<i32> = tc.at_top().keys().copied().filter(|&k| tc.stabilized_at(top, k)).collect();
    let matches_pattern = stabilized.iter().all(|k| tc.at_top()[k] == assoc_dim(*k));
    // H⁰ only needs degrees −1, 0, 1
    let h0 = operad_complex_with(&d, arity, top, 0).map_err(|e| operad_error(mode, arity, e))?;
    let case = OperadCase {
        mode,
        arity,
        q_max: top,
        at_top: tc.at_top().clone(),
        stable_from: tc.stable_from(),
        stabilized,
        matches_pattern,
        h0_class: h0_class_check(&h0, grid.field),
    };
    Ok((case, tc.rows()))
}

fn case_failure(c: &OperadCase) -> Option<Counterexample> {
    for k in &c.stabilized {
        let dim = c.at_top[k];
        if dim != assoc_dim(*k) {
            return Some(Counterexample::Pattern {
                mode: c.mode,
                arity: c.arity,
                q_max: c.q_max,
                degree: *k,
                dim,
                expected: assoc_dim(*k),
            });
        }
    }
    (!c.h0_class).then_some(Counterexample::H0Class {
        mode: c.mode,
        arity: c.arity,
        q_max: c.q_max,
    })
}

/// Runs the grid in mode-major order and stops at the first failure.
pub fn run_operad_grid(grid: &OperadGrid) -> Result<OperadRun, SuiteError> {
    grid.validate()?;
    let mut run = OperadRun {
        field: field_name(grid.field),
        window: grid.window,
        q_max: grid.q_max,
        cases: Vec::new(),
        rows: Vec::new(),
        first_failure: None,
    };
    'grid: for &mode in &grid.modes {
        for &n in &grid.arities {
            match operad_case(grid, mode, n) {
                Ok((case, rows)) => {
                    run.first_failure = case_failure(&case);
                    run.cases.push(case);
                    run.rows.extend(rows);
                    if run.first_failure.is_some() {
                        break 'grid;
                    }
                }
                Err(c) => {
                    run.first_failure = Some(c);
                    break 'grid;
                }
            }
        }
    }
    Ok(run)
}

/// The pattern complexes `type_i_segment_complex(i)` for `i ≤ i_max` and
/// the cobar of the cofree coalgebra at `n_max`.
pub fn aux_suite(field: Field, i_max: usize, n_max: usize) -> SuiteReport {
    let mut r = SuiteReport::new("aux", field);
    for i in 1..=i_max {
        let k = type_i_segment_complex(i);
        let h = cohomology_dims_in(&k.complex, field);
        let bad: Vec<String> = h
            .dims
            .iter()
            .filter(|(d, n)| **n > 0 && !k.edge_degrees.contains(d))
            .map(|(d, n)| format!("H^{d} = {n}"))
            .collect();
        r.check(&format!("pattern complex i_max={i} acyclic off the edge"), bad.is_empty(), bad.join(", "));
        r.note(&format!("pattern_{i}"), format!("{:?}", h.dims));
    }
    let k2 = cofree_cobar_complex(n_max);
    let h = cohomology_dims_in(&k2.complex, field);
    let nonzero: BTreeMap<i32, usize> = h.dims.iter().filter(|(_, n)| **n > 0).map(|(d, n)| (*d, *n)).collect();
    let want: BTreeMap<i32, usize> = [(0, 1)].into_iter().collect();
    r.check(&format!("cobar of cofree n_max={n_max}: H = k[0]"), nonzero == want, format!("{nonzero:?}"));
    r.note("cobar_cofree", format!("{:?}", h.dims));
    r
}

// ------------------------------------------------------------ categories

#[derive(Clone, Copy, Debug)]
pub struct CategoryConfig {
    pub field: Field,
    /// word length for `K` and letter bound for bar-cobar
    pub len: usize,
    /// tower bound for bar-cobar
    pub n_max: usize,
    pub seed: u64,
}

impl Default for CategoryConfig {
    fn default() -> Self {
        CategoryConfig {
            field: Field::Rational,
            len: 4,
            n_max: 4,
            seed: 0,
        }
    }
}

/// Random lifting problems required by the Kontsevich suite.
pub const LIFT_SAMPLES: usize = 20;
/// Taylor bound of the A∞ correspondence round trip.
pub const CORRESPONDENCE_N: usize = 3;

pub fn kontsevich_suite(cfg: &CategoryConfig) -> Result<SuiteReport, SuiteError> {
    let field = cfg.field;
    let mut r = SuiteReport::new("kontsevich", field);
    let k = build_k(cfg.len, field).map_err(|e| match e {
        KError::InsufficientLength(_) => SuiteError::Precondition(e.to_string()),
        e => SuiteError::Precondition(e.to_string()),
    })?;
    let rep = verify_k(&k);
    let bad: Vec<&str> = rep.relations.iter().filter(|x| !x.1).map(|x| x.0.as_str()).collect();
    r.check("K relations", bad.is_empty(), bad.join(", "));
    r.check("K d² = 0", rep.d_squared_zero, detail(&rep.witness));
    r.note("k_words", rep.words);
    r.note("k_interior_words", rep.interior_words);
    let ax = check_wu_axioms(&k.cat, 1);
    r.check("K is a strict (partial) dg category", ax.passed() && ax.strict, failures(&ax));

    let dr = drinfeld_fragment_check();
    let irreducible: Vec<String> = dr.relations.iter().flat_map(|t| t.irreducible.clone()).collect();
    r.check("Drinfeld fragment gives the K relations", dr.passed(), irreducible.join(", "));

    let t = footnote_target();
    match first_coboundary(&t, 1, 0, -1, cfg.len) {
        Ok(Some(c)) => {
            r.check("h0 g − g h1 is a coboundary", true, format!("at L = {}", c.len));
            r.note("coboundary_len", c.len);
        }
        Ok(None) => r.check("h0 g − g h1 is a coboundary", false, format!("no primitive with L ≤ {}", cfg.len)),
        Err(e) => r.check("h0 g − g h1 is a coboundary", false, e.to_string()),
    }

    let (mut samples, mut kcat3_rejected, mut printed_fail) = (0, 0, 0);
    let mut first_bad = None;
    for seed in cfg.seed..cfg.seed + 400 {
        if samples >= LIFT_SAMPLES {
            break;
        }
        let Some((c, inp)) = random_lift_input(seed, field) else { continue };
        match lift_equivalence(&c, &inp) {
            Ok(rep) => {
                samples += 1;
                printed_fail += usize::from(!rep.printed_passed());
                if !rep.passed() && first_bad.is_none() {
                    first_bad = Some(format!("seed {seed}: {:?}", rep.relations.iter().find(|x| !x.holds)));
                }
            }
            Err(LiftError::Kcat3 { .. }) => kcat3_rejected += 1,
            Err(e) => {
                first_bad.get_or_insert(format!("seed {seed}: {e}"));
            }
        }
    }
    r.check(
        &format!("lifts satisfy the K relations on {LIFT_SAMPLES} random inputs"),
        samples >= LIFT_SAMPLES && first_bad.is_none(),
        first_bad.unwrap_or_else(|| format!("{samples} samples, {kcat3_rejected} rejected inputs, literal formulas fail on {printed_fail}")),
    );
    Ok(r)
}

fn point_functor(c: &FinWuDgCat, x: usize, v: vector::Vector) -> WuFunctor {
    let mut maps = BTreeMap::new();
    maps.insert((0, 0), SparseMatrix::from_columns(c.dim(x, x), &[v]));
    WuFunctor { obj: vec![x], maps }
}

fn injective(m: &SparseMatrix) -> bool {
    rank(m) == m.cols()
}

/// Stacks `[m_1; m_2; …]`.
fn stack(ms: &[SparseMatrix], cols: usize) -> SparseMatrix {
    let mut entries = Vec::new();
    let mut off = 0;
    for m in ms {
        entries.extend(m.entries().map(|(r, c, s)| (r + off, c, s.clone())));
        off += m.rows();
    }
    SparseMatrix::from_entries(off, cols, entries)
}

fn strict_trio(field: Field) -> EndModel {
    let acyclic = SparseMatrix::from_entries(2, 2, [(1, 0, field.one())]);
    let spaces = vec![
        ChainSpace::new(vec![0, 0], SparseMatrix::zeros(2, 2)),
        ChainSpace::new(vec![-1, 0], acyclic.clone()),
        ChainSpace::new(vec![-1, 0], acyclic),
    ];
    EndModel::new(field, &["a", "b", "c"], spaces, 2)
}

fn equalizer_checks(r: &mut SuiteReport, field: Field, seed: u64) {
    let m = strict_trio(field);
    let c = &m.cat;
    let id = WuFunctor::identity(c);
    let g = conjugation(c, &random_units(c, seed));
    let e = match equalizer(&id, &g, c, c) {
        Ok(e) => e,
        Err(err) => return r.check("equalizer exists", false, err.to_string()),
    };
    let legs_ok = check_functor(&e.incl, &e.cat, c, 2).passed()
        && e.incl.then(&id, &e.cat, c, c).same_as(&e.incl.then(&g, &e.cat, c, c), &e.cat, c);
    r.check("equalizer: incl is a functor with F∘incl = G∘incl", legs_ok, "");
    let mono = e.cat.homs.keys().all(|&(i, j)| injective(&e.incl.map(&e.cat, c, i, j)));
    r.check("equalizer: mediating maps are unique (incl is injective)", mono, "");
    let self_med = factor_through_sub(&e.incl, &e.cat, c, &e.cat, &e.incl);
    let mut ok = self_med.is_some_and(|s| s.same_as(&WuFunctor::identity(&e.cat), &e.cat, &e.cat));
    let k = ground_field(field);
    let mut points = 0;
    for &x in &e.incl.obj {
        let h = point_functor(c, x, c.id(x).clone());
        if !check_functor(&h, &k, c, 2).passed() {
            continue;
        }
        points += 1;
        match factor_through_sub(&h, &k, c, &e.cat, &e.incl) {
            Some(med) => ok &= check_functor(&med, &k, &e.cat, 2).passed() && med.then(&e.incl, &k, &e.cat, c).same_as(&h, &k, c),
            None => ok = false,
        }
    }
    r.check("equalizer: equalizing probes factor", ok && points > 0, format!("{points} point probes"));
    let moved = c.homs.keys().find_map(|&(x, y)| {
        (x == y).then(|| (0..c.dim(x, x)).find(|&i| g.apply_basis(c, c, x, x, i) != c.basis(x, x, i)).map(|i| (x, i)))?
    });
    match moved {
        Some((x, i)) => {
            let h = point_functor(c, x, c.basis(x, x, i));
            r.check(
                "equalizer: a non-equalizing probe does not factor",
                factor_through_sub(&h, &k, c, &e.cat, &e.incl).is_none(),
                format!("{} at {}", c.hom(x, x).names[i], c.objects[x]),
            );
        }
        None => r.check("equalizer: a non-equalizing probe does not factor", false, "the seeded units move nothing"),
    }
    r.note("equalizer_dims", format!("{:?}", e.cat.homs.iter().map(|(k, h)| (*k, h.dim())).collect::<Vec<_>>()));
}

fn product_checks(r: &mut SuiteReport, field: Field, seed: u64) {
    let a = interval_category(field);
    let b = dual_numbers(field, -1);
    let w = random_wu_category(seed, field, &[1, 1], 3).expect("tower solvable");
    let cats = [&a, &b, w.cat()];
    let p = match product(&cats) {
        Ok(p) => p,
        Err(e) => return r.check("product exists", false, e.to_string()),
    };
    let ax = check_wu_axioms(&p.cat, 3);
    let legs = cats.iter().enumerate().all(|(j, c)| check_functor(&p.projections[j], &p.cat, c, 3).passed());
    r.check("product: weakly unital with functorial projections", ax.passed() && legs, failures(&ax));
    let mono = p.cat.homs.keys().all(|&(x, y)| {
        let ms: Vec<SparseMatrix> = cats.iter().enumerate().map(|(j, c)| p.projections[j].map(&p.cat, c, x, y)).collect();
        injective(&stack(&ms, p.cat.dim(x, y)))
    });
    r.check("product: mediating maps are unique (projections jointly injective)", mono, "");
    let cones: Vec<WuFunctor> = cats
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if strict_units(c) {
                let phi = conjugation(c, &random_units(c, seed + j as u64));
                p.projections[j].then(&phi, &p.cat, c, c)
            } else {
                p.projections[j].clone()
            }
        })
        .collect();
    let med = pair(&cones, &p.cat, &cats, &p);
    let ok = check_functor(&med, &p.cat, &p.cat, 3).passed()
        && cats
            .iter()
            .enumerate()
            .all(|(j, c)| med.then(&p.projections[j], &p.cat, &p.cat, c).same_as(&cones[j], &p.cat, c));
    r.check("product: a twisted cone factors through the pairing", ok, "");
    r.note("product_dim", p.cat.total_dim());
}

fn coproduct_checks(r: &mut SuiteReport, field: Field, seed: u64) {
    let a = interval_category(field);
    let b = dual_numbers(field, 0);
    let w = random_wu_category(seed, field, &[1], 3).expect("tower solvable");
    let weak = coproduct(&[&a, w.cat()]);
    match weak {
        Ok(co) => {
            let ax = check_wu_axioms(&co.cat, 3);
            let legs = [&a, w.cat()].iter().enumerate().all(|(j, c)| check_functor(&co.injections[j], c, &co.cat, 3).passed());
            r.check("coproduct with a weak factor: axioms and injections", ax.passed() && legs, failures(&ax));
        }
        Err(e) => r.check("coproduct with a weak factor: axioms and injections", false, e.to_string()),
    }
    let cats = [&a, &b];
    let co = match coproduct(&cats) {
        Ok(c) => c,
        Err(e) => return r.check("coproduct exists", false, e.to_string()),
    };
    // disjoint components, each an isomorphic copy
    let mut unique = true;
    for &(x, y) in co.cat.homs.keys() {
        let comp = |z: usize| co.offsets.iter().rposition(|&o| o <= z).unwrap();
        if comp(x) != comp(y) {
            unique &= co.cat.dim(x, y) == 0;
        }
    }
    for (j, c) in cats.iter().enumerate() {
        for &(x, y) in c.homs.keys() {
            let m = co.injections[j].map(c, &co.cat, x, y);
            unique &= m.rows() == m.cols() && injective(&m);
        }
    }
    r.check("coproduct: mediating maps are unique (disjoint isomorphic components)", unique, "");
    let theta = conjugation(&co.cat, &random_units(&co.cat, seed));
    let cocone: Vec<WuFunctor> = cats
        .iter()
        .enumerate()
        .map(|(j, c)| co.injections[j].then(&theta, c, &co.cat, &co.cat))
        .collect();
    let med = copair(&cocone, &co);
    let ok = check_functor(&med, &co.cat, &co.cat, 3).passed()
        && cats
            .iter()
            .enumerate()
            .all(|(j, c)| co.injections[j].then(&med, c, &co.cat, &co.cat).same_as(&cocone[j], c, &co.cat));
    r.check("coproduct: a twisted cocone factors through the copairing", ok, "");
}

fn coequalizer_checks(r: &mut SuiteReport, field: Field, seed: u64) {
    let w = random_wu_category(seed, field, &[1], 3).expect("tower solvable");
    let weak = coproduct(&[w.cat(), &interval_category(field)]).expect("total");
    let bases = [dual_numbers(field, 0), interval_category(field), weak.cat];
    let (mut pairs, mut certified) = (0, 0);
    let mut first_bad = None;
    for b in &bases {
        for &(x, y) in b.homs.keys() {
            for i in 0..b.dim(x, y) {
                let ideal = saturate_ideal(b, &[(x, y, b.basis(x, y, i))], true);
                let Ok(p) = kernel_pair(b, &ideal) else { continue };
                pairs += 1;
                let cond = check_conditions(&p.f, &p.g, &p.a, b);
                let with = good_coequalizer(&p.f, &p.g, &p.a, b, Some(&p.section));
                let without = good_coequalizer(&p.f, &p.g, &p.a, b, None);
                if cond.ideal && cond.tower && with.is_ok() && without.is_ok() {
                    certified += 1;
                } else if first_bad.is_none() {
                    first_bad = Some(format!("ideal generated by {} in {}: {:?}", b.hom(x, y).names[i], b.objects.join(","), cond.witness));
                }
            }
        }
    }
    r.check(
        "good coequalizer certifies every generated reflexive pair",
        pairs > 0 && certified == pairs,
        first_bad.unwrap_or_else(|| format!("{certified}/{pairs} pairs")),
    );
    r.note("reflexive_pairs", pairs);
    let (a, b, f, g) = matrix_counterexample(field);
    match good_coequalizer(&f, &g, &a, &b, None) {
        Err(CoeqError::Condition { condition: 1, witness }) if !witness.is_empty() => {
            r.check("non-ideal image is rejected with a witness", true, witness)
        }
        other => r.check("non-ideal image is rejected with a witness", false, format!("{:?}", other.map(|_| ()))),
    }
}

pub fn limits_suite(cfg: &CategoryConfig) -> SuiteReport {
    let mut r = SuiteReport::new("dgcat.limits", cfg.field);
    equalizer_checks(&mut r, cfg.field, cfg.seed);
    product_checks(&mut r, cfg.field, cfg.seed);
    coproduct_checks(&mut r, cfg.field, cfg.seed);
    coequalizer_checks(&mut r, cfg.field, cfg.seed);
    r
}

pub fn model_suite(cfg: &CategoryConfig) -> SuiteReport {
    let field = cfg.field;
    let mut r = SuiteReport::new("dgcat.model", field);
    let (mut n, mut bad) = (0, None);
    for seed in cfg.seed..cfg.seed + 3 {
        for s in sample_family(field, seed) {
            n += 1;
            let fr = check_functor(&s.f, &s.c, &s.d, 3);
            let p = predicates(&s.f, &s.c, &s.d, seed);
            if seed == cfg.seed {
                r.note(&format!("flags: {}", s.name), p.summary());
            }
            if (!fr.passed() || !p.consistent) && bad.is_none() {
                bad = Some(format!("seed {seed}, {}: {} {}", s.name, fr.first_failure().unwrap_or_default(), p.summary()));
            }
        }
    }
    r.check("Fib ∩ W agrees with Surj ∩ W1 on the sample family", bad.is_none(), bad.unwrap_or_else(|| format!("{n} functors")));
    let t = Truncation {
        q_max: 2,
        degree_min: -2,
        len: 2,
    };
    let mut targets = vec![("interval".to_string(), interval_category(field))];
    for s in 0..2 {
        let w = random_wu_category(cfg.seed + s, field, &[1, 2], 3).expect("tower solvable");
        targets.push((format!("random seed {}", cfg.seed + s), w.cat().clone()));
    }
    let (mut probes, mut bad) = (0, None);
    for (name, d) in &targets {
        for n in 0..=2 {
            probes += 1;
            match probe_generating_set(d, n, t, cfg.seed) {
                Ok(p) if p.passed() => {}
                Ok(p) => {
                    bad.get_or_insert(format!("{name}, n={n}: {}", detail(&p.witness)));
                }
                Err(e) => {
                    bad.get_or_insert(format!("{name}, n={n}: {e}"));
                }
            }
        }
    }
    r.check("generating-set probe bijections", bad.is_none(), bad.unwrap_or_else(|| format!("{probes} probes")));
    r
}

pub fn adjunction_suite(cfg: &CategoryConfig) -> SuiteReport {
    let field = cfg.field;
    let mut r = SuiteReport::new("dgcat.adjunction", field);
    let (mut probes, mut bad) = (0, None);
    for s in 0..3 {
        let seed = cfg.seed + s;
        let w = random_wu_category(seed, field, &[1], 3).expect("tower solvable");
        let i = interval_category(field);
        let cases = [
            ("product with the interval", product(&[w.cat(), &i]).map(|p| p.cat)),
            ("coproduct with k[x]/(x²)", coproduct(&[w.cat(), &dual_numbers(field, -1)]).map(|c| c.cat)),
        ];
        for (name, c) in cases {
            let res = c.and_then(|c| probe_adjunction(&c, &[seed + 1, seed + 2, seed + 3]));
            match res {
                Ok(p) => {
                    probes += p.probes;
                    if !p.passed() {
                        bad.get_or_insert(format!("seed {seed}, {name}: {}", detail(&p.witness)));
                    }
                }
                Err(e) => {
                    bad.get_or_insert(format!("seed {seed}, {name}: {e}"));
                }
            }
        }
    }
    r.check("wu-functors C → R(A) match strict functors L(C) → A", bad.is_none(), bad.unwrap_or_else(|| format!("{probes} probes")));
    let w = random_wu_category(cfg.seed, field, &[1], 3).expect("tower solvable");
    let i = interval_category(field);
    let p = product(&[w.cat(), &i]).expect("total");
    let ra = r_unitize(&i);
    let kills = check_functor(&p.projections[1], &p.cat, &ra, 3).passed() && tower_kill_residual(&p.projections[1], &p.cat, &ra).is_none();
    r.check("a functor into R(A) kills the tower", kills, "");
    let control = tower_kill_residual(&p.projections[0], &p.cat, w.cat());
    r.check("the weak projection does not kill the tower", control.is_some(), detail(&control));
    match l_quotient(&p.cat) {
        Ok(l) => {
            r.check("L(C) is strict and drops the weak factor", strict_units(&l.cat) && l.cat.total_dim() == i.total_dim(), "");
            r.note("l_dim", l.cat.total_dim());
        }
        Err(e) => r.check("L(C) is strict and drops the weak factor", false, e.to_string()),
    }
    r
}

pub fn barcobar_suite(cfg: &CategoryConfig) -> Result<SuiteReport, SuiteError> {
    let field = cfg.field;
    let pre = |e: BarCobarError| SuiteError::Precondition(e.to_string());
    if cfg.len < 1 {
        return Err(pre(BarCobarError::Length));
    }
    let mut r = SuiteReport::new("barcobar", field);
    let algebras = [("k[x]/(x²)", dual_numbers(field, 0)), ("interval", interval_category(field))];
    for (name, a) in &algebras {
        let rep = check_ainf_functor(a, cfg.n_max, cfg.len).map_err(pre)?;
        let w = [&rep.bar_d_squared, &rep.coderivation, &rep.cobar_d_squared, &rep.degree_witness]
            .into_iter()
            .find_map(|w| w.clone());
        r.check(&format!("{name}: bar and cobar differentials"), w.is_none(), w.unwrap_or_default());
        r.check(&format!("{name}: p∘i = id"), rep.p_i_witness.is_none(), detail(&rep.p_i_witness));
        r.check(
            &format!("{name}: A∞ identities through (n_max, L) = ({}, {})", cfg.n_max, cfg.len),
            rep.ainf_witness.is_none(),
            rep.ainf_witness.clone().unwrap_or_else(|| format!("{} tuples", rep.ainf_checked)),
        );
        r.check(&format!("{name}: p2(1, 1) ≠ 0"), rep.cat_prime, rep.p2_units.join("; "));
        r.note(&format!("{name} basis"), rep.basis);
        r.note(&format!("{name} tuples"), rep.ainf_checked);
        let proj = check_projection(a, cfg.n_max, cfg.len).map_err(pre)?;
        let uncertified = proj.homs.iter().any(|h| !h.uncertified.is_empty());
        r.check(
            &format!("{name}: projection is a quasi-isomorphism"),
            proj.passed() && !uncertified,
            [&proj.chain_map_witness, &proj.section_witness, &proj.functor_witness, &proj.tower_witness]
                .into_iter()
                .find_map(|w| w.clone())
                .unwrap_or_default(),
        );
        for h in &proj.homs {
            r.note(&format!("{name} H({}, {})", h.src, h.tgt), format!("{:?}", h.of_cobar));
        }
    }
    let a = dual_numbers(field, 0);
    let d = padded_end(field);
    let x = Letter { src: 0, tgt: 0, idx: 1 };
    let (mut nontrivial, mut bad) = (0, None);
    for seed in cfg.seed..cfg.seed + 6 {
        let f = random_unital_ainf(&a, &d, vec![0], CORRESPONDENCE_N, seed).map_err(pre)?;
        if !vector::is_zero(&f.get(&d, &[x, x, x])) {
            nontrivial += 1;
        }
        let c = unital_ainf_correspondence(&a, &d, &f).map_err(pre)?;
        if !c.passed() {
            bad.get_or_insert(format!("seed {seed}: {:?} {:?}", c.ainf_witness, c.functor_witness));
        }
    }
    r.check(
        &format!("unital A∞ maps round-trip through n = {CORRESPONDENCE_N}"),
        bad.is_none() && nontrivial > 0,
        bad.unwrap_or_else(|| format!("6 maps, {nontrivial} with f3 ≠ 0")),
    );
    let i = interval_category(field);
    let strict = AinfMap::strict(&i, &i, &WuFunctor::identity(&i), CORRESPONDENCE_N);
    let c = unital_ainf_correspondence(&i, &i, &strict).map_err(pre)?;
    r.check("identity of the interval round-trips", c.passed(), detail(&c.functor_witness));
    Ok(r)
}

/// The category suites in fixed order.
pub fn category_suites(cfg: &CategoryConfig) -> Result<Vec<SuiteReport>, SuiteError> {
    Ok(vec![
        limits_suite(cfg),
        model_suite(cfg),
        adjunction_suite(cfg),
        kontsevich_suite(cfg)?,
        barcobar_suite(cfg)?,
    ])
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CrossField {
    pub suite: String,
    pub agree: bool,
    pub differing: Vec<String>,
}

/// Compares the invariants of the same suites run over two fields.
pub fn cross_field(a: &[SuiteReport], b: &[SuiteReport]) -> Vec<CrossField> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let keys: std::collections::BTreeSet<&String> = x.invariants.keys().chain(y.invariants.keys()).collect();
            let differing: Vec<String> = keys
                .into_iter()
                .filter(|k| x.invariants.get(*k) != y.invariants.get(*k))
                .cloned()
                .collect();
            CrossField {
                suite: x.suite.clone(),
                agree: differing.is_empty() && x.passed() == y.passed(),
                differing,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_passes() {
        let grid = OperadGrid {
            arities: vec![1, 2],
            q_max: 2,
            window: (-2, 0),
            modes: vec![Mode::O, Mode::OPrime],
            field: Field::Rational,
            fault: Fault::None,
        };
        let run = run_operad_grid(&grid).unwrap();
        assert!(run.passed(), "{:?}", run.first_failure);
        assert_eq!(run.cases.len(), 4);
        assert!(run.cases.iter().all(|c| c.h0_class));
    }

    #[test]
    fn fault_gives_a_square_witness() {
        let grid = OperadGrid {
            arities: vec![2],
            q_max: 2,
            window: (-2, 0),
            modes: vec![Mode::O],
            field: Field::Rational,
            fault: Fault::FlipMergeSign,
        };
        let run = run_operad_grid(&grid).unwrap();
        assert!(matches!(run.first_failure, Some(Counterexample::SquareNonzero { .. })), "{:?}", run.first_failure);
    }

    #[test]
    fn bad_grids_are_refused() {
        let mut grid = OperadGrid {
            arities: vec![2],
            q_max: 2,
            window: (0, -1),
            modes: vec![Mode::O],
            field: Field::Rational,
            fault: Fault::None,
        };
        assert!(run_operad_grid(&grid).is_err());
        grid.window = (-1, 0);
        grid.q_max = 0;
        assert!(run_operad_grid(&grid).is_err());
    }

    #[test]
    fn aux_complexes() {
        for f in [Field::Rational, Field::prime()] {
            let r = aux_suite(f, 6, 7);
            assert!(r.passed(), "{:?}", r.first_failure());
        }
    }

    #[test]
    fn short_words_are_a_precondition_error() {
        let cfg = CategoryConfig {
            len: 1,
            ..Default::default()
        };
        assert!(matches!(kontsevich_suite(&cfg), Err(SuiteError::Precondition(_))));
    }

    #[test]
    fn cross_field_flags_differences() {
        let mut a = SuiteReport::new("s", Field::Rational);
        a.note("dim", 3);
        let mut b = SuiteReport::new("s", Field::prime());
        b.note("dim", 4);
        let c = cross_field(&[a.clone()], &[b]);
        assert!(!c[0].agree);
        assert_eq!(c[0].differing, vec!["dim".to_string()]);
        assert!(cross_field(&[a.clone()], &[a])[0].agree);
    }
}
