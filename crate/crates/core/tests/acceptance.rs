//! Acceptance run: one line per criterion, exact tolerances throughout.
//!
//! Frozen values are asserted; a criterion that is not met is printed as
//! FAIL with what was measured, and does not abort the run as long as the
//! measurement matches the frozen one.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use wucat::exactlinalg::{cohomology_dims_in, Field};
use wucat::suites::{
    adjunction_suite, assoc_dim, aux_suite, barcobar_suite, cross_field, kontsevich_suite, limits_suite, model_suite,
    CategoryConfig, SuiteReport,
};
use wucat::treeops::Mode;
use wucat::wuoperad::{cofree_cobar_complex, h0_class_check, operad_complex, truncated_cohomology, type_i_segment_complex};

const TOLERANCE: &str = "exact";
const MODES: [Mode; 2] = [Mode::O, Mode::OPrime];
const WINDOW: (i32, i32) = (-3, 0);
/// deepest truncation computed per arity, past the measured onset
const Q_TOP: [usize; 4] = [6, 5, 4, 4];
/// first `Q` from which the window cohomology no longer changes
const ONSET: [usize; 4] = [5, 4, 0, 0];
const Q_BOUND: usize = 4;

struct Line {
    pass: bool,
    text: String,
}

struct Run {
    lines: Vec<(usize, Line)>,
    broken: Vec<String>,
}

impl Run {
    fn line(&mut self, n: usize, pass: bool, text: String) {
        let text = text.trim_end().to_string();
        println!("criterion {n:>2}: {} [{TOLERANCE}] {text}", if pass { "PASS" } else { "FAIL" });
        self.lines.push((n, Line { pass, text }));
    }

    /// A frozen expectation; a mismatch fails the target.
    fn freeze(&mut self, ok: bool, what: String) {
        if !ok {
            println!("  frozen value changed: {what}");
            self.broken.push(what);
        }
    }
}

type PerQ = Vec<BTreeMap<i32, usize>>;

fn operad_table(field: Field) -> BTreeMap<(Mode, usize), PerQ> {
    let mut out = BTreeMap::new();
    for mode in MODES {
        for n in 0..=3 {
            let tc = truncated_cohomology(n, Q_TOP[n], WINDOW, mode, field).expect("d² = 0");
            out.insert((mode, n), tc.per_q);
        }
    }
    out
}

fn onset(per_q: &PerQ) -> usize {
    let top = per_q.last().unwrap();
    let mut q = per_q.len() - 1;
    while q >= 1 && &per_q[q - 1] == top {
        q -= 1;
    }
    q
}

fn criterion_1(run: &mut Run, table: &BTreeMap<(Mode, usize), PerQ>) {
    let mut stable_ok = true;
    let mut misses = Vec::new();
    for (&(mode, n), per_q) in table {
        let top = per_q.last().unwrap();
        let pattern = top.iter().all(|(d, k)| *k == assoc_dim(*d));
        stable_ok &= pattern;
        run.freeze(pattern, format!("{} N={n}: stable H = {top:?}", mode.name()));
        let o = onset(per_q);
        run.freeze(o == ONSET[n], format!("{} N={n}: onset {o}, frozen {}", mode.name(), ONSET[n]));
        if o > Q_BOUND {
            misses.push(format!("{} N={n} stabilizes at Q={o}", mode.name()));
        }
        let h0 = operad_complex(n, Q_TOP[n], 0, mode).expect("d² = 0");
        let class = h0_class_check(&h0, Field::Rational);
        stable_ok &= class;
        run.freeze(class, format!("{} N={n}: H⁰ spanned by the p-free representative", mode.name()));
    }
    let text = if misses.is_empty() {
        format!("H = Assoc₊ on {WINDOW:?} for N ≤ 3 in O and O′, stable by Q ≤ {Q_BOUND}")
    } else {
        format!(
            "stable H = Assoc₊ on {WINDOW:?} with the H⁰ class for all N ≤ 3 in O and O′ = {stable_ok}; \
             bound Q ≤ {Q_BOUND} missed: {}",
            misses.join(", ")
        )
    };
    run.line(1, stable_ok && misses.is_empty(), text);
}

fn criterion_2(run: &mut Run) {
    let mut trees = 0;
    let mut bad = Vec::new();
    for mode in MODES {
        for n in 0..=3 {
            match operad_complex(n, 4, -4, mode) {
                Ok(c) => trees += c.basis_size(),
                Err(e) => bad.push(format!("{} N={n}: {e}", mode.name())),
            }
        }
    }
    let ok = bad.is_empty();
    run.freeze(ok, format!("d² = 0: {bad:?}"));
    run.line(2, ok, format!("d² = 0 on all {trees} basis trees (N ≤ 3, Q ≤ 4, degrees [−5, 1]) {}", bad.join("; ")));
}

fn aux_dims(field: Field) -> Vec<BTreeMap<i32, usize>> {
    let mut v: Vec<_> = (1..=6).map(|i| cohomology_dims_in(&type_i_segment_complex(i).complex, field).dims).collect();
    v.push(cohomology_dims_in(&cofree_cobar_complex(7).complex, field).dims);
    v
}

fn suite_line(run: &mut Run, n: usize, reports: &[&SuiteReport], only: Option<&dyn Fn(&str) -> bool>) {
    let mut total = 0;
    let mut failed = Vec::new();
    let mut notes = Vec::new();
    for r in reports {
        for c in &r.checks {
            if only.is_some_and(|f| !f(&c.name)) {
                continue;
            }
            total += 1;
            if only.is_some() && c.passed && !c.detail.is_empty() && r.field == "rational" {
                notes.push(format!("{}: {}", c.name, c.detail));
            }
            if !c.passed {
                failed.push(format!("{} [{}]: {} {}", r.suite, r.field, c.name, c.detail));
            }
        }
    }
    let ok = failed.is_empty() && total > 0;
    run.freeze(ok, format!("criterion {n}: {failed:?}"));
    let mut names: Vec<&str> = reports.iter().map(|r| r.suite.as_str()).collect();
    names.dedup();
    failed.extend(notes);
    run.line(n, ok, format!("{} ({total} checks over ℚ and F_32003) {}", names.join(", "), failed.join("; ")));
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let mut run = Run {
        lines: Vec::new(),
        broken: Vec::new(),
    };
    let rational = operad_table(Field::Rational);
    criterion_1(&mut run, &rational);
    criterion_2(&mut run);

    let aux: Vec<SuiteReport> = [Field::Rational, Field::prime()].map(|f| aux_suite(f, 6, 7)).into();
    suite_line(&mut run, 3, &aux.iter().collect::<Vec<_>>(), None);
    let k2 = cohomology_dims_in(&cofree_cobar_complex(7).complex, Field::Rational).dims;
    run.freeze(k2.iter().all(|(d, n)| *n == usize::from(*d == 0)), format!("K2(7) = {k2:?}"));

    let per_field: Vec<[SuiteReport; 5]> = [Field::Rational, Field::prime()]
        .into_iter()
        .map(|field| {
            let cfg = CategoryConfig {
                field,
                ..Default::default()
            };
            [
                kontsevich_suite(&cfg).expect("L = 4"),
                limits_suite(&cfg),
                model_suite(&cfg),
                barcobar_suite(&cfg).expect("(4, 4)"),
                adjunction_suite(&cfg),
            ]
        })
        .collect();
    let pick = |i: usize| -> Vec<&SuiteReport> { per_field.iter().map(|s| &s[i]).collect() };
    let is_lift = |n: &str| n.starts_with("lifts");
    suite_line(&mut run, 4, &pick(0), Some(&|n: &str| !is_lift(n)));
    suite_line(&mut run, 5, &pick(0), Some(&is_lift));
    suite_line(&mut run, 6, &pick(1), None);
    suite_line(&mut run, 7, &pick(2), None);
    suite_line(&mut run, 8, &pick(3), None);
    suite_line(&mut run, 9, &pick(4), None);

    let prime = operad_table(Field::prime());
    let mut differ: Vec<String> = rational
        .iter()
        .filter(|(k, v)| prime.get(*k) != Some(*v))
        .map(|((m, n), _)| format!("{} N={n}", m.name()))
        .collect();
    if aux_dims(Field::Rational) != aux_dims(Field::prime()) {
        differ.push("auxiliary complexes".into());
    }
    let cats = cross_field(&per_field[0], &per_field[1]);
    differ.extend(cats.iter().filter(|c| !c.agree).map(|c| format!("{} {:?}", c.suite, c.differing)));
    let cases: usize = rational.values().map(Vec::len).sum();
    run.freeze(differ.is_empty(), format!("cross-field: {differ:?}"));
    run.line(
        10,
        differ.is_empty(),
        format!(
            "ℚ and F_32003 agree on {cases} truncated operad cohomologies, 7 auxiliary complexes and {} suite invariants {}",
            per_field[0].iter().map(|s| s.invariants.len()).sum::<usize>(),
            differ.join("; ")
        ),
    );

    let passed = run.lines.iter().filter(|l| l.1.pass).count();
    println!("acceptance: {passed}/{} criteria pass in {:.1?}", run.lines.len(), t0.elapsed());
    for (n, l) in run.lines.iter().filter(|l| !l.1.pass) {
        println!("  not met: criterion {n}: {}", l.text);
    }
    if run.broken.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} frozen values changed", run.broken.len());
        ExitCode::FAILURE
    }
}
