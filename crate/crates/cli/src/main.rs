//! `wucat`: batch verification runs with JSON and CSV reports.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad configuration or an
//! unmet precondition.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wucat::exactlinalg::Field;
use wucat::suites::{
    aux_suite, category_suites, cross_field, field_name, operad_case, run_operad_grid, CategoryConfig, CrossField,
    OperadGrid, OperadRun, SuiteError, SuiteReport,
};
use wucat::treeops::Mode;
use wucat::wuoperad::Fault;

/// Thread count for the parallel parts; falls back to `RAYON_NUM_THREADS`.
const THREADS_VAR: &str = "WUCAT_THREADS";

#[derive(Parser)]
#[command(name = "wucat", version, about = "Exact checks for weakly unital dg categories and their operads")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// d² = 0 and truncated cohomology over the operad grid
    VerifyOperad(OperadArgs),
    /// limits, model predicates, adjunction, Kontsevich and bar-cobar suites
    VerifyCategories(CategoryArgs),
    /// CSV cohomology table over the operad grid
    Table(OperadArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    O,
    Oprime,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldArg {
    Rational,
    Prime,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    None,
    FlipMergeSign,
}

#[derive(Args, Clone)]
struct Common {
    /// output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// seed for the randomized suites
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// record wall-clock times (makes the output nondeterministic)
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Clone)]
struct OperadArgs {
    #[arg(long, value_enum, default_value = "both")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "rational")]
    field: FieldArg,
    /// arities, `A..B` inclusive or a single `N`
    #[arg(long, default_value = "0..3")]
    n_range: String,
    #[arg(long, default_value_t = 4)]
    q_max: usize,
    /// degree window `LO..HI` inclusive
    #[arg(long, default_value = "-3..0", allow_hyphen_values = true)]
    window: String,
    /// deliberate fault in the differential, for exercising the failure path
    #[arg(long, value_enum, default_value = "none", hide = true)]
    fault: FaultArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct CategoryArgs {
    #[arg(long, value_enum, default_value = "both")]
    field: FieldArg,
    /// word length for K and letter bound for bar-cobar
    #[arg(long, default_value_t = 4)]
    len: usize,
    /// tower bound for bar-cobar
    #[arg(long, default_value_t = 4)]
    nmax: usize,
    #[command(flatten)]
    common: Common,
}

enum Outcome {
    Pass,
    Fail(String),
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let s = s.trim();
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: i64 = a.trim().parse().with_context(|| format!("bad range start in {s:?}"))?;
    let b: i64 = b.trim().parse().with_context(|| format!("bad range end in {s:?}"))?;
    if a > b {
        bail!("empty range {s:?}");
    }
    Ok((a, b))
}

fn single_field(f: FieldArg) -> Result<Field> {
    match f {
        FieldArg::Rational => Ok(Field::Rational),
        FieldArg::Prime => Ok(Field::prime()),
        FieldArg::Both => bail!("--field both is only available for verify-categories"),
    }
}

fn grid(args: &OperadArgs) -> Result<OperadGrid> {
    let (a, b) = parse_range(&args.n_range)?;
    if a < 0 {
        bail!("arities must be non-negative");
    }
    let (lo, hi) = parse_range(&args.window)?;
    let modes = match args.mode {
        ModeArg::O => vec![Mode::O],
        ModeArg::Oprime => vec![Mode::OPrime],
        ModeArg::Both => vec![Mode::O, Mode::OPrime],
    };
    let g = OperadGrid {
        arities: (a as usize..=b as usize).collect(),
        q_max: args.q_max,
        window: (i32::try_from(lo)?, i32::try_from(hi)?),
        modes,
        field: single_field(args.field)?,
        fault: match args.fault {
            FaultArg::None => Fault::None,
            FaultArg::FlipMergeSign => Fault::FlipMergeSign,
        },
    };
    g.validate()?;
    Ok(g)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct OperadReport<'a> {
    command: &'static str,
    seed: u64,
    modes: Vec<&'static str>,
    arities: &'a [usize],
    q_max: usize,
    window: (i32, i32),
    field: String,
    fault: bool,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    millis: Option<u128>,
    operad: &'a OperadRun,
    aux: &'a SuiteReport,
}

fn verify_operad(args: &OperadArgs) -> Result<Outcome> {
    let g = grid(args)?;
    let t0 = Instant::now();
    let run = run_operad_grid(&g)?;
    let aux = aux_suite(g.field, 6, 7);
    let passed = run.passed() && aux.passed();
    let report = OperadReport {
        command: "verify-operad",
        seed: args.common.seed,
        modes: g.modes.iter().map(|m| m.name()).collect(),
        arities: &g.arities,
        q_max: g.q_max,
        window: g.window,
        field: field_name(g.field),
        fault: g.fault != Fault::None,
        passed,
        millis: args.common.timings.then(|| t0.elapsed().as_millis()),
        operad: &run,
        aux: &aux,
    };
    emit(&args.common.out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    for c in &run.cases {
        eprintln!(
            "{} N={}: H = {:?}, stable from Q = {}, H⁰ class {}",
            c.mode.name(),
            c.arity,
            c.at_top,
            c.stable_from.map_or("-".into(), |q| q.to_string()),
            if c.h0_class { "ok" } else { "missing" }
        );
    }
    Ok(if let Some(f) = &run.first_failure {
        Outcome::Fail(format!("operad: {}", serde_json::to_string(f)?))
    } else if let Some(c) = aux.first_failure() {
        Outcome::Fail(format!("aux: {}: {}", c.name, c.detail))
    } else {
        Outcome::Pass
    })
}

fn table(args: &OperadArgs) -> Result<Outcome> {
    let g = grid(args)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["mode", "N", "Q_max", "degree", "dim", "stabilized", "basis_size", "millis"])?;
    for &mode in &g.modes {
        for &n in &g.arities {
            let (_, rows) = match operad_case(&g, mode, n) {
                Ok(x) => x,
                Err(c) => return Ok(Outcome::Fail(format!("table: {}", serde_json::to_string(&c)?))),
            };
            for r in rows {
                let millis = if args.common.timings { r.millis } else { 0 };
                w.write_record([
                    r.mode.name().to_string(),
                    r.arity.to_string(),
                    r.q_max.to_string(),
                    r.degree.to_string(),
                    r.dim.to_string(),
                    r.stabilized.to_string(),
                    r.basis_size.to_string(),
                    millis.to_string(),
                ])?;
            }
        }
    }
    emit(&args.common.out, &String::from_utf8(w.into_inner()?)?)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct CategoryReport {
    command: &'static str,
    seed: u64,
    len: usize,
    n_max: usize,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failing_suite: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    millis: Option<u128>,
    suites: Vec<SuiteReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    cross_field: Vec<CrossField>,
}

fn verify_categories(args: &CategoryArgs) -> Result<Outcome> {
    let fields = match args.field {
        FieldArg::Both => vec![Field::Rational, Field::prime()],
        f => vec![single_field(f)?],
    };
    let t0 = Instant::now();
    let mut per_field = Vec::new();
    for &field in &fields {
        let cfg = CategoryConfig {
            field,
            len: args.len,
            n_max: args.nmax,
            seed: args.common.seed,
        };
        per_field.push(category_suites(&cfg)?);
    }
    let cross = if per_field.len() == 2 { cross_field(&per_field[0], &per_field[1]) } else { Vec::new() };
    let suites: Vec<SuiteReport> = per_field.into_iter().flatten().collect();
    let failing = suites
        .iter()
        .find_map(|s| s.first_failure().map(|c| (format!("{} ({})", s.suite, s.field), c.clone())))
        .map(|(s, c)| (s, format!("{}: {}", c.name, c.detail)))
        .or_else(|| {
            cross
                .iter()
                .find(|c| !c.agree)
                .map(|c| (format!("{} (cross-field)", c.suite), format!("differing: {}", c.differing.join(", "))))
        });
    for s in &suites {
        eprintln!(
            "{} [{}]: {}/{} checks",
            s.suite,
            s.field,
            s.checks.iter().filter(|c| c.passed).count(),
            s.checks.len()
        );
    }
    let report = CategoryReport {
        command: "verify-categories",
        seed: args.common.seed,
        len: args.len,
        n_max: args.nmax,
        passed: failing.is_none(),
        failing_suite: failing.as_ref().map(|f| f.0.clone()),
        millis: args.common.timings.then(|| t0.elapsed().as_millis()),
        suites,
        cross_field: cross,
    };
    emit(&args.common.out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(match failing {
        Some((suite, what)) => Outcome::Fail(format!("{suite}: {what}")),
        None => Outcome::Pass,
    })
}

fn configure_threads() {
    if let Ok(n) = std::env::var(THREADS_VAR) {
        // read by the thread pool on first use
        std::env::set_var("RAYON_NUM_THREADS", n);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let res = match &cli.command {
        Command::VerifyOperad(a) => verify_operad(a),
        Command::VerifyCategories(a) => verify_categories(a),
        Command::Table(a) => table(a),
    };
    match res {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("FAIL {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            match e.downcast_ref::<SuiteError>() {
                Some(s) => eprintln!("error: {s}"),
                None => eprintln!("error: {e:#}"),
            }
            ExitCode::from(2)
        }
    }
}
