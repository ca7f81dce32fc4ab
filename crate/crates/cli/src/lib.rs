//! The `extremal` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 domain error,
//! 3 capacity limit or exhausted search budget (the partial result is still
//! printed).

pub mod args;
pub mod config;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::time::Duration;

use clap::Parser;
use serde::Serialize;

use extremal_core::families::{build_intersect_extremal, build_matching_extremal};
use extremal_core::formulas::{
    erdos_value, intersect_value, lemma2_sweep, matching_formula_value, monotonicity_sweep,
    section3_bound, section3_sweep,
};
use extremal_core::oracle::{
    self, max_no_matching_with, max_swise_t_intersecting_with, AuditParams, Budget, SearchMode,
};
use extremal_core::smoothing::{self, KktReport, SmoothingConfig};
use extremal_core::{BigCount, Error, IntersectParams, MatchingParams};

pub use args::RunSpec;
use args::{
    BudgetArgs, Command, ConstructProblem, Format, IntersectArgs, MatchingArgs, OracleProblem,
    Problem, SmoothArgs, SmoothProblem, Sweep,
};
use config::FileConfig;
use render::render;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(Error::Capacity(_)) => EXIT_BUDGET,
            Failure::Core(_) | Failure::Io(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("error: {m}"),
            Failure::Core(e) => format!("error: {e}"),
            Failure::Io(e) => format!("error: {e}"),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let spec = match RunSpec::try_parse_from(args) {
        Ok(spec) => spec,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&spec) {
        Ok((text, code)) => {
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return EXIT_DOMAIN;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(err, "{}", f.message());
            f.code()
        }
    }
}

/// Runs parsed arguments inside a dedicated thread pool; returns stdout text and exit code.
fn execute(spec: &RunSpec) -> Result<(String, i32), Failure> {
    let mut cfg = match &spec.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            FileConfig::parse(&text).map_err(Failure::Usage)?
        }
        None => FileConfig::default(),
    };
    if let Some(seed) = spec.seed {
        cfg.smoothing.seed = seed;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start thread pool: {e}")))?;
    pool.install(|| dispatch(spec, &cfg))
}

fn matching(p: MatchingArgs) -> Result<MatchingParams, Failure> {
    Ok(MatchingParams::new(p.ell, p.n, p.k)?)
}

fn intersect(q: IntersectArgs) -> Result<IntersectParams, Failure> {
    Ok(IntersectParams::new(q.s, q.n, q.k, q.t)?)
}

#[derive(Serialize)]
struct MatchingValues {
    formula: BigCount,
    erdos: BigCount,
    argmax_i: usize,
}

#[derive(Serialize)]
struct IntersectValues {
    value: BigCount,
    /// −1 when `sk ≥ (s−1)n + t` and every k-set qualifies.
    argmax_r: i64,
    degenerate: bool,
    section3: Option<BigCount>,
}

#[derive(Serialize)]
struct ConstructOutput {
    size: usize,
    family: String,
}

#[derive(Serialize)]
struct SmoothOutput {
    beta: Vec<f64>,
    delta: f64,
    sigma: f64,
    smoothed_count: f64,
    penalty: f64,
    family_size: u64,
    witness_excluded: bool,
    nearest_step_a: usize,
    step_deviation: f64,
    converged: bool,
    iterations: usize,
    kkt: Option<KktReport>,
}

const LEMMA2_HEADER: &[&str] = &["ell", "n", "k", "formula", "erdos", "equal", "argmax_i"];
const MONOTONICITY_HEADER: &[&str] = &["ell", "n", "k", "i", "a", "value_at_a", "value_at_a_minus_1"];
const SECTION3_HEADER: &[&str] = &["s", "t", "n", "k", "frankl", "argmax_r", "bound", "equal"];

fn budget(base: Budget, args: &BudgetArgs) -> Result<Budget, Failure> {
    let mut b = base;
    if let Some(nodes) = args.max_nodes {
        b.max_nodes = nodes;
    }
    if let Some(secs) = args.max_seconds {
        b.max_time = Duration::try_from_secs_f64(secs)
            .map_err(|_| Failure::Usage(format!("invalid --max-seconds {secs}")))?;
    }
    Ok(b)
}

fn mode(args: &BudgetArgs) -> SearchMode {
    if args.compressed {
        SearchMode::Compressed
    } else {
        SearchMode::Exhaustive
    }
}

fn write_family(path: &std::path::Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)?;
    Ok(())
}

fn dispatch(spec: &RunSpec, cfg: &FileConfig) -> Result<(String, i32), Failure> {
    let f = spec.format;
    let ok = |s: String| Ok((s, EXIT_OK));
    match &spec.command {
        Command::Compute(Problem::Matching(a)) => {
            let p = matching(*a)?;
            let (formula, argmax_i) = matching_formula_value(&p)?;
            ok(render(&[MatchingValues { formula, erdos: erdos_value(&p), argmax_i }], &[], f))
        }
        Command::Compute(Problem::Intersect(a)) => {
            let q = intersect(*a)?;
            let (value, argmax_r) = intersect_value(&q);
            let row = IntersectValues {
                value,
                argmax_r,
                degenerate: q.is_degenerate(),
                section3: section3_bound(&q).ok(),
            };
            ok(render(&[row], &[], f))
        }
        Command::Audit(problem) => {
            let params = match problem {
                Problem::Matching(a) => AuditParams::Matching(matching(*a)?),
                Problem::Intersect(a) => AuditParams::Intersect(intersect(*a)?),
            };
            let report = oracle::audit(params, cfg.budget)?;
            let code = if report.optimal { EXIT_OK } else { EXIT_BUDGET };
            Ok((render(&[report], &[], f), code))
        }
        Command::Sweep(Sweep::Lemma2(g)) => {
            ok(render(&lemma2_sweep(g.ell_max, g.k_max, g.n_max), LEMMA2_HEADER, f))
        }
        Command::Sweep(Sweep::Monotonicity(g)) => ok(render(
            &monotonicity_sweep(g.ell_max, g.k_max, g.n_max),
            MONOTONICITY_HEADER,
            f,
        )),
        Command::Sweep(Sweep::Section3(g)) => ok(render(
            &section3_sweep(g.s_max, g.t_max, g.k_max, g.n_max),
            SECTION3_HEADER,
            f,
        )),
        Command::Oracle(problem) => {
            let (result, timing) = match problem {
                OracleProblem::Matching { p, budget: b } => {
                    let p = matching(*p)?;
                    let r = max_no_matching_with(p.n(), p.k(), p.ell(), budget(cfg.budget, b)?, mode(b))?;
                    (r, b.timing)
                }
                OracleProblem::Intersect { q, budget: b } => {
                    let q = intersect(*q)?;
                    let r = max_swise_t_intersecting_with(
                        q.n(),
                        q.k(),
                        q.s(),
                        q.t(),
                        budget(cfg.budget, b)?,
                        mode(b),
                    )?;
                    (r, b.timing)
                }
            };
            let code = if result.optimal { EXIT_OK } else { EXIT_BUDGET };
            Ok((render(&[result.to_json(timing)], &[], f), code))
        }
        Command::Construct(problem) => {
            let (family, out) = match problem {
                ConstructProblem::Matching { p, i, out } => (build_matching_extremal(&matching(*p)?, *i)?, out),
                ConstructProblem::Intersect { q, r, out } => (build_intersect_extremal(&intersect(*q)?, *r)?, out),
            };
            let text = family.to_string();
            if let Some(path) = out {
                write_family(path, &text)?;
            }
            let body = match (f, out) {
                (Format::Text, None) => text,
                _ => render(&[ConstructOutput { size: family.len(), family: text }], &[], f),
            };
            ok(body)
        }
        Command::Smooth(problem) => {
            let (problem, opts): (smoothing::Problem, &SmoothArgs) = match problem {
                SmoothProblem::Matching { p, opts } => (smoothing::Problem::Matching(matching(*p)?), opts),
                SmoothProblem::Intersect { q, opts } => (smoothing::Problem::Intersect(intersect(*q)?), opts),
            };
            let config = SmoothingConfig {
                support: opts.support.or(cfg.smoothing.support),
                ..cfg.smoothing.clone()
            };
            let outcome = smoothing::maximize(problem, &config)?;
            if let Some(path) = &opts.trace {
                std::fs::write(path, render(&outcome.trace, &["iter", "y", "penalty", "sigma", "step_deviation"], Format::Csv))?;
            }
            let row = SmoothOutput {
                beta: outcome.beta.to_vec(),
                delta: outcome.delta,
                sigma: outcome.sigma,
                smoothed_count: outcome.smoothed_count,
                penalty: outcome.penalty,
                family_size: outcome.family_size,
                witness_excluded: outcome.witness_excluded,
                nearest_step_a: outcome.nearest_step.0,
                step_deviation: outcome.nearest_step.1,
                converged: outcome.converged,
                iterations: outcome.trace.len(),
                kkt: outcome.kkt,
            };
            ok(render(&[row], &[], f))
        }
    }
}
