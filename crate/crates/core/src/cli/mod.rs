//! Command-line front end. Every verb parses its flags, calls into the
//! library and serializes the result; no numerics live here.

pub mod output;
pub mod selfcheck;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::branches::{
    omega, omega_closed_form, omega_finite_n, psi, psi_closed_form, ClosedFormTag, PsiQuery,
};
use crate::calculus::{
    integral_omega, integral_omega_quadrature, integral_psi, integral_psi_quadrature,
};
use crate::error::{Error, Result};
use crate::lambert::lambert_w;
use crate::numeric::round_half_even;
use crate::param::{forward, AsymmetryParam, BranchId};
use crate::pqbinom::{build_distribution, equal_ratio_residual, PqParams};
use crate::series::{
    asymptotic_series, branch_point_series, taylor_at_zero, BranchPointKind, SeriesExpansion,
    SeriesKind,
};
use output::{format_f64, Format, OutputRecord, RecordWriter, Value};
use selfcheck::{run_suites, Level};

/// Environment variable selecting the worker count for sweeps (0 = auto).
pub const THREADS_ENV: &str = "PQLAMBERT_THREADS";
/// Environment variable naming a self-check suite to force into failure.
pub const FAULT_ENV: &str = "PQLAMBERT_SELFCHECK_FAULT";

const MAX_SWEEP_POINTS: usize = 10_000_000;
const SWEEP_CHUNK: usize = 1 << 16;

#[derive(Debug, Parser)]
#[command(name = "pqlambert", version, about = "Generalized Lambert-W branches of sinh(aw)e^w")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one function at one point.
    Eval(EvalArgs),
    /// Evaluate a function on a grid.
    Sweep(SweepArgs),
    /// Print series coefficients.
    Series(SeriesArgs),
    /// Compare closed-form integrals with quadrature.
    Integrate(IntegrateArgs),
    /// Write a p,q-binomial distribution as CSV plus a JSON sidecar.
    Pqdist(PqdistArgs),
    /// Run the identity suites.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Function {
    F,
    Psi0,
    Psi1,
    Omega,
    #[value(name = "omega_n", alias = "omega-n")]
    OmegaN,
    #[value(name = "W0", alias = "w0")]
    W0,
    #[value(name = "Wm1", alias = "wm1")]
    Wm1,
}

#[derive(Debug, Args)]
struct EvalArgs {
    function: Function,
    /// Asymmetry parameter, as a decimal or an exact ratio such as 1/3.
    #[arg(long)]
    a: Option<AsymmetryParam>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Args)]
struct SweepArgs {
    function: Function,
    #[arg(long)]
    a: Option<AsymmetryParam>,
    #[arg(long, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, default_value_t = 101)]
    count: usize,
    #[arg(long, value_enum, default_value = "linear")]
    scale: Scale,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesChoice {
    Taylor,
    BranchPoint,
    Omega,
    Asymptotic,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    #[arg(long)]
    a: AsymmetryParam,
    #[arg(long, value_enum, default_value = "taylor")]
    kind: SeriesChoice,
    /// Branch for the branch-point and asymptotic expansions.
    #[arg(long, default_value = "principal")]
    branch: BranchId,
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Omega,
    Psi0,
    Psi1,
}

#[derive(Debug, Args)]
struct IntegrateArgs {
    #[arg(long)]
    a: AsymmetryParam,
    #[arg(long, value_enum, default_value = "omega")]
    target: Target,
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct PqdistArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, requires = "z", conflicts_with_all = ["p", "q"])]
    a: Option<AsymmetryParam>,
    #[arg(long, allow_hyphen_values = true, requires = "a")]
    z: Option<f64>,
    #[arg(long, requires = "q")]
    p: Option<f64>,
    #[arg(long, requires = "p")]
    q: Option<f64>,
    /// CSV destination; the sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    #[arg(long, value_enum, default_value = "fast")]
    level: Level,
}

/// A failure of the command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } | Error::Accuracy { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 1,
            message: format!("output error: {e}"),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code: 0 on success, 2 for usage and domain
/// errors, 1 for numerical or I/O failures and failed self-checks.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(&args, out),
        Command::Sweep(args) => cmd_sweep(&args, out),
        Command::Series(args) => cmd_series(&args, out),
        Command::Integrate(args) => cmd_integrate(&args, out),
        Command::Pqdist(args) => cmd_pqdist(&args, out),
        Command::Selfcheck(args) => cmd_selfcheck(&args, out),
    };
    match result.and_then(|code| out.flush().map(|_| code).map_err(Failure::from)) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn require<T>(v: Option<T>, flag: &str, what: Function) -> CliResult<T> {
    v.ok_or_else(|| usage(format!("{what:?} requires --{flag}")))
}

fn input_name(f: Function) -> &'static str {
    match f {
        Function::F => "w",
        Function::Omega | Function::OmegaN => "z",
        _ => "x",
    }
}

struct Evaluation {
    value: f64,
    residual: Option<f64>,
    method: &'static str,
}

/// Dispatches one evaluation; exact ratios use the explicit formulas where
/// they exist.
fn evaluate(f: Function, a: Option<AsymmetryParam>, n: Option<u64>, t: f64) -> CliResult<Evaluation> {
    let need_a = || require(a, "a", f);
    Ok(match f {
        Function::F => Evaluation {
            value: forward(need_a()?, t)?,
            residual: None,
            method: "direct",
        },
        Function::Psi0 | Function::Psi1 => {
            let a = need_a()?;
            let branch = if f == Function::Psi0 {
                BranchId::Principal
            } else {
                BranchId::Lower
            };
            let q = PsiQuery::new(a, branch, t);
            let (value, method) = if ClosedFormTag::of(&a) != ClosedFormTag::None {
                (psi_closed_form(q)?, "closed_form")
            } else {
                (psi(q)?, "solver")
            };
            let residual = forward(a, value).ok().map(|x| (x - t).abs());
            Evaluation {
                value,
                residual,
                method,
            }
        }
        Function::Omega => {
            let a = need_a()?;
            let (value, method) = match omega_closed_form(a, t) {
                Ok(v) => (v, "closed_form"),
                Err(Error::Unsupported(_)) => (omega(a, t)?, "solver"),
                Err(e) => return Err(e.into()),
            };
            let residual = match (forward(a, value), forward(a, t)) {
                (Ok(x), Ok(y)) => Some((x - y).abs()),
                _ => None,
            };
            Evaluation {
                value,
                residual,
                method,
            }
        }
        Function::OmegaN => {
            let a = need_a()?;
            let n = require(n, "n", f)?;
            let value = omega_finite_n(n, a, t)?;
            let k = round_half_even(n as f64 * (1.0 - a.value()) / 2.0) as u64;
            let residual = PqParams::from_provenance(n, a, value, t)
                .and_then(|pq| equal_ratio_residual(&pq, k))
                .ok()
                .map(f64::abs);
            Evaluation {
                value,
                residual,
                method: "solver",
            }
        }
        Function::W0 | Function::Wm1 => {
            let branch = if f == Function::W0 {
                BranchId::Principal
            } else {
                BranchId::Lower
            };
            let value = lambert_w(branch, t)?;
            Evaluation {
                value,
                residual: Some((value * value.exp() - t).abs()),
                method: "solver",
            }
        }
    })
}

fn a_text(a: Option<AsymmetryParam>) -> Value {
    a.map_or(Value::Empty, |a| Value::Text(a.to_string()))
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> CliResult<i32> {
    let f = args.function;
    let t = match f {
        Function::Omega | Function::OmegaN => require(args.z, "z", f)?,
        _ => require(args.x, "x", f)?,
    };
    let e = evaluate(f, args.a, args.n, t)?;
    let rec = OutputRecord::new()
        .with("function", format!("{f:?}").to_lowercase())
        .with("a", a_text(args.a))
        .with(input_name(f), t)
        .with("value", e.value)
        .with("residual", e.residual)
        .with("method", e.method);
    let mut w = RecordWriter::new(args.format, out);
    w.write(&rec)?;
    w.finish()?;
    Ok(0)
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::Domain(_) => "domain",
        Error::Range(_) => "range",
        Error::UndefinedConstants(_) => "undefined_constants",
        Error::NoConvergence { .. } => "no_convergence",
        Error::Singular(_) => "singular",
        Error::Unsupported(_) => "unsupported",
        Error::Divergent(_) => "divergent",
        Error::Accuracy { .. } => "accuracy",
        Error::Precondition(_) => "precondition",
    }
}

/// Grid of `count` points from `lo` to `hi`, both included.
fn grid(lo: f64, hi: f64, count: usize, scale: Scale) -> CliResult<Vec<f64>> {
    if !(lo < hi) {
        return Err(usage(format!("--lo {lo} must be below --hi {hi}")));
    }
    if count == 0 || count > MAX_SWEEP_POINTS {
        return Err(usage(format!("--count must be in 1..={MAX_SWEEP_POINTS}")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let last = (count - 1) as f64;
    let mut pts: Vec<f64> = match scale {
        Scale::Linear => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / last)
            .collect(),
        Scale::Log => {
            if lo * hi <= 0.0 {
                return Err(usage("a log sweep needs --lo and --hi of the same sign"));
            }
            let (l, h) = (lo.abs().ln(), hi.abs().ln());
            (0..count)
                .map(|i| lo.signum() * (l + (h - l) * i as f64 / last).exp())
                .collect()
        }
    };
    pts[0] = lo;
    pts[count - 1] = hi;
    Ok(pts)
}

fn closed_form_column(f: Function, a: Option<AsymmetryParam>) -> bool {
    let tag = a.map_or(ClosedFormTag::None, |a| ClosedFormTag::of(&a));
    match f {
        Function::Psi0 | Function::Psi1 => tag != ClosedFormTag::None,
        Function::Omega => matches!(tag, ClosedFormTag::A13 | ClosedFormTag::A12 | ClosedFormTag::A15),
        _ => false,
    }
}

fn sweep_point(f: Function, a: Option<AsymmetryParam>, n: Option<u64>, t: f64, with_closed: bool) -> OutputRecord {
    // Sweeps report the solver value; the explicit formula, when present,
    // goes in its own column.
    let solver = |t: f64| -> Result<f64> {
        let a = a.ok_or_else(|| Error::InvalidParameter("--a is required".into()))?;
        match f {
            Function::Psi0 => psi(PsiQuery::new(a, BranchId::Principal, t)),
            Function::Psi1 => psi(PsiQuery::new(a, BranchId::Lower, t)),
            Function::Omega => omega(a, t),
            _ => unreachable!(),
        }
    };
    let result: Result<f64> = match f {
        Function::Psi0 | Function::Psi1 | Function::Omega => solver(t),
        _ => evaluate(f, a, n, t)
            .map(|e| e.value)
            .map_err(|fail| Error::Domain(fail.message)),
    };
    let mut rec = OutputRecord::new().with(input_name(f), t);
    let status = match &result {
        Ok(_) => "ok",
        Err(e) => error_kind(e),
    };
    rec = rec.with("value", result.ok());
    if with_closed {
        let a = a.expect("closed-form column implies --a");
        let c = match f {
            Function::Psi0 => psi_closed_form(PsiQuery::new(a, BranchId::Principal, t)),
            Function::Psi1 => psi_closed_form(PsiQuery::new(a, BranchId::Lower, t)),
            _ => omega_closed_form(a, t),
        };
        rec = rec.with("closed_form", c.ok());
    }
    rec.with("status", status)
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure {
            code: 1,
            message: format!("cannot start worker threads: {e}"),
        })
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> CliResult<i32> {
    let f = args.function;
    if f != Function::W0 && f != Function::Wm1 && args.a.is_none() {
        return Err(usage(format!("{f:?} requires --a")));
    }
    if f == Function::OmegaN && args.n.is_none() {
        return Err(usage("omega_n requires --n"));
    }
    let pts = grid(args.lo, args.hi, args.count, args.scale)?;
    let with_closed = closed_form_column(f, args.a);
    let pool = thread_pool()?;
    let mut w = RecordWriter::new(args.format, out);
    for chunk in pts.chunks(SWEEP_CHUNK) {
        let recs: Vec<OutputRecord> = pool.install(|| {
            chunk
                .par_iter()
                .map(|&t| sweep_point(f, args.a, args.n, t, with_closed))
                .collect()
        });
        for r in &recs {
            w.write(r)?;
        }
    }
    w.finish()?;
    Ok(0)
}

fn power_label(s: &SeriesExpansion, i: usize) -> String {
    let m = i + 1;
    match s.kind {
        SeriesKind::BranchPointPsi0 | SeriesKind::BranchPointPsi1 => {
            if m.is_multiple_of(2) {
                format!("t^{}", m / 2)
            } else {
                format!("t^{m}/2")
            }
        }
        SeriesKind::TaylorAtZero => format!("x^{m}"),
        SeriesKind::BranchPointOmega => format!("(z-M)^{m}"),
        SeriesKind::AsymptoticPsi0 => format!("Y^{m}"),
        SeriesKind::AsymptoticPsi1 => format!("Z^{m}"),
    }
}

fn cmd_series(args: &SeriesArgs, out: &mut dyn Write) -> CliResult<i32> {
    let s = match args.kind {
        SeriesChoice::Taylor => taylor_at_zero(args.a, args.terms.unwrap_or(10))?,
        SeriesChoice::BranchPoint => {
            let which = match args.branch {
                BranchId::Principal => BranchPointKind::Psi0,
                BranchId::Lower => BranchPointKind::Psi1,
            };
            branch_point_series(args.a, which, args.terms.unwrap_or(7))?
        }
        SeriesChoice::Omega => branch_point_series(args.a, BranchPointKind::Omega, args.terms.unwrap_or(10))?,
        SeriesChoice::Asymptotic => asymptotic_series(args.a, args.branch, args.terms.unwrap_or(3))?,
    };
    let mut w = RecordWriter::new(args.format, out);
    for (i, &c) in s.coeffs.iter().enumerate() {
        w.write(
            &OutputRecord::new()
                .with("term", i + 1)
                .with("power", power_label(&s, i))
                .with("coefficient", c),
        )?;
    }
    w.finish()?;
    Ok(0)
}

fn cmd_integrate(args: &IntegrateArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (closed, quad) = match args.target {
        Target::Omega => (
            integral_omega(args.a)?,
            integral_omega_quadrature(args.a, args.rel_tol)?,
        ),
        Target::Psi0 | Target::Psi1 => {
            let b = if args.target == Target::Psi0 {
                BranchId::Principal
            } else {
                BranchId::Lower
            };
            (
                integral_psi(args.a, b)?,
                integral_psi_quadrature(args.a, b, args.rel_tol)?,
            )
        }
    };
    let rec = OutputRecord::new()
        .with("target", format!("{:?}", args.target).to_lowercase())
        .with("a", args.a.to_string())
        .with("closed_form", closed)
        .with("quadrature", quad)
        .with("difference", quad - closed);
    let mut w = RecordWriter::new(args.format, out);
    w.write(&rec)?;
    w.finish()?;
    Ok(0)
}

fn sidecar_path(out: &Path) -> CliResult<PathBuf> {
    let side = out.with_extension("json");
    if side == out {
        return Err(usage(format!(
            "--out {} would collide with its JSON sidecar",
            out.display()
        )));
    }
    Ok(side)
}

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure {
        code: 1,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

fn cmd_pqdist(args: &PqdistArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (params, y, omega_bar) = match (args.a, args.z, args.p, args.q) {
        (Some(a), Some(z), None, None) => {
            let y = omega(a, z)?;
            (
                PqParams::from_provenance(args.n, a, y, z)?,
                Some(y),
                omega_finite_n(args.n, a, z).ok(),
            )
        }
        (None, None, Some(p), Some(q)) => (PqParams::new(args.n, p, q)?, None, None),
        _ => return Err(usage("pqdist needs either --a and --z or --p and --q")),
    };
    let dist = build_distribution(params)?;
    let side = sidecar_path(&args.out)?;

    let file = File::create(&args.out).map_err(io_at(&args.out))?;
    let mut w = RecordWriter::new(Format::Csv, BufWriter::new(file));
    let nf = params.n as f64;
    for (k, &lc) in dist.log_coeffs.iter().enumerate() {
        w.write(
            &OutputRecord::new()
                .with("k", k)
                .with("k_over_n", k as f64 / nf)
                .with("mass", dist.probability(k))
                .with("log_coeff", lc),
        )
        .map_err(io_at(&args.out))?;
    }
    w.finish().map_err(io_at(&args.out))?;

    let prov = params.provenance;
    let peaks: Vec<String> = dist.peaks.iter().map(|k| k.to_string()).collect();
    let meta = OutputRecord::new()
        .with("n", params.n as i64)
        .with("a", prov.map_or(Value::Empty, |p| Value::Text(p.a.to_string())))
        .with("z", prov.map(|p| p.z))
        .with("y", y)
        .with("omega_bar", omega_bar)
        .with("p", params.p)
        .with("q", params.q)
        .with("log_norm", dist.log_norm);
    // Peaks are an array, which the flat record type does not model.
    let json = meta.to_json();
    let json = format!("{},\"peaks\":[{}]}}\n", &json[..json.len() - 1], peaks.join(","));
    std::fs::write(&side, json).map_err(io_at(&side))?;

    let summary = OutputRecord::new()
        .with("n", params.n as i64)
        .with("p", params.p)
        .with("q", params.q)
        .with("peaks", peaks.join(" "))
        .with("csv", args.out.display().to_string())
        .with("sidecar", side.display().to_string());
    let mut w = RecordWriter::new(Format::Csv, out);
    w.write(&summary)?;
    w.finish()?;
    Ok(0)
}

fn cmd_selfcheck(args: &SelfcheckArgs, out: &mut dyn Write) -> CliResult<i32> {
    let fault = std::env::var(FAULT_ENV).ok();
    let results = run_suites(args.level, fault.as_deref());
    let mut passed = 0;
    for r in &results {
        if r.passed {
            passed += 1;
        }
        writeln!(
            out,
            "{:<22} {} worst={} tol={} ({} ms)",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            format_f64(r.worst),
            format_f64(r.tolerance),
            r.millis
        )?;
    }
    writeln!(out, "selfcheck: {passed}/{} suites passed", results.len())?;
    Ok(if passed == results.len() { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("pqlambert").chain(args.iter().copied());
        let code = run_from(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn grids_include_endpoints() {
        let g = grid(-10.0, -0.01, 7, Scale::Log).unwrap();
        assert_eq!(g[0], -10.0);
        assert_eq!(g[6], -0.01);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(grid(1.0, 1.0, 3, Scale::Linear).is_err());
        assert!(grid(-1.0, 1.0, 3, Scale::Log).is_err());
        assert!(grid(0.0, 1.0, MAX_SWEEP_POINTS + 1, Scale::Linear).is_err());
    }

    #[test]
    fn eval_dispatches_closed_forms() {
        let (code, out, _) = run(&["eval", "psi0", "--a", "1/3", "--x", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("closed_form"));
        let (_, out, _) = run(&["eval", "psi0", "--a", "0.3", "--x", "1"]);
        assert!(out.contains("solver"));
    }

    #[test]
    fn missing_flags_are_usage_errors() {
        let (code, _, err) = run(&["eval", "omega", "--a", "1/2"]);
        assert_eq!(code, 2);
        assert!(err.contains("--z"));
        let (code, _, _) = run(&["eval", "psi0", "--x", "1"]);
        assert_eq!(code, 2);
        let (code, _, _) = run(&["frobnicate"]);
        assert_eq!(code, 2);
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("selfcheck"));
    }
}
