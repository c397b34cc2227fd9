//! Command-line front end.
//!
//! Grids go out as CSV, reports as JSON lines; every float is written as
//! `{:.16e}` and non-finite values as `null`. Exit codes: 0 pass, 2 usage,
//! 3 numerical failure or failed check.

pub mod output;
pub mod verify;

pub use output::{fmt_f64, Json};
pub use verify::{run_suite, CheckRecord, Suite};

use crate::error::Error;
use crate::kernels::{
    conj_poisson_kernel, dheat_dt, dheat_dx, dpoisson_dt, gauss_weierstrass, heat_kernel, poisson_kernel, riesz_kernel, tilde_kernel,
    BesselParam, PoissonMethod, RieszMethod, TildeBase,
};
use crate::quad::QuadratureSpec;
use crate::theory::{
    default_eps_grid, default_n_grid, parse_grid, region_map, sharpness_boundary_weak, sharpness_l1_blowup, MappedOperator, Real,
    SharpnessReport, SharpnessTarget, Verdict,
};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const THREADS_ENV: &str = "BESSEL_HARMONIC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "bessel-harmonic", version, about = "Kernels, operators and mapping regions for Bessel operators on the half-line")]
pub struct Cli {
    /// Plain-text `key = value` file whose keys mirror the long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_subdiv: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a kernel on a grid or on seeded random points (CSV).
    Kernel(KernelArgs),
    /// Run a verification suite (JSON lines).
    Verify(VerifyArgs),
    /// Tabulate a boundedness region (CSV).
    Region(RegionArgs),
    /// Run a sharpness experiment (JSON lines).
    Sharpness(SharpnessArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Heat,
    HeatDx,
    HeatDt,
    Poisson,
    PoissonDt,
    ConjPoisson,
    Riesz,
    GaussWeierstrass,
    TildeHeat,
    TildePoisson,
    TildeRiesz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    ClosedForm,
    Subordination,
    TIntegral,
    Closed2f1,
    Lambda0,
}

#[derive(Debug, clap::Args)]
pub struct KernelArgs {
    pub kind: KernelKind,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Times: a comma list or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Draw this many log-uniform points from `--range` instead of grids.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value = "0.05:20")]
    pub range: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    pub suite: Suite,
}

#[derive(Debug, clap::Args)]
pub struct RegionArgs {
    /// wmax, pmax, riesz, riesz-adjoint, g, h0, hinf
    #[arg(long)]
    pub op: String,
    /// `λ` for Bessel operators, `η` for Hardy operators.
    #[arg(long, alias = "eta", allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: String,
    /// Conjugated operators on Lebesgue measure.
    #[arg(long)]
    pub tilde: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    L1,
    Boundary,
}

#[derive(Debug, clap::Args)]
pub struct SharpnessArgs {
    pub experiment: Experiment,
    /// wmax, riesz or gloc.
    #[arg(long, default_value = "wmax")]
    pub op: String,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// ε values for the blow-up experiment, decreasing.
    #[arg(long)]
    pub eps: Option<String>,
    /// n values for the boundary experiment, increasing.
    #[arg(long)]
    pub n: Option<String>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_usage() { EXIT_USAGE } else { EXIT_NUMERIC }, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: msg.into() }
}

/// Appends `--key value` for every config entry not already given as a flag.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = strs.get(i + 1).cloned();
        } else if let Some(v) = a.strip_prefix("--config=") {
            path = Some(v.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("cannot read config {path}: {e}")))?;
    let mut out = args;
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(usage(format!("{path}:{}: expected key = value", ln + 1)));
        };
        let key = k.trim().replace('_', "-");
        let value = v.trim();
        if key.is_empty() || key == "config" {
            return Err(usage(format!("{path}:{}: invalid key '{}'", ln + 1, k.trim())));
        }
        let flag = format!("--{key}");
        if strs.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        match value {
            "true" => out.push(flag.into()),
            "false" => {}
            _ => out.push(format!("{flag}={value}").into()),
        }
    }
    Ok(out)
}

/// Worker count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

fn spec_of(cli: &Cli) -> Result<QuadratureSpec, Failure> {
    let mut s = QuadratureSpec::default();
    if let Some(v) = cli.rel_tol {
        s.rel_tol = v;
    }
    if let Some(v) = cli.abs_tol {
        s.abs_tol = v;
    }
    if let Some(v) = cli.max_subdiv {
        s.max_subdiv = v;
    }
    s.validate()?;
    Ok(s)
}

fn floats(s: &str, name: &str) -> Result<Vec<f64>, Failure> {
    let v: Vec<f64> = parse_grid(s).map_err(|_| usage(format!("cannot parse --{name} '{s}'")))?.into_iter().map(Real::to_f64).collect();
    if v.is_empty() {
        return Err(usage(format!("--{name} is empty")));
    }
    Ok(v)
}

fn range(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || usage(format!("--range needs 0 < lo:hi, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
        (Ok(a), Ok(b)) if a > 0.0 && b > a && b.is_finite() => Ok((a, b)),
        _ => Err(bad()),
    }
}

fn needs_t(kind: KernelKind) -> bool {
    !matches!(kind, KernelKind::Riesz | KernelKind::TildeRiesz)
}

fn kernel_points(a: &KernelArgs, seed: u64) -> Result<Vec<(Option<f64>, f64, f64)>, Failure> {
    let with_t = needs_t(a.kind);
    if let Some(n) = a.random {
        let (lo, hi) = range(&a.range)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || lo * (hi / lo).powf(rng.gen::<f64>());
        return Ok((0..n)
            .map(|_| {
                let t = draw();
                let (x, y) = (draw(), draw());
                (with_t.then_some(t), x, y)
            })
            .collect());
    }
    let xs = floats(a.x.as_deref().ok_or_else(|| usage("--x is required"))?, "x")?;
    let ys = floats(a.y.as_deref().ok_or_else(|| usage("--y is required"))?, "y")?;
    let ts: Vec<Option<f64>> = if with_t {
        floats(a.t.as_deref().ok_or_else(|| usage("--t is required"))?, "t")?.into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    let mut pts = Vec::new();
    for &t in &ts {
        for &x in &xs {
            for &y in &ys {
                pts.push((t, x, y));
            }
        }
    }
    Ok(pts)
}

fn kernel_value(
    kind: KernelKind,
    p: &BesselParam,
    method: MethodArg,
    t: f64,
    x: f64,
    y: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, &'static str, f64), Error> {
    // closed forms carry a rounding-level estimate, quadratures their tolerance
    let round = |v: f64| 64.0 * f64::EPSILON * v.abs();
    let quad = |v: f64| spec.rel_tol * v.abs();
    Ok(match kind {
        KernelKind::Heat => {
            let v = heat_kernel(p, t, x, y)?;
            (v, "closed_form", round(v))
        }
        KernelKind::HeatDx => {
            let v = dheat_dx(p, t, x, y)?;
            (v, "closed_form", round(v))
        }
        KernelKind::HeatDt => {
            let v = dheat_dt(p, t, x, y)?;
            (v, "closed_form", round(v))
        }
        KernelKind::GaussWeierstrass => {
            let v = gauss_weierstrass(t, x, y);
            (v, "closed_form", round(v))
        }
        KernelKind::Poisson => {
            let m = match method {
                MethodArg::Auto | MethodArg::ClosedForm => PoissonMethod::ClosedForm,
                MethodArg::Subordination => PoissonMethod::Subordination,
                _ => return Err(Error::InvalidInput("poisson takes closed-form or subordination".into())),
            };
            let v = poisson_kernel(p, t, x, y, m, spec)?;
            let e = if m == PoissonMethod::ClosedForm { 1e3 * round(v) } else { quad(v) };
            (v, m.as_str(), e)
        }
        KernelKind::PoissonDt => {
            let v = dpoisson_dt(p, t, x, y)?;
            (v, "closed_form", 1e3 * round(v))
        }
        KernelKind::ConjPoisson => {
            let v = conj_poisson_kernel(p, t, x, y, spec)?;
            (v, "subordination", quad(v))
        }
        KernelKind::Riesz => {
            let m = riesz_method(method)?;
            let v = riesz_kernel(p, x, y, m)?;
            let e = if m == RieszMethod::TIntegral { quad(v) } else { 1e3 * round(v) };
            (v, m.as_str(), e)
        }
        KernelKind::TildeHeat | KernelKind::TildePoisson | KernelKind::TildeRiesz => {
            let base = match kind {
                KernelKind::TildeHeat => TildeBase::Heat { t },
                KernelKind::TildePoisson => TildeBase::Poisson { t },
                _ => TildeBase::Riesz,
            };
            let v = tilde_kernel(base, p, x, y, spec)?;
            (v, "tilde", 1e3 * round(v))
        }
    })
}

fn riesz_method(m: MethodArg) -> Result<RieszMethod, Error> {
    Ok(match m {
        MethodArg::Auto => RieszMethod::Auto,
        MethodArg::TIntegral => RieszMethod::TIntegral,
        MethodArg::Closed2f1 | MethodArg::ClosedForm => RieszMethod::Closed2F1,
        MethodArg::Lambda0 => RieszMethod::Lambda0,
        MethodArg::Subordination => return Err(Error::InvalidInput("riesz takes auto, t-integral, closed2f1 or lambda0".into())),
    })
}

fn cmd_kernel(a: &KernelArgs, cli: &Cli, spec: &QuadratureSpec) -> Result<(String, i32), Failure> {
    let lambda = match (a.kind, a.lambda) {
        (KernelKind::GaussWeierstrass, l) => l.unwrap_or(0.0),
        (_, Some(l)) => l,
        _ => return Err(usage("--lambda is required")),
    };
    let p = BesselParam::new(lambda)?;
    let pts = kernel_points(a, cli.seed)?;
    for &(t, x, y) in &pts {
        crate::kernels::KernelPoint::new(t, x, y)?;
    }
    let rows: Vec<(f64, &'static str, f64)> =
        pts.par_iter().map(|&(t, x, y)| kernel_value(a.kind, &p, a.method, t.unwrap_or(f64::NAN), x, y, spec)).collect::<Result<_, _>>()?;
    let mut out = String::from("t,x,y,value,method,err_est\n");
    for (&(t, x, y), (v, m, e)) in pts.iter().zip(rows) {
        let t = t.map_or_else(|| "null".to_string(), fmt_f64);
        let _ = writeln!(out, "{t},{},{},{},{m},{}", fmt_f64(x), fmt_f64(y), fmt_f64(v), fmt_f64(e));
    }
    Ok((out, EXIT_PASS))
}

fn cmd_verify(a: &VerifyArgs, cli: &Cli, spec: &QuadratureSpec) -> Result<(String, i32), Failure> {
    let records = run_suite(a.suite, cli.seed, spec);
    let mut out = String::new();
    for r in &records {
        out.push_str(&r.to_json());
        out.push('\n');
    }
    let code = if records.iter().all(|r| r.passed) { EXIT_PASS } else { EXIT_NUMERIC };
    Ok((out, code))
}

fn cmd_region(a: &RegionArgs) -> Result<(String, i32), Failure> {
    let op = MappedOperator::parse(&a.op).ok_or_else(|| usage(format!("unknown operator '{}'", a.op)))?;
    let param = Real::parse(&a.lambda).ok_or_else(|| usage(format!("cannot parse --lambda '{}'", a.lambda)))?;
    let ps = parse_grid(&a.p)?;
    let ds = parse_grid(&a.delta)?;
    let map = region_map(op, param, &ps, &ds, a.tilde)?;
    let mut out = String::from("p,delta,strong,weak,restricted_weak\n");
    for n in &map {
        let c = n.classes;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(n.p.to_f64()),
            fmt_f64(n.delta.to_f64()),
            u8::from(c.strong),
            u8::from(c.weak),
            u8::from(c.restricted_weak)
        );
    }
    Ok((out, EXIT_PASS))
}

pub fn sharpness_json(r: &SharpnessReport) -> String {
    let mut j = Json::new();
    j.str("experiment", &r.experiment)
        .num("lambda", r.lambda)
        .num("p", r.p)
        .num("delta", r.delta)
        .nums("grid", &r.grid)
        .nums("input_norms", &r.input_norms)
        .nums("ratios", &r.ratios)
        .num("slope", r.fit.slope)
        .num("intercept", r.fit.intercept)
        .num("r2", r.fit.r2)
        .str("verdict", r.verdict.as_str());
    match &r.note {
        Some(n) => j.str("note", n),
        None => j.null("note"),
    };
    j.finish()
}

fn cmd_sharpness(a: &SharpnessArgs, spec: &QuadratureSpec) -> Result<(String, i32), Failure> {
    let report = match a.experiment {
        Experiment::L1 => {
            let target = SharpnessTarget::parse(&a.op).ok_or_else(|| usage(format!("unknown target '{}'", a.op)))?;
            let eps = match &a.eps {
                Some(s) => floats(s, "eps")?,
                None => default_eps_grid(),
            };
            sharpness_l1_blowup(target, a.lambda, a.delta, &eps, spec)?
        }
        Experiment::Boundary => {
            if a.op != "wmax" {
                return Err(usage("the boundary experiment is defined for wmax only"));
            }
            let n = match &a.n {
                Some(s) => floats(s, "n")?,
                None => default_n_grid(),
            };
            sharpness_boundary_weak(a.lambda, a.p, a.delta, &n, spec)?
        }
    };
    let code = if report.verdict == Verdict::Pass { EXIT_PASS } else { EXIT_NUMERIC };
    Ok((sharpness_json(&report) + "\n", code))
}

fn dispatch(cli: &Cli) -> Result<(String, i32), Failure> {
    let spec = spec_of(cli)?;
    match &cli.command {
        Command::Kernel(a) => cmd_kernel(a, cli, &spec),
        Command::Verify(a) => cmd_verify(a, cli, &spec),
        Command::Region(a) => cmd_region(a),
        // experiments run at a looser default; explicit tolerances win
        Command::Sharpness(a) => {
            let s = if cli.rel_tol.is_none() { QuadratureSpec { rel_tol: 1e-8, ..spec } } else { spec };
            cmd_sharpness(a, &s)
        }
    }
}

/// Parses, runs and writes; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let result = merge_config(args).and_then(|args| {
        let cli = match Cli::try_parse_from(args) {
            Ok(c) => c,
            Err(e) => {
                let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
                let _ = e.print();
                return Err(Failure { code, message: String::new() });
            }
        };
        let threads = threads_from_env()?;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| usage(format!("cannot start thread pool: {e}")))?;
        let (text, code) = pool.install(|| dispatch(&cli))?;
        match &cli.output {
            Some(path) => std::fs::write(path, &text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
            None => {
                let mut so = std::io::stdout().lock();
                let _ = so.write_all(text.as_bytes());
                let _ = so.flush();
            }
        }
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            f.code
        }
    }
}
