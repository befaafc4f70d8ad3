//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verdict of `verify` or `suite`
//! failed, 2 on a usage, configuration or numerical error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::integrals::{paley_wiener, reg_integral, skorohod_estimate, RegKind};
use crate::models::{check_assumptions, membership_condition, CovModel, Family, Kappa, ModelKind, QShape};
use crate::norms::{inner_h, inner_r, is_formal, norm_h_sq, norm_r_sq};
use crate::piecewise::PiecewiseFn;
use crate::simulation::{sample_paths, SimGrid};
use crate::smooth::SmoothFn;
use crate::verification::stats::{mean, se_mean, variance};
use crate::verification::{paper_suite, Experiment, ExperimentReport, QvBehaviour, QvConfig, SuiteReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message} (at `{key}`)")]
    Usage { key: String, message: String },
    #[error(transparent)]
    Verification(#[from] crate::verification::VerificationError),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
    #[error(transparent)]
    Simulation(#[from] crate::simulation::SimError),
    #[error(transparent)]
    Integral(#[from] crate::integrals::IntegralError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn usage(key: &str, message: impl Into<String>) -> CliError {
    CliError::Usage {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Parser)]
#[command(name = "singcov", version, about = "Singular-covariance Gaussian processes: norms, integrals, Monte Carlo checks")]
pub struct Cli {
    /// Worker threads for ensemble loops (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate paths and export them as CSV with a JSON sidecar.
    Simulate(SimulateArgs),
    /// Squared H and R norms of a test function.
    Norm(NormArgs),
    /// H and R inner products of two test functions.
    Inner(InnerArgs),
    /// Ensemble statistics of a pathwise integral.
    Integrate(IntegrateArgs),
    /// Quadratic variation along an eps ladder.
    Qv(QvArgs),
    /// Assumption checks and the membership condition.
    Check(CheckArgs),
    /// Run one experiment from a JSON configuration.
    Verify(VerifyArgs),
    /// Run a preset bundle of experiments.
    Suite(SuiteArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model JSON file or preset: fbm:H, bifbm:H,K, statinc:log,
    /// statinc:power:H, kernel:indicator, kernel:triangle, kernel:power[:e].
    #[arg(long)]
    pub model: String,
    /// Horizon for presets.
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Test function: indicator:a,b | step:b1,b2,../v1,v2,.. |
    /// linear:b1,b2,../v1,v2,.. | const:c | JSON file.
    #[arg(long)]
    pub f: String,
}

#[derive(Debug, Args)]
pub struct InnerArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub g: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegralKind {
    PaleyWiener,
    Forward,
    Backward,
    Symmetric,
    Skorohod,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum, default_value_t = IntegralKind::PaleyWiener)]
    pub kind: IntegralKind,
    /// Deterministic integrand for the Paley-Wiener integral.
    #[arg(long)]
    pub f: Option<String>,
    /// Integrand g for g(X): id, sq, sin, cos, exp:a, poly:c0,c1,..
    #[arg(long)]
    pub integrand: Option<String>,
    /// Regularization width, e.g. T/64.
    #[arg(long)]
    pub eps: Option<String>,
    /// Upper limit of integration (default: the horizon).
    #[arg(long)]
    pub t: Option<f64>,
    /// Writes per-path values to integrals.csv here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QvArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub mc: McArgs,
    /// Ladder such as T/16..T/256, or a comma list.
    #[arg(long, default_value = "T/16..T/256")]
    pub eps: String,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Cutoff ladder for the membership condition.
    #[arg(long, default_value = "T/8..T/256")]
    pub cutoffs: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Experiment configuration (JSON with an "experiment" tag).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance overrides: key=value[,key=value...].
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long, default_value = "paper")]
    pub preset: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
}

/// Parses `argv` and runs; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(k) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    match dispatch(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("singcov: {e}");
            2
        }
    }
}

/// `Ok(false)` when a verdict failed.
fn dispatch(cmd: &Command) -> Result<bool, CliError> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Norm(a) => norm(a),
        Command::Inner(a) => inner(a),
        Command::Integrate(a) => integrate(a),
        Command::Qv(a) => qv(a),
        Command::Check(a) => check(a),
        Command::Verify(a) => verify(a),
        Command::Suite(a) => suite(a),
    }
}

fn parse_num(key: &str, s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(key, format!("`{s}` is not a number")))
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|x| parse_num(key, x)).collect()
}

/// A model from a JSON file or a preset name.
pub fn parse_model(spec: &str, horizon: f64) -> Result<CovModel, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        return CovModel::from_json(&text).map_err(|e| usage("--model", e.to_string()));
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || usage("--model", format!("unknown model preset `{spec}`"));
    let model = match parts.as_slice() {
        ["fbm", h] => CovModel::fbm(parse_num("--model", h)?, horizon),
        ["bifbm", hk] => {
            let v = parse_list("--model", hk)?;
            if v.len() != 2 {
                return Err(bad());
            }
            CovModel::bifbm(v[0], v[1], horizon)
        }
        ["statinc", "log"] => CovModel::statinc(QShape::Log, horizon),
        ["statinc", "power", h] => CovModel::statinc(
            QShape::Power {
                hurst: parse_num("--model", h)?,
            },
            horizon,
        ),
        ["kernel", "indicator"] => CovModel::kernel(Kappa::Indicator, horizon),
        ["kernel", "triangle"] => CovModel::kernel(Kappa::Triangle, horizon),
        ["kernel", "power"] => CovModel::kernel(Kappa::Power { exponent: -0.2 }, horizon),
        ["kernel", "power", e] => CovModel::kernel(
            Kappa::Power {
                exponent: parse_num("--model", e)?,
            },
            horizon,
        ),
        _ => return Err(bad()),
    };
    model.map_err(|e| usage("--model", e.to_string()))
}

/// A piecewise test function from its short form or a JSON file.
pub fn parse_piecewise(key: &str, spec: &str) -> Result<PiecewiseFn, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        return serde_json::from_str(&text).map_err(|e| usage(key, e.to_string()));
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| usage(key, format!("expected kind:arguments, got `{spec}`")))?;
    let to_usage = |e: crate::piecewise::PiecewiseError| usage(key, e.to_string());
    match kind {
        "indicator" => {
            let v = parse_list(key, rest)?;
            if v.len() != 2 {
                return Err(usage(key, "indicator takes a,b"));
            }
            PiecewiseFn::indicator(v[0], v[1]).map_err(to_usage)
        }
        "const" => Ok(PiecewiseFn::constant(parse_num(key, rest)?)),
        "step" | "linear" => {
            let (b, v) = rest
                .split_once('/')
                .ok_or_else(|| usage(key, "expected breakpoints/values"))?;
            let (b, v) = (parse_list(key, b)?, parse_list(key, v)?);
            if kind == "step" {
                PiecewiseFn::step(b, v).map_err(to_usage)
            } else {
                PiecewiseFn::linear(b, v).map_err(to_usage)
            }
        }
        _ => Err(usage(key, format!("unknown function kind `{kind}`"))),
    }
}

pub fn parse_smooth(key: &str, spec: &str) -> Result<SmoothFn, CliError> {
    match spec.split_once(':') {
        None => match spec {
            "id" => Ok(SmoothFn::identity()),
            "sq" => Ok(SmoothFn::half_square()),
            "sin" => Ok(SmoothFn::Sin),
            "cos" => Ok(SmoothFn::Cos),
            _ => Err(usage(key, format!("unknown integrand `{spec}`"))),
        },
        Some(("exp", a)) => Ok(SmoothFn::Exp {
            rate: parse_num(key, a)?,
        }),
        Some(("poly", c)) => Ok(SmoothFn::Polynomial {
            coefficients: parse_list(key, c)?,
        }),
        Some(_) => Err(usage(key, format!("unknown integrand `{spec}`"))),
    }
}

fn parse_time(key: &str, s: &str, horizon: f64) -> Result<f64, CliError> {
    let s = s.trim();
    if let Some(d) = s.strip_prefix("T/") {
        let d = parse_num(key, d)?;
        if d <= 0.0 {
            return Err(usage(key, "divisor must be positive"));
        }
        return Ok(horizon / d);
    }
    if s == "T" {
        return Ok(horizon);
    }
    parse_num(key, s)
}

/// `T/16..T/512` (geometric, ratio 2), a comma list, or a single value.
pub fn parse_ladder(key: &str, s: &str, horizon: f64) -> Result<Vec<f64>, CliError> {
    if let Some((a, b)) = s.split_once("..") {
        let (hi, lo) = (parse_time(key, a, horizon)?, parse_time(key, b, horizon)?);
        if !(lo > 0.0 && lo <= hi) {
            return Err(usage(key, "ladder must run from the larger value down"));
        }
        let mut out = vec![hi];
        let mut cur = hi;
        while cur / 2.0 >= lo * (1.0 - 1e-12) {
            cur /= 2.0;
            out.push(cur);
        }
        if (cur - lo).abs() > 1e-12 * lo {
            return Err(usage(key, "ladder ends must differ by a power of two"));
        }
        return Ok(out);
    }
    s.split(',').map(|x| parse_time(key, x, horizon)).collect()
}

/// Applies `key=value` pairs to top-level numeric fields of an experiment.
fn apply_overrides(value: &mut Value, tol: &str, require_all: bool) -> Result<Vec<String>, CliError> {
    let obj = value
        .as_object_mut()
        .ok_or_else(|| usage("--config", "experiment must be a JSON object"))?;
    let mut applied = Vec::new();
    for pair in tol.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| usage("--tol", format!("expected key=value, got `{pair}`")))?;
        let k = k.trim();
        let num = parse_num("--tol", v)?;
        if obj.contains_key(k) || require_all {
            obj.insert(k.to_string(), json!(num));
            applied.push(k.to_string());
        }
    }
    Ok(applied)
}

fn write_report_files(dir: &Path, json: &str, csv_writer: impl FnOnce(fs::File) -> Result<(), CliError>) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), json)?;
    csv_writer(fs::File::create(dir.join("estimates.csv"))?)
}

fn print_summary(r: &ExperimentReport) {
    let status = if r.passed() { "PASS" } else { "FAIL" };
    eprintln!("{status} {} {}", r.name, r.model);
    for c in r.checks.iter().filter(|c| !c.passed) {
        eprintln!("    {}: {} > {} ({})", c.name, c.measured, c.tolerance, c.rule);
    }
}

fn emit_report(mut report: ExperimentReport, out: Option<&Path>, no_timestamp: bool) -> Result<bool, CliError> {
    if no_timestamp {
        report.strip_timing();
    }
    let text = report.to_json()?;
    match out {
        Some(dir) => write_report_files(dir, &text, |f| Ok(report.write_csv(f)?))?,
        None => println!("{text}"),
    }
    print_summary(&report);
    Ok(report.passed())
}

fn simulate(a: &SimulateArgs) -> Result<bool, CliError> {
    let model = parse_model(&a.model.model, a.model.horizon)?;
    let grid = SimGrid::new(model.horizon(), a.mc.grid)?;
    let ens = sample_paths(&model, &grid, a.mc.paths, a.mc.seed)?;
    ens.export(&a.out, "paths")?;
    println!("{}", serde_json::to_string_pretty(&ens.meta())?);
    Ok(true)
}

fn norm(a: &NormArgs) -> Result<bool, CliError> {
    let model = parse_model(&a.model.model, a.model.horizon)?;
    let f = parse_piecewise("--f", &a.f)?;
    let out = json!({
        "model": model.descriptor(),
        "norm_h_sq": norm_h_sq(&f, &model)?,
        "norm_r_sq": norm_r_sq(&f, &model)?,
        "formal": is_formal(&model),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

fn inner(a: &InnerArgs) -> Result<bool, CliError> {
    let model = parse_model(&a.model.model, a.model.horizon)?;
    let f = parse_piecewise("--f", &a.f)?;
    let g = parse_piecewise("--g", &a.g)?;
    let out = json!({
        "model": model.descriptor(),
        "inner_h": inner_h(&f, &g, &model)?,
        "inner_r": inner_r(&f, &g, &model)?,
        "formal": is_formal(&model),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

fn integrate(a: &IntegrateArgs) -> Result<bool, CliError> {
    let model = parse_model(&a.model.model, a.model.horizon)?;
    let horizon = model.horizon();
    let grid = SimGrid::new(horizon, a.mc.grid)?;
    let t = a.t.unwrap_or(horizon);
    let ens = sample_paths(&model, &grid, a.mc.paths, a.mc.seed)?;
    let values: Vec<f64> = match a.kind {
        IntegralKind::PaleyWiener => {
            let f = parse_piecewise("--f", a.f.as_deref().ok_or_else(|| usage("--f", "required for paley-wiener"))?)?;
            ens.paths
                .par_iter()
                .map(|p| paley_wiener(p, &grid, &f))
                .collect::<Result<_, _>>()?
        }
        kind => {
            let g = parse_smooth(
                "--integrand",
                a.integrand
                    .as_deref()
                    .ok_or_else(|| usage("--integrand", "required for regularized integrals"))?,
            )?;
            let eps = parse_time("--eps", a.eps.as_deref().unwrap_or("T/64"), horizon)?;
            ens.paths
                .par_iter()
                .map(|p| {
                    let y: Vec<f64> = p.iter().map(|&x| g.value(x)).collect();
                    match kind {
                        IntegralKind::Forward => reg_integral(&y, p, &grid, eps, RegKind::Forward, t),
                        IntegralKind::Backward => reg_integral(&y, p, &grid, eps, RegKind::Backward, t),
                        IntegralKind::Symmetric => reg_integral(&y, p, &grid, eps, RegKind::Symmetric, t),
                        _ => skorohod_estimate(p, &grid, |x| g.value(x), |x| g.derivative(1, x), &model, eps, t),
                    }
                })
                .collect::<Result<_, _>>()?
        }
    };
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("integrals.csv")).map_err(std::io::Error::other)?;
        w.write_record(["path", "value"]).map_err(std::io::Error::other)?;
        for (k, v) in values.iter().enumerate() {
            w.write_record([k.to_string(), v.to_string()])
                .map_err(std::io::Error::other)?;
        }
        w.flush()?;
    }
    let out = json!({
        "model": model.descriptor(),
        "kind": format!("{:?}", a.kind).to_lowercase(),
        "paths": values.len(),
        "mean": mean(&values),
        "std_error": se_mean(&values),
        "variance": variance(&values),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

/// Known limits of the `ε`-quadratic variation at time `t`.
fn qv_reference(model: &CovModel, t: f64) -> (Option<f64>, Option<QvBehaviour>) {
    match *model.kind() {
        ModelKind::FBm { hurst } if hurst == 0.5 => (Some(t), Some(QvBehaviour::ConvergesToReference)),
        ModelKind::FBm { hurst } if hurst < 0.5 => (None, Some(QvBehaviour::Diverges)),
        ModelKind::FBm { .. } => (None, Some(QvBehaviour::ConvergesToZero)),
        ModelKind::BifBm { hurst, k } if (2.0 * hurst * k - 1.0).abs() < 1e-12 => (
            Some(2f64.powf(1.0 - k) * t),
            Some(QvBehaviour::ConvergesToReference),
        ),
        _ => (None, None),
    }
}

fn qv(a: &QvArgs) -> Result<bool, CliError> {
    let model = parse_model(&a.model.model, a.model.horizon)?;
    let horizon = model.horizon();
    let t = a.t.unwrap_or(horizon);
    let (reference, expected) = qv_reference(&model, t);
    let exp = Experiment::QuadraticVariation(QvConfig {
        model: model.to_spec(),
        eps: parse_ladder("--eps", &a.eps, horizon)?,
        t,
        reference,
        expected,
        paths: a.mc.paths,
        grid: a.mc.grid,
        seed: a.mc.seed,
        rel_tol: 0.05,
        divergence_ratio: 1.3,
        vanishing_fraction: 0.5,
    });
    let mut report = exp.run()?;
    if a.no_timestamp {
        report.strip_timing();
    }
    println!("{:>14}  {:>14}  {:>12}", "eps", "qv", "std_error");
    for e in report.estimates.iter().filter(|e| e.label.starts_with("qv[")) {
        let eps = e.label.trim_start_matches("qv[eps=").trim_end_matches(']');
        println!("{eps:>14}  {:>14.6}  {:>12.2e}", e.value, e.std_error.unwrap_or(f64::NAN));
    }
    if let Some(r) = reference {
        println!("reference {r:.6}");
    }
    for n in &report.notes {
        println!("{n}");
    }
    if let Some(dir) = &a.out {
        let text = report.to_json()?;
        write_report_files(dir, &text, |f| Ok(report.write_csv(f)?))?;
    }
    Ok(true)
}

fn check(a: &CheckArgs) -> Result<bool, CliError> {
    let model = parse_model(&a.model.model, a.model.horizon)?;
    let report = check_assumptions(&model, a.grid)?;
    let mut out = json!({ "assumptions": report });
    if model.family() != Family::Kernel {
        let cutoffs = parse_ladder("--cutoffs", &a.cutoffs, model.horizon())?;
        out["membership"] = serde_json::to_value(membership_condition(&model, &cutoffs)?)?;
    }
    out["formal"] = json!(is_formal(&model));
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

fn verify(a: &VerifyArgs) -> Result<bool, CliError> {
    let text = fs::read_to_string(&a.config)?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| usage("--config", e.to_string()))?;
    if let Some(tol) = &a.tol {
        apply_overrides(&mut value, tol, true)?;
    }
    let mut exp: Experiment = serde_json::from_value(value).map_err(|e| usage("--config", e.to_string()))?;
    if let Some(seed) = a.seed {
        exp = exp.with_seed(seed);
    }
    emit_report(exp.run()?, a.out.as_deref(), a.no_timestamp)
}

fn suite(a: &SuiteArgs) -> Result<bool, CliError> {
    let experiments = match a.preset.as_str() {
        "paper" => paper_suite(a.seed),
        other => return Err(usage("--preset", format!("unknown preset `{other}`"))),
    };
    let experiments = match &a.tol {
        None => experiments,
        Some(tol) => {
            let mut used = std::collections::BTreeSet::new();
            let mut out = Vec::with_capacity(experiments.len());
            for e in experiments {
                let mut v = serde_json::to_value(&e)?;
                used.extend(apply_overrides(&mut v, tol, false)?);
                out.push(serde_json::from_value(v).map_err(|e| usage("--tol", e.to_string()))?);
            }
            for pair in tol.split(',').filter(|p| !p.trim().is_empty()) {
                let key = pair.split('=').next().unwrap_or("").trim();
                if !used.contains(key) {
                    return Err(usage("--tol", format!("no experiment in the preset has `{key}`")));
                }
            }
            out
        }
    };
    let mut report = SuiteReport::run(&a.preset, &experiments, a.seed)?;
    if a.no_timestamp {
        report.strip_timing();
    }
    let text = report.to_json()?;
    match &a.out {
        Some(dir) => write_report_files(dir, &text, |f| Ok(report.write_csv(f)?))?,
        None => println!("{text}"),
    }
    for r in &report.reports {
        print_summary(r);
    }
    Ok(report.passed())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let m = parse_model("fbm:0.3", 1.0).unwrap();
        assert_eq!(m.descriptor(), CovModel::fbm(0.3, 1.0).unwrap().descriptor());
        assert_eq!(parse_model("bifbm:0.6,0.5", 2.0).unwrap().horizon(), 2.0);
        assert!(parse_model("statinc:log", 1.0).is_ok());
        assert!(parse_model("statinc:power:0.4", 1.0).is_ok());
        assert_eq!(parse_model("kernel:power", 1.0).unwrap().family(), Family::Kernel);
        assert!(matches!(parse_model("fbm:1.5", 1.0), Err(CliError::Usage { .. })));
        assert!(matches!(parse_model("brownian", 1.0), Err(CliError::Usage { .. })));
    }

    #[test]
    fn function_forms() {
        assert_eq!(
            parse_piecewise("--f", "indicator:0,0.5").unwrap(),
            PiecewiseFn::indicator(0.0, 0.5).unwrap()
        );
        let s = parse_piecewise("--f", "step:0,0.5,1/1,-1,0").unwrap();
        assert_eq!(s.eval(0.7), -1.0);
        let l = parse_piecewise("--f", "linear:0,1/0,2").unwrap();
        assert_eq!(l.eval(0.5), 1.0);
        assert_eq!(parse_piecewise("--f", "const:3").unwrap().eval(10.0), 3.0);
        assert!(parse_piecewise("--f", "ramp:1").is_err());
        assert_eq!(parse_smooth("--integrand", "cos").unwrap(), SmoothFn::Cos);
        assert_eq!(
            parse_smooth("--integrand", "poly:1,2").unwrap(),
            SmoothFn::Polynomial {
                coefficients: vec![1.0, 2.0]
            }
        );
    }

    #[test]
    fn ladders() {
        let l = parse_ladder("--eps", "T/16..T/512", 1.0).unwrap();
        assert_eq!(l.len(), 6);
        assert_eq!(l[0], 1.0 / 16.0);
        assert_eq!(l[5], 1.0 / 512.0);
        assert_eq!(parse_ladder("--eps", "T/4..T/8", 2.0).unwrap(), vec![0.5, 0.25]);
        assert_eq!(parse_ladder("--eps", "0.1,0.05", 1.0).unwrap(), vec![0.1, 0.05]);
        assert!(parse_ladder("--eps", "T/16..T/48", 1.0).is_err());
        assert!(parse_ladder("--eps", "T/64..T/16", 1.0).is_err());
    }

    #[test]
    fn overrides_hit_named_fields() {
        let mut v = json!({"experiment": "isometry", "se_multiplier": 3.0});
        let used = apply_overrides(&mut v, "se_multiplier=4", false).unwrap();
        assert_eq!(used, vec!["se_multiplier".to_string()]);
        assert_eq!(v["se_multiplier"], 4.0);
        assert!(apply_overrides(&mut v, "se_multiplier", false).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["singcov", "frobnicate"]), 2);
        assert_eq!(run(["singcov", "norm", "--model", "fbm:0.3"]), 2);
        assert_eq!(run(["singcov", "norm", "--model", "nope", "--f", "const:1"]), 2);
        assert_eq!(run(["singcov", "norm", "--model", "fbm:0.5", "--f", "indicator:0,0.5"]), 0);
        assert_eq!(run(["singcov", "norm", "--model", "kernel:triangle", "--f", "const:1"]), 2);
    }
}
