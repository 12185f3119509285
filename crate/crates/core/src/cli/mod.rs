//! Command-line front end: argument parsing, data ingestion, run manifests.

mod data;
mod manifest;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use data::{
    load_counts, load_pairs, load_returns_csv, load_series, parse_numeric_columns, parse_returns, read_numeric_columns,
    MIN_ROWS,
};
pub use manifest::RunManifest;

use crate::diagnostics::DiagnosticKind;
use crate::error::{Error, Result};
use crate::experiments::{
    fit_and_diagnose, preset, run_application, run_power_study, run_timing_study, with_threads, StudyConfig, StudyModel,
};
use crate::models::{
    simulate_gk_regression, simulate_ma1_gk, simulate_normal, simulate_ricker, GkParams, ModelSpec, RickerParams,
};
use crate::rng::SeedPath;

pub const THREADS_ENV: &str = "ABC_SPECCHECK_THREADS";

#[derive(Debug, Parser)]
#[command(name = "abc-misspec", version, about = "ABC fitting and misspecification diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rejection frequencies of the diagnostics over a study grid.
    Power(StudyArgs),
    /// Mean wall-clock time of each diagnostic.
    Timing(StudyArgs),
    /// Fit the MA(1) g-and-k model to a return series.
    FitReturns(FitReturnsArgs),
    /// Fit one dataset and run diagnostics on it.
    Diagnose(DiagnoseArgs),
    /// Simulate one dataset from a model.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Normal,
    Gk,
    Ricker,
    Returns,
}

impl ModelName {
    fn as_str(self) -> &'static str {
        match self {
            ModelName::Normal => "normal",
            ModelName::Gk => "gk",
            ModelName::Ricker => "ricker",
            ModelName::Returns => "returns",
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed; generated and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    /// Built-in study design, e.g. `normal` or `gk-smoke`.
    #[arg(long, conflicts_with_all = ["config", "manifest"])]
    pub preset: Option<String>,
    /// Study configuration as JSON.
    #[arg(long, conflicts_with = "manifest")]
    pub config: Option<PathBuf>,
    /// Replay the configuration and seed recorded in a manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FitReturnsArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Input holds `date,price` rows; convert to log returns.
    #[arg(long)]
    pub prices: bool,
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    /// One column of observations (`x,y` pairs for gk, counts for ricker).
    #[arg(long)]
    pub data: PathBuf,
    /// `all` or a comma-separated list of diagnostics.
    #[arg(long, default_value = "all")]
    pub test: String,
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for the report and manifest; the report goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    /// JSON object of parameter overrides, e.g. '{"a":0,"b":1,"g":2,"k":1}'.
    #[arg(long, default_value = "{}")]
    pub params: String,
    #[arg(long)]
    pub n: usize,
    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

/// Runs the command line `argv` (program name first). Returns 0 on success,
/// 1 on a usage error and 2 when the run itself fails.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let argv: Vec<String> = argv.iter().map(|s| s.to_string_lossy().into_owned()).collect();
    match run(cli, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run(cli: Cli, argv: &[String]) -> Result<()> {
    match cli.command {
        Command::Power(a) => study(a, argv, false),
        Command::Timing(a) => study(a, argv, true),
        Command::FitReturns(a) => fit_returns(a, argv),
        Command::Diagnose(a) => diagnose(a, argv),
        Command::Simulate(a) => simulate(a),
    }
}

fn resolve_seed(given: Option<u64>) -> (u64, bool) {
    match given {
        Some(s) => (s, false),
        None => {
            let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
            let seed = (nanos as u64) ^ ((nanos >> 64) as u64);
            eprintln!("seed: {seed}");
            (seed, true)
        }
    }
}

fn load_study(preset_name: Option<&str>, config: Option<&Path>, model: Option<ModelName>) -> Result<StudyConfig> {
    let cfg = match (config, preset_name) {
        (Some(path), _) => StudyConfig::from_json(&fs::read_to_string(path)?)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => match model {
            Some(m) => preset(m.as_str())?,
            None => return Err(Error::InvalidConfig("one of --model, --preset or --config is required".into())),
        },
    };
    if let Some(m) = model {
        if cfg.model.name() != m.as_str() {
            return Err(Error::InvalidConfig(format!(
                "--model {} does not match the configured model {}",
                m.as_str(),
                cfg.model.name()
            )));
        }
    }
    Ok(cfg)
}

/// Runs `body` between the initial and final manifest writes.
fn with_manifest(dir: &Path, mut manifest: RunManifest, body: impl FnOnce(&mut Vec<PathBuf>) -> Result<()>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join("manifest.json");
    manifest.write(&path)?;
    let mut outputs = Vec::new();
    let outcome = body(&mut outputs);
    manifest.outputs = outputs;
    manifest.finish(&outcome);
    manifest.write(&path)?;
    outcome
}

fn study(a: StudyArgs, argv: &[String], timing: bool) -> Result<()> {
    let (mut cfg, seed, generated, threads) = match &a.manifest {
        Some(path) => {
            let m = RunManifest::read(path)?;
            let cfg: StudyConfig = serde_json::from_value(m.config)?;
            cfg.validate()?;
            let seed = a.common.seed.unwrap_or(m.master_seed);
            (cfg, seed, false, a.common.threads)
        }
        None => {
            let cfg = load_study(a.preset.as_deref(), a.config.as_deref(), a.model)?;
            let (seed, generated) = match (a.common.seed, &a.config) {
                (Some(s), _) => (s, false),
                (None, Some(_)) => (cfg.master_seed, false),
                (None, None) => resolve_seed(None),
            };
            (cfg, seed, generated, a.common.threads)
        }
    };
    cfg.master_seed = seed;
    let command = if timing { "timing" } else { "power" };
    let mut manifest = RunManifest::new(command, argv, a.config.clone(), serde_json::to_value(&cfg)?, seed);
    manifest.seed_generated = generated;
    manifest.threads = threads;
    let out = a.out.clone();
    with_manifest(&a.out, manifest, |outputs| {
        if timing {
            let table = with_threads(threads, || run_timing_study(&cfg))??;
            let csv = out.join("timing.csv");
            let json = out.join("timing.json");
            table.write_csv(&csv)?;
            fs::write(&json, serde_json::to_string_pretty(&table)? + "\n")?;
            outputs.extend([csv, json]);
        } else {
            let study = with_threads(threads, || run_power_study(&cfg))??;
            let csv = out.join("power.csv");
            let records = out.join("replications.csv");
            let json = out.join("power.json");
            study.write_csv(&csv)?;
            study.write_records_csv(&records)?;
            fs::write(&json, serde_json::to_string_pretty(&study)? + "\n")?;
            outputs.extend([csv, records, json]);
        }
        Ok(())
    })
}

fn fit_returns(a: FitReturnsArgs, argv: &[String]) -> Result<()> {
    let cfg = load_study(Some(a.preset.as_deref().unwrap_or("returns")), a.config.as_deref(), None)?;
    let StudyModel::Returns { prior, .. } = &cfg.model else {
        return Err(Error::InvalidConfig(format!("fit-returns needs a returns configuration, got {}", cfg.model.name())));
    };
    let model = StudyModel::returns_model(prior);
    let returns = load_returns_csv(&a.data, a.prices)?;
    let (seed, generated) = resolve_seed(a.common.seed);
    let mut manifest = RunManifest::new("fit-returns", argv, a.config.clone(), serde_json::to_value(&cfg)?, seed);
    manifest.seed_generated = generated;
    manifest.threads = a.common.threads;
    let out = a.out.clone();
    with_manifest(&a.out, manifest, |outputs| {
        let result = with_threads(a.common.threads, || {
            run_application(&model, &returns, &cfg.settings, None, 0.05, &SeedPath::new(seed))
        })??;
        let json = out.join("fit.json");
        fs::write(&json, serde_json::to_string_pretty(&result)? + "\n")?;
        let csv = out.join("posterior.csv");
        let mut w = csv::Writer::from_path(&csv)?;
        w.write_record(["parameter", "mean", "median", "lower", "upper"])?;
        for p in &result.parameters {
            w.write_record([p.name.clone(), p.mean.to_string(), p.median.to_string(), p.lower.to_string(), p.upper.to_string()])?;
        }
        w.flush()?;
        outputs.extend([json, csv]);
        Ok(())
    })
}

fn parse_tests(spec: &str) -> Result<Vec<DiagnosticKind>> {
    if spec == "all" {
        return Ok(DiagnosticKind::ALL.to_vec());
    }
    spec.split(',').map(|s| s.trim().parse()).collect()
}

fn diagnose_one<M: ModelSpec>(model: &M, data: &M::Data, n: usize, cfg: &StudyConfig, seed: u64) -> Result<serde_json::Value> {
    let fit = fit_and_diagnose(model, data, n, &cfg.settings, None, &SeedPath::new(seed))?;
    let reports: Vec<serde_json::Value> = fit
        .reports
        .into_iter()
        .map(|(kind, r)| match r {
            Ok(report) => serde_json::to_value(report).unwrap_or_default(),
            Err(e) => serde_json::json!({ "kind": kind, "error": e.to_string() }),
        })
        .collect();
    Ok(serde_json::json!({
        "model": model.name(),
        "n": n,
        "parameters": model.parameter_names(),
        "theta_hat": fit.theta_hat,
        "adjustment_error": fit.adjustment_error,
        "reports": reports,
    }))
}

fn diagnose(a: DiagnoseArgs, argv: &[String]) -> Result<()> {
    let mut cfg = load_study(a.preset.as_deref(), a.config.as_deref(), Some(a.model))?;
    cfg.settings.diagnostics = parse_tests(&a.test)?;
    cfg.settings.validate()?;
    let (seed, generated) = resolve_seed(a.common.seed);
    let threads = a.common.threads;
    let go = || -> Result<serde_json::Value> {
        with_threads(threads, || match &cfg.model {
            StudyModel::Normal { prior, .. } => {
                let y = load_series(&a.data)?;
                diagnose_one(&StudyModel::normal_model(prior), &y, y.len(), &cfg, seed)
            }
            StudyModel::Gk { theta_x, theta_u, prior, .. } => {
                let d = load_pairs(&a.data)?;
                let n = d.x.len();
                diagnose_one(&StudyModel::gk_model(*theta_x, *theta_u, prior), &d, n, &cfg, seed)
            }
            StudyModel::Ricker { n1, prior, .. } => {
                let y = load_counts(&a.data)?;
                diagnose_one(&StudyModel::ricker_model(*n1, prior), &y, y.len(), &cfg, seed)
            }
            StudyModel::Returns { prior, .. } => {
                let y = load_series(&a.data)?;
                diagnose_one(&StudyModel::returns_model(prior), &y, y.len(), &cfg, seed)
            }
        })?
    };
    match &a.out {
        None => {
            let text = serde_json::to_string_pretty(&go()?)? + "\n";
            write_stdout(&text)
        }
        Some(dir) => {
            let mut manifest = RunManifest::new("diagnose", argv, a.config.clone(), serde_json::to_value(&cfg)?, seed);
            manifest.seed_generated = generated;
            manifest.threads = threads;
            with_manifest(dir, manifest, |outputs| {
                let path = dir.join("diagnose.json");
                fs::write(&path, serde_json::to_string_pretty(&go()?)? + "\n")?;
                outputs.push(path);
                Ok(())
            })
        }
    }
}

fn take(params: &mut BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.remove(key).unwrap_or(default)
}

/// Simulated dataset as CSV text, with parameters defaulting to the
/// built-in true process of each model.
pub fn simulate_csv(model: ModelName, params_json: &str, n: usize, seed: u64) -> Result<String> {
    let mut p: BTreeMap<String, f64> = serde_json::from_str(params_json)
        .map_err(|e| Error::InvalidConfig(format!("--params must be a JSON object of numbers: {e}")))?;
    let root = SeedPath::new(seed);
    let mut out = String::new();
    match model {
        ModelName::Normal => {
            let y = simulate_normal(take(&mut p, "theta", 0.0), take(&mut p, "sigma", 1.0), n, &root)?;
            out.push_str("y\n");
            y.iter().for_each(|v| out.push_str(&format!("{v}\n")));
        }
        ModelName::Gk => {
            let gk = GkParams::new(take(&mut p, "a", 0.0), take(&mut p, "b", 1.0), take(&mut p, "g", 2.0), take(&mut p, "k", 1.0));
            let truth = StudyModel::gk_truth(take(&mut p, "beta", 0.5), take(&mut p, "rho", 0.0), gk, gk);
            let d = simulate_gk_regression(&truth, n, &root)?;
            out.push_str("x,y\n");
            d.x.iter().zip(&d.y).for_each(|(x, y)| out.push_str(&format!("{x},{y}\n")));
        }
        ModelName::Ricker => {
            let sigma = p.remove("sigma");
            let params = RickerParams {
                r: take(&mut p, "r", 44.7),
                phi: take(&mut p, "phi", 10.0),
                sigma1: take(&mut p, "sigma1", sigma.unwrap_or(1.3)),
                sigma2: take(&mut p, "sigma2", sigma.unwrap_or(0.3)),
                k_break: take(&mut p, "k_break", 1.0),
                n1: take(&mut p, "N1", 1.0),
                t_len: n,
            };
            let y = simulate_ricker(&params, &root)?;
            out.push_str("count\n");
            y.iter().for_each(|v| out.push_str(&format!("{v}\n")));
        }
        ModelName::Returns => {
            let sm = StudyModel::Returns {
                a: take(&mut p, "a", 0.08),
                b: take(&mut p, "b", 0.08),
                g: take(&mut p, "g", -0.2),
                k: take(&mut p, "k", 0.02),
                prior: None,
            };
            let truth = sm.returns_truth(take(&mut p, "theta1", 0.2)).expect("returns variant");
            let y = simulate_ma1_gk(&truth, n, &root)?;
            out.push_str("return\n");
            y.iter().for_each(|v| out.push_str(&format!("{v}\n")));
        }
    }
    if let Some(k) = p.keys().next() {
        return Err(Error::InvalidConfig(format!("unknown parameter {k:?} for model {}", model.as_str())));
    }
    Ok(out)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let (seed, _) = resolve_seed(a.common.seed);
    let text = simulate_csv(a.model, &a.params, a.n, seed)?;
    match &a.out {
        Some(path) => fs::write(path, text)?,
        None => write_stdout(&text)?,
    }
    Ok(())
}

fn write_stdout(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}
