//! Size/power and timing studies over sample sizes × grid values.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{StudyConfig, StudyModel, TableMode};
use super::pipeline::fit_and_diagnose;
use crate::abc::{simulate_table, SimulationTable};
use crate::diagnostics::DiagnosticKind;
use crate::error::{Error, Result};
use crate::models::{simulate_gk_regression, simulate_ma1_gk, simulate_normal, simulate_ricker, ModelSpec};
use crate::rng::SeedPath;

/// One diagnostic outcome for one replication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub n: usize,
    pub grid_value: f64,
    pub replication: usize,
    pub diagnostic: DiagnosticKind,
    pub statistic: Option<f64>,
    pub reject: Option<bool>,
    /// Seconds spent in the diagnostic (excluded from CSV output).
    pub seconds: f64,
    /// Seconds spent building the table and accepting (0 with shared tables).
    pub abc_seconds: f64,
    pub error: Option<String>,
    pub seed: String,
}

/// Rejection frequency of one diagnostic in one (n, grid value) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub model: String,
    pub n: usize,
    pub grid_value: f64,
    pub diagnostic: DiagnosticKind,
    pub replications: usize,
    /// Replications that produced a decision.
    pub completed: usize,
    pub rejections: usize,
    pub frequency: f64,
    /// √(p̂(1 − p̂)/completed)
    pub se: f64,
    pub mean_seconds: f64,
    pub n_draws: usize,
    pub alpha: f64,
    pub resamples: usize,
    pub nominal_level: f64,
    pub master_seed: u64,
    /// Set when any replication in the cell failed.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerStudy {
    pub config: StudyConfig,
    pub rows: Vec<PowerRow>,
    pub records: Vec<ReplicationRecord>,
}

impl PowerStudy {
    pub fn row(&self, n: usize, grid_value: f64, diagnostic: DiagnosticKind) -> Option<&PowerRow> {
        self.rows.iter().find(|r| r.n == n && r.grid_value == grid_value && r.diagnostic == diagnostic)
    }

    /// Statistics of one cell in replication order (failed replications skipped).
    pub fn statistics(&self, n: usize, grid_value: f64, diagnostic: DiagnosticKind) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.n == n && r.grid_value == grid_value && r.diagnostic == diagnostic)
            .filter_map(|r| r.statistic)
            .collect()
    }

    /// Per-cell power table; timing columns are left out so the file is
    /// byte-identical across runs and thread counts.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "model", "n", "grid_value", "diagnostic", "replications", "completed", "rejections", "frequency", "se",
            "n_draws", "alpha", "resamples", "nominal_level", "master_seed", "flagged",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.model.clone(),
                r.n.to_string(),
                r.grid_value.to_string(),
                r.diagnostic.to_string(),
                r.replications.to_string(),
                r.completed.to_string(),
                r.rejections.to_string(),
                r.frequency.to_string(),
                r.se.to_string(),
                r.n_draws.to_string(),
                r.alpha.to_string(),
                r.resamples.to_string(),
                r.nominal_level.to_string(),
                r.master_seed.to_string(),
                r.flagged.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// One line per replication and diagnostic, without timings.
    pub fn write_records_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["n", "grid_value", "replication", "diagnostic", "statistic", "reject", "error", "seed"])?;
        for r in &self.records {
            w.write_record([
                r.n.to_string(),
                r.grid_value.to_string(),
                r.replication.to_string(),
                r.diagnostic.to_string(),
                r.statistic.map(|v| v.to_string()).unwrap_or_default(),
                r.reject.map(|v| v.to_string()).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
                r.seed.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mean wall-clock seconds per diagnostic and sample size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub model: String,
    pub n: usize,
    pub diagnostic: DiagnosticKind,
    pub replications: usize,
    pub mean_seconds: f64,
    pub mean_abc_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingTable {
    pub config: StudyConfig,
    pub rows: Vec<TimingRow>,
}

impl TimingTable {
    pub fn mean_seconds(&self, n: usize, diagnostic: DiagnosticKind) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n && r.diagnostic == diagnostic).map(|r| r.mean_seconds)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["model", "n", "diagnostic", "replications", "mean_seconds", "mean_abc_seconds"])?;
        for r in &self.rows {
            w.write_record([
                r.model.clone(),
                r.n.to_string(),
                r.diagnostic.to_string(),
                r.replications.to_string(),
                r.mean_seconds.to_string(),
                r.mean_abc_seconds.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Seed of the table shared by every replication at sample-size index `i`.
pub fn shared_table_seed(master: u64, i: usize) -> SeedPath {
    SeedPath::from_parts(master, &[0, i as u64])
}

/// Seed of replication `rep` in cell (sample-size index `i`, grid index `g`).
pub fn replication_seed(master: u64, i: usize, g: usize, rep: usize) -> SeedPath {
    SeedPath::from_parts(master, &[1, i as u64, g as u64, rep as u64])
}

fn run_cells<M, F>(model: &M, truth: F, cfg: &StudyConfig, parallel: bool) -> Result<Vec<ReplicationRecord>>
where
    M: ModelSpec,
    F: Fn(f64, usize, &SeedPath) -> Result<M::Data> + Sync,
{
    let s = &cfg.settings;
    let shared: Vec<Option<Arc<SimulationTable>>> = cfg
        .sample_sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| match s.abc.table {
            TableMode::Shared => {
                simulate_table(model, s.abc.n_draws, n, &shared_table_seed(cfg.master_seed, i)).map(|t| Some(Arc::new(t)))
            }
            TableMode::PerReplication => Ok(None),
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (i, &n) in cfg.sample_sizes.iter().enumerate() {
        for (g, &value) in cfg.grid.iter().enumerate() {
            for rep in 0..cfg.replications {
                cells.push((i, n, g, value, rep));
            }
        }
    }
    let one = |&(i, n, g, value, rep): &(usize, usize, usize, f64, usize)| -> Vec<ReplicationRecord> {
        let seed = replication_seed(cfg.master_seed, i, g, rep);
        let record = |diagnostic, statistic, reject, seconds, abc_seconds, error| ReplicationRecord {
            n,
            grid_value: value,
            replication: rep,
            diagnostic,
            statistic,
            reject,
            seconds,
            abc_seconds,
            error,
            seed: seed.to_string(),
        };
        let fit = truth(value, n, &seed.child(0))
            .and_then(|data| fit_and_diagnose(model, &data, n, s, shared[i].clone(), &seed));
        match fit {
            Ok(fit) => fit
                .reports
                .into_iter()
                .map(|(kind, rep)| match rep {
                    Ok(r) => record(kind, Some(r.statistic), Some(r.reject), r.seconds, fit.abc_seconds, None),
                    Err(e) => record(kind, None, None, 0.0, fit.abc_seconds, Some(e.to_string())),
                })
                .collect(),
            Err(e) => s.diagnostics.iter().map(|&k| record(k, None, None, 0.0, 0.0, Some(e.to_string()))).collect(),
        }
    };
    let nested: Vec<Vec<ReplicationRecord>> =
        if parallel { cells.par_iter().map(one).collect() } else { cells.iter().map(one).collect() };
    Ok(nested.into_iter().flatten().collect())
}

fn run_records(cfg: &StudyConfig, parallel: bool) -> Result<Vec<ReplicationRecord>> {
    cfg.validate()?;
    match &cfg.model {
        StudyModel::Normal { theta, prior } => {
            let model = StudyModel::normal_model(prior);
            run_cells(&model, |sigma, n, seed| simulate_normal(*theta, sigma, n, seed), cfg, parallel)
        }
        StudyModel::Gk { beta, theta_x, theta_u, prior } => {
            let model = StudyModel::gk_model(*theta_x, *theta_u, prior);
            let truth = |rho, n, seed: &SeedPath| {
                simulate_gk_regression(&StudyModel::gk_truth(*beta, rho, *theta_x, *theta_u), n, seed)
            };
            run_cells(&model, truth, cfg, parallel)
        }
        StudyModel::Ricker { n1, prior, .. } => {
            let model = StudyModel::ricker_model(*n1, prior);
            let truth = |k_break, n, seed: &SeedPath| {
                let p = cfg.model.ricker_truth(k_break, n).expect("ricker variant");
                simulate_ricker(&p, seed)
            };
            run_cells(&model, truth, cfg, parallel)
        }
        StudyModel::Returns { prior, .. } => {
            let model = StudyModel::returns_model(prior);
            let truth = |theta1, n, seed: &SeedPath| {
                simulate_ma1_gk(&cfg.model.returns_truth(theta1).expect("returns variant"), n, seed)
            };
            run_cells(&model, truth, cfg, parallel)
        }
    }
}

fn aggregate(cfg: &StudyConfig, records: &[ReplicationRecord]) -> Vec<PowerRow> {
    let s = &cfg.settings;
    let mut rows = Vec::new();
    for &n in &cfg.sample_sizes {
        for &value in &cfg.grid {
            for &diagnostic in &s.diagnostics {
                let cell: Vec<&ReplicationRecord> = records
                    .iter()
                    .filter(|r| r.n == n && r.grid_value == value && r.diagnostic == diagnostic)
                    .collect();
                let decided: Vec<bool> = cell.iter().filter_map(|r| r.reject).collect();
                let completed = decided.len();
                let rejections = decided.iter().filter(|d| **d).count();
                let frequency = if completed > 0 { rejections as f64 / completed as f64 } else { f64::NAN };
                let se = if completed > 0 { (frequency * (1.0 - frequency) / completed as f64).sqrt() } else { f64::NAN };
                let mean_seconds = cell.iter().map(|r| r.seconds).sum::<f64>() / cell.len().max(1) as f64;
                rows.push(PowerRow {
                    model: cfg.model.name().into(),
                    n,
                    grid_value: value,
                    diagnostic,
                    replications: cell.len(),
                    completed,
                    rejections,
                    frequency,
                    se,
                    mean_seconds,
                    n_draws: s.abc.n_draws,
                    alpha: s.abc.alpha,
                    resamples: s.resamples,
                    nominal_level: s.nominal_level,
                    master_seed: cfg.master_seed,
                    flagged: completed < cell.len(),
                });
            }
        }
    }
    rows
}

/// Simulates each replication's observed data from the true process, fits
/// the assumed model and records every diagnostic's decision. Replications
/// run in parallel; the output does not depend on the thread count.
pub fn run_power_study(cfg: &StudyConfig) -> Result<PowerStudy> {
    let records = run_records(cfg, true)?;
    Ok(PowerStudy { config: cfg.clone(), rows: aggregate(cfg, &records), records })
}

/// Mean per-diagnostic wall-clock time, measured after the ABC fit.
/// Replications run one after another so that timings are not inflated by
/// competing replications.
pub fn run_timing_study(cfg: &StudyConfig) -> Result<TimingTable> {
    let records = run_records(cfg, false)?;
    let mut acc: BTreeMap<(usize, DiagnosticKind), (usize, f64, f64)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.error.is_none()) {
        let e = acc.entry((r.n, r.diagnostic)).or_default();
        e.0 += 1;
        e.1 += r.seconds;
        e.2 += r.abc_seconds;
    }
    let rows = cfg
        .sample_sizes
        .iter()
        .flat_map(|&n| cfg.settings.diagnostics.iter().map(move |&d| (n, d)))
        .map(|(n, d)| {
            let (count, secs, abc) = acc.get(&(n, d)).copied().unwrap_or_default();
            let c = count.max(1) as f64;
            TimingRow {
                model: cfg.model.name().into(),
                n,
                diagnostic: d,
                replications: count,
                mean_seconds: secs / c,
                mean_abc_seconds: abc / c,
            }
        })
        .collect();
    Ok(TimingTable { config: cfg.clone(), rows })
}

/// Runs `f` on a dedicated pool of `threads` workers (the global pool when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidConfig("thread count must be >= 1".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
