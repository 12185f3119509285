use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticKind, DistanceAverage, GofConfig, VarianceSource};
use crate::error::{Error, Result};
use crate::models::{EndogGkParams, GkParams, GkRegressionModel, Ma1GkModel, Ma1GkParams, NormalModel, RickerModel, RickerParams, UniformPrior};

/// How the reference table is produced for each replication.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableMode {
    /// A fresh table for every observed dataset.
    #[default]
    PerReplication,
    /// One table per sample size, reused by every replication; valid because
    /// the table depends only on the prior and the simulator.
    Shared,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbcSettings {
    pub n_draws: usize,
    pub alpha: f64,
    #[serde(default)]
    pub table: TableMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerAbc {
    pub n_draws: usize,
    pub alpha: f64,
}

/// Everything needed to fit one dataset and run the diagnostics on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseSettings {
    pub abc: AbcSettings,
    pub gof: GofConfig,
    #[serde(default = "all_diagnostics")]
    pub diagnostics: Vec<DiagnosticKind>,
    /// R, shared by the three resampling diagnostics.
    #[serde(default = "default_resamples")]
    pub resamples: usize,
    pub inner_abc: InnerAbc,
    /// Feed the regression-adjusted posterior mean to the asymptotic test.
    #[serde(default)]
    pub theta_hat_adjusted: bool,
    /// Resample adjusted draws in the predictive check.
    #[serde(default)]
    pub predictive_adjusted: bool,
    #[serde(default = "default_level")]
    pub nominal_level: f64,
    /// Distances averaged by the simulated goodness-of-fit test.
    #[serde(default)]
    pub simulated_gof_average: DistanceAverage,
}

fn all_diagnostics() -> Vec<DiagnosticKind> {
    DiagnosticKind::ALL.to_vec()
}

fn default_resamples() -> usize {
    100
}

fn default_level() -> f64 {
    0.05
}

impl DiagnoseSettings {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.abc.n_draws == 0 || !(self.abc.alpha > 0.0 && self.abc.alpha <= 1.0) {
            return bad("abc needs n_draws >= 1 and alpha in (0, 1]");
        }
        if self.inner_abc.n_draws == 0 || !(self.inner_abc.alpha > 0.0 && self.inner_abc.alpha <= 1.0) {
            return bad("inner_abc needs n_draws >= 1 and alpha in (0, 1]");
        }
        if !(self.nominal_level > 0.0 && self.nominal_level < 1.0) {
            return bad("nominal_level must lie in (0, 1)");
        }
        if self.resamples == 0 {
            return bad("resamples must be >= 1");
        }
        if self.resamples > self.abc.n_draws && self.diagnostics.contains(&DiagnosticKind::SimulatedGof) {
            return bad("resamples cannot exceed abc.n_draws for the simulated goodness-of-fit test");
        }
        if self.diagnostics.is_empty() {
            return bad("at least one diagnostic is required");
        }
        Ok(())
    }

    /// The goodness-of-fit settings at the nominal level.
    pub fn gof_at_level(&self) -> GofConfig {
        GofConfig { alpha_level: self.nominal_level, ..self.gof.clone() }
    }
}

/// Assumed model together with the data-generating process of a study.
/// The grid value of the study fills the one field left out here: σ for
/// normal, ρ for g-and-k, the regime fraction for Ricker and θ₁ for returns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StudyModel {
    Normal {
        #[serde(default)]
        theta: f64,
        #[serde(default)]
        prior: Option<UniformPrior>,
    },
    Gk {
        beta: f64,
        theta_x: GkParams,
        theta_u: GkParams,
        #[serde(default)]
        prior: Option<UniformPrior>,
    },
    Ricker {
        r: f64,
        phi: f64,
        sigma1: f64,
        sigma2: f64,
        #[serde(default = "one")]
        n1: f64,
        #[serde(default)]
        prior: Option<UniformPrior>,
    },
    Returns {
        a: f64,
        b: f64,
        g: f64,
        k: f64,
        #[serde(default)]
        prior: Option<UniformPrior>,
    },
}

fn one() -> f64 {
    1.0
}

impl StudyModel {
    pub fn name(&self) -> &'static str {
        match self {
            StudyModel::Normal { .. } => "normal",
            StudyModel::Gk { .. } => "gk",
            StudyModel::Ricker { .. } => "ricker",
            StudyModel::Returns { .. } => "returns",
        }
    }

    pub fn default_for(name: &str) -> Result<Self> {
        let gk = GkParams::new(0.0, 1.0, 2.0, 1.0);
        Ok(match name {
            "normal" => StudyModel::Normal { theta: 0.0, prior: None },
            "gk" => StudyModel::Gk { beta: 0.5, theta_x: gk, theta_u: gk, prior: None },
            "ricker" => StudyModel::Ricker { r: 44.7, phi: 10.0, sigma1: 1.3, sigma2: 0.3, n1: 1.0, prior: None },
            "returns" => StudyModel::Returns { a: 0.08, b: 0.08, g: -0.2, k: 0.02, prior: None },
            other => return Err(Error::InvalidConfig(format!("unknown model {other:?}"))),
        })
    }

    pub fn normal_model(prior: &Option<UniformPrior>) -> NormalModel {
        prior.clone().map_or_else(NormalModel::default, |prior| NormalModel { prior })
    }

    pub fn gk_model(theta_x: GkParams, theta_u: GkParams, prior: &Option<UniformPrior>) -> GkRegressionModel {
        let d = GkRegressionModel::default();
        GkRegressionModel { prior: prior.clone().unwrap_or(d.prior), theta_x, theta_u }
    }

    pub fn ricker_model(n1: f64, prior: &Option<UniformPrior>) -> RickerModel {
        RickerModel { prior: prior.clone().unwrap_or(RickerModel::default().prior), n1 }
    }

    pub fn returns_model(prior: &Option<UniformPrior>) -> Ma1GkModel {
        let d = Ma1GkModel::default();
        Ma1GkModel { prior: prior.clone().unwrap_or(d.prior), c: d.c }
    }

    pub fn gk_truth(beta: f64, rho: f64, theta_x: GkParams, theta_u: GkParams) -> EndogGkParams {
        EndogGkParams { beta, rho, theta_x, theta_u }
    }

    pub fn ricker_truth(&self, k_break: f64, t_len: usize) -> Option<RickerParams> {
        match *self {
            StudyModel::Ricker { r, phi, sigma1, sigma2, n1, .. } => {
                Some(RickerParams { r, phi, sigma1, sigma2, k_break, n1, t_len })
            }
            _ => None,
        }
    }

    pub fn returns_truth(&self, theta1: f64) -> Option<Ma1GkParams> {
        match *self {
            StudyModel::Returns { a, b, g, k, .. } => Some(Ma1GkParams { theta1, gk: GkParams::new(a, b, g, k) }),
            _ => None,
        }
    }
}

/// A Monte Carlo study over sample sizes × grid values × replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub name: String,
    pub model: StudyModel,
    pub grid: Vec<f64>,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(flatten)]
    pub settings: DiagnoseSettings,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.sample_sizes.is_empty() {
            return Err(Error::InvalidConfig("grid and sample_sizes must be non-empty".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 8) {
            return Err(Error::InvalidConfig(format!("sample size {n} is below the minimum of 8")));
        }
        self.settings.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Pretty JSON; loading it back yields an equal config.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn settings(
    n_draws: usize,
    alpha: f64,
    table: TableMode,
    variance_source: VarianceSource,
    inner: (usize, f64),
) -> DiagnoseSettings {
    DiagnoseSettings {
        abc: AbcSettings { n_draws, alpha, table },
        gof: GofConfig::new(variance_source),
        diagnostics: all_diagnostics(),
        resamples: 100,
        inner_abc: InnerAbc { n_draws: inner.0, alpha: inner.1 },
        theta_hat_adjusted: false,
        predictive_adjusted: false,
        nominal_level: 0.05,
        simulated_gof_average: DistanceAverage::Accepted,
    }
}

const BOOTSTRAP_200: VarianceSource = VarianceSource::Bootstrap { replicates: 200, scheme: None };

/// Built-in study designs. `normal`, `gk`, `ricker` and `returns` follow the
/// full published designs; the `-smoke` variants shrink every count so a
/// run finishes in seconds.
pub fn preset(name: &str) -> Result<StudyConfig> {
    let (base, smoke) = match name.strip_suffix("-smoke") {
        Some(b) => (b, true),
        None => (name, false),
    };
    let model = StudyModel::default_for(base)?;
    let mut cfg = match base {
        "normal" => StudyConfig {
            name: name.into(),
            model,
            grid: vec![0.8, 0.9, 1.0, 1.1, 1.2, 1.3],
            sample_sizes: vec![100, 500, 1000],
            replications: 100,
            master_seed: 1,
            settings: settings(50_000, 0.01, TableMode::PerReplication, VarianceSource::Analytic, (50_000, 0.01)),
        },
        "gk" => StudyConfig {
            name: name.into(),
            model,
            grid: vec![0.0, 0.4, 0.8],
            sample_sizes: vec![500, 1000],
            replications: 50,
            master_seed: 2,
            settings: settings(100_000, 0.001, TableMode::PerReplication, BOOTSTRAP_200, (10_000, 0.01)),
        },
        "ricker" => StudyConfig {
            name: name.into(),
            model,
            grid: vec![0.6, 0.7, 0.8, 0.9, 1.0],
            sample_sizes: vec![250, 500, 1000],
            replications: 50,
            master_seed: 3,
            settings: settings(500_000, 0.00025, TableMode::PerReplication, BOOTSTRAP_200, (10_000, 0.01)),
        },
        "returns" => StudyConfig {
            name: name.into(),
            model,
            grid: vec![0.2],
            sample_sizes: vec![524],
            replications: 20,
            master_seed: 4,
            settings: settings(1_000_000, 0.0001, TableMode::Shared, BOOTSTRAP_200, (10_000, 0.01)),
        },
        _ => unreachable!("default_for rejects unknown names"),
    };
    if smoke {
        cfg.grid.truncate(2);
        cfg.sample_sizes = vec![cfg.sample_sizes[0].min(200)];
        cfg.replications = 4;
        let s = &mut cfg.settings;
        s.abc = AbcSettings { n_draws: 2_000, alpha: 0.02, table: TableMode::Shared };
        s.gof.n_n = Some(2_000);
        if let VarianceSource::Bootstrap { replicates, .. } = &mut s.gof.variance_source {
            *replicates = 50;
        }
        s.resamples = 20;
        s.inner_abc = InnerAbc { n_draws: 1_000, alpha: 0.05 };
    }
    Ok(cfg)
}

pub const PRESETS: [&str; 8] =
    ["normal", "gk", "ricker", "returns", "normal-smoke", "gk-smoke", "ricker-smoke", "returns-smoke"];
