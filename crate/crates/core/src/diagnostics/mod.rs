//! Misspecification diagnostics: the asymptotic goodness-of-fit statistic J
//! and three resampling-based checks.

mod resampling;

use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abc::MAX_RETRIES;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::numerics::{
    bootstrap_variance, ceil_tolerant, chi2_quantile, chi2_sf, plugin_variance, BootstrapScheme, VarianceEstimate,
};
use crate::rng::SeedPath;
use crate::summaries::SummaryVector;

pub use resampling::{
    discrepancy_diag, h_powers, predictive_pvalue, simulated_gof, DiscrepancyConfig, DistanceAverage,
};

/// Smallest N_n ever used, whatever the bound gives.
pub const MIN_NN: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    AsymptoticGof,
    SimulatedGof,
    PredictivePvalue,
    Discrepancy,
}

impl DiagnosticKind {
    pub const ALL: [DiagnosticKind; 4] = [
        DiagnosticKind::AsymptoticGof,
        DiagnosticKind::SimulatedGof,
        DiagnosticKind::PredictivePvalue,
        DiagnosticKind::Discrepancy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::AsymptoticGof => "asymptotic-gof",
            DiagnosticKind::SimulatedGof => "simulated-gof",
            DiagnosticKind::PredictivePvalue => "predictive-pvalue",
            DiagnosticKind::Discrepancy => "discrepancy",
        }
    }
}

impl std::fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DiagnosticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown diagnostic {s:?}")))
    }
}

/// Outcome of one diagnostic.
///
/// Asymptotic reports fill `dof` and `critical_value`; resampling reports
/// fill `resampled` (sorted) and `quantiles` (the rejection thresholds).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub kind: DiagnosticKind,
    pub statistic: f64,
    pub dof: Option<u32>,
    pub critical_value: Option<f64>,
    /// Upper-tail χ² probability of the statistic, asymptotic test only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub quantiles: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resampled: Vec<f64>,
    pub nominal_level: f64,
    pub reject: bool,
    pub seconds: f64,
    #[serde(default)]
    pub config: serde_json::Value,
}

/// Source of the V̂₀ estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VarianceSource {
    PlugIn,
    Bootstrap {
        replicates: usize,
        /// Model default (i.i.d. or moving-block) when absent.
        #[serde(default)]
        scheme: Option<BootstrapScheme>,
    },
    Analytic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GofConfig {
    /// Explicit N_n; chosen by [`choose_nn`] when absent.
    #[serde(default)]
    pub n_n: Option<usize>,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_level")]
    pub alpha_level: f64,
    pub variance_source: VarianceSource,
}

fn default_c() -> f64 {
    1.0
}

fn default_level() -> f64 {
    0.05
}

impl GofConfig {
    pub fn new(variance_source: VarianceSource) -> Self {
        Self { n_n: None, c: 1.0, alpha_level: 0.05, variance_source }
    }

    pub fn resolved_nn(&self, n: usize, k_theta: usize) -> usize {
        self.n_n.unwrap_or_else(|| choose_nn(n, k_theta, self.c))
    }
}

/// N_n = ⌈max(C·ln(n)·n^{q/2}, 10 000)⌉ with q = max(k_θ, 2).
pub fn choose_nn(n: usize, k_theta: usize, c: f64) -> usize {
    let q = k_theta.max(2) as f64;
    let nf = n.max(2) as f64;
    let bound = c * nf.ln() * nf.powf(q / 2.0);
    ceil_tolerant(bound.max(MIN_NN as f64)) as usize
}

/// J = n·(η̂(z) − η(y))ᵀ V̂₀⁻¹ (η̂(z) − η(y)). Records any ridge on `v0`.
pub fn j_statistic(eta_hat_z: &[f64], eta_obs: &[f64], v0: &mut VarianceEstimate, n: usize) -> Result<f64> {
    if eta_hat_z.len() != eta_obs.len() {
        return Err(Error::LengthMismatch { expected: eta_obs.len(), got: eta_hat_z.len() });
    }
    if v0.dim() != eta_obs.len() {
        return Err(Error::LengthMismatch { expected: eta_obs.len(), got: v0.dim() });
    }
    let delta = DVector::from_iterator(eta_obs.len(), eta_hat_z.iter().zip(eta_obs).map(|(a, b)| a - b));
    if delta.iter().all(|d| *d == 0.0) {
        return Ok(0.0);
    }
    let f = v0.factor()?;
    let j = n as f64 * delta.dot(&f.solve(&delta));
    Ok(j.max(0.0))
}

/// V̂₀ from the observed data under the configured source.
pub fn estimate_variance<M: ModelSpec>(
    model: &M,
    data: &M::Data,
    source: &VarianceSource,
    seed: &SeedPath,
) -> Result<VarianceEstimate> {
    match source {
        VarianceSource::PlugIn => {
            let per = model.per_observation_summaries(data).ok_or_else(|| {
                Error::InvalidConfig(format!("model {} has no per-observation summaries", model.name()))
            })??;
            plugin_variance(&per)
        }
        VarianceSource::Analytic => model
            .analytic_variance(data)
            .ok_or_else(|| Error::InvalidConfig(format!("model {} has no analytic variance", model.name())))?,
        VarianceSource::Bootstrap { replicates, scheme } => bootstrap_variance(
            data,
            |d: &M::Data| model.summarize(d).map(|s| s.values),
            *replicates,
            scheme.unwrap_or_else(|| model.bootstrap_scheme()),
            seed,
        ),
    }
}

/// Summaries of one size-`n` pseudo-data set at `theta`, resimulating from
/// sub-seeds on failure.
pub(crate) fn simulate_at<M: ModelSpec>(model: &M, theta: &[f64], n: usize, seed: &SeedPath) -> Result<SummaryVector> {
    let mut last = String::new();
    for attempt in 0..=MAX_RETRIES {
        let path = if attempt == 0 { seed.clone() } else { seed.child(attempt as u64) };
        match model.simulate_summaries(theta, n, &mut path.stream()) {
            Ok(eta) if eta.is_finite() => return Ok(eta),
            Ok(_) => last = "non-finite summaries".into(),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::SimulationFailed { slot: 0, retries: MAX_RETRIES, reason: last })
}

/// η̂(z): the average summary vector over ⌈N_n/n⌉ independent size-n
/// pseudo-data sets simulated at `theta`.
pub fn simulated_mean_summaries<M: ModelSpec>(
    model: &M,
    theta: &[f64],
    n_n: usize,
    n: usize,
    seed: &SeedPath,
) -> Result<Vec<f64>> {
    let reps = n_n.div_ceil(n.max(1)).max(1);
    let k = model.k_eta();
    let etas: Vec<SummaryVector> = (0..reps)
        .into_par_iter()
        .map(|r| simulate_at(model, theta, n, &seed.child(r as u64)))
        .collect::<Result<_>>()?;
    let mut mean = vec![0.0; k];
    for e in &etas {
        for (m, v) in mean.iter_mut().zip(e.iter()) {
            *m += v;
        }
    }
    Ok(mean.into_iter().map(|m| m / reps as f64).collect())
}

/// Asymptotic goodness-of-fit test: reject when J exceeds the (1 − level)
/// quantile of χ²_{k_η − k_θ}.
pub fn asymptotic_gof<M: ModelSpec>(
    model: &M,
    theta_hat: &[f64],
    data: &M::Data,
    eta_obs: &[f64],
    cfg: &GofConfig,
    n: usize,
    seed: &SeedPath,
) -> Result<DiagnosticReport> {
    let start = Instant::now();
    let (k_eta, k_theta) = (model.k_eta(), model.k_theta());
    if k_eta <= k_theta {
        return Err(Error::NonpositiveDof { k_eta, k_theta });
    }
    let dof = (k_eta - k_theta) as u32;
    let n_n = cfg.resolved_nn(n, k_theta);
    let eta_hat = simulated_mean_summaries(model, theta_hat, n_n, n, &seed.child(0))?;
    let mut v0 = estimate_variance(model, data, &cfg.variance_source, &seed.child(1))?;
    let j = j_statistic(&eta_hat, eta_obs, &mut v0, n)?;
    let crit = chi2_quantile(dof, 1.0 - cfg.alpha_level)?;
    Ok(DiagnosticReport {
        kind: DiagnosticKind::AsymptoticGof,
        statistic: j,
        dof: Some(dof),
        critical_value: Some(crit),
        p_value: Some(chi2_sf(dof as f64, j)),
        quantiles: vec![crit],
        resampled: Vec::new(),
        nominal_level: cfg.alpha_level,
        reject: j > crit,
        seconds: start.elapsed().as_secs_f64(),
        config: serde_json::json!({
            "n_n": n_n,
            "c": cfg.c,
            "variance_source": cfg.variance_source,
            "variance_provenance": v0.provenance,
            "ridge_applied": v0.ridge_applied,
            "theta_hat": theta_hat,
            "eta_hat_z": eta_hat,
        }),
    })
}

/// Kolmogorov–Smirnov statistic D and its asymptotic p-value (with the
/// Stephens small-sample correction) for `sample` against `cdf`.
pub fn ks_test(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut s = sample.to_vec();
    s.sort_unstable_by(f64::total_cmp);
    let m = s.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in s.iter().enumerate() {
        let f = cdf(*x);
        d = d.max(f - i as f64 / m).max((i + 1) as f64 / m - f);
    }
    let sq = m.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    Ok((d, kolmogorov_sf(lambda)))
}

/// P(K > λ) for the Kolmogorov distribution.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
