//! Diagnostics calibrated by resampling: simulated goodness of fit,
//! predictive p-value and the adjustment-discrepancy check.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{simulate_at, DiagnosticKind, DiagnosticReport};
use crate::abc::{abc_reject, regression_adjust, AcceptedSet, ReferenceTable};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::numerics::{quantile_sorted, sorted};
use crate::rng::SeedPath;

fn check_level(alpha_level: f64) -> Result<()> {
    if alpha_level > 0.0 && alpha_level < 1.0 {
        Ok(())
    } else {
        Err(Error::BadProbability(alpha_level))
    }
}

/// `r` distinct indices from `0..n` (partial Fisher–Yates).
fn sample_without_replacement(n: usize, r: usize, seed: &SeedPath) -> Vec<usize> {
    let mut s = seed.stream();
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..r {
        let j = i + s.index(n - i);
        pool.swap(i, j);
    }
    pool.truncate(r);
    pool
}

/// Which table distances the simulated goodness-of-fit statistic averages.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceAverage {
    /// The δ accepted (smallest) distances.
    #[default]
    Accepted,
    /// Every table row.
    AllRows,
}

/// Simulated goodness of fit: compares the mean distance of the table to the
/// observed summaries against the same quantity for R table rows treated as
/// pseudo-observed data, each with its own regression-adjusted ABC fit from
/// the same table.
pub fn simulated_gof(
    table: &ReferenceTable,
    r: usize,
    alpha_level: f64,
    average: DistanceAverage,
    seed: &SeedPath,
) -> Result<DiagnosticReport> {
    let start = Instant::now();
    check_level(alpha_level)?;
    let n_rows = table.n_rows();
    if r == 0 || r > n_rows {
        return Err(Error::TooManyResamples { requested: r, available: n_rows });
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let eps_obs = match average {
        DistanceAverage::Accepted => mean(&table.accept().distances),
        DistanceAverage::AllRows => mean(&table.distances),
    };
    let rows = sample_without_replacement(n_rows, r, seed);
    let eps_r: Vec<f64> = rows
        .par_iter()
        .map(|&j| {
            let target = table.sims.summary(j);
            let pseudo = table.accept_nearest(target);
            // the fitted posterior for the pseudo-data is not part of the decision
            let _ = regression_adjust(&pseudo, target);
            match average {
                DistanceAverage::Accepted => mean(&pseudo.distances),
                DistanceAverage::AllRows => table.mean_distance_to(target),
            }
        })
        .collect();
    let resampled = sorted(&eps_r);
    let q = quantile_sorted(&resampled, 1.0 - alpha_level)?;
    Ok(DiagnosticReport {
        kind: DiagnosticKind::SimulatedGof,
        statistic: eps_obs,
        dof: None,
        critical_value: None,
        p_value: None,
        quantiles: vec![q],
        reject: eps_obs > q,
        resampled,
        nominal_level: alpha_level,
        seconds: start.elapsed().as_secs_f64(),
        config: serde_json::json!({ "replications": r, "table_rows": n_rows, "average": average }),
    })
}

/// Posterior predictive check on one scalar summary: draws θ_r with
/// replacement from the accepted set, simulates size-n data, and rejects when
/// the observed scalar falls outside the central (1 − level) interval.
#[allow(clippy::too_many_arguments)]
pub fn predictive_pvalue<M: ModelSpec>(
    accepted: &AcceptedSet,
    model: &M,
    observed: f64,
    scalar_index: usize,
    r: usize,
    alpha_level: f64,
    n: usize,
    use_adjusted: bool,
    seed: &SeedPath,
) -> Result<DiagnosticReport> {
    let start = Instant::now();
    check_level(alpha_level)?;
    if scalar_index >= model.k_eta() {
        return Err(Error::InvalidParameter(format!("scalar index {scalar_index} out of range")));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("predictive p-value needs R >= 1".into()));
    }
    let draws = accepted.selected(use_adjusted)?;
    let delta = draws.nrows();
    if delta == 0 {
        return Err(Error::EmptySample);
    }
    let picks: Vec<usize> = {
        let mut s = seed.child(0).stream();
        (0..r).map(|_| s.index(delta)).collect()
    };
    let sims: Vec<f64> = picks
        .par_iter()
        .enumerate()
        .map(|(i, &row)| {
            let theta: Vec<f64> = draws.row(row).iter().copied().collect();
            simulate_at(model, &theta, n, &seed.descend(&[1, i as u64])).map(|eta| eta[scalar_index])
        })
        .collect::<Result<_>>()?;
    let resampled = sorted(&sims);
    let lo = quantile_sorted(&resampled, alpha_level / 2.0)?;
    let hi = quantile_sorted(&resampled, 1.0 - alpha_level / 2.0)?;
    let below = resampled.iter().filter(|v| **v <= observed).count() as f64 / r as f64;
    Ok(DiagnosticReport {
        kind: DiagnosticKind::PredictivePvalue,
        statistic: observed,
        dof: None,
        critical_value: None,
        p_value: Some(below),
        quantiles: vec![lo, hi],
        reject: observed < lo || observed > hi,
        resampled,
        nominal_level: alpha_level,
        seconds: start.elapsed().as_secs_f64(),
        config: serde_json::json!({
            "replications": r,
            "scalar_index": scalar_index,
            "adjusted_draws": use_adjusted,
        }),
    })
}

/// h(θ) = (θ₁², …, θ_k², θ₁³, …, θ_k³).
pub fn h_powers(theta: &[f64]) -> Vec<f64> {
    theta.iter().map(|t| t * t).chain(theta.iter().map(|t| t * t * t)).collect()
}

/// Inner ABC settings for the discrepancy check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyConfig {
    pub replications: usize,
    pub inner_n: usize,
    pub inner_alpha: f64,
    pub alpha_level: f64,
}

/// √n·‖mean h(raw) − mean h(adjusted)‖ for an adjusted accepted set.
fn adjustment_gap(adjusted: &AcceptedSet, h: &(dyn Fn(&[f64]) -> Vec<f64> + Sync), n: usize) -> Result<f64> {
    let adj = adjusted.adjusted.as_ref().ok_or(Error::NoAdjustment)?;
    let mean_h = |m: &nalgebra::DMatrix<f64>| -> Vec<f64> {
        let mut acc: Vec<f64> = Vec::new();
        for row in m.row_iter() {
            let theta: Vec<f64> = row.iter().copied().collect();
            let v = h(&theta);
            if acc.is_empty() {
                acc = vec![0.0; v.len()];
            }
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
        }
        acc.into_iter().map(|a| a / m.nrows() as f64).collect()
    };
    let raw = mean_h(&adjusted.draws);
    let cor = mean_h(adj);
    let ss: f64 = raw.iter().zip(&cor).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((n as f64).sqrt() * ss.sqrt())
}

/// Discrepancy between accept/reject and regression-adjusted posterior means
/// of h(θ), calibrated by rerunning ABC on R pseudo-datasets drawn at
/// `theta_hat`.
#[allow(clippy::too_many_arguments)]
pub fn discrepancy_diag<M: ModelSpec>(
    accepted: &AcceptedSet,
    eta_obs: &[f64],
    model: &M,
    h: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    theta_hat: &[f64],
    cfg: &DiscrepancyConfig,
    n: usize,
    seed: &SeedPath,
) -> Result<DiagnosticReport> {
    let start = Instant::now();
    check_level(cfg.alpha_level)?;
    if cfg.replications == 0 {
        return Err(Error::InvalidParameter("discrepancy check needs R >= 1".into()));
    }
    let observed = match &accepted.adjusted {
        Some(_) => adjustment_gap(accepted, h, n)?,
        None => adjustment_gap(&regression_adjust(accepted, eta_obs)?, h, n)?,
    };
    let d_r: Vec<f64> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| {
            let rep = seed.child(r as u64);
            let eta_r = simulate_at(model, theta_hat, n, &rep.child(0))?;
            let (_, acc) = abc_reject(model, &eta_r, cfg.inner_n, cfg.inner_alpha, n, &rep.child(1))?;
            adjustment_gap(&regression_adjust(&acc, &eta_r)?, h, n)
        })
        .collect::<Vec<Result<f64>>>()
        .into_iter()
        .enumerate()
        .map(|(r, res)| res.map_err(|e| Error::Replication { replication: r, source: Box::new(e) }))
        .collect::<Result<_>>()?;
    let resampled = sorted(&d_r);
    let q = quantile_sorted(&resampled, 1.0 - cfg.alpha_level)?;
    Ok(DiagnosticReport {
        kind: DiagnosticKind::Discrepancy,
        statistic: observed,
        dof: None,
        critical_value: None,
        p_value: None,
        quantiles: vec![q],
        reject: observed > q,
        resampled,
        nominal_level: cfg.alpha_level,
        seconds: start.elapsed().as_secs_f64(),
        config: serde_json::to_value(cfg)?,
    })
}
