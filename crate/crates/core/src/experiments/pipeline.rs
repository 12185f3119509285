//! Fit one observed dataset by ABC and run the selected diagnostics on it.

use std::sync::Arc;
use std::time::Instant;

use super::config::DiagnoseSettings;
use crate::abc::{posterior_mean, regression_adjust, simulate_table, AcceptedSet, ReferenceTable, SimulationTable};
use crate::diagnostics::{
    asymptotic_gof, discrepancy_diag, h_powers, predictive_pvalue, simulated_gof, DiagnosticKind, DiagnosticReport,
    DiscrepancyConfig,
};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::rng::SeedPath;
use crate::summaries::SummaryVector;

/// Seed-path children used by [`fit_and_diagnose`].
pub mod stage {
    pub const TABLE: u64 = 1;
    pub const ASYMPTOTIC: u64 = 2;
    pub const SIMULATED: u64 = 3;
    pub const PREDICTIVE: u64 = 4;
    pub const DISCREPANCY: u64 = 5;
}

pub struct Fit {
    pub eta_obs: SummaryVector,
    pub table: ReferenceTable,
    /// Accepted draws, carrying the adjusted draws when adjustment succeeded.
    pub accepted: AcceptedSet,
    pub adjustment_error: Option<String>,
    pub theta_hat: Vec<f64>,
    pub abc_seconds: f64,
    /// One entry per requested diagnostic, in request order.
    pub reports: Vec<(DiagnosticKind, Result<DiagnosticReport>)>,
}

/// Fits `data` with accept/reject ABC (on `shared` when given, else on a
/// fresh table under `seed`) and runs the configured diagnostics.
pub fn fit_and_diagnose<M: ModelSpec>(
    model: &M,
    data: &M::Data,
    n: usize,
    settings: &DiagnoseSettings,
    shared: Option<Arc<SimulationTable>>,
    seed: &SeedPath,
) -> Result<Fit> {
    let start = Instant::now();
    let eta_obs = model.summarize(data)?;
    let sims = match shared {
        Some(t) => {
            if t.n != n || t.k_eta != eta_obs.len() {
                return Err(Error::InvalidConfig(format!(
                    "shared table was simulated at n = {} with {} summaries; data has n = {n} and {}",
                    t.n,
                    t.k_eta,
                    eta_obs.len()
                )));
            }
            t
        }
        None => Arc::new(simulate_table(model, settings.abc.n_draws, n, &seed.child(stage::TABLE))?),
    };
    let table = ReferenceTable::new(sims, eta_obs.clone(), settings.abc.alpha, None)?;
    let raw = table.accept();
    let (accepted, adjustment_error) = match regression_adjust(&raw, &eta_obs) {
        Ok(a) => (a, None),
        Err(e) => (raw, Some(e.to_string())),
    };
    let theta_hat = posterior_mean(&accepted, settings.theta_hat_adjusted)?;
    let abc_seconds = start.elapsed().as_secs_f64();

    let level = settings.nominal_level;
    let spec = model.summary_spec();
    let reports = settings
        .diagnostics
        .iter()
        .map(|&kind| {
            let report = match kind {
                DiagnosticKind::AsymptoticGof => asymptotic_gof(
                    model,
                    &theta_hat,
                    data,
                    &eta_obs,
                    &settings.gof_at_level(),
                    n,
                    &seed.child(stage::ASYMPTOTIC),
                ),
                DiagnosticKind::SimulatedGof => {
                    simulated_gof(
                    &table,
                    settings.resamples,
                    level,
                    settings.simulated_gof_average,
                    &seed.child(stage::SIMULATED),
                )
                }
                DiagnosticKind::PredictivePvalue => predictive_pvalue(
                    &accepted,
                    model,
                    eta_obs[spec.scalar_pp_index],
                    spec.scalar_pp_index,
                    settings.resamples,
                    level,
                    n,
                    settings.predictive_adjusted,
                    &seed.child(stage::PREDICTIVE),
                ),
                DiagnosticKind::Discrepancy => {
                    let cfg = DiscrepancyConfig {
                        replications: settings.resamples,
                        inner_n: settings.inner_abc.n_draws,
                        inner_alpha: settings.inner_abc.alpha,
                        alpha_level: level,
                    };
                    match &adjustment_error {
                        Some(e) => Err(Error::InvalidParameter(format!("regression adjustment failed: {e}"))),
                        None => discrepancy_diag(
                            &accepted,
                            &eta_obs,
                            model,
                            &h_powers,
                            &theta_hat,
                            &cfg,
                            n,
                            &seed.child(stage::DISCREPANCY),
                        ),
                    }
                }
            };
            (kind, report)
        })
        .collect();
    Ok(Fit { eta_obs, table, accepted, adjustment_error, theta_hat, abc_seconds, reports })
}
