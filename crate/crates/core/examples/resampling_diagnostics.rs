//! The three resampling diagnostics (simulated goodness of fit, predictive
//! p-value, adjustment discrepancy) on one misspecified normal dataset.
//!
//!     cargo run --release --example resampling_diagnostics

use abc_misspec::abc::{abc_reject, posterior_mean, regression_adjust};
use abc_misspec::diagnostics::{
    discrepancy_diag, h_powers, predictive_pvalue, simulated_gof, DiscrepancyConfig, DistanceAverage,
};
use abc_misspec::models::{simulate_normal, ModelSpec, NormalModel};
use abc_misspec::SeedPath;

fn main() -> abc_misspec::Result<()> {
    let root = SeedPath::new(11);
    let n = 300;
    let y = simulate_normal(0.0, 0.8, n, &root.child(0))?;
    let model = NormalModel::default();
    let eta = model.summarize(&y)?;
    let (table, accepted) = abc_reject(&model, &eta, 20_000, 0.01, n, &root.child(1))?;
    let adjusted = regression_adjust(&accepted, &eta)?;
    let theta_hat = posterior_mean(&adjusted, false)?;

    for average in [DistanceAverage::Accepted, DistanceAverage::AllRows] {
        let r = simulated_gof(&table, 100, 0.05, average, &root.child(2))?;
        println!("simulated GoF ({average:?}): eps={:.4} q95={:.4} reject={}", r.statistic, r.quantiles[0], r.reject);
    }

    let spec = model.summary_spec();
    let r = predictive_pvalue(&accepted, &model, eta[spec.scalar_pp_index], spec.scalar_pp_index, 100, 0.05, n, false, &root.child(3))?;
    println!("predictive:  eta2={:.4} interval=({:.4}, {:.4}) reject={}", r.statistic, r.quantiles[0], r.quantiles[1], r.reject);

    let cfg = DiscrepancyConfig { replications: 50, inner_n: 10_000, inner_alpha: 0.01, alpha_level: 0.05 };
    let r = discrepancy_diag(&adjusted, &eta, &model, &h_powers, &theta_hat, &cfg, n, &root.child(4))?;
    println!("discrepancy: d={:.4} q95={:.4} reject={}", r.statistic, r.quantiles[0], r.reject);
    Ok(())
}
