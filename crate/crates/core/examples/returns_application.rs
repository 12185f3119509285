//! Fitting the MA(1) g-and-k model to a return series. Reads a CSV of
//! returns (or `date,price` rows with `--prices`) when a path is given and
//! otherwise simulates a series from the model.
//!
//!     cargo run --release --example returns_application [returns.csv] [--prices]

use abc_misspec::cli::load_returns_csv;
use abc_misspec::experiments::{preset, run_application};
use abc_misspec::models::{simulate_ma1_gk, GkParams, Ma1GkModel, Ma1GkParams};
use abc_misspec::SeedPath;

fn main() -> abc_misspec::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let prices = args.iter().any(|a| a == "--prices");
    let returns = match args.iter().find(|a| !a.starts_with("--")) {
        Some(path) => load_returns_csv(path.as_ref(), prices)?,
        None => {
            let truth = Ma1GkParams { theta1: 0.2, gk: GkParams::new(0.08, 0.08, -0.2, 0.02) };
            simulate_ma1_gk(&truth, 524, &SeedPath::new(1))?
        }
    };
    let mut settings = preset("returns")?.settings;
    settings.abc.n_draws = 100_000;
    settings.abc.alpha = 0.001;
    settings.inner_abc.n_draws = 5_000;
    settings.inner_abc.alpha = 0.02;
    settings.resamples = 50;

    let res = run_application(&Ma1GkModel::default(), &returns, &settings, None, 0.05, &SeedPath::new(2))?;
    println!("{} returns", res.n);
    println!("{:>7} {:>9} {:>9} {:>9}   adjusted median", "param", "median", "2.5%", "97.5%");
    for (j, p) in res.parameters.iter().enumerate() {
        let adj = res.adjusted_parameters.as_ref().map(|a| format!("{:.4}", a[j].median)).unwrap_or_default();
        println!("{:>7} {:>9.4} {:>9.4} {:>9.4}   {adj}", p.name, p.median, p.lower, p.upper);
    }
    for d in &res.diagnostics {
        match &d.report {
            Some(r) => println!("{:<18} statistic {:>9.4} reject={} dof={:?}", d.kind.to_string(), r.statistic, r.reject, r.dof),
            None => println!("{:<18} failed: {}", d.kind.to_string(), d.error.as_deref().unwrap_or("")),
        }
    }
    Ok(())
}
