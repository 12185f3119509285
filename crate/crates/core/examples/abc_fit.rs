//! Accept/reject ABC with linear regression adjustment on normal data.
//!
//!     cargo run --release --example abc_fit

use abc_misspec::abc::{abc_reject, posterior_mean, regression_adjust};
use abc_misspec::models::{simulate_normal, ModelSpec, NormalModel};
use abc_misspec::SeedPath;

fn main() -> abc_misspec::Result<()> {
    let root = SeedPath::new(2024);
    let n = 200;
    let y = simulate_normal(0.3, 1.0, n, &root.child(0))?;

    let model = NormalModel::default();
    let eta = model.summarize(&y)?;
    let (table, accepted) = abc_reject(&model, &eta, 20_000, 0.01, n, &root.child(1))?;
    let adjusted = regression_adjust(&accepted, &eta)?;

    println!("observed summaries      {:?}", eta.values);
    println!("table rows / accepted   {} / {}", table.n_rows(), accepted.delta());
    println!("largest accepted dist   {:.4}", accepted.max_distance());
    println!("posterior mean (raw)    {:.4}", posterior_mean(&adjusted, false)?[0]);
    println!("posterior mean (adj.)   {:.4}", posterior_mean(&adjusted, true)?[0]);
    println!("regression coefficients {:?}", adjusted.coefficients.as_ref().unwrap().as_slice());
    Ok(())
}
