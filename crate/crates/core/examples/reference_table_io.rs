//! Saving a reference table as CSV and as a binary cache, then reloading the
//! cache and accepting against it again.
//!
//!     cargo run --release --example reference_table_io

use abc_misspec::abc::{abc_reject, read_table_cache, write_table_cache, write_table_csv};
use abc_misspec::models::{simulate_ricker, ModelSpec, RickerModel, RickerParams};
use abc_misspec::SeedPath;

fn main() -> abc_misspec::Result<()> {
    let dir = std::env::temp_dir().join("abc-misspec-table");
    std::fs::create_dir_all(&dir)?;
    let y = simulate_ricker(&RickerParams::homoskedastic(44.7, 10.0, 0.3, 1.0, 100), &SeedPath::new(1))?;
    let model = RickerModel::default();
    let eta = model.summarize(&y)?;
    let (table, accepted) = abc_reject(&model, &eta, 5_000, 0.02, y.len(), &SeedPath::new(2))?;

    let csv = dir.join("table.csv");
    let cache = dir.join("table.bin");
    write_table_csv(&table, &csv)?;
    write_table_cache(&table, &cache)?;
    let back = read_table_cache(&cache)?;
    assert_eq!(back.accept().indices, accepted.indices);
    println!("{} rows x ({} params + {} summaries)", back.n_rows(), back.sims.k_theta, back.sims.k_eta);
    println!("csv   {} ({} bytes)", csv.display(), std::fs::metadata(&csv)?.len());
    println!("cache {} ({} bytes)", cache.display(), std::fs::metadata(&cache)?.len());
    Ok(())
}
