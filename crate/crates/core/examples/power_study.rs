//! A small size/power study over a σ grid, written as CSV and JSON.
//!
//!     cargo run --release --example power_study [out_dir]

use abc_misspec::experiments::{preset, run_power_study};

fn main() -> abc_misspec::Result<()> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let mut cfg = preset("normal-smoke")?;
    cfg.grid = vec![0.8, 1.0, 1.2];
    cfg.replications = 20;

    let study = run_power_study(&cfg)?;
    println!("{:>6} {:>5} {:>18} {:>6} {:>6}", "n", "sigma", "diagnostic", "freq", "se");
    for r in &study.rows {
        println!("{:>6} {:>5} {:>18} {:>6.2} {:>6.3}", r.n, r.grid_value, r.diagnostic, r.frequency, r.se);
    }
    let csv = out.join("power.csv");
    study.write_csv(&csv)?;
    std::fs::write(out.join("power.json"), serde_json::to_string_pretty(&study)?)?;
    println!("wrote {}", csv.display());
    Ok(())
}
