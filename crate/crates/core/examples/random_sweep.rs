//! A small threshold-accuracy sweep over Erdős–Rényi graphs, written as CSV.
//!
//! ```text
//! cargo run --release --example random_sweep -- sweep.csv
//! ```

use kuramoto_series::experiments::{accuracy_sweep, SweepConfig};
use kuramoto_series::io::{atomic_write, sweep_csv};
use kuramoto_series::sync_tests::TestId;

fn main() -> kuramoto_series::Result<()> {
    let cfg = SweepConfig { p_grid: vec![0.2, 0.5, 0.8], trials: 10, ..SweepConfig::default() };
    let records = accuracy_sweep(&cfg);
    for &p in &cfg.p_grid {
        let rows: Vec<_> = records.iter().filter(|r| r.p == p && r.status.is_none()).collect();
        print!("p = {p}:");
        for k in [1, 3, 5, 7] {
            let mean = rows.iter().filter_map(|r| r.ratio_kc_kt(TestId::At(k))).sum::<f64>() / rows.len() as f64;
            print!("  AT{k} {mean:.3}");
        }
        println!();
    }
    let csv = sweep_csv(&cfg, &records);
    match std::env::args().nth(1) {
        Some(path) => atomic_write(path, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    Ok(())
}
