//! Runs an experiment config and prints its aggregate table.
//!
//! `cargo run --release --example simulate_sweep -- configs/sparse_vector_f1.json`

use std::path::PathBuf;

use vicm::experiment::{run_experiment, ExperimentConfig};

fn main() -> vicm::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/../../configs/quick_sparse_matrix.json"
            ))
        });
    let config = ExperimentConfig::from_file(&path)?;
    let result = run_experiment(&config, None)?;
    println!(
        "{:>8}  {:<24} {:>12} {:>12}",
        "n", "metric", "mean", "stderr"
    );
    for a in &result.aggregates {
        println!(
            "{:>8}  {:<24} {:>12.6} {:>12.6}",
            a.n, a.metric, a.mean, a.stderr
        );
    }
    println!("config hash {}", result.provenance.config_hash);
    Ok(())
}
