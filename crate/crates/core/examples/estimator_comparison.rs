//! Runs every estimator over a small experiment grid and prints the
//! median/IQR summary.

use oddshap::bench::{run_experiment, summarize, ExperimentConfig, RunOptions};

const CONFIG: &str = r#"{
    "game": "cluster:sizes=4+4+4,curvature=1.5",
    "estimators": [
        {"name": "oddshap"},
        {"name": "leverageshap"},
        {"name": "polyshap", "order": 2},
        {"name": "msr"},
        {"name": "permutation"}
    ],
    "budgets": [200, 800],
    "instances": 10
}"#;

fn main() -> oddshap::Result<()> {
    let cfg = ExperimentConfig::from_json(CONFIG)?;
    let rows = run_experiment(&cfg, RunOptions { timing: true })?;
    println!(
        "{:<18} {:>6} {:>12} {:>12} {:>12}",
        "estimator", "m", "median", "q1", "q3"
    );
    for s in summarize(&rows) {
        println!(
            "{:<18} {:>6} {:>12.4e} {:>12.4e} {:>12.4e}",
            s.estimator, s.m, s.median, s.q1, s.q3
        );
    }
    Ok(())
}
