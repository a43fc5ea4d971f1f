//! Sweeps the number of odd interactions at a fixed budget and prints the
//! median MSE ratio against the interaction-free baseline.

use oddshap::bench::{ablate_interactions, ablation_medians, ExperimentConfig};

fn main() -> oddshap::Result<()> {
    let cfg = ExperimentConfig {
        game: "planted:d=20,terms=30,orders=3,additive=true,seed=4".into(),
        estimators: Vec::new(),
        budgets: vec![1000],
        instances: 5,
        output: None,
    };
    let rows = ablate_interactions(&cfg, &[1, 10, 30, 100, 300, 1000])?;
    for (m, count, ratio) in ablation_medians(&rows) {
        println!("m={m} count={count:<5} median ratio {ratio:.4}");
    }
    Ok(())
}
