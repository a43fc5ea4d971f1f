//! Draws paired and unpaired samples and compares the kernel regression
//! fits they produce at two interaction orders.

use oddshap::regression::{solve_constrained_wls, BasisSpec, RegressionProblem};
use oddshap::sampling::sample_coalitions;
use oddshap::transforms::shapley_from_mobius;
use oddshap::{Basis, GameTable};

fn fit(table: &GameTable, paired: bool, order: usize) -> oddshap::Result<Vec<f64>> {
    let samples = sample_coalitions(table.d(), 400, 11, paired)?;
    let values: Vec<f64> = samples.coalitions.iter().map(|s| table.get(s)).collect();
    let basis = BasisSpec::up_to_order(Basis::Mobius, table.d(), order);
    let alpha = solve_constrained_wls(&RegressionProblem::from_samples(&samples, &values, basis)?)?;
    Ok(shapley_from_mobius(&alpha)?.phi)
}

fn gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn main() -> oddshap::Result<()> {
    let table = GameTable::random(10, 5)?;
    let samples = sample_coalitions(10, 400, 11, true)?;
    println!(
        "paired sample: {} coalitions, {} without their complement",
        samples.len(),
        samples.unpaired().len()
    );
    for paired in [true, false] {
        let linear = fit(&table, paired, 1)?;
        let pairwise = fit(&table, paired, 2)?;
        println!(
            "{:<8} order-1 vs order-2 fit, max Shapley gap {:.3e}",
            if paired { "paired" } else { "unpaired" },
            gap(&linear, &pairwise)
        );
    }
    Ok(())
}
