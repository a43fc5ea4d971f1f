//! Fits the boosted-tree proxy, reads off its exact Fourier spectrum and
//! ranks the odd interactions it found.

use oddshap::bench::GameSpec;
use oddshap::proxy::{fit_gbt, gbt_fourier, gbt_shapley, select_odd_interactions, GBTConfig};
use oddshap::sampling::sample_coalitions;
use oddshap::{Coalition, ValueFunction};

fn main() -> oddshap::Result<()> {
    let game = "planted:d=12,terms=4,orders=3,seed=2"
        .parse::<GameSpec>()?
        .build()?;
    let vf = ValueFunction::new(game.clone());
    let samples = sample_coalitions(12, 1000, 0, true)?;
    let values = vf.evaluate_all(&samples.coalitions)?;
    let model = fit_gbt(&samples.coalitions, &values, &GBTConfig::default())?;

    let beta = gbt_fourier(&model);
    let worst = (0..1usize << 12)
        .map(|idx| Coalition::from_index(12, idx))
        .map(|s| (beta.evaluate(&s) - model.predict(&s)).abs())
        .fold(0.0, f64::max);
    println!(
        "{} trees, {} Fourier terms, reconstruction error {worst:.1e}",
        model.trees.len(),
        beta.len()
    );

    println!("top odd interactions:");
    for t in select_odd_interactions(&beta, 6) {
        println!("  {t}  beta = {:+.4}", beta.get(&t));
    }
    let phi = gbt_shapley(&model)?.phi;
    let cells: Vec<String> = phi.iter().map(|v| format!("{v:+.3}")).collect();
    println!("proxy Shapley values: [{}]", cells.join(", "));
    Ok(())
}
