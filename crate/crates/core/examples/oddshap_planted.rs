//! OddSHAP against LeverageSHAP on a game with planted odd interactions.

use oddshap::bench::{ground_truth, mse, GameSpec};
use oddshap::estimators::{leverage_shap, oddshap, EstimatorConfig};
use oddshap::ValueFunction;

fn main() -> oddshap::Result<()> {
    let game = "planted:d=30,terms=50,orders=3,additive=true,seed=0"
        .parse::<GameSpec>()?
        .build()?;
    let truth = ground_truth(game.as_ref())?;
    println!(
        "{:>6} {:>14} {:>14} {:>8}",
        "m", "leverageshap", "oddshap", "ratio"
    );
    for m in [600usize, 1500, 3000] {
        let cfg = EstimatorConfig::new(m, 1);
        let lev = leverage_shap(&ValueFunction::with_budget(game.clone(), m), &cfg)?;
        let odd = oddshap(&ValueFunction::with_budget(game.clone(), m), &cfg)?;
        let (a, b) = (mse(&lev.phi, &truth)?, mse(&odd.phi, &truth)?);
        println!("{m:>6} {a:>14.4e} {b:>14.4e} {:>8.4}", b / a);
    }
    Ok(())
}
