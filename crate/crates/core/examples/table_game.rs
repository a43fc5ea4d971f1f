//! Saves a game table to disk, loads it back, and estimates its Shapley
//! values under a query budget.

use std::sync::Arc;

use oddshap::estimators::{oddshap, EstimatorConfig};
use oddshap::io::{load_table_game, save_table};
use oddshap::transforms::exact_shapley;
use oddshap::{GameTable, ValueFunction};

fn main() -> oddshap::Result<()> {
    let path = std::env::temp_dir().join("oddshap_example_table.txt");
    save_table(&GameTable::random(9, 21)?, &path)?;
    let table = load_table_game(&path)?;
    println!("loaded d={} table from {}", table.d(), path.display());

    let exact = exact_shapley(&table)?.phi;
    let vf = ValueFunction::with_budget(Arc::new(table), 200);
    let est = oddshap(&vf, &EstimatorConfig::new(200, 0))?;
    println!("queries used: {}", vf.query_count());
    for (i, (e, x)) in est.phi.iter().zip(&exact).enumerate() {
        println!("player {}: estimate {e:+.4}  exact {x:+.4}", i + 1);
    }
    std::fs::remove_file(&path).ok();
    Ok(())
}
