//! Exact Shapley values of small games by brute force, cross-checked
//! against the Möbius and Fourier readouts.

use oddshap::game::{MajorityGame, UnanimityGame};
use oddshap::transforms::{
    exact_shapley, fourier_transform, mobius_transform, shapley_from_fourier, shapley_from_mobius,
};
use oddshap::{Coalition, Game, GameTable};

fn show(name: &str, phi: &[f64]) {
    let cells: Vec<String> = phi.iter().map(|v| format!("{v:+.4}")).collect();
    println!("{name:<28} [{}]", cells.join(", "));
}

fn main() -> oddshap::Result<()> {
    let glove = UnanimityGame::new(Coalition::from_players(4, &[0, 2])?);
    show("unanimity on {1,3}", &glove.closed_form_shapley().unwrap());

    let vote = GameTable::from_game(&MajorityGame::new(5, 3)?)?;
    show("majority 3 of 5", &exact_shapley(&vote)?.phi);

    let table = GameTable::random(6, 7)?;
    show("random d=6, marginals", &exact_shapley(&table)?.phi);
    show(
        "random d=6, mobius readout",
        &shapley_from_mobius(&mobius_transform(&table)?)?.phi,
    );
    show(
        "random d=6, fourier readout",
        &shapley_from_fourier(&fourier_transform(&table)?)?.phi,
    );
    Ok(())
}
