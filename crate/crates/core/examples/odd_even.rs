//! Splits a game into odd and even parts and shows that only the odd part
//! carries Shapley value.

use oddshap::transforms::{exact_shapley, fourier_transform, odd_even_decompose};
use oddshap::GameTable;

fn main() -> oddshap::Result<()> {
    let table = GameTable::random(8, 3)?;
    let (odd, even) = odd_even_decompose(&table);

    let full = exact_shapley(&table)?.phi;
    let from_odd = exact_shapley(&odd)?.phi;
    let from_even = exact_shapley(&even)?.phi;
    for i in 0..table.d() {
        println!(
            "player {}: phi(f) = {:+.6}  phi(f_odd) = {:+.6}  phi(f_even) = {:+.1e}",
            i + 1,
            full[i],
            from_odd[i],
            from_even[i]
        );
    }

    let beta = fourier_transform(&odd)?;
    let even_mass: f64 = beta
        .iter()
        .filter(|(t, _)| t.len() % 2 == 0)
        .fold(0.0, |acc, (_, v)| acc + v.abs());
    println!("Fourier mass of f_odd on even-order terms: {even_mass:.1e}");
    Ok(())
}
