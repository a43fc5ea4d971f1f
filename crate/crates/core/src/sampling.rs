//! Size-stratified coalition sampling without replacement, with optional
//! complement pairing, and the Shapley kernel weights.

use std::collections::HashSet;

use rand::seq::index::sample as sample_indices;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::coalition::{subsets_of_size, Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::rng;
use crate::transforms::binomial;

/// Shapley kernel weight `w_ℓ = 1 / (ℓ (d-ℓ) C(d, ℓ))` for interior sizes.
pub fn kernel_weight(ell: usize, d: usize) -> Result<f64> {
    if ell == 0 || ell >= d {
        return Err(Error::InvalidParameter(format!(
            "kernel weight needs 1 <= ell <= d-1, got ell={ell}, d={d}"
        )));
    }
    Ok(1.0 / (ell as f64 * (d - ell) as f64 * binomial(d, ell)))
}

/// Distinct coalitions in draw order; `∅` and `[d]` always come first.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub d: usize,
    pub coalitions: Vec<Coalition>,
    pub paired: bool,
    pub includes_boundary: bool,
    pub seed: u64,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.coalitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalitions.is_empty()
    }

    /// Samples with `0 < |S| < d`.
    pub fn interior(&self) -> impl Iterator<Item = &Coalition> {
        self.coalitions
            .iter()
            .filter(|s| !s.is_empty() && !s.is_full())
    }

    /// Every sample of the given set whose complement is missing.
    pub fn unpaired(&self) -> Vec<Coalition> {
        let set: HashSet<_> = self.coalitions.iter().copied().collect();
        self.coalitions
            .iter()
            .filter(|s| !set.contains(&s.complement()))
            .copied()
            .collect()
    }

    /// Every coalition of `[d]`, boundary first.
    pub fn exhaustive(d: usize) -> Result<Self> {
        crate::game::check_table_dim(d)?;
        let mut coalitions = vec![Coalition::empty(d)];
        if d > 0 {
            coalitions.push(Coalition::full(d));
        }
        coalitions
            .extend((1..(1usize << d).saturating_sub(1)).map(|idx| Coalition::from_index(d, idx)));
        Ok(SampleSet {
            d,
            coalitions,
            paired: true,
            includes_boundary: true,
            seed: 0,
        })
    }
}

/// Number of coalitions over `d` players, saturating at `u128::MAX`.
fn power_set_size(d: usize) -> u128 {
    if d >= 128 {
        u128::MAX
    } else {
        1u128 << d
    }
}

/// Draws a coalition by picking a size uniformly from `1..=d-1`, then a
/// uniform subset of that size.
pub fn draw_size_uniform(d: usize, rng: &mut ChaCha8Rng) -> Coalition {
    debug_assert!(d >= 2);
    let size = rng.random_range(1..d);
    uniform_subset(d, size, rng)
}

fn uniform_subset(d: usize, size: usize, rng: &mut ChaCha8Rng) -> Coalition {
    let players: Vec<usize> = sample_indices(rng, d, size).into_iter().collect();
    Coalition::from_players(d, &players).expect("indices below d")
}

struct SizeClass {
    capacity: f64,
    taken: usize,
    // Remaining candidates once rejection sampling would stall.
    pool: Option<Vec<Coalition>>,
    exhausted: bool,
}

/// Samples `min(m, 2^d)` distinct coalitions including `∅` and `[d]`.
///
/// Interior coalitions are drawn size-uniformly; a draw that is already
/// present is rejected and redrawn within the same size. With `paired`, each
/// accepted `S` is immediately followed by `S^c`; if the budget leaves room
/// for only one more coalition, the last draw stays unpaired. Once more than
/// half of a size class has been taken, that class switches to a shuffled
/// list of its remaining members.
pub fn sample_coalitions(d: usize, m: usize, seed: u64, paired: bool) -> Result<SampleSet> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "budget m={m} must be >= 2"
        )));
    }
    if d == 0 || d > MAX_PLAYERS {
        return Err(Error::InvalidParameter(format!("d={d} out of range")));
    }
    let target = (m as u128).min(power_set_size(d)) as usize;
    let mut rng = rng::stream(seed, rng::Stream::Sampler);

    let mut coalitions = Vec::with_capacity(target);
    let mut seen: HashSet<Coalition> = HashSet::with_capacity(target);
    for s in [Coalition::empty(d), Coalition::full(d)] {
        seen.insert(s);
        coalitions.push(s);
    }

    let mut classes: Vec<SizeClass> = (0..=d)
        .map(|ell| SizeClass {
            capacity: binomial(d, ell),
            taken: 0,
            pool: None,
            exhausted: ell == 0 || ell == d,
        })
        .collect();

    while coalitions.len() < target {
        let ell = rng.random_range(1..d);
        let class = &mut classes[ell];
        if class.exhausted {
            continue;
        }
        if class.pool.is_none() && class.taken as f64 > 0.5 * class.capacity {
            let mut pool: Vec<Coalition> = subsets_of_size(d, ell)
                .filter(|s| !seen.contains(s))
                .collect();
            pool.shuffle(&mut rng);
            class.pool = Some(pool);
        }
        let candidate = match class.pool.as_mut() {
            Some(pool) => loop {
                match pool.pop() {
                    Some(s) if seen.contains(&s) => continue,
                    other => break other,
                }
            },
            // At most half the class is taken, so this expects <= 2 draws.
            None => loop {
                let s = uniform_subset(d, ell, &mut rng);
                if !seen.contains(&s) {
                    break Some(s);
                }
            },
        };
        let Some(s) = candidate else {
            class.exhausted = true;
            continue;
        };
        seen.insert(s);
        coalitions.push(s);
        classes[ell].taken += 1;
        if paired && coalitions.len() < target {
            let sc = s.complement();
            if seen.insert(sc) {
                coalitions.push(sc);
                classes[d - ell].taken += 1;
            }
        }
        for ell in [ell, d - ell] {
            let class = &mut classes[ell];
            if class.taken as f64 >= class.capacity {
                class.exhausted = true;
            }
        }
    }

    Ok(SampleSet {
        d,
        coalitions,
        paired,
        includes_boundary: true,
        seed,
    })
}
