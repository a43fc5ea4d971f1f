//! Set functions `f: 2^[d] → ℝ` and budgeted access to them.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::rng;

/// Largest `d` for which dense `2^d` tables are materialized.
pub const MAX_TABLE_D: usize = 24;

/// A deterministic cooperative game.
pub trait Game: Send + Sync {
    fn d(&self) -> usize;

    fn value(&self, s: &Coalition) -> f64;

    /// Shapley values in closed form, when the game's structure provides them.
    fn closed_form_shapley(&self) -> Option<Vec<f64>> {
        None
    }
}

impl<G: Game + ?Sized> Game for Arc<G> {
    fn d(&self) -> usize {
        (**self).d()
    }
    fn value(&self, s: &Coalition) -> f64 {
        (**self).value(s)
    }
    fn closed_form_shapley(&self) -> Option<Vec<f64>> {
        (**self).closed_form_shapley()
    }
}

#[derive(Default)]
struct QueryState {
    cache: HashMap<Coalition, f64>,
    queries: usize,
}

/// Cached, optionally budget-capped access to a [`Game`].
///
/// Each distinct coalition counts once against the budget; repeated
/// evaluations are served from the cache for free. The guard is internally
/// synchronized, so a `ValueFunction` can be shared across threads.
pub struct ValueFunction {
    game: Arc<dyn Game>,
    budget: Option<usize>,
    state: Mutex<QueryState>,
}

impl ValueFunction {
    pub fn new(game: Arc<dyn Game>) -> Self {
        ValueFunction {
            game,
            budget: None,
            state: Mutex::default(),
        }
    }

    /// Fails fresh evaluations once `budget` distinct coalitions were queried.
    pub fn with_budget(game: Arc<dyn Game>, budget: usize) -> Self {
        ValueFunction {
            budget: Some(budget),
            ..ValueFunction::new(game)
        }
    }

    pub fn d(&self) -> usize {
        self.game.d()
    }

    pub fn game(&self) -> &Arc<dyn Game> {
        &self.game
    }

    pub fn budget(&self) -> Option<usize> {
        self.budget
    }

    pub fn query_count(&self) -> usize {
        self.state.lock().expect("query state poisoned").queries
    }

    pub fn evaluate(&self, s: &Coalition) -> Result<f64> {
        if s.d() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                actual: s.d(),
            });
        }
        let mut state = self.state.lock().expect("query state poisoned");
        if let Some(&v) = state.cache.get(s) {
            return Ok(v);
        }
        if let Some(budget) = self.budget {
            if state.queries >= budget {
                return Err(Error::BudgetExceeded { budget });
            }
        }
        let v = self.game.value(s);
        state.queries += 1;
        state.cache.insert(*s, v);
        Ok(v)
    }

    pub fn evaluate_all(&self, coalitions: &[Coalition]) -> Result<Vec<f64>> {
        coalitions.iter().map(|s| self.evaluate(s)).collect()
    }
}

impl fmt::Debug for ValueFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValueFunction")
            .field("d", &self.d())
            .field("budget", &self.budget)
            .field("queries", &self.query_count())
            .finish()
    }
}

/// Exhaustive storage of a game: `values[index(S)] = f(S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTable {
    d: usize,
    values: Vec<f64>,
}

impl GameTable {
    pub fn new(d: usize, values: Vec<f64>) -> Result<Self> {
        check_table_dim(d)?;
        if values.len() != 1usize << d {
            return Err(Error::DimensionMismatch {
                expected: 1usize << d,
                actual: values.len(),
            });
        }
        Ok(GameTable { d, values })
    }

    /// Tabulates any game with `d <= 24`.
    pub fn from_game(game: &dyn Game) -> Result<Self> {
        let d = game.d();
        check_table_dim(d)?;
        let values = (0..1usize << d)
            .map(|idx| game.value(&Coalition::from_index(d, idx)))
            .collect();
        Ok(GameTable { d, values })
    }

    /// Dense game with i.i.d. standard normal values.
    pub fn random(d: usize, seed: u64) -> Result<Self> {
        check_table_dim(d)?;
        let mut rng = rng::stream(seed, rng::Stream::GameFactory);
        let values = (0..1usize << d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        Ok(GameTable { d, values })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, s: &Coalition) -> f64 {
        self.values[s.index()]
    }

    pub fn empty_value(&self) -> f64 {
        self.values[0]
    }

    pub fn full_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

impl Game for GameTable {
    fn d(&self) -> usize {
        self.d
    }
    fn value(&self, s: &Coalition) -> f64 {
        self.get(s)
    }
}

pub(crate) fn check_table_dim(d: usize) -> Result<()> {
    if d > MAX_TABLE_D {
        Err(Error::DimensionTooLarge {
            d,
            max: MAX_TABLE_D,
        })
    } else {
        Ok(())
    }
}

fn check_players(d: usize) -> Result<()> {
    if d > MAX_PLAYERS {
        Err(Error::DimensionTooLarge {
            d,
            max: MAX_PLAYERS,
        })
    } else {
        Ok(())
    }
}

/// `f(S) = Σ_{i∈S} c_i`.
#[derive(Debug, Clone)]
pub struct AdditiveGame {
    weights: Vec<f64>,
}

impl AdditiveGame {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_players(weights.len())?;
        Ok(AdditiveGame { weights })
    }
}

impl Game for AdditiveGame {
    fn d(&self) -> usize {
        self.weights.len()
    }
    fn value(&self, s: &Coalition) -> f64 {
        s.players().map(|i| self.weights[i]).sum()
    }
    fn closed_form_shapley(&self) -> Option<Vec<f64>> {
        Some(self.weights.clone())
    }
}

/// `f(S) = 1` iff `|S| >= quota`.
#[derive(Debug, Clone)]
pub struct MajorityGame {
    d: usize,
    quota: usize,
}

impl MajorityGame {
    pub fn new(d: usize, quota: usize) -> Result<Self> {
        check_players(d)?;
        Ok(MajorityGame { d, quota })
    }
}

impl Game for MajorityGame {
    fn d(&self) -> usize {
        self.d
    }
    fn value(&self, s: &Coalition) -> f64 {
        if s.len() >= self.quota {
            1.0
        } else {
            0.0
        }
    }
    fn closed_form_shapley(&self) -> Option<Vec<f64>> {
        let total =
            if self.d >= self.quota { 1.0 } else { 0.0 } - if self.quota == 0 { 1.0 } else { 0.0 };
        Some(vec![total / self.d as f64; self.d])
    }
}

/// Unanimity game `u_T(S) = 1[T ⊆ S]`.
#[derive(Debug, Clone)]
pub struct UnanimityGame {
    carrier: Coalition,
}

impl UnanimityGame {
    pub fn new(carrier: Coalition) -> Self {
        UnanimityGame { carrier }
    }
}

impl Game for UnanimityGame {
    fn d(&self) -> usize {
        self.carrier.d()
    }
    fn value(&self, s: &Coalition) -> f64 {
        self.carrier.unanimity(s)
    }
    fn closed_form_shapley(&self) -> Option<Vec<f64>> {
        let k = self.carrier.len();
        Some(
            (0..self.d())
                .map(|i| {
                    if self.carrier.contains(i) {
                        1.0 / k as f64
                    } else {
                        0.0
                    }
                })
                .collect(),
        )
    }
}

/// Game with a known, sparse Fourier spectrum: `f(S) = Σ_T β_T χ_T(S)`.
#[derive(Debug, Clone)]
pub struct PlantedFourierGame {
    d: usize,
    support: Vec<(Coalition, f64)>,
}

/// Parameters for a randomly planted spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSpec {
    pub d: usize,
    /// Number of random interaction terms.
    pub interactions: usize,
    /// Cardinalities the interaction supports are drawn from, uniformly.
    pub orders: Vec<usize>,
    /// Plant a coefficient on every singleton as well.
    pub additive: bool,
    /// Extra terms of even cardinality (2 or 4), which carry no Shapley signal.
    pub even_terms: usize,
}

impl PlantedSpec {
    pub fn new(d: usize, interactions: usize) -> Self {
        PlantedSpec {
            d,
            interactions,
            orders: vec![1, 3, 5],
            additive: false,
            even_terms: 0,
        }
    }
}

impl PlantedFourierGame {
    pub fn new(d: usize, support: Vec<(Coalition, f64)>) -> Result<Self> {
        check_players(d)?;
        let mut seen = HashSet::with_capacity(support.len());
        for (t, _) in &support {
            if t.d() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: t.d(),
                });
            }
            if !seen.insert(*t) {
                return Err(Error::DuplicateSupport(t.to_string()));
            }
        }
        Ok(PlantedFourierGame { d, support })
    }

    pub fn random(spec: &PlantedSpec, seed: u64) -> Result<Self> {
        let d = spec.d;
        check_players(d)?;
        if spec.orders.iter().any(|&k| k == 0 || k > d) {
            return Err(Error::InvalidParameter(format!(
                "interaction orders {:?} must lie in 1..={d}",
                spec.orders
            )));
        }
        let mut rng = rng::stream(seed, rng::Stream::GameFactory);
        let mut support: Vec<(Coalition, f64)> = Vec::new();
        let mut seen = HashSet::new();
        if spec.additive {
            for i in 0..d {
                let t = Coalition::singleton(d, i);
                seen.insert(t);
                support.push((t, rng.sample(StandardNormal)));
            }
        }
        let mut draw = |orders: &[usize], count: usize, rng: &mut rand_chacha::ChaCha8Rng| {
            let mut added = 0;
            let mut attempts = 0usize;
            while added < count && attempts < 1000 * (count + 1) {
                attempts += 1;
                let k = orders[rng.random_range(0..orders.len())];
                let players: Vec<usize> = sample_indices(rng, d, k).into_iter().collect();
                let t = Coalition::from_players(d, &players).expect("in range");
                if seen.insert(t) {
                    support.push((t, rng.sample(StandardNormal)));
                    added += 1;
                }
            }
            added
        };
        let placed = draw(&spec.orders, spec.interactions, &mut rng);
        if placed < spec.interactions {
            return Err(Error::InvalidParameter(format!(
                "only {placed} distinct interactions available"
            )));
        }
        let even: Vec<usize> = [2, 4].into_iter().filter(|&k| k <= d).collect();
        if spec.even_terms > 0 {
            if even.is_empty() {
                return Err(Error::InvalidParameter("no even orders fit d".into()));
            }
            draw(&even, spec.even_terms, &mut rng);
        }
        PlantedFourierGame::new(d, support)
    }

    pub fn support(&self) -> &[(Coalition, f64)] {
        &self.support
    }
}

impl Game for PlantedFourierGame {
    fn d(&self) -> usize {
        self.d
    }
    fn value(&self, s: &Coalition) -> f64 {
        self.support.iter().map(|(t, b)| b * t.chi(s)).sum()
    }
    fn closed_form_shapley(&self) -> Option<Vec<f64>> {
        let mut phi = vec![0.0; self.d];
        for (t, b) in &self.support {
            let k = t.len();
            if k % 2 == 1 {
                for i in t.players() {
                    phi[i] += -2.0 * b / k as f64;
                }
            }
        }
        Some(phi)
    }
}

/// `f(S) = Σ_c |S ∩ c|^curvature` over contiguous player clusters.
#[derive(Debug, Clone)]
pub struct ClusterGame {
    clusters: Vec<Coalition>,
    curvature: f64,
    d: usize,
}

impl ClusterGame {
    pub fn new(d: usize, cluster_sizes: &[usize], curvature: f64) -> Result<Self> {
        check_players(d)?;
        let total: usize = cluster_sizes.iter().sum();
        if total != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: total,
            });
        }
        if !(curvature > 0.0 && curvature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "curvature must be positive, got {curvature}"
            )));
        }
        let mut start = 0;
        let clusters = cluster_sizes
            .iter()
            .map(|&n| {
                let players: Vec<usize> = (start..start + n).collect();
                start += n;
                Coalition::from_players(d, &players).expect("in range")
            })
            .collect();
        Ok(ClusterGame {
            clusters,
            curvature,
            d,
        })
    }
}

impl Game for ClusterGame {
    fn d(&self) -> usize {
        self.d
    }
    fn value(&self, s: &Coalition) -> f64 {
        self.clusters
            .iter()
            .map(|c| {
                let k = c.intersection_len(s);
                if k == 0 {
                    0.0
                } else {
                    (k as f64).powf(self.curvature)
                }
            })
            .sum()
    }
    fn closed_form_shapley(&self) -> Option<Vec<f64>> {
        // Each cluster is a symmetric game on its own members.
        let mut phi = vec![0.0; self.d];
        for c in &self.clusters {
            let n = c.len() as f64;
            for i in c.players() {
                phi[i] = n.powf(self.curvature) / n;
            }
        }
        Some(phi)
    }
}
