//! Gradient-boosted regression trees on binary coalition features, their
//! exact Fourier expansion, and top-magnitude odd-interaction screening.

use std::collections::HashMap;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::transforms::{shapley_from_fourier, Attribution, Basis, CoefficientMap};

#[derive(Debug, Clone, PartialEq)]
pub struct GBTConfig {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub max_leaves: usize,
    pub min_samples_leaf: usize,
}

impl Default for GBTConfig {
    fn default() -> Self {
        GBTConfig {
            n_trees: 100,
            learning_rate: 0.1,
            max_depth: 10,
            max_leaves: 31,
            min_samples_leaf: 1,
        }
    }
}

impl GBTConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.max_leaves == 0 || self.min_samples_leaf == 0 {
            return Err(Error::InvalidParameter(
                "max_leaves and min_samples_leaf must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    /// Tests whether `player` is in the coalition.
    Split {
        player: usize,
        absent: usize,
        present: usize,
    },
    Leaf {
        value: f64,
    },
}

/// A binary tree stored as a node array with the root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, s: &Coalition) -> f64 {
        let mut k = 0;
        loop {
            match self.nodes[k] {
                Node::Leaf { value } => return value,
                Node::Split {
                    player,
                    absent,
                    present,
                } => k = if s.contains(player) { present } else { absent },
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Longest root-to-leaf path, in splits.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], k: usize) -> usize {
            match nodes[k] {
                Node::Leaf { .. } => 0,
                Node::Split {
                    absent, present, ..
                } => 1 + walk(nodes, absent).max(walk(nodes, present)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Calls `visit(path, value)` for every leaf, where `path` lists the
    /// `(player, present)` tests leading to it.
    fn for_each_leaf(&self, mut visit: impl FnMut(&[(usize, bool)], f64)) {
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((k, path)) = stack.pop() {
            match self.nodes[k] {
                Node::Leaf { value } => visit(&path, value),
                Node::Split {
                    player,
                    absent,
                    present,
                } => {
                    let mut right = path.clone();
                    right.push((player, true));
                    let mut left = path;
                    left.push((player, false));
                    stack.push((present, right));
                    stack.push((absent, left));
                }
            }
        }
    }
}

/// `base_score + learning_rate · Σ_trees tree(S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GBTModel {
    pub d: usize,
    pub trees: Vec<Tree>,
    pub learning_rate: f64,
    pub base_score: f64,
}

impl GBTModel {
    pub fn predict(&self, s: &Coalition) -> f64 {
        let boost: f64 = self.trees.iter().map(|t| t.predict(s)).sum();
        self.base_score + self.learning_rate * boost
    }
}

impl Game for GBTModel {
    fn d(&self) -> usize {
        self.d
    }

    fn value(&self, s: &Coalition) -> f64 {
        self.predict(s)
    }
}

/// Squared-error boosting. Each tree is grown one level at a time until the
/// depth or leaf cap is hit; every split takes the player with the largest
/// variance reduction, the lowest index winning ties.
pub fn fit_gbt(samples: &[Coalition], targets: &[f64], config: &GBTConfig) -> Result<GBTModel> {
    config.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot fit a model on no samples".into(),
        ));
    }
    if samples.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: samples.len(),
            actual: targets.len(),
        });
    }
    if targets.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteTarget);
    }
    let d = samples[0].d();
    let base_score = targets.iter().sum::<f64>() / targets.len() as f64;
    let mut residual: Vec<f64> = targets.iter().map(|v| v - base_score).collect();
    // Per-sample squared residual below which a node is treated as pure.
    let scale = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let floor = (1e-12 * scale).powi(2);
    let mut trees = Vec::with_capacity(config.n_trees);
    for _ in 0..config.n_trees {
        let tree = grow_tree(d, samples, &residual, floor, config);
        for (r, s) in residual.iter_mut().zip(samples) {
            *r -= config.learning_rate * tree.predict(s);
        }
        trees.push(tree);
    }
    Ok(GBTModel {
        d,
        trees,
        learning_rate: config.learning_rate,
        base_score,
    })
}

fn mean(idx: &[usize], y: &[f64]) -> f64 {
    idx.iter().map(|&j| y[j]).sum::<f64>() / idx.len() as f64
}

fn grow_tree(d: usize, x: &[Coalition], y: &[f64], floor: f64, config: &GBTConfig) -> Tree {
    let all: Vec<usize> = (0..x.len()).collect();
    let mut nodes = vec![Node::Leaf {
        value: mean(&all, y),
    }];
    let mut frontier = vec![(0usize, all)];
    let mut leaves = 1;
    for _ in 0..config.max_depth {
        let mut next = Vec::new();
        for (k, idx) in frontier {
            if leaves >= config.max_leaves {
                break;
            }
            let Some(player) = best_split(d, x, y, &idx, floor, config.min_samples_leaf) else {
                continue;
            };
            let (present, absent): (Vec<usize>, Vec<usize>) =
                idx.into_iter().partition(|&j| x[j].contains(player));
            let a = nodes.len();
            nodes.push(Node::Leaf {
                value: mean(&absent, y),
            });
            nodes.push(Node::Leaf {
                value: mean(&present, y),
            });
            nodes[k] = Node::Split {
                player,
                absent: a,
                present: a + 1,
            };
            leaves += 1;
            next.push((a, absent));
            next.push((a + 1, present));
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Tree { nodes }
}

// Variance reduction of a split is n_l n_r / n · (mean_l − mean_r)².
fn best_split(
    d: usize,
    x: &[Coalition],
    y: &[f64],
    idx: &[usize],
    floor: f64,
    min_leaf: usize,
) -> Option<usize> {
    let n = idx.len();
    if n < 2 * min_leaf {
        return None;
    }
    let total: f64 = idx.iter().map(|&j| y[j]).sum();
    let node_mean = total / n as f64;
    let spread: f64 = idx.iter().map(|&j| (y[j] - node_mean).powi(2)).sum();
    if spread <= floor * n as f64 {
        return None;
    }
    let mut count = vec![0usize; d];
    let mut sum = vec![0.0f64; d];
    for &j in idx {
        for p in x[j].players() {
            count[p] += 1;
            sum[p] += y[j];
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for p in 0..d {
        let (nr, nl) = (count[p], n - count[p]);
        if nr < min_leaf || nl < min_leaf {
            continue;
        }
        let diff = sum[p] / nr as f64 - (total - sum[p]) / nl as f64;
        let gain = nr as f64 * nl as f64 / n as f64 * diff * diff;
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((p, gain));
        }
    }
    best.filter(|&(_, g)| g > 1e-12 * spread).map(|(p, _)| p)
}

/// Exact Fourier expansion of the ensemble.
///
/// A leaf with value `v` reached through tests on players `P` contributes
/// `v · Π_{i∈T} σ_i / 2^{|P|}` to every `T ⊆ P`, with `σ_i = +1` when the path
/// requires `i` absent and `-1` when it requires `i` present.
pub fn gbt_fourier(model: &GBTModel) -> CoefficientMap {
    let mut acc: HashMap<Coalition, f64> = HashMap::new();
    let empty = Coalition::empty(model.d);
    *acc.entry(empty).or_insert(0.0) += model.base_score;
    for tree in &model.trees {
        tree.for_each_leaf(|path, value| {
            let mut players = empty;
            let mut present = empty;
            for &(p, is_present) in path {
                players = players.with(p);
                if is_present {
                    present = present.with(p);
                }
            }
            let scale = model.learning_rate * value / (1u128 << path.len()) as f64;
            for t in players.subsets() {
                let sign = if t.intersection_len(&present) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                *acc.entry(t).or_insert(0.0) += sign * scale;
            }
        });
    }
    CoefficientMap::from_entries(model.d, Basis::Fourier, acc)
        .expect("coefficients share the model dimension")
}

/// The `k` largest-magnitude terms of odd cardinality at least 3, ordered by
/// magnitude, then cardinality, then bit pattern.
pub fn select_odd_interactions(beta: &CoefficientMap, k: usize) -> Vec<Coalition> {
    let mut eligible: Vec<(Coalition, f64)> = beta
        .iter()
        .filter(|(t, _)| t.len() >= 3 && t.len() % 2 == 1)
        .map(|(t, v)| (*t, v.abs()))
        .collect();
    eligible.sort_by(|(ta, a), (tb, b)| {
        b.total_cmp(a)
            .then(ta.len().cmp(&tb.len()))
            .then(ta.bits().cmp(&tb.bits()))
    });
    eligible.into_iter().take(k).map(|(t, _)| t).collect()
}

/// Exact Shapley values of the ensemble on the Boolean domain.
pub fn gbt_shapley(model: &GBTModel) -> Result<Attribution> {
    shapley_from_fourier(&gbt_fourier(model))
}
