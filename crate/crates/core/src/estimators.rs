//! Shapley value estimators. Each one consumes a [`ValueFunction`] and a
//! query budget and returns an [`Attribution`].
//!
//! | estimator | method |
//! |---|---|
//! | [`oddshap`] | GBT proxy screens odd interactions, then constrained Fourier regression |
//! | [`leverage_shap`] | constrained regression on `{∅} ∪ singletons` |
//! | [`polyshap`] | constrained regression on all unanimity terms of order `≤ k` |
//! | [`msr`] | importance-weighted marginal readout over size-uniform draws |
//! | [`permutation_sampling`] | averaged marginal contributions along random orders |

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::ValueFunction;
use crate::proxy::{fit_gbt, gbt_fourier, gbt_shapley, select_odd_interactions, GBTConfig};
use crate::regression::{solve_constrained_wls, BasisSpec, RegressionProblem};
use crate::rng;
use crate::sampling::{draw_size_uniform, sample_coalitions, SampleSet};
use crate::transforms::{
    binomial, shapley_from_fourier, shapley_from_mobius, shapley_weight_p, Attribution, Basis,
};

/// Largest `d^k` for which the order-`k` unanimity basis is enumerated.
pub const POLY_BASIS_GUARD: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    /// Query budget `m`, boundary coalitions included.
    pub budget: usize,
    pub seed: u64,
    /// Samples per regression variable; sets both the interaction count
    /// `⌈m/η⌉` and the proxy-only threshold `m < d·η`.
    pub eta: f64,
    /// Interaction order for [`polyshap`].
    pub poly_order: usize,
    pub paired: bool,
    pub gbt: GBTConfig,
}

impl EstimatorConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        EstimatorConfig {
            budget,
            seed,
            eta: 10.0,
            poly_order: 2,
            paired: true,
            gbt: GBTConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget < 2 {
            return Err(Error::InvalidParameter(format!(
                "budget m={} must be >= 2",
                self.budget
            )));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if self.poly_order == 0 {
            return Err(Error::InvalidParameter("poly_order must be >= 1".into()));
        }
        Ok(())
    }
}

/// Runs `body`, then stamps the fresh queries it made and its wall time.
fn measured(vf: &ValueFunction, body: impl FnOnce() -> Result<Attribution>) -> Result<Attribution> {
    let before = vf.query_count();
    let start = Instant::now();
    let mut out = body()?;
    out.wall_time = start.elapsed();
    out.budget_used = vf.query_count() - before;
    Ok(out)
}

fn check_dim(vf: &ValueFunction) -> Result<usize> {
    match vf.d() {
        0 => Err(Error::InvalidParameter("game has no players".into())),
        d => Ok(d),
    }
}

fn observe(vf: &ValueFunction, cfg: &EstimatorConfig) -> Result<(SampleSet, Vec<f64>)> {
    cfg.validate()?;
    let d = check_dim(vf)?;
    let samples = sample_coalitions(d, cfg.budget, cfg.seed, cfg.paired)?;
    let values = vf.evaluate_all(&samples.coalitions)?;
    Ok((samples, values))
}

fn fourier_fit(samples: &SampleSet, values: &[f64], basis: BasisSpec) -> Result<Attribution> {
    let size = basis.len();
    let problem = RegressionProblem::from_samples(samples, values, basis)?;
    let beta = solve_constrained_wls(&problem)?;
    Ok(Attribution {
        basis_size: size,
        ..shapley_from_fourier(&beta)?
    })
}

/// Paired sampling, GBT proxy, odd-interaction screening, then constrained
/// Fourier regression on `{∅} ∪ singletons ∪ ⌈m/η⌉ odd interactions`.
///
/// When `m < d·η` the regression would be underdetermined and the proxy's
/// own Shapley values are returned instead.
pub fn oddshap(vf: &ValueFunction, cfg: &EstimatorConfig) -> Result<Attribution> {
    measured(vf, || {
        let (samples, values) = observe(vf, cfg)?;
        let d = samples.d;
        if samples.interior().next().is_none() {
            return fourier_fit(&samples, &values, BasisSpec::fourier_odd(d, &[])?);
        }
        let model = fit_gbt(&samples.coalitions, &values, &cfg.gbt)?;
        if (cfg.budget as f64) < d as f64 * cfg.eta {
            let beta = gbt_fourier(&model);
            return Ok(Attribution {
                basis_size: beta.len(),
                ..shapley_from_fourier(&beta)?
            });
        }
        let count = (cfg.budget as f64 / cfg.eta).ceil() as usize;
        let extra = select_odd_interactions(&gbt_fourier(&model), count);
        fourier_fit(&samples, &values, BasisSpec::fourier_odd(d, &extra)?)
    })
}

/// The regression stage of [`oddshap`] with an explicit interaction count
/// and no proxy-only branch. A count of zero skips the proxy entirely and
/// reproduces [`leverage_shap`] bit for bit.
pub fn oddshap_with_interactions(
    vf: &ValueFunction,
    cfg: &EstimatorConfig,
    count: usize,
) -> Result<Attribution> {
    Ok(interaction_sweep(vf, cfg, &[count])?.remove(0))
}

/// [`oddshap_with_interactions`] for several counts on one sample set and
/// one proxy fit: count `k` uses the top `k` terms of a single ranking.
/// Each result's wall time covers the shared sampling and proxy work plus
/// its own regression.
pub fn interaction_sweep(
    vf: &ValueFunction,
    cfg: &EstimatorConfig,
    counts: &[usize],
) -> Result<Vec<Attribution>> {
    let before = vf.query_count();
    let start = Instant::now();
    let (samples, values) = observe(vf, cfg)?;
    let most = counts.iter().copied().max().unwrap_or(0);
    let ranking = if most == 0 || samples.interior().next().is_none() {
        Vec::new()
    } else {
        let model = fit_gbt(&samples.coalitions, &values, &cfg.gbt)?;
        select_odd_interactions(&gbt_fourier(&model), most)
    };
    let shared = start.elapsed();
    let used = vf.query_count() - before;
    counts
        .iter()
        .map(|&k| {
            let t = Instant::now();
            let extra = &ranking[..k.min(ranking.len())];
            let mut out =
                fourier_fit(&samples, &values, BasisSpec::fourier_odd(samples.d, extra)?)?;
            out.wall_time = shared + t.elapsed();
            out.budget_used = used;
            Ok(out)
        })
        .collect()
}

/// Shapley values of the GBT proxy fitted to the sampled coalitions.
pub fn proxy_shapley(vf: &ValueFunction, cfg: &EstimatorConfig) -> Result<Attribution> {
    measured(vf, || {
        let (samples, values) = observe(vf, cfg)?;
        gbt_shapley(&fit_gbt(&samples.coalitions, &values, &cfg.gbt)?)
    })
}

/// Constrained kernel regression on the first-order basis.
pub fn leverage_shap(vf: &ValueFunction, cfg: &EstimatorConfig) -> Result<Attribution> {
    measured(vf, || {
        let (samples, values) = observe(vf, cfg)?;
        fourier_fit(&samples, &values, BasisSpec::fourier_odd(samples.d, &[])?)
    })
}

/// Constrained kernel regression on every unanimity term of order
/// `≤ cfg.poly_order`, read out through the Möbius coefficients.
pub fn polyshap(vf: &ValueFunction, cfg: &EstimatorConfig) -> Result<Attribution> {
    let d = check_dim(vf)?;
    let terms = (d as f64).powi(cfg.poly_order.min(i32::MAX as usize) as i32);
    if terms > POLY_BASIS_GUARD {
        return Err(Error::BasisTooLarge { terms });
    }
    measured(vf, || {
        let (samples, values) = observe(vf, cfg)?;
        let basis = BasisSpec::up_to_order(Basis::Mobius, d, cfg.poly_order);
        let size = basis.len();
        let problem = RegressionProblem::from_samples(&samples, &values, basis)?;
        let alpha = solve_constrained_wls(&problem)?;
        Ok(Attribution {
            basis_size: size,
            ..shapley_from_mobius(&alpha)?
        })
    })
}

/// Marginal-contribution readout `Δ_i + Σ_S c_S f(S) (1[i∈S] p_{|S|-1} −
/// 1[i∉S] p_{|S|})` over interior coalitions `S` with multipliers `c_S`,
/// where `Δ_i = p_{d-1} f([d]) − p_0 f(∅)` collects the boundary terms.
///
/// With every interior coalition at multiplier 1 this is the exact Shapley
/// value; with `c_S = 1/(n q(S))` over `n` draws from `q` it is an unbiased
/// estimate.
pub fn msr_readout(
    d: usize,
    boundary: (f64, f64),
    terms: impl IntoIterator<Item = (Coalition, f64, f64)>,
) -> Result<Vec<f64>> {
    let p: Vec<f64> = (0..d)
        .map(|ell| shapley_weight_p(ell, d))
        .collect::<Result<_>>()?;
    let (f_empty, f_full) = boundary;
    let delta = p[d - 1] * f_full - p[0] * f_empty;
    let mut phi = vec![delta; d];
    for (s, value, mult) in terms {
        let k = s.len();
        if k == 0 || k == d {
            continue;
        }
        let plus = mult * value * p[k - 1];
        let minus = mult * value * p[k];
        for (i, slot) in phi.iter_mut().enumerate() {
            if s.contains(i) {
                *slot += plus;
            } else {
                *slot -= minus;
            }
        }
    }
    Ok(phi)
}

/// Unbiased Monte Carlo estimate from `m - 2` size-uniform draws with
/// replacement, `q(S) = 1 / ((d-1) C(d, |S|))`; the boundary coalitions are
/// evaluated once and enter exactly.
pub fn msr(vf: &ValueFunction, cfg: &EstimatorConfig) -> Result<Attribution> {
    measured(vf, || {
        cfg.validate()?;
        let d = check_dim(vf)?;
        let boundary = (
            vf.evaluate(&Coalition::empty(d))?,
            vf.evaluate(&Coalition::full(d))?,
        );
        let n = if d >= 2 { cfg.budget - 2 } else { 0 };
        let mut rng = rng::stream(cfg.seed, rng::Stream::MonteCarlo);
        let mut terms = Vec::with_capacity(n);
        for _ in 0..n {
            let s = draw_size_uniform(d, &mut rng);
            let q = 1.0 / ((d - 1) as f64 * binomial(d, s.len()));
            terms.push((s, vf.evaluate(&s)?, 1.0 / (n as f64 * q)));
        }
        Ok(Attribution::new(msr_readout(d, boundary, terms)?))
    })
}

/// Averages marginal contributions over `⌊m/(d+1)⌋` uniformly random
/// player orders.
pub fn permutation_sampling(vf: &ValueFunction, cfg: &EstimatorConfig) -> Result<Attribution> {
    measured(vf, || {
        cfg.validate()?;
        let d = check_dim(vf)?;
        let rounds = cfg.budget / (d + 1);
        if rounds == 0 {
            return Err(Error::InvalidParameter(format!(
                "budget {} is below one permutation ({} queries)",
                cfg.budget,
                d + 1
            )));
        }
        let mut rng = rng::stream(cfg.seed, rng::Stream::Permutation);
        let mut order: Vec<usize> = (0..d).collect();
        let mut phi = vec![0.0; d];
        for _ in 0..rounds {
            order.shuffle(&mut rng);
            let mut s = Coalition::empty(d);
            let mut prev = vf.evaluate(&s)?;
            for &i in &order {
                s = s.with(i);
                let next = vf.evaluate(&s)?;
                phi[i] += next - prev;
                prev = next;
            }
        }
        for v in &mut phi {
            *v /= rounds as f64;
        }
        Ok(Attribution::new(phi))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    OddShap,
    LeverageShap,
    PolyShap,
    Msr,
    Permutation,
}

impl Estimator {
    pub const ALL: [Estimator; 5] = [
        Estimator::OddShap,
        Estimator::LeverageShap,
        Estimator::PolyShap,
        Estimator::Msr,
        Estimator::Permutation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::OddShap => "oddshap",
            Estimator::LeverageShap => "leverageshap",
            Estimator::PolyShap => "polyshap",
            Estimator::Msr => "msr",
            Estimator::Permutation => "permutation",
        }
    }

    /// Whether the estimator solves a boundary-constrained regression, and
    /// is therefore exactly efficient.
    pub fn is_regression(self) -> bool {
        matches!(
            self,
            Estimator::OddShap | Estimator::LeverageShap | Estimator::PolyShap
        )
    }

    pub fn run(self, vf: &ValueFunction, cfg: &EstimatorConfig) -> Result<Attribution> {
        match self {
            Estimator::OddShap => oddshap(vf, cfg),
            Estimator::LeverageShap => leverage_shap(vf, cfg),
            Estimator::PolyShap => polyshap(vf, cfg),
            Estimator::Msr => msr(vf, cfg),
            Estimator::Permutation => permutation_sampling(vf, cfg),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown estimator `{s}`")))
    }
}
