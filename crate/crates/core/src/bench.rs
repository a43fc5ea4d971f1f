//! Experiment harness: game specifications, ground truth, budget sweeps,
//! aggregation and CSV output.
//!
//! Game specifications are short strings:
//!
//! | spec | game |
//! |---|---|
//! | `additive:1,-2,0.5` | additive game with the listed weights |
//! | `planted:d=30,terms=50,orders=3,additive=true,even=0,seed=0` | random planted Fourier spectrum |
//! | `cluster:sizes=2+3,curvature=2` | `Σ_c |S ∩ c|^curvature` over contiguous clusters |
//! | `random:d=10,seed=4` | dense table with standard normal values |
//! | `majority:d=5,quota=3` | `1` iff `|S| >= quota` (quota defaults to a strict majority) |
//! | `unanimity:d=5,players=1+2+3` | `1` iff the listed players (1-based) are all present |
//! | `table:<path>` or a bare path | value-table file |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Deserialize;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::estimators::{interaction_sweep, Estimator, EstimatorConfig};
use crate::game::{
    AdditiveGame, ClusterGame, Game, GameTable, MajorityGame, PlantedFourierGame, PlantedSpec,
    UnanimityGame, ValueFunction, MAX_TABLE_D,
};
use crate::io::load_table_game;
use crate::transforms::{exact_shapley, Attribution};

/// `(1/d) Σ_i (est_i − truth_i)²`.
pub fn mse(est: &[f64], truth: &[f64]) -> Result<f64> {
    if est.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: est.len(),
        });
    }
    if est.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = est.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(sum / est.len() as f64)
}

/// Quantile by linear interpolation between order statistics (type 7):
/// position `h = (n−1) q` in the sorted sample.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn median(values: &[f64]) -> Option<f64> {
    quantile(values, 0.5)
}

/// `(Q1, Q3)`.
pub fn iqr(values: &[f64]) -> Option<(f64, f64)> {
    Some((quantile(values, 0.25)?, quantile(values, 0.75)?))
}

/// A parsed game specification.
#[derive(Debug, Clone, PartialEq)]
pub enum GameSpec {
    Additive(Vec<f64>),
    Planted { spec: PlantedSpec, seed: u64 },
    Cluster { sizes: Vec<usize>, curvature: f64 },
    Random { d: usize, seed: u64 },
    Majority { d: usize, quota: Option<usize> },
    Unanimity { d: usize, players: Vec<usize> },
    Table(PathBuf),
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_field<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| spec_err(format!("bad value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split('+').map(|v| parse_field(key, v)).collect()
}

fn required<'a>(v: Option<&'a str>, kind: &str, key: &str) -> Result<&'a str> {
    v.ok_or_else(|| spec_err(format!("`{kind}` game needs `{key}`")))
}

impl FromStr for GameSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let Some((kind, rest)) = text.split_once(':') else {
            return Ok(GameSpec::Table(PathBuf::from(text)));
        };
        if kind == "table" {
            return Ok(GameSpec::Table(PathBuf::from(rest)));
        }
        if kind == "additive" {
            let weights = rest
                .split(',')
                .map(|v| parse_field("additive", v.trim()))
                .collect::<Result<Vec<f64>>>()?;
            return Ok(GameSpec::Additive(weights));
        }
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| spec_err(format!("expected key=value, got `{item}`")))?;
            if fields.insert(k.trim(), v.trim()).is_some() {
                return Err(spec_err(format!("repeated key `{k}`")));
            }
        }
        let mut take = |key: &str| fields.remove(key);
        let spec = match kind {
            "planted" => {
                let d = parse_field("d", required(take("d"), kind, "d")?)?;
                let mut spec = PlantedSpec::new(
                    d,
                    parse_field("terms", required(take("terms"), kind, "terms")?)?,
                );
                if let Some(v) = take("orders") {
                    spec.orders = parse_list("orders", v)?;
                }
                if let Some(v) = take("additive") {
                    spec.additive = parse_field("additive", v)?;
                }
                if let Some(v) = take("even") {
                    spec.even_terms = parse_field("even", v)?;
                }
                let seed = take("seed")
                    .map(|v| parse_field("seed", v))
                    .transpose()?
                    .unwrap_or(0);
                GameSpec::Planted { spec, seed }
            }
            "cluster" => GameSpec::Cluster {
                sizes: parse_list("sizes", required(take("sizes"), kind, "sizes")?)?,
                curvature: parse_field(
                    "curvature",
                    required(take("curvature"), kind, "curvature")?,
                )?,
            },
            "random" => GameSpec::Random {
                d: parse_field("d", required(take("d"), kind, "d")?)?,
                seed: take("seed")
                    .map(|v| parse_field("seed", v))
                    .transpose()?
                    .unwrap_or(0),
            },
            "majority" => GameSpec::Majority {
                d: parse_field("d", required(take("d"), kind, "d")?)?,
                quota: take("quota").map(|v| parse_field("quota", v)).transpose()?,
            },
            "unanimity" => GameSpec::Unanimity {
                d: parse_field("d", required(take("d"), kind, "d")?)?,
                players: parse_list("players", required(take("players"), kind, "players")?)?,
            },
            other => return Err(spec_err(format!("unknown game kind `{other}`"))),
        };
        if let Some(key) = fields.keys().next() {
            return Err(spec_err(format!("unknown key `{key}` for `{kind}` game")));
        }
        Ok(spec)
    }
}

impl GameSpec {
    pub fn build(&self) -> Result<Arc<dyn Game>> {
        Ok(match self {
            GameSpec::Additive(w) => Arc::new(AdditiveGame::new(w.clone())?),
            GameSpec::Planted { spec, seed } => Arc::new(PlantedFourierGame::random(spec, *seed)?),
            GameSpec::Cluster { sizes, curvature } => {
                Arc::new(ClusterGame::new(sizes.iter().sum(), sizes, *curvature)?)
            }
            GameSpec::Random { d, seed } => Arc::new(GameTable::random(*d, *seed)?),
            GameSpec::Majority { d, quota } => {
                Arc::new(MajorityGame::new(*d, quota.unwrap_or(d / 2 + 1))?)
            }
            GameSpec::Unanimity { d, players } => {
                if players.contains(&0) {
                    return Err(spec_err("unanimity players are 1-based"));
                }
                let zero_based: Vec<usize> = players.iter().map(|p| p - 1).collect();
                Arc::new(UnanimityGame::new(Coalition::from_players(
                    *d,
                    &zero_based,
                )?))
            }
            GameSpec::Table(path) => Arc::new(load_table_game(path)?),
        })
    }
}

/// Exact Shapley values: closed form when the game has one, otherwise brute
/// force over the full table for `d <= 24`.
pub fn ground_truth(game: &dyn Game) -> Result<Vec<f64>> {
    if let Some(phi) = game.closed_form_shapley() {
        return Ok(phi);
    }
    if game.d() <= MAX_TABLE_D {
        return Ok(exact_shapley(&GameTable::from_game(game)?)?.phi);
    }
    Err(Error::GroundTruthUnavailable(format!(
        "no closed form and d={} exceeds {MAX_TABLE_D}",
        game.d()
    )))
}

/// One estimator entry of an experiment file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorEntry {
    pub name: Estimator,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub paired: Option<bool>,
}

impl EstimatorEntry {
    pub fn new(name: Estimator) -> Self {
        EstimatorEntry {
            name,
            eta: None,
            order: None,
            paired: None,
        }
    }

    /// Estimator name plus any non-default settings, e.g. `polyshap[k=3]`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(k) = self.order {
            parts.push(format!("k={k}"));
        }
        if let Some(eta) = self.eta {
            parts.push(format!("eta={eta}"));
        }
        if self.paired == Some(false) {
            parts.push("unpaired".to_string());
        }
        if parts.is_empty() {
            self.name.to_string()
        } else {
            format!("{}[{}]", self.name, parts.join(";"))
        }
    }

    pub fn config(&self, budget: usize, seed: u64) -> EstimatorConfig {
        let mut cfg = EstimatorConfig::new(budget, seed);
        if let Some(eta) = self.eta {
            cfg.eta = eta;
        }
        if let Some(k) = self.order {
            cfg.poly_order = k;
        }
        if let Some(p) = self.paired {
            cfg.paired = p;
        }
        cfg
    }
}

/// An experiment: one game, several estimators, a budget grid and a number
/// of seeds (`0..instances`).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: String,
    pub estimators: Vec<EstimatorEntry>,
    pub budgets: Vec<usize>,
    pub instances: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| spec_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances == 0 {
            return Err(spec_err("instances must be at least 1"));
        }
        if self.budgets.is_empty() || self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(spec_err("budgets must be non-empty and strictly ascending"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub estimator: String,
    pub game: String,
    pub d: usize,
    pub m: usize,
    pub seed: u64,
    /// `None` when no ground truth is available.
    pub mse: Option<f64>,
    pub runtime_ms: f64,
    pub budget_used: usize,
    pub phi: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Record wall time; when off, runtime is written as zero so repeated
    /// runs produce identical files.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { timing: true }
    }
}

fn row(
    label: String,
    game: &str,
    m: usize,
    seed: u64,
    out: &Attribution,
    truth: Option<&[f64]>,
    opts: RunOptions,
) -> Result<ResultRow> {
    Ok(ResultRow {
        estimator: label,
        game: game.to_string(),
        d: out.d,
        m,
        seed,
        mse: truth.map(|t| mse(&out.phi, t)).transpose()?,
        runtime_ms: if opts.timing {
            out.wall_time.as_secs_f64() * 1e3
        } else {
            0.0
        },
        budget_used: out.budget_used,
        phi: out.phi.clone(),
    })
}

/// Runs one estimator on a fresh budget-capped wrapper around `game`.
pub fn run_single(
    game: &Arc<dyn Game>,
    game_id: &str,
    entry: &EstimatorEntry,
    m: usize,
    seed: u64,
    truth: Option<&[f64]>,
    opts: RunOptions,
) -> Result<ResultRow> {
    let vf = ValueFunction::with_budget(game.clone(), m);
    let out = entry.name.run(&vf, &entry.config(m, seed))?;
    row(entry.label(), game_id, m, seed, &out, truth, opts)
}

/// Every (estimator, budget, seed) cell of the experiment, in that nesting
/// order. Cells run on the rayon pool; the output order does not depend on
/// scheduling.
pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let game = cfg.game.parse::<GameSpec>()?.build()?;
    let truth = ground_truth(game.as_ref())?;
    let mut cells = Vec::new();
    for entry in &cfg.estimators {
        for &m in &cfg.budgets {
            for seed in 0..cfg.instances {
                cells.push((entry, m, seed));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(entry, m, seed)| run_single(&game, &cfg.game, entry, m, seed, Some(&truth), opts))
        .collect()
}

/// Median and interquartile range of the MSE over seeds, per
/// (estimator, budget) cell, in first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub estimator: String,
    pub m: usize,
    pub runs: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut order: Vec<(String, usize)> = Vec::new();
    let mut cells: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for r in rows {
        let Some(e) = r.mse else { continue };
        let key = (r.estimator.clone(), r.m);
        if !cells.contains_key(&key) {
            order.push(key.clone());
        }
        cells.entry(key).or_default().push(e);
    }
    order
        .into_iter()
        .map(|key| {
            let v = &cells[&key];
            let (q1, q3) = iqr(v).expect("non-empty");
            SummaryRow {
                estimator: key.0,
                m: key.1,
                runs: v.len(),
                median: median(v).expect("non-empty"),
                q1,
                q3,
            }
        })
        .collect()
}

/// One seed of the interaction-count ablation.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub count: usize,
    pub m: usize,
    pub seed: u64,
    pub mse_oddshap: f64,
    pub mse_leverageshap: f64,
}

impl AblationRow {
    pub fn ratio(&self) -> f64 {
        self.mse_oddshap / self.mse_leverageshap
    }
}

/// Sweeps the number of odd interactions directly. For each budget and
/// seed the samples and the proxy are shared across counts, and the
/// baseline is the same pipeline with no interactions.
pub fn ablate_interactions(cfg: &ExperimentConfig, counts: &[usize]) -> Result<Vec<AblationRow>> {
    cfg.validate()?;
    let game = cfg.game.parse::<GameSpec>()?.build()?;
    let truth = ground_truth(game.as_ref())?;
    let mut grid = vec![0];
    grid.extend_from_slice(counts);
    let cells: Vec<(usize, u64)> = cfg
        .budgets
        .iter()
        .flat_map(|&m| (0..cfg.instances).map(move |s| (m, s)))
        .collect();
    let per_cell: Vec<Vec<AblationRow>> = cells
        .into_par_iter()
        .map(|(m, seed)| {
            let vf = ValueFunction::with_budget(game.clone(), m);
            let outs = interaction_sweep(&vf, &EstimatorConfig::new(m, seed), &grid)?;
            let errors = outs
                .iter()
                .map(|o| mse(&o.phi, &truth))
                .collect::<Result<Vec<f64>>>()?;
            Ok(counts
                .iter()
                .zip(&errors[1..])
                .map(|(&count, &e)| AblationRow {
                    count,
                    m,
                    seed,
                    mse_oddshap: e,
                    mse_leverageshap: errors[0],
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

/// Median ratio per `(m, count)`, ordered by budget then count.
pub fn ablation_medians(rows: &[AblationRow]) -> Vec<(usize, usize, f64)> {
    let mut cells: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for r in rows {
        cells.entry((r.m, r.count)).or_default().push(r.ratio());
    }
    cells
        .into_iter()
        .map(|((m, count), v)| (m, count, median(&v).expect("non-empty")))
        .collect()
}

/// Seventeen significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_text(header: Vec<String>, records: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(&header).map_err(to_err)?;
    for r in records {
        w.write_record(&r).map_err(to_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Result rows as CSV, optionally with `phi_1..phi_d` columns.
pub fn results_csv(rows: &[ResultRow], emit_values: bool) -> Result<String> {
    let mut header: Vec<String> = "estimator,game,d,m,seed,mse,runtime_ms,budget_used"
        .split(',')
        .map(String::from)
        .collect();
    let width = rows.iter().map(|r| r.phi.len()).max().unwrap_or(0);
    if emit_values {
        header.extend((1..=width).map(|i| format!("phi_{i}")));
    }
    let records = rows
        .iter()
        .map(|r| {
            let mut rec = vec![
                r.estimator.clone(),
                r.game.clone(),
                r.d.to_string(),
                r.m.to_string(),
                r.seed.to_string(),
                r.mse.map(fmt_float).unwrap_or_default(),
                fmt_float(r.runtime_ms),
                r.budget_used.to_string(),
            ];
            if emit_values {
                rec.extend(r.phi.iter().map(|&v| fmt_float(v)));
                rec.resize(8 + width, String::new());
            }
            rec
        })
        .collect();
    csv_text(header, records)
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    let header = "estimator,m,runs,median_mse,q1_mse,q3_mse"
        .split(',')
        .map(String::from)
        .collect();
    let records = rows
        .iter()
        .map(|r| {
            vec![
                r.estimator.clone(),
                r.m.to_string(),
                r.runs.to_string(),
                fmt_float(r.median),
                fmt_float(r.q1),
                fmt_float(r.q3),
            ]
        })
        .collect();
    csv_text(header, records)
}

pub fn ablation_csv(rows: &[AblationRow]) -> Result<String> {
    let header = "count,m,seed,mse_oddshap,mse_leverageshap,ratio"
        .split(',')
        .map(String::from)
        .collect();
    let records = rows
        .iter()
        .map(|r| {
            vec![
                r.count.to_string(),
                r.m.to_string(),
                r.seed.to_string(),
                fmt_float(r.mse_oddshap),
                fmt_float(r.mse_leverageshap),
                fmt_float(r.ratio()),
            ]
        })
        .collect();
    csv_text(header, records)
}

/// `player,phi` with 1-based players.
pub fn truth_csv(phi: &[f64]) -> String {
    let mut out = String::from("player,phi\n");
    for (i, v) in phi.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, fmt_float(*v)).expect("writing to String");
    }
    out
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.5, 2.5], &[1.5, 2.5]).unwrap(), 0.0);
        assert!((mse(&[1.0, 1.0], &[1.5, 2.5]).unwrap() - 1.25).abs() < 1e-15);
        let a = 3.0;
        let scaled = mse(&[a * 1.0, a * 1.0], &[a * 1.5, a * 2.5]).unwrap();
        assert!((scaled - a * a * 1.25).abs() < 1e-12);
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn type7_quantiles_on_five_points() {
        let v = [7.0, 1.0, 3.0, 9.0, 5.0];
        assert_eq!(median(&v), Some(5.0));
        assert_eq!(iqr(&v), Some((3.0, 7.0)));
        assert_eq!(quantile(&v, 0.1), Some(1.8));
        assert_eq!(quantile(&v, 0.0), Some(1.0));
        assert_eq!(quantile(&v, 1.0), Some(9.0));
        assert_eq!(median(&[1.0, 2.0, 4.0, 8.0]), Some(3.0));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn game_specs_parse() {
        assert_eq!(
            "additive:1,-2,0.5".parse::<GameSpec>().unwrap(),
            GameSpec::Additive(vec![1.0, -2.0, 0.5])
        );
        let planted: GameSpec = "planted:d=30,terms=50,orders=3,additive=true,seed=7"
            .parse()
            .unwrap();
        let GameSpec::Planted { spec, seed } = planted else {
            panic!()
        };
        assert_eq!((spec.d, spec.interactions, seed), (30, 50, 7));
        assert_eq!(spec.orders, vec![3]);
        assert!(spec.additive);
        assert_eq!(
            "cluster:sizes=2+2,curvature=2".parse::<GameSpec>().unwrap(),
            GameSpec::Cluster {
                sizes: vec![2, 2],
                curvature: 2.0
            }
        );
        assert_eq!(
            "games/x.txt".parse::<GameSpec>().unwrap(),
            GameSpec::Table(PathBuf::from("games/x.txt"))
        );
        assert!("random:d=4,colour=red".parse::<GameSpec>().is_err());
        assert!("planted:d=4".parse::<GameSpec>().is_err());
        assert!("warp:d=4".parse::<GameSpec>().is_err());
    }

    #[test]
    fn ground_truth_sources() {
        let additive = "additive:1,2".parse::<GameSpec>().unwrap().build().unwrap();
        assert_eq!(ground_truth(additive.as_ref()).unwrap(), vec![1.0, 2.0]);
        let table = "random:d=5,seed=1"
            .parse::<GameSpec>()
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(ground_truth(table.as_ref()).unwrap().len(), 5);
        let big = PlantedFourierGame::new(40, vec![]).unwrap();
        assert_eq!(ground_truth(&big).unwrap(), vec![0.0; 40]);
        let maj = "majority:d=3".parse::<GameSpec>().unwrap().build().unwrap();
        for v in ground_truth(maj.as_ref()).unwrap() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    struct Opaque(usize);
    impl Game for Opaque {
        fn d(&self) -> usize {
            self.0
        }
        fn value(&self, s: &Coalition) -> f64 {
            s.len() as f64
        }
    }

    #[test]
    fn truth_unavailable_for_large_opaque_games() {
        assert!(matches!(
            ground_truth(&Opaque(30)),
            Err(Error::GroundTruthUnavailable(_))
        ));
        assert_eq!(ground_truth(&Opaque(4)).unwrap().len(), 4);
    }

    #[test]
    fn config_rejects_unknown_keys_and_unsorted_budgets() {
        let ok = r#"{"game":"random:d=6,seed=1","estimators":[{"name":"oddshap","eta":5}],"budgets":[20,64],"instances":2}"#;
        let cfg = ExperimentConfig::from_json(ok).unwrap();
        assert_eq!(cfg.estimators[0].eta, Some(5.0));
        let unknown =
            r#"{"game":"random:d=6","estimators":[],"budgets":[20],"instances":1,"colour":1}"#;
        assert!(ExperimentConfig::from_json(unknown).is_err());
        let nested = r#"{"game":"random:d=6","estimators":[{"name":"msr","k":2}],"budgets":[20],"instances":1}"#;
        assert!(ExperimentConfig::from_json(nested).is_err());
        let unsorted = r#"{"game":"random:d=6","estimators":[],"budgets":[64,20],"instances":1}"#;
        assert!(ExperimentConfig::from_json(unsorted).is_err());
        let zero = r#"{"game":"random:d=6","estimators":[],"budgets":[20],"instances":0}"#;
        assert!(ExperimentConfig::from_json(zero).is_err());
    }

    fn small_config(budgets: Vec<usize>) -> ExperimentConfig {
        ExperimentConfig {
            game: "random:d=6,seed=3".into(),
            estimators: vec![
                EstimatorEntry::new(Estimator::OddShap),
                EstimatorEntry::new(Estimator::LeverageShap),
                EstimatorEntry {
                    order: Some(3),
                    ..EstimatorEntry::new(Estimator::PolyShap)
                },
                EstimatorEntry::new(Estimator::Msr),
                EstimatorEntry::new(Estimator::Permutation),
            ],
            budgets,
            instances: 3,
            output: None,
        }
    }

    #[test]
    fn exhaustive_budget_rows_are_exact() {
        let rows = run_experiment(&small_config(vec![64]), RunOptions::default()).unwrap();
        assert_eq!(rows.len(), 15);
        for r in &rows {
            assert!(r.budget_used <= r.m);
            if r.estimator.starts_with("oddshap")
                || r.estimator.starts_with("leverageshap")
                || r.estimator.starts_with("polyshap")
            {
                assert!(r.mse.unwrap() < 1e-12, "{} {:?}", r.estimator, r.mse);
            }
        }
        assert_eq!(rows[6].estimator, "polyshap[k=3]");
    }

    #[test]
    fn untimed_runs_are_byte_identical() {
        let opts = RunOptions { timing: false };
        let a = results_csv(
            &run_experiment(&small_config(vec![20, 40]), opts).unwrap(),
            true,
        )
        .unwrap();
        let b = results_csv(
            &run_experiment(&small_config(vec![20, 40]), opts).unwrap(),
            true,
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("estimator,game,d,m,seed,mse,runtime_ms,budget_used,phi_1,"));
    }

    #[test]
    fn summary_uses_median_and_quartiles() {
        let rows = run_experiment(&small_config(vec![20, 40]), RunOptions::default()).unwrap();
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 10);
        for s in &summary {
            assert_eq!(s.runs, 3);
            assert!(s.q1 <= s.median && s.median <= s.q3);
        }
    }

    #[test]
    fn ablation_count_zero_has_unit_ratio() {
        let cfg = ExperimentConfig {
            game: "planted:d=8,terms=6,orders=3,additive=true,seed=2".into(),
            estimators: vec![],
            budgets: vec![120],
            instances: 3,
            output: None,
        };
        let rows = ablate_interactions(&cfg, &[0, 2, 10]).unwrap();
        assert_eq!(rows.len(), 9);
        for r in &rows {
            assert!(r.ratio().is_finite() && r.ratio() > 0.0);
            if r.count == 0 {
                assert_eq!(r.ratio(), 1.0);
            }
        }
        assert_eq!(ablation_medians(&rows).len(), 3);
    }

    #[test]
    fn ablation_curve_turns_up_when_overparameterized() {
        let cfg = ExperimentConfig {
            game: "planted:d=16,terms=15,orders=3,additive=true,seed=5".into(),
            estimators: vec![],
            budgets: vec![400],
            instances: 5,
            output: None,
        };
        let medians: Vec<f64> =
            ablation_medians(&ablate_interactions(&cfg, &[1, 10, 40, 400]).unwrap())
                .into_iter()
                .map(|(_, _, r)| r)
                .collect();
        let best = medians.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(best < medians[3], "{medians:?}");
        assert!(best < medians[0], "{medians:?}");
    }

    #[test]
    fn float_format_has_seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(-2.0), "-2.0000000000000000e0");
        let text = results_csv(
            &[ResultRow {
                estimator: "msr".into(),
                game: "additive:1,2".into(),
                d: 2,
                m: 4,
                seed: 0,
                mse: None,
                runtime_ms: 0.0,
                budget_used: 4,
                phi: vec![1.0, 2.0],
            }],
            false,
        )
        .unwrap();
        assert_eq!(
            text,
            "estimator,game,d,m,seed,mse,runtime_ms,budget_used\nmsr,\"additive:1,2\",2,4,0,,0.0000000000000000e0,4\n"
        );
    }
}
