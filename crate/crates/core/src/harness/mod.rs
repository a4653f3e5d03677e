//! Replication engine for the five simulation studies.
//!
//! Each study sweeps a grid of settings and, per setting and network size,
//! repeatedly draws an observed graph from the true model and checks which
//! candidate [`select_model`](crate::pipeline::select_model) picks. Every
//! replicate derives its seed from the cell it belongs to, so results do not
//! depend on scheduling or on which other cells are run.

mod output;

pub use output::{emit_outputs, render_svg, table_csv, CSV_HEADER};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{ClassifierKind, ClassifierParams, FeatureConfig};
use crate::models::{GwespSpec, McmcConfig, ModelSpec, WeightVariant};
use crate::pipeline::{name_stream, select_model_with, SelectOptions};
use crate::{rng, Error, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Stream of the observed draw inside a replicate.
const OBS_STREAM: u64 = 0;
/// Stream of the selection run inside a replicate.
const SELECT_STREAM: u64 = 1;

/// Classification rate with a Wilson 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub study: u8,
    pub setting: String,
    pub n: usize,
    pub classifier: ClassifierKind,
    pub successes: usize,
    pub trials: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Horizontal position in the study chart.
    pub x: f64,
    /// Curve this row belongs to in the study chart.
    pub series: String,
}

/// Wilson score interval `(low, high)` for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let high = if successes == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    (low, high)
}

impl RateEstimate {
    fn new(cell: &Cell, classifier: ClassifierKind, successes: usize, trials: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        RateEstimate {
            study: cell.study,
            setting: cell.setting.clone(),
            n: cell.n,
            classifier,
            successes,
            trials,
            rate: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            x: cell.x,
            series: cell.series.clone(),
        }
    }
}

/// Settings for one study run. Unset grids fall back to the desk-scale
/// defaults of [`StudyConfig::desk`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: u8,
    pub seed: u64,
    /// θ₂ values (studies 1, 2, 5) or σ² values (study 4).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    /// Latent dimensions: the candidate menu in study 3, the swept
    /// dimension in study 4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    /// Classifiers compared in study 5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifiers: Option<Vec<ClassifierKind>>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    /// Classifier for studies 1 to 4.
    #[serde(default)]
    pub classifier: ClassifierKind,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub params: ClassifierParams,
    /// Baseline density parameter (θ₁, or θ for the latent models).
    #[serde(default = "default_theta1")]
    pub theta1: f64,
    /// GWESP decay parameter for studies 1 and 5.
    #[serde(default = "default_theta3")]
    pub theta3: f64,
    #[serde(default)]
    pub weight_variant: WeightVariant,
    #[serde(default)]
    pub mcmc: McmcConfig,
}

fn default_replicates() -> usize {
    200
}
fn default_k() -> usize {
    100
}
fn default_theta1() -> f64 {
    -2.5
}
fn default_theta3() -> f64 {
    1.0
}

fn tenths(from: u32, to: u32) -> Vec<f64> {
    (from..=to).map(|i| f64::from(i) / 10.0).collect()
}

impl StudyConfig {
    /// Desk-scale configuration for `study` with every optional field unset.
    pub fn desk(study: u8, seed: u64) -> Self {
        StudyConfig {
            study,
            seed,
            grid: None,
            sizes: None,
            dims: None,
            classifiers: None,
            replicates: default_replicates(),
            k: default_k(),
            classifier: ClassifierKind::default(),
            features: FeatureConfig::default(),
            params: ClassifierParams::default(),
            theta1: default_theta1(),
            theta3: default_theta3(),
            weight_variant: WeightVariant::default(),
            mcmc: McmcConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: StudyConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Vec<f64> {
        self.grid.clone().unwrap_or_else(|| match self.study {
            1 | 5 => tenths(0, 5),
            _ => tenths(1, 10),
        })
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sizes.clone().unwrap_or_else(|| match self.study {
            1 => vec![25, 50, 75, 100, 200],
            2 => vec![50, 100, 150, 200],
            3 => vec![50, 100, 150, 200, 250],
            4 => vec![50, 100],
            _ => vec![25, 50, 75, 100],
        })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.dims.clone().unwrap_or_else(|| match self.study {
            3 => vec![1, 2, 3, 4, 5],
            _ => vec![1, 2, 3],
        })
    }

    pub fn classifiers(&self) -> Vec<ClassifierKind> {
        self.classifiers.clone().unwrap_or_else(|| match self.study {
            5 => vec![ClassifierKind::Gbt, ClassifierKind::RandomForest, ClassifierKind::GaussianNb],
            _ => vec![self.classifier],
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(1..=5).contains(&self.study) {
            return bad(format!("unknown study id {}", self.study));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if self.grid.as_ref().is_some_and(Vec::is_empty) {
            return bad("grid must not be empty".into());
        }
        if self.grid().iter().any(|v| !v.is_finite()) {
            return bad("grid values must be finite".into());
        }
        if self.study == 3 && self.grid.is_some() {
            return bad("study 3 sweeps `dims`, not `grid`".into());
        }
        if self.study == 4 && self.grid().iter().any(|&s| s <= 0.0) {
            return bad("study 4 grid holds variances, which must be positive".into());
        }
        if self.sizes.as_ref().is_some_and(Vec::is_empty) {
            return bad("sizes must not be empty".into());
        }
        if self.sizes().iter().any(|&n| n < 2) {
            return bad("network sizes must be at least 2".into());
        }
        if self.dims.as_ref().is_some_and(Vec::is_empty) || self.dims().contains(&0) {
            return bad("dims must be a non-empty list of positive dimensions".into());
        }
        if self.study == 3 && self.dims().len() < 2 {
            return bad("study 3 needs at least two candidate dimensions".into());
        }
        if self.classifiers.as_ref().is_some_and(Vec::is_empty) {
            return bad("classifiers must not be empty".into());
        }
        if self.classifiers.is_some() && self.study != 5 {
            return bad("`classifiers` only applies to study 5; use `classifier`".into());
        }
        self.features.validate()
    }

    fn options(&self, seed: u64) -> SelectOptions {
        SelectOptions {
            k: self.k,
            seed,
            features: self.features.clone(),
            classifier: self.classifier,
            params: self.params.clone(),
        }
    }

    fn gwesp(&self, n: usize, theta2: f64) -> ModelSpec {
        ModelSpec::GwespErgm(GwespSpec {
            n,
            theta1: self.theta1,
            theta2,
            theta3: self.theta3,
            weight_variant: self.weight_variant,
            mcmc: self.mcmc.clone(),
        })
    }
}

/// One (setting, n) cell of a study.
struct Cell {
    study: u8,
    setting: String,
    n: usize,
    x: f64,
    series: String,
    true_model: ModelSpec,
    candidates: Vec<(String, ModelSpec)>,
}

impl Cell {
    fn seed(&self, master: u64) -> u64 {
        rng::split(rng::split(master, name_stream(&self.setting)), self.n as u64)
    }
}

/// Predicted candidate index per classifier (outer) and replicate (inner).
pub fn replicate_predictions(
    true_model: &ModelSpec,
    candidates: &[(String, ModelSpec)],
    opts: &SelectOptions,
    kinds: &[ClassifierKind],
    replicates: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    let per_rep: Vec<Vec<usize>> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = rng::split(seed, rep as u64);
            let observed = true_model.sample_seeded(rng::split(rep_seed, OBS_STREAM))?;
            let o = SelectOptions { seed: rng::split(rep_seed, SELECT_STREAM), ..opts.clone() };
            let reports = select_model_with(&observed, candidates, &o, kinds)?;
            Ok(reports.iter().map(|r| r.predicted).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..kinds.len()).map(|c| per_rep.iter().map(|p| p[c]).collect()).collect())
}

/// Fraction of `replicates` in which the candidate at `true_index` is
/// selected for graphs drawn from `true_model`.
pub fn run_replications(
    true_model: &ModelSpec,
    candidates: &[(String, ModelSpec)],
    true_index: usize,
    opts: &SelectOptions,
    replicates: usize,
    seed: u64,
) -> Result<RateEstimate> {
    if replicates == 0 {
        return Err(Error::Config("replicates must be at least 1".into()));
    }
    if true_index >= candidates.len() {
        return Err(Error::InvalidArgument(format!("true index {true_index} out of range")));
    }
    let preds = replicate_predictions(true_model, candidates, opts, &[opts.classifier], replicates, seed)?;
    let successes = preds[0].iter().filter(|&&p| p == true_index).count();
    let cell = Cell {
        study: 0,
        setting: candidates[true_index].0.clone(),
        n: true_model.n(),
        x: 0.0,
        series: String::new(),
        true_model: true_model.clone(),
        candidates: Vec::new(),
    };
    Ok(RateEstimate::new(&cell, opts.classifier, successes, replicates))
}

fn cells(cfg: &StudyConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    let study = cfg.study;
    for n in cfg.sizes() {
        match study {
            1 | 5 => {
                for theta2 in cfg.grid() {
                    let truth = cfg.gwesp(n, theta2);
                    out.push(Cell {
                        study,
                        setting: format!("theta2={theta2}"),
                        n,
                        x: theta2,
                        series: format!("n={n}"),
                        candidates: vec![
                            ("gwesp".into(), truth.clone()),
                            ("bernoulli".into(), ModelSpec::bernoulli(n, cfg.theta1)),
                        ],
                        true_model: truth,
                    });
                }
            }
            2 => {
                for theta2 in cfg.grid() {
                    let truth = ModelSpec::directed_dyad(n, cfg.theta1, theta2);
                    out.push(Cell {
                        study,
                        setting: format!("theta2={theta2}"),
                        n,
                        x: theta2,
                        series: format!("n={n}"),
                        candidates: vec![
                            ("reciprocity".into(), truth.clone()),
                            ("density".into(), ModelSpec::directed_dyad(n, cfg.theta1, 0.0)),
                        ],
                        true_model: truth,
                    });
                }
            }
            3 => {
                let menu: Vec<(String, ModelSpec)> = cfg
                    .dims()
                    .iter()
                    .map(|&d| (format!("k={d}"), ModelSpec::lpm_euclidean(n, cfg.theta1, d, 1.0)))
                    .collect();
                for (name, truth) in &menu {
                    out.push(Cell {
                        study,
                        setting: format!("true_{name}"),
                        n,
                        x: 0.0,
                        series: format!("n={n};true_{name}"),
                        candidates: menu.clone(),
                        true_model: truth.clone(),
                    });
                }
            }
            _ => {
                for dim in cfg.dims() {
                    for sigma2 in cfg.grid() {
                        let truth = ModelSpec::lpm_euclidean(n, cfg.theta1, dim, sigma2);
                        out.push(Cell {
                            study,
                            setting: format!("dim={dim};sigma2={sigma2}"),
                            n,
                            x: sigma2,
                            series: format!("n={n};dim={dim}"),
                            candidates: vec![
                                ("euclidean".into(), truth.clone()),
                                ("bilinear".into(), ModelSpec::lpm_bilinear(n, cfg.theta1, dim, sigma2)),
                            ],
                            true_model: truth,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Runs every cell of the study and returns one row per cell and
/// classifier. Study 3 reports the full selection matrix: one row per
/// (true dimension, selected dimension) pair.
pub fn run_study(cfg: &StudyConfig) -> Result<Vec<RateEstimate>> {
    cfg.validate()?;
    let kinds = cfg.classifiers();
    let mut table = Vec::new();
    for cell in cells(cfg) {
        let seed = cell.seed(cfg.seed);
        let opts = cfg.options(seed);
        let preds =
            replicate_predictions(&cell.true_model, &cell.candidates, &opts, &kinds, cfg.replicates, seed)?;
        if cfg.study == 3 {
            for (j, (name, _)) in cell.candidates.iter().enumerate() {
                let hits = preds[0].iter().filter(|&&p| p == j).count();
                let selected: usize = name[2..].parse().expect("menu names are k=<dim>");
                let sub = Cell {
                    setting: format!("{};selected_{name}", cell.setting),
                    x: selected as f64,
                    ..cell.shallow()
                };
                table.push(RateEstimate::new(&sub, kinds[0], hits, cfg.replicates));
            }
        } else {
            for (c, &kind) in kinds.iter().enumerate() {
                let hits = preds[c].iter().filter(|&&p| p == 0).count();
                let mut row = RateEstimate::new(&cell, kind, hits, cfg.replicates);
                if cfg.study == 5 {
                    row.series = format!("{};{kind}", cell.series);
                }
                table.push(row);
            }
        }
    }
    Ok(table)
}

impl Cell {
    fn shallow(&self) -> Cell {
        Cell {
            study: self.study,
            setting: self.setting.clone(),
            n: self.n,
            x: self.x,
            series: self.series.clone(),
            true_model: self.true_model.clone(),
            candidates: Vec::new(),
        }
    }
}
