//! End-to-end model selection: simulate every candidate, reduce each draw to
//! its spectrum, train a classifier on the stacked spectra and score the
//! observed graph.
//!
//! Candidates are processed in name order internally and every candidate's
//! random stream is derived from its name, so reordering the candidate list
//! only reorders the report.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::classify::{build_features, train, ClassifierKind, ClassifierParams, FeatureConfig, ScoreVector};
use crate::models::ModelSpec;
use crate::spectra::{spectrum, Spectrum};
use crate::{rng, Error, Graph, Result};

/// Stream reserved for classifier training randomness.
const TRAIN_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectOptions {
    /// Simulations per candidate.
    pub k: usize,
    pub seed: u64,
    pub features: FeatureConfig,
    pub classifier: ClassifierKind,
    pub params: ClassifierParams,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions {
            k: 100,
            seed: 0,
            features: FeatureConfig::default(),
            classifier: ClassifierKind::default(),
            params: ClassifierParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub in_sample_accuracy: f64,
    pub oob_accuracy: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub predicted: usize,
    pub model_names: Vec<String>,
    pub scores: ScoreVector,
    pub k: usize,
    pub classifier: ClassifierKind,
    pub seed: u64,
    pub diagnostics: Diagnostics,
    /// Not part of the JSON report, which must be reproducible.
    pub wall_time: Duration,
}

impl SelectionReport {
    pub fn predicted_name(&self) -> &str {
        &self.model_names[self.predicted]
    }

    /// Report as JSON with a fixed key order.
    pub fn to_json_value(&self) -> Value {
        let per_model = |v: &[f64]| -> Value {
            let m: Map<String, Value> =
                self.model_names.iter().cloned().zip(v.iter().map(|&x| json!(x))).collect();
            Value::Object(m)
        };
        json!({
            "predicted": self.predicted_name(),
            "scores": per_model(&self.scores.s),
            "normalized": per_model(&self.scores.s_norm),
            "K": self.k,
            "seed": self.seed,
            "classifier": self.classifier.as_str(),
            "diagnostics": {
                "in_sample_accuracy": self.diagnostics.in_sample_accuracy,
                "oob_accuracy": self.diagnostics.oob_accuracy,
                "warnings": self.diagnostics.warnings,
            },
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes");
        s.push('\n');
        s
    }

    /// Models ranked by normalized score, best first, one per line.
    pub fn summary(&self) -> String {
        let mut order: Vec<usize> = (0..self.model_names.len()).collect();
        order.sort_by(|&a, &b| self.scores.s[b].total_cmp(&self.scores.s[a]).then(a.cmp(&b)));
        let width = self.model_names.iter().map(String::len).max().unwrap_or(0).max(5);
        let mut out = format!("{:<width$}  {:>10}  {:>10}\n", "model", "score", "normalized");
        for i in order {
            out += &format!(
                "{:<width$}  {:>10.6}  {:>10.6}{}\n",
                self.model_names[i],
                self.scores.s[i],
                self.scores.s_norm[i],
                if i == self.predicted { "  *" } else { "" }
            );
        }
        out
    }
}

/// FNV-1a, used to give each candidate a stream that depends only on its
/// name.
pub(crate) fn name_stream(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

fn check_inputs(observed: &Graph, candidates: &[(String, ModelSpec)], k: usize) -> Result<()> {
    if candidates.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 candidate models, got {}",
            candidates.len()
        )));
    }
    if k < 2 {
        return Err(Error::InvalidArgument(format!("K must be at least 2, got {k}")));
    }
    let mut names: Vec<&str> = candidates.iter().map(|(n, _)| n.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(format!("duplicate candidate name {:?}", w[0])));
    }
    for (name, spec) in candidates {
        spec.validate().map_err(|e| Error::InvalidModel(format!("{name}: {e}")))?;
        if spec.n() != observed.n() {
            return Err(Error::InvalidArgument(format!(
                "candidate {name:?} has n = {} but the observed graph has n = {}",
                spec.n(),
                observed.n()
            )));
        }
        if spec.is_directed() != observed.is_directed() {
            return Err(Error::InvalidArgument(format!(
                "candidate {name:?} is {} but the observed graph is {}",
                if spec.is_directed() { "directed" } else { "undirected" },
                if observed.is_directed() { "directed" } else { "undirected" },
            )));
        }
    }
    Ok(())
}

/// Seed of draw `k` from the candidate called `name`.
pub fn draw_seed(seed: u64, name: &str, k: usize) -> u64 {
    rng::split(rng::split(seed, name_stream(name)), k as u64)
}

/// `k` spectra per candidate, labelled by candidate index, in
/// (candidate, draw) order.
pub fn simulate_spectra(
    candidates: &[(String, ModelSpec)],
    k: usize,
    seed: u64,
) -> Result<Vec<(usize, Spectrum)>> {
    (0..candidates.len() * k)
        .into_par_iter()
        .map(|job| {
            let (m, draw) = (job / k, job % k);
            let (name, spec) = &candidates[m];
            let g = spec.sample_seeded(draw_seed(seed, name, draw))?;
            Ok((m, spectrum(&g)?))
        })
        .collect()
}

/// Runs the selection and scores the observed graph.
pub fn select_model(
    observed: &Graph,
    candidates: &[(String, ModelSpec)],
    opts: &SelectOptions,
) -> Result<SelectionReport> {
    let mut reports = select_model_with(observed, candidates, opts, &[opts.classifier])?;
    Ok(reports.remove(0))
}

/// Like [`select_model`], but trains each classifier in `kinds` on the same
/// simulated spectra. Reports come back in `kinds` order.
pub fn select_model_with(
    observed: &Graph,
    candidates: &[(String, ModelSpec)],
    opts: &SelectOptions,
    kinds: &[ClassifierKind],
) -> Result<Vec<SelectionReport>> {
    let start = Instant::now();
    check_inputs(observed, candidates, opts.k)?;
    opts.features.validate()?;

    // Canonical (name) order; `canonical[c]` is the caller's index.
    let mut canonical: Vec<usize> = (0..candidates.len()).collect();
    canonical.sort_by(|&a, &b| candidates[a].0.cmp(&candidates[b].0));
    let sorted: Vec<(String, ModelSpec)> = canonical.iter().map(|&i| candidates[i].clone()).collect();

    let training = simulate_spectra(&sorted, opts.k, opts.seed)?;
    let design = build_features(&training, sorted.len(), &opts.features)?;
    let mut warnings = Vec::new();
    if design.is_degenerate() {
        warnings.push("all simulated spectra are identical; scores carry no information".to_string());
    }
    let row = opts.features.features(&spectrum(observed)?);

    let mut reports = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let clf = train(&design, kind, &opts.params, rng::split(opts.seed, TRAIN_STREAM))?;
        let canon = clf.predict_scores(&row)?;
        let mut s = vec![0.0; candidates.len()];
        for (c, &orig) in canonical.iter().enumerate() {
            s[orig] = canon.s[c];
        }
        let scores = ScoreVector::from_propensities(s)?;
        reports.push(SelectionReport {
            predicted: scores.predicted(),
            model_names: candidates.iter().map(|(n, _)| n.clone()).collect(),
            scores,
            k: opts.k,
            classifier: kind,
            seed: opts.seed,
            diagnostics: Diagnostics {
                in_sample_accuracy: clf.in_sample_accuracy(),
                oob_accuracy: clf.oob_accuracy(),
                warnings: warnings.clone(),
            },
            wall_time: start.elapsed(),
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::permute;
    use rand::seq::SliceRandom;

    fn named(v: Vec<(&str, ModelSpec)>) -> Vec<(String, ModelSpec)> {
        v.into_iter().map(|(n, s)| (n.to_string(), s)).collect()
    }

    fn opts(k: usize, seed: u64) -> SelectOptions {
        SelectOptions { k, seed, ..SelectOptions::default() }
    }

    #[test]
    fn complete_graph_picks_the_complete_model() {
        let c = named(vec![
            ("empty", ModelSpec::bernoulli(8, f64::NEG_INFINITY)),
            ("full", ModelSpec::bernoulli(8, f64::INFINITY)),
        ]);
        let r = select_model(&Graph::complete(8), &c, &opts(10, 1)).unwrap();
        assert_eq!(r.predicted, 1);
        assert_eq!(r.scores.s_norm[1], 1.0);
        assert!(r.diagnostics.warnings.is_empty());
        assert_eq!(r.diagnostics.in_sample_accuracy, 1.0);
    }

    #[test]
    fn mismatches_are_rejected() {
        let g = Graph::new(10, false);
        let sized = named(vec![("a", ModelSpec::bernoulli(10, 0.0)), ("b", ModelSpec::bernoulli(11, 0.0))]);
        assert!(select_model(&g, &sized, &opts(5, 0)).is_err());
        let mixed =
            named(vec![("a", ModelSpec::bernoulli(10, 0.0)), ("b", ModelSpec::directed_dyad(10, 0.0, 0.0))]);
        assert!(select_model(&g, &mixed, &opts(5, 0)).is_err());
        let one = named(vec![("a", ModelSpec::bernoulli(10, 0.0))]);
        assert!(select_model(&g, &one, &opts(5, 0)).is_err());
        let dup = named(vec![("a", ModelSpec::bernoulli(10, 0.0)), ("a", ModelSpec::bernoulli(10, 1.0))]);
        assert!(select_model(&g, &dup, &opts(5, 0)).is_err());
        let ok = named(vec![("a", ModelSpec::bernoulli(10, 0.0)), ("b", ModelSpec::bernoulli(10, 1.0))]);
        assert!(select_model(&g, &ok, &opts(1, 0)).is_err());
    }

    #[test]
    fn identical_models_warn() {
        let c = named(vec![
            ("a", ModelSpec::bernoulli(6, f64::NEG_INFINITY)),
            ("b", ModelSpec::bernoulli(6, f64::NEG_INFINITY)),
        ]);
        let r = select_model(&Graph::new(6, false), &c, &opts(5, 3)).unwrap();
        assert_eq!(r.diagnostics.warnings.len(), 1);
        assert!((r.scores.s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    fn menu() -> Vec<(String, ModelSpec)> {
        named(vec![
            ("sparse", ModelSpec::bernoulli(20, -2.0)),
            ("medium", ModelSpec::bernoulli(20, -1.0)),
            ("dense", ModelSpec::bernoulli(20, 0.0)),
        ])
    }

    #[test]
    fn reports_are_deterministic() {
        let observed = ModelSpec::bernoulli(20, -1.0).sample_seeded(99).unwrap();
        let a = select_model(&observed, &menu(), &opts(20, 5)).unwrap();
        let b = select_model(&observed, &menu(), &opts(20, 5)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn reordering_candidates_permutes_scores() {
        let observed = ModelSpec::bernoulli(20, -1.0).sample_seeded(7).unwrap();
        let base = select_model(&observed, &menu(), &opts(20, 5)).unwrap();
        let mut shuffled = menu();
        shuffled.reverse();
        let r = select_model(&observed, &shuffled, &opts(20, 5)).unwrap();
        for (i, (name, _)) in shuffled.iter().enumerate() {
            let j = menu().iter().position(|(n, _)| n == name).unwrap();
            assert_eq!(r.scores.s[i], base.scores.s[j]);
        }
        assert_eq!(r.predicted_name(), base.predicted_name());
    }

    #[test]
    fn node_relabelling_leaves_scores_unchanged() {
        let observed = ModelSpec::bernoulli(20, -1.0).sample_seeded(3).unwrap();
        let mut perm: Vec<usize> = (0..20).collect();
        perm.shuffle(&mut rng::from_seed(1));
        let relabelled = permute(&observed, &perm).unwrap();
        let a = select_model(&observed, &menu(), &opts(20, 2)).unwrap();
        let b = select_model(&relabelled, &menu(), &opts(20, 2)).unwrap();
        assert_eq!(a.scores, b.scores);
    }

    #[test]
    fn json_key_order_and_summary() {
        let observed = Graph::complete(8);
        let c = named(vec![
            ("empty", ModelSpec::bernoulli(8, f64::NEG_INFINITY)),
            ("full", ModelSpec::bernoulli(8, f64::INFINITY)),
        ]);
        let r = select_model(&observed, &c, &opts(5, 1)).unwrap();
        let v = r.to_json_value();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["predicted", "scores", "normalized", "K", "seed", "classifier", "diagnostics"]);
        assert_eq!(v["predicted"], "full");
        assert_eq!(v["normalized"]["full"], 1.0);
        let summary = r.summary();
        assert!(summary.lines().nth(1).unwrap().starts_with("full"));
    }

    #[test]
    fn shared_simulations_feed_every_classifier() {
        let observed = ModelSpec::bernoulli(20, 0.0).sample_seeded(4).unwrap();
        let kinds = [ClassifierKind::RandomForest, ClassifierKind::GaussianNb, ClassifierKind::Gbt];
        let reports = select_model_with(&observed, &menu(), &opts(20, 8), &kinds).unwrap();
        assert_eq!(reports.len(), 3);
        for (r, k) in reports.iter().zip(kinds) {
            assert_eq!(r.classifier, k);
            assert_eq!(r.predicted_name(), "dense");
        }
    }
}
