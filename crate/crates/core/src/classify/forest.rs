use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow, GiniStats, GrowParams, Tree};
use super::DesignMatrix;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Features tried per split; `None` means `floor(sqrt(p))`.
    pub max_features: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 200, max_depth: 12, max_features: None }
    }
}

/// Bagged Gini trees; each tree votes for the majority class of its leaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    n_classes: usize,
    trees: Vec<Tree<usize>>,
}

pub(crate) struct FitResult {
    pub forest: RandomForest,
    pub oob_accuracy: Option<f64>,
}

impl RandomForest {
    pub(crate) fn fit(d: &DesignMatrix, params: &ForestParams, seed: u64) -> FitResult {
        let (n_rows, n_features) = (d.n_rows(), d.n_features());
        let n_classes = d.n_classes();
        let mtry = params
            .max_features
            .unwrap_or_else(|| (n_features as f64).sqrt().floor() as usize)
            .clamp(1, n_features.max(1));
        let grow_params = GrowParams { max_depth: params.max_depth, min_features: mtry, min_gain: 1e-12 };

        let fitted: Vec<(Tree<usize>, Vec<bool>)> = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut r = rng::stream(seed, t as u64);
                let mut in_bag = vec![false; n_rows];
                let samples: Vec<usize> = (0..n_rows)
                    .map(|_| {
                        let i = r.random_range(0..n_rows);
                        in_bag[i] = true;
                        i
                    })
                    .collect();
                let proto = GiniStats::new(d.labels(), n_classes);
                let mut order = || {
                    let mut f: Vec<usize> = (0..n_features).collect();
                    f.shuffle(&mut r);
                    f
                };
                let tree = grow(d.rows(), samples, &proto, &grow_params, &mut order, &majority);
                (tree, in_bag)
            })
            .collect();

        let mut oob_votes = vec![vec![0usize; n_classes]; n_rows];
        for (tree, in_bag) in &fitted {
            for (i, row) in d.rows().iter().enumerate() {
                if !in_bag[i] {
                    oob_votes[i][*tree.predict(row)] += 1;
                }
            }
        }
        let scored: Vec<(usize, usize)> = oob_votes
            .iter()
            .zip(d.labels())
            .filter(|(v, _)| v.iter().any(|&c| c > 0))
            .map(|(v, &y)| (super::argmax_counts(v), y))
            .collect();
        let oob_accuracy = (!scored.is_empty())
            .then(|| scored.iter().filter(|(p, y)| p == y).count() as f64 / scored.len() as f64);

        FitResult {
            forest: RandomForest { n_classes, trees: fitted.into_iter().map(|(t, _)| t).collect() },
            oob_accuracy,
        }
    }

    /// Vote fractions with a `1/M` pseudo-vote per class:
    /// `(votes_c + 1/M) / (T + 1)`.
    pub(crate) fn propensities(&self, x: &[f64]) -> Vec<f64> {
        let m = self.n_classes as f64;
        let mut votes = vec![1.0 / m; self.n_classes];
        for t in &self.trees {
            votes[*t.predict(x)] += 1.0;
        }
        let total = self.trees.len() as f64 + 1.0;
        votes.iter().map(|v| v / total).collect()
    }
}

fn majority(s: &GiniStats) -> usize {
    let c = s.counts();
    (0..c.len()).fold(0, |b, k| if c[k] > c[b] { k } else { b })
}
