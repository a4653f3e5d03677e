//! Gradient-boosted trees with softmax loss and Newton leaf values.

use serde::{Deserialize, Serialize};

use super::tree::{grow, GrowParams, NewtonStats, Tree};
use super::{softmax, DesignMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GbtParams {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// L2 penalty on leaf values.
    pub lambda: f64,
    pub min_child_weight: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams { rounds: 100, max_depth: 3, learning_rate: 0.1, lambda: 1.0, min_child_weight: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoosting {
    n_classes: usize,
    base: Vec<f64>,
    learning_rate: f64,
    /// `rounds[r][c]` is the tree for class `c` in round `r`.
    rounds: Vec<Vec<Tree<f64>>>,
}

impl GradientBoosting {
    pub(crate) fn fit(d: &DesignMatrix, params: &GbtParams) -> Self {
        let (n, m) = (d.n_rows(), d.n_classes());
        let mut prior = vec![0.0; m];
        for &y in d.labels() {
            prior[y] += 1.0;
        }
        let base: Vec<f64> = prior.iter().map(|c| (c / n as f64).max(1e-12).ln()).collect();
        let mut raw: Vec<Vec<f64>> = vec![base.clone(); n];
        let all: Vec<usize> = (0..d.n_features()).collect();
        let grow_params =
            GrowParams { max_depth: params.max_depth, min_features: all.len(), min_gain: 1e-12 };
        let mut rounds = Vec::with_capacity(params.rounds);
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        for _ in 0..params.rounds {
            let probs: Vec<Vec<f64>> = raw.iter().map(|r| softmax(r)).collect();
            let mut trees = Vec::with_capacity(m);
            for c in 0..m {
                for i in 0..n {
                    let p = probs[i][c];
                    let y = if d.labels()[i] == c { 1.0 } else { 0.0 };
                    grad[i] = p - y;
                    hess[i] = (p * (1.0 - p)).max(1e-6);
                }
                let proto = NewtonStats::new(&grad, &hess, params.lambda, params.min_child_weight);
                let tree = grow(
                    d.rows(),
                    (0..n).collect(),
                    &proto,
                    &grow_params,
                    &mut || all.clone(),
                    &|s: &NewtonStats| s.leaf_value(),
                );
                trees.push(tree);
            }
            for (i, row) in d.rows().iter().enumerate() {
                for (c, t) in trees.iter().enumerate() {
                    raw[i][c] += params.learning_rate * t.predict(row);
                }
            }
            rounds.push(trees);
        }
        GradientBoosting { n_classes: m, base, learning_rate: params.learning_rate, rounds }
    }

    pub(crate) fn propensities(&self, x: &[f64]) -> Vec<f64> {
        let mut raw = self.base.clone();
        for trees in &self.rounds {
            for (c, t) in trees.iter().enumerate() {
                raw[c] += self.learning_rate * t.predict(x);
            }
        }
        debug_assert_eq!(raw.len(), self.n_classes);
        softmax(&raw)
    }
}
