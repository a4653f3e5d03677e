use serde::{Deserialize, Serialize};

use super::{softmax, DesignMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NbParams {
    /// Lower bound on every per-class feature variance.
    pub var_floor: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams { var_floor: 1e-9 }
    }
}

/// Gaussian naive Bayes with maximum-likelihood means and variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    log_prior: Vec<f64>,
    mean: Vec<Vec<f64>>,
    var: Vec<Vec<f64>>,
}

impl GaussianNb {
    pub(crate) fn fit(d: &DesignMatrix, params: &NbParams) -> Self {
        let (m, p) = (d.n_classes(), d.n_features());
        let mut count = vec![0.0; m];
        let mut mean = vec![vec![0.0; p]; m];
        for (row, &y) in d.rows().iter().zip(d.labels()) {
            count[y] += 1.0;
            for (acc, x) in mean[y].iter_mut().zip(row) {
                *acc += x;
            }
        }
        for (mu, &c) in mean.iter_mut().zip(&count) {
            if c > 0.0 {
                mu.iter_mut().for_each(|v| *v /= c);
            }
        }
        let mut var = vec![vec![0.0; p]; m];
        for (row, &y) in d.rows().iter().zip(d.labels()) {
            for ((acc, x), mu) in var[y].iter_mut().zip(row).zip(&mean[y]) {
                *acc += (x - mu) * (x - mu);
            }
        }
        for (v, &c) in var.iter_mut().zip(&count) {
            v.iter_mut().for_each(|s| *s = (if c > 0.0 { *s / c } else { 0.0 }).max(params.var_floor));
        }
        let n = d.n_rows() as f64;
        let log_prior =
            count.iter().map(|&c| if c > 0.0 { (c / n).ln() } else { f64::NEG_INFINITY }).collect();
        GaussianNb { log_prior, mean, var }
    }

    pub(crate) fn propensities(&self, x: &[f64]) -> Vec<f64> {
        let log_post: Vec<f64> = self
            .log_prior
            .iter()
            .zip(self.mean.iter().zip(&self.var))
            .map(|(lp, (mu, var))| {
                lp + x
                    .iter()
                    .zip(mu.iter().zip(var))
                    .map(|(xi, (m, v))| {
                        -0.5 * (2.0 * std::f64::consts::PI * v).ln() - (xi - m) * (xi - m) / (2.0 * v)
                    })
                    .sum::<f64>()
            })
            .collect();
        softmax(&log_post)
    }
}
