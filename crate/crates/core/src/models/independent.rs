//! Dyad-independent samplers (conditionally independent for latent position
//! models).

use rand::Rng;
use rand_distr::StandardNormal;

use super::{logistic, DirectedDyadSpec, LpmSpec, SbmSpec};
use crate::rng::SimRng;
use crate::{Graph, Result};

/// Each dyad `i < j` independently present with probability `logistic(theta1)`.
pub fn sample_bernoulli(n: usize, theta1: f64, rng: &mut SimRng) -> Graph {
    let p = logistic(theta1);
    let mut g = Graph::new(n, false);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                g.set_edge(i, j, true);
            }
        }
    }
    g
}

pub fn sample_sbm(spec: &SbmSpec, rng: &mut SimRng) -> Result<Graph> {
    let blocks: Vec<usize> = match (&spec.block_assignment, &spec.block_probs) {
        (Some(a), _) => a.clone(),
        (None, Some(probs)) => (0..spec.n).map(|_| draw_category(probs, rng)).collect(),
        (None, None) => {
            return Err(crate::Error::InvalidModel(
                "sbm: give exactly one of block_assignment or block_probs".into(),
            ))
        }
    };
    let mut g = Graph::new(spec.n, false);
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            if rng.random::<f64>() < spec.prob_matrix[blocks[i]][blocks[j]] {
                g.set_edge(i, j, true);
            }
        }
    }
    Ok(g)
}

fn draw_category(probs: &[f64], rng: &mut SimRng) -> usize {
    let u: f64 = rng.random::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// How latent positions enter the log-odds of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatentKernel {
    /// `theta - ‖z_i - z_j‖₂`
    Euclidean,
    /// `theta + z_iᵗ z_j`
    Bilinear,
}

impl LatentKernel {
    pub fn log_odds(self, theta: f64, zi: &[f64], zj: &[f64]) -> f64 {
        match self {
            LatentKernel::Euclidean => {
                let d2: f64 = zi.iter().zip(zj).map(|(a, b)| (a - b) * (a - b)).sum();
                theta - d2.sqrt()
            }
            LatentKernel::Bilinear => theta + zi.iter().zip(zj).map(|(a, b)| a * b).sum::<f64>(),
        }
    }
}

/// Draws fresh positions `z_i ~ N(0, sigma2 I)` and then each dyad with
/// probability `logistic(log_odds)`.
pub fn sample_lpm(spec: &LpmSpec, kernel: LatentKernel, rng: &mut SimRng) -> Graph {
    let (n, k) = (spec.n, spec.dim);
    let sd = spec.sigma2.sqrt();
    let z: Vec<f64> = (0..n * k).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
    let mut g = Graph::new(n, false);
    for i in 0..n {
        for j in i + 1..n {
            let eta = kernel.log_odds(spec.theta, &z[i * k..(i + 1) * k], &z[j * k..(j + 1) * k]);
            if rng.random::<f64>() < logistic(eta) {
                g.set_edge(i, j, true);
            }
        }
    }
    g
}

/// Unnormalized weights of the four states of an unordered dyad `{i, j}`:
/// empty, `i -> j` only, `j -> i` only, and mutual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadWeights {
    pub empty: f64,
    pub forward: f64,
    pub backward: f64,
    pub mutual: f64,
}

impl DyadWeights {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        DyadWeights {
            empty: 1.0,
            forward: theta1.exp(),
            backward: theta1.exp(),
            mutual: (2.0 * theta1 + theta2 / 2.0).exp(),
        }
    }

    pub fn total(&self) -> f64 {
        self.empty + self.forward + self.backward + self.mutual
    }

    /// State probabilities in the order empty, forward, backward, mutual.
    pub fn probabilities(&self) -> [f64; 4] {
        let z = self.total();
        [self.empty / z, self.forward / z, self.backward / z, self.mutual / z]
    }
}

/// Exact categorical draw for every unordered dyad.
pub fn sample_directed_dyad(spec: &DirectedDyadSpec, rng: &mut SimRng) -> Graph {
    let w = DyadWeights::new(spec.theta1, spec.theta2);
    let z = w.total();
    let (c0, c1, c2) = (w.empty, w.empty + w.forward, w.empty + w.forward + w.backward);
    let mut g = Graph::new(spec.n, true);
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            let u = rng.random::<f64>() * z;
            if u < c0 {
                continue;
            }
            if u < c1 {
                g.set_edge(i, j, true);
            } else if u < c2 {
                g.set_edge(j, i, true);
            } else {
                g.set_edge(i, j, true);
                g.set_edge(j, i, true);
            }
        }
    }
    g
}
