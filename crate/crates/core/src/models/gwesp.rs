//! Shared-partner statistics and the Metropolis dyad-toggle sampler for the
//! edges + GWESP exponential random graph model
//!
//! ```text
//! P(X = x) ∝ exp(theta1 * edges(x) + Σ_t w_t * SP_t(x))
//! ```
//!
//! where `SP_t` counts edges whose endpoints have exactly `t` common
//! neighbours.

use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GwespSpec;
use crate::graph::iter_bits;
use crate::rng::SimRng;
use crate::{Error, Graph, Result};

/// Functional form of the shared-partner weights `w_t`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightVariant {
    /// `theta2 * e^theta3 * (1 - (1 - e^-theta3)^t)`.
    #[default]
    Standard,
    /// `theta2 * e^theta3 * e^(-theta3 t)`.
    #[serde(alias = "paper-literal")]
    PaperLiteral,
}

impl FromStr for WeightVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(WeightVariant::Standard),
            "paper_literal" | "paper-literal" => Ok(WeightVariant::PaperLiteral),
            other => Err(Error::InvalidArgument(format!("unknown weight variant {other:?}"))),
        }
    }
}

/// Weight of an edge with `t` shared partners. `t = 0` always weighs zero.
/// For the standard form with `theta3 = 0` the weight is `theta2` for
/// every `t >= 1` (taking `0^t = 0`).
pub fn gwesp_weight(theta2: f64, theta3: f64, t: usize, variant: WeightVariant) -> f64 {
    if t == 0 {
        return 0.0;
    }
    let scale = theta2 * theta3.exp();
    match variant {
        WeightVariant::Standard => scale * (1.0 - (1.0 - (-theta3).exp()).powi(t as i32)),
        WeightVariant::PaperLiteral => scale * (-theta3 * t as f64).exp(),
    }
}

/// Precomputed `w_0..w_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GwespWeights(Vec<f64>);

impl GwespWeights {
    pub fn new(n: usize, theta2: f64, theta3: f64, variant: WeightVariant) -> Self {
        GwespWeights((0..n.max(1)).map(|t| gwesp_weight(theta2, theta3, t, variant)).collect())
    }

    #[inline]
    pub fn get(&self, t: usize) -> f64 {
        self.0[t]
    }
}

/// `SP_t(g)` by direct enumeration over node triples.
pub fn sp_count(g: &Graph, t: usize) -> Result<usize> {
    if g.is_directed() {
        return Err(Error::Directedness { op: "sp_count", expected: "undirected" });
    }
    let n = g.n();
    if t < 1 || t + 2 > n {
        return Err(Error::InvalidArgument(format!("t = {t} outside 1..={}", n.saturating_sub(2))));
    }
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if !g.has_edge(i, j) {
                continue;
            }
            let shared = (0..n).filter(|&h| h != i && h != j && g.has_edge(i, h) && g.has_edge(h, j)).count();
            if shared == t {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `Σ_t w_t SP_t(g)`.
pub fn gwesp_statistic(g: &Graph, weights: &GwespWeights) -> f64 {
    g.edges().map(|(i, j)| weights.get(g.common_neighbors(i, j))).sum()
}

/// `gwesp_statistic(toggle(g, i, j)) - gwesp_statistic(g)`, computed from the
/// neighbourhoods of `i` and `j` only.
pub fn gwesp_change(g: &Graph, i: usize, j: usize, weights: &GwespWeights) -> f64 {
    let present = g.has_edge(i, j);
    // Shared-partner counts below are taken with (i, j) absent.
    let off = usize::from(present);
    let mut delta = weights.get(g.common_neighbors(i, j));
    let (ri, rj) = (g.row(i), g.row(j));
    let common = ri.iter().zip(rj).map(|(a, b)| a & b);
    for (w, word) in common.enumerate() {
        for b in iter_bits(&[word]) {
            let h = w * 64 + b;
            let s_ih = g.common_neighbors(i, h) - off;
            let s_jh = g.common_neighbors(j, h) - off;
            delta += weights.get(s_ih + 1) - weights.get(s_ih);
            delta += weights.get(s_jh + 1) - weights.get(s_jh);
        }
    }
    if present {
        -delta
    } else {
        delta
    }
}

/// Metropolis state. `sp[i * n + j]` caches the common-neighbour count of
/// every pair so a proposal costs one pass over the shared partners.
struct Chain<'a> {
    graph: Graph,
    sp: Vec<u32>,
    /// `w_{t+1} - w_t`.
    step: Vec<f64>,
    theta1: f64,
    weights: GwespWeights,
    rng: &'a mut SimRng,
}

impl Chain<'_> {
    fn new<'a>(spec: &GwespSpec, rng: &'a mut SimRng) -> Chain<'a> {
        // Start from the edges-only model so burn-in begins at the right density scale.
        let graph = super::sample_bernoulli(spec.n, spec.theta1, rng);
        let n = spec.n;
        let mut sp = vec![0u32; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let c = graph.common_neighbors(i, j) as u32;
                sp[i * n + j] = c;
                sp[j * n + i] = c;
            }
        }
        let weights = GwespWeights::new(n, spec.theta2, spec.theta3, spec.weight_variant);
        let step = (0..n.saturating_sub(1)).map(|t| weights.get(t + 1) - weights.get(t)).collect();
        Chain { graph, sp, step, theta1: spec.theta1, weights, rng }
    }

    /// Same value and summation order as [`gwesp_change`].
    fn change(&self, i: usize, j: usize) -> f64 {
        let n = self.graph.n();
        let present = self.graph.has_edge(i, j);
        let off = usize::from(present);
        let mut delta = self.weights.get(self.sp[i * n + j] as usize);
        let (ri, rj) = (self.graph.row(i), self.graph.row(j));
        for (k, (a, b)) in ri.iter().zip(rj).enumerate() {
            let mut word = a & b;
            while word != 0 {
                let h = k * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                let s_ih = self.sp[i * n + h] as usize - off;
                let s_jh = self.sp[j * n + h] as usize - off;
                delta += self.step[s_ih];
                delta += self.step[s_jh];
            }
        }
        if present {
            -delta
        } else {
            delta
        }
    }

    fn toggle(&mut self, i: usize, j: usize) {
        let n = self.graph.n();
        let on = self.graph.toggle(i, j);
        // j joins or leaves the shared partners of (i, h) for h ~ j, and i
        // those of (j, h) for h ~ i.
        for (a, b) in [(i, j), (j, i)] {
            for k in 0..self.graph.row(b).len() {
                let mut word = self.graph.row(b)[k];
                if k == a / 64 {
                    word &= !(1u64 << (a % 64));
                }
                while word != 0 {
                    let h = k * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    let (x, y) = (a * n + h, h * n + a);
                    if on {
                        self.sp[x] += 1;
                        self.sp[y] += 1;
                    } else {
                        self.sp[x] -= 1;
                        self.sp[y] -= 1;
                    }
                }
            }
        }
    }

    fn step(&mut self) {
        let n = self.graph.n();
        let i = self.rng.random_range(0..n);
        let mut j = self.rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let change = self.change(i, j);
        let log_ratio = if self.graph.has_edge(i, j) { -self.theta1 } else { self.theta1 } + change;
        let u: f64 = self.rng.random();
        if log_ratio >= 0.0 || u < log_ratio.exp() {
            self.toggle(i, j);
        }
    }

    fn run(&mut self, toggles: u64) {
        for _ in 0..toggles {
            self.step();
        }
    }
}

/// One draw: an independent chain run for `burn_in` proposed toggles.
pub fn sample_ergm_mcmc(spec: &GwespSpec, rng: &mut SimRng) -> Graph {
    let mut chain = Chain::new(spec, rng);
    chain.run(spec.mcmc.burn_in_for(spec.n));
    chain.graph
}

/// `count` states from a single chain: after `burn_in` toggles, one state is
/// retained every `thin` toggles.
pub fn sample_ergm_chain(spec: &GwespSpec, count: usize, rng: &mut SimRng) -> Vec<Graph> {
    let mut chain = Chain::new(spec, rng);
    chain.run(spec.mcmc.burn_in_for(spec.n));
    let thin = spec.mcmc.thin_for(spec.n);
    (0..count)
        .map(|k| {
            if k > 0 {
                chain.run(thin);
            }
            chain.graph.clone()
        })
        .collect()
}
