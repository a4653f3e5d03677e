//! Candidate network models and their samplers.
//!
//! Every family is described by a [`ModelSpec`], which is also the JSON
//! schema accepted by the command line (`"family"` selects the variant and
//! unknown fields are rejected).

mod gwesp;
mod independent;

pub use gwesp::{
    gwesp_change, gwesp_statistic, gwesp_weight, sample_ergm_chain, sample_ergm_mcmc, sp_count, GwespWeights,
    WeightVariant,
};
pub use independent::{
    sample_bernoulli, sample_directed_dyad, sample_lpm, sample_sbm, DyadWeights, LatentKernel,
};

use serde::{Deserialize, Serialize};

use crate::rng::{self, SimRng};
use crate::{Error, Graph, Result};

/// Logistic function, evaluated without overflow for large `|x|`.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// A fully parameterized candidate model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    Bernoulli(BernoulliSpec),
    Sbm(SbmSpec),
    LpmEuclidean(LpmSpec),
    LpmBilinear(LpmSpec),
    GwespErgm(GwespSpec),
    DirectedDyad(DirectedDyadSpec),
}

/// Independent edges with probability `logistic(theta1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernoulliSpec {
    pub n: usize,
    pub theta1: f64,
}

/// Stochastic block model. Exactly one of `block_assignment` (0-indexed
/// block per node) or `block_probs` (membership drawn per node) is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbmSpec {
    pub n: usize,
    pub prob_matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_assignment: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_probs: Option<Vec<f64>>,
}

impl SbmSpec {
    /// `n` nodes split into `prob_matrix.len()` contiguous blocks whose sizes
    /// differ by at most one.
    pub fn equal_blocks(n: usize, prob_matrix: Vec<Vec<f64>>) -> Self {
        let k = prob_matrix.len().max(1);
        let assignment = (0..n).map(|i| i * k / n).collect();
        SbmSpec { n, prob_matrix, block_assignment: Some(assignment), block_probs: None }
    }
}

/// Latent position model; positions are `N(0, sigma2 I_dim)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpmSpec {
    pub n: usize,
    pub theta: f64,
    pub dim: usize,
    #[serde(default = "one")]
    pub sigma2: f64,
}

fn one() -> f64 {
    1.0
}

/// Edges plus geometrically weighted edgewise shared partners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GwespSpec {
    pub n: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    #[serde(default)]
    pub weight_variant: WeightVariant,
    #[serde(default)]
    pub mcmc: McmcConfig,
}

/// Sampler settings for the dyad-toggle Metropolis chain. Unset values
/// default to `burn_in = 20 * C(n, 2)` and `thin = 5 * C(n, 2)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thin: Option<u64>,
    /// Stream id mixed into the seed of each chain.
    #[serde(default)]
    pub stream: u64,
}

impl McmcConfig {
    pub fn burn_in_for(&self, n: usize) -> u64 {
        self.burn_in.unwrap_or(20 * dyads(n))
    }

    pub fn thin_for(&self, n: usize) -> u64 {
        self.thin.unwrap_or(5 * dyads(n)).max(1)
    }
}

pub(crate) fn dyads(n: usize) -> u64 {
    (n as u64) * (n as u64).saturating_sub(1) / 2
}

/// Directed dyad-independent model with density and reciprocity terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectedDyadSpec {
    pub n: usize,
    pub theta1: f64,
    pub theta2: f64,
}

impl ModelSpec {
    pub fn bernoulli(n: usize, theta1: f64) -> Self {
        ModelSpec::Bernoulli(BernoulliSpec { n, theta1 })
    }

    pub fn gwesp(n: usize, theta1: f64, theta2: f64, theta3: f64) -> Self {
        ModelSpec::GwespErgm(GwespSpec {
            n,
            theta1,
            theta2,
            theta3,
            weight_variant: WeightVariant::Standard,
            mcmc: McmcConfig::default(),
        })
    }

    pub fn lpm_euclidean(n: usize, theta: f64, dim: usize, sigma2: f64) -> Self {
        ModelSpec::LpmEuclidean(LpmSpec { n, theta, dim, sigma2 })
    }

    pub fn lpm_bilinear(n: usize, theta: f64, dim: usize, sigma2: f64) -> Self {
        ModelSpec::LpmBilinear(LpmSpec { n, theta, dim, sigma2 })
    }

    pub fn directed_dyad(n: usize, theta1: f64, theta2: f64) -> Self {
        ModelSpec::DirectedDyad(DirectedDyadSpec { n, theta1, theta2 })
    }

    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::Bernoulli(_) => "bernoulli",
            ModelSpec::Sbm(_) => "sbm",
            ModelSpec::LpmEuclidean(_) => "lpm_euclidean",
            ModelSpec::LpmBilinear(_) => "lpm_bilinear",
            ModelSpec::GwespErgm(_) => "gwesp_ergm",
            ModelSpec::DirectedDyad(_) => "directed_dyad",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ModelSpec::Bernoulli(s) => s.n,
            ModelSpec::Sbm(s) => s.n,
            ModelSpec::LpmEuclidean(s) | ModelSpec::LpmBilinear(s) => s.n,
            ModelSpec::GwespErgm(s) => s.n,
            ModelSpec::DirectedDyad(s) => s.n,
        }
    }

    pub fn is_directed(&self) -> bool {
        matches!(self, ModelSpec::DirectedDyad(_))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(format!("{}: {msg}", self.family())));
        if self.n() < 2 {
            return bad(format!("n must be at least 2, got {}", self.n()));
        }
        match self {
            ModelSpec::Bernoulli(s) => {
                if s.theta1.is_nan() {
                    return bad("theta1 is NaN".into());
                }
            }
            ModelSpec::Sbm(s) => {
                let k = s.prob_matrix.len();
                if k == 0 {
                    return bad("prob_matrix is empty".into());
                }
                for (a, row) in s.prob_matrix.iter().enumerate() {
                    if row.len() != k {
                        return bad(format!("prob_matrix row {a} has {} entries, expected {k}", row.len()));
                    }
                    for (b, &p) in row.iter().enumerate() {
                        if !(0.0..=1.0).contains(&p) {
                            return bad(format!("prob_matrix[{a}][{b}] = {p} outside [0, 1]"));
                        }
                        if p != s.prob_matrix[b][a] {
                            return bad(format!("prob_matrix is not symmetric at ({a}, {b})"));
                        }
                    }
                }
                match (&s.block_assignment, &s.block_probs) {
                    (Some(assign), None) => {
                        if assign.len() != s.n {
                            return bad(format!(
                                "block_assignment has {} entries for {} nodes",
                                assign.len(),
                                s.n
                            ));
                        }
                        if let Some(b) = assign.iter().find(|&&b| b >= k) {
                            return bad(format!("block {b} out of range for {k} blocks"));
                        }
                    }
                    (None, Some(probs)) => {
                        if probs.len() != k {
                            return bad(format!("block_probs has {} entries for {k} blocks", probs.len()));
                        }
                        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                            return bad("block_probs must be non-negative".into());
                        }
                        if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                            return bad("block_probs must sum to 1".into());
                        }
                    }
                    _ => return bad("give exactly one of block_assignment or block_probs".into()),
                }
            }
            ModelSpec::LpmEuclidean(s) | ModelSpec::LpmBilinear(s) => {
                if s.dim < 1 {
                    return bad("dim must be at least 1".into());
                }
                if !(s.sigma2 > 0.0 && s.sigma2.is_finite()) {
                    return bad(format!("sigma2 must be positive, got {}", s.sigma2));
                }
                if !s.theta.is_finite() {
                    return bad("theta must be finite".into());
                }
            }
            ModelSpec::GwespErgm(s) => {
                if ![s.theta1, s.theta2, s.theta3].iter().all(|x| x.is_finite()) {
                    return bad("parameters must be finite".into());
                }
                if s.theta3 <= -std::f64::consts::LN_2 {
                    return bad(format!("theta3 = {} is outside the stable region (> -ln 2)", s.theta3));
                }
                if s.mcmc.thin == Some(0) {
                    return bad("mcmc.thin must be at least 1".into());
                }
            }
            ModelSpec::DirectedDyad(s) => {
                if !(s.theta1.is_finite() && s.theta2.is_finite()) {
                    return bad("parameters must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// Draws one graph. The spec is validated first.
    pub fn sample(&self, rng: &mut SimRng) -> Result<Graph> {
        self.validate()?;
        Ok(match self {
            ModelSpec::Bernoulli(s) => sample_bernoulli(s.n, s.theta1, rng),
            ModelSpec::Sbm(s) => sample_sbm(s, rng)?,
            ModelSpec::LpmEuclidean(s) => sample_lpm(s, LatentKernel::Euclidean, rng),
            ModelSpec::LpmBilinear(s) => sample_lpm(s, LatentKernel::Bilinear, rng),
            ModelSpec::GwespErgm(s) => sample_ergm_mcmc(s, rng),
            ModelSpec::DirectedDyad(s) => sample_directed_dyad(s, rng),
        })
    }

    /// Draws one graph from the stream identified by `seed` (and, for the
    /// ERGM, the configured chain stream).
    pub fn sample_seeded(&self, seed: u64) -> Result<Graph> {
        let mut r = match self {
            ModelSpec::GwespErgm(s) if s.mcmc.stream != 0 => rng::stream(seed, s.mcmc.stream),
            _ => rng::from_seed(seed),
        };
        self.sample(&mut r)
    }
}
