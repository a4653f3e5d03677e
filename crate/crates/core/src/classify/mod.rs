//! Spectral features, classifiers over them, and propensity scores.
//!
//! Class indices are 0-based throughout the API.

mod forest;
mod gbt;
mod naive_bayes;
mod tree;

pub use forest::{ForestParams, RandomForest};
pub use gbt::{GbtParams, GradientBoosting};
pub use naive_bayes::{GaussianNb, NbParams};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::spectra::{zero_multiplicity, Spectrum};
use crate::{Error, Result};

/// Summary features derived from a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineeredFeature {
    /// Σλ, twice the edge count for undirected graphs.
    Sum,
    /// Algebraic connectivity.
    Lambda2,
    /// Number of (numerically) zero eigenvalues, i.e. connected components.
    ZeroCount,
    /// The 11 deciles `q0, q10, …, q100` of the eigenvalues.
    Quantiles,
    Max,
}

impl EngineeredFeature {
    fn names(self) -> Vec<String> {
        match self {
            EngineeredFeature::Sum => vec!["sum".into()],
            EngineeredFeature::Lambda2 => vec!["lambda2".into()],
            EngineeredFeature::ZeroCount => vec!["zero_count".into()],
            EngineeredFeature::Quantiles => (0..=10).map(|k| format!("q{}", 10 * k)).collect(),
            EngineeredFeature::Max => vec!["max".into()],
        }
    }

    fn values(self, s: &Spectrum, out: &mut Vec<f64>) {
        match self {
            EngineeredFeature::Sum => out.push(s.sum()),
            EngineeredFeature::Lambda2 => out.push(s.lambda2()),
            EngineeredFeature::ZeroCount => out.push(zero_multiplicity(s, s.default_zero_eps()) as f64),
            EngineeredFeature::Quantiles => {
                out.extend((0..=10).map(|k| quantile(s.values(), k as f64 / 10.0)))
            }
            EngineeredFeature::Max => out.push(s.max()),
        }
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Which features form a design-matrix row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    #[serde(default = "yes")]
    pub use_raw_spectrum: bool,
    #[serde(default)]
    pub engineered: Vec<EngineeredFeature>,
}

fn yes() -> bool {
    true
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            use_raw_spectrum: true,
            engineered: vec![
                EngineeredFeature::Sum,
                EngineeredFeature::Lambda2,
                EngineeredFeature::ZeroCount,
            ],
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.use_raw_spectrum && self.engineered.is_empty() {
            return Err(Error::Config("feature config enables no features".into()));
        }
        Ok(())
    }

    pub fn feature_names(&self, n: usize) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        if self.use_raw_spectrum {
            names.extend((1..=n).map(|i| format!("lambda_{i}")));
        }
        for f in &self.engineered {
            names.extend(f.names());
        }
        names
    }

    /// Feature row for one spectrum.
    pub fn features(&self, s: &Spectrum) -> Vec<f64> {
        let mut row = Vec::new();
        if self.use_raw_spectrum {
            row.extend_from_slice(s.values());
        }
        for f in &self.engineered {
            f.values(s, &mut row);
        }
        row
    }
}

/// Stacked feature rows with their class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
    n_classes: usize,
    feature_names: Vec<String>,
}

impl DesignMatrix {
    /// Checks widths, finiteness and label range.
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        n_classes: usize,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("design matrix has no rows".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::InvalidArgument(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        let width = feature_names.len();
        if width == 0 {
            return Err(Error::InvalidArgument("design matrix has no features".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has width {}, expected {width}",
                    r.len()
                )));
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("row {i} has non-finite entries")));
            }
        }
        if let Some(&y) = labels.iter().find(|&&y| y >= n_classes) {
            return Err(Error::InvalidArgument(format!("label {y} out of range for {n_classes} classes")));
        }
        Ok(DesignMatrix { rows, labels, n_classes, feature_names })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &y in &self.labels {
            c[y] += 1;
        }
        c
    }

    /// True when every row is identical, so no classifier can separate the
    /// classes.
    pub fn is_degenerate(&self) -> bool {
        self.rows.windows(2).all(|w| w[0] == w[1])
    }
}

/// Stacks one feature row per labelled spectrum. Every class in
/// `0..n_classes` must contribute the same number of rows.
pub fn build_features(
    spectra: &[(usize, Spectrum)],
    n_classes: usize,
    cfg: &FeatureConfig,
) -> Result<DesignMatrix> {
    cfg.validate()?;
    let n = match spectra.first() {
        Some((_, s)) => s.len(),
        None => return Err(Error::InvalidArgument("no spectra to stack".into())),
    };
    if let Some((_, s)) = spectra.iter().find(|(_, s)| s.len() != n) {
        return Err(Error::InvalidArgument(format!("mixed spectrum lengths ({} and {n})", s.len())));
    }
    let rows = spectra.iter().map(|(_, s)| cfg.features(s)).collect();
    let labels: Vec<usize> = spectra.iter().map(|(y, _)| *y).collect();
    let d = DesignMatrix::new(rows, labels, n_classes, cfg.feature_names(n))?;
    let counts = d.class_counts();
    if counts.iter().any(|&c| c != counts[0]) || counts[0] == 0 {
        return Err(Error::InvalidArgument(format!("classes are not balanced: {counts:?}")));
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    GaussianNb,
    #[default]
    RandomForest,
    Gbt,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::GaussianNb => "gaussian_nb",
            ClassifierKind::RandomForest => "random_forest",
            ClassifierKind::Gbt => "gbt",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian_nb" => Ok(ClassifierKind::GaussianNb),
            "random_forest" => Ok(ClassifierKind::RandomForest),
            "gbt" => Ok(ClassifierKind::Gbt),
            other => Err(Error::InvalidArgument(format!("unknown classifier {other:?}"))),
        }
    }
}

/// Hyperparameters for all algorithms; only the selected one is used.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifierParams {
    pub forest: ForestParams,
    pub gbt: GbtParams,
    pub naive_bayes: NbParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Fitted {
    GaussianNb(GaussianNb),
    RandomForest(RandomForest),
    Gbt(GradientBoosting),
}

/// Version tag written into persisted classifiers.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A fitted classifier; immutable and shareable across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier {
    format_version: u32,
    kind: ClassifierKind,
    n_classes: usize,
    feature_names: Vec<String>,
    in_sample_accuracy: f64,
    oob_accuracy: Option<f64>,
    model: Fitted,
}

/// Fits `kind` on `d`. `seed` drives the forest's bootstrap and feature
/// sampling; the other algorithms are deterministic.
pub fn train(
    d: &DesignMatrix,
    kind: ClassifierKind,
    params: &ClassifierParams,
    seed: u64,
) -> Result<TrainedClassifier> {
    if let Some((c, _)) = d.class_counts().iter().enumerate().find(|(_, &c)| c < 2) {
        return Err(Error::InvalidArgument(format!("class {c} has fewer than 2 training rows")));
    }
    let (model, oob_accuracy) = match kind {
        ClassifierKind::GaussianNb => (Fitted::GaussianNb(GaussianNb::fit(d, &params.naive_bayes)), None),
        ClassifierKind::RandomForest => {
            let fit = RandomForest::fit(d, &params.forest, seed);
            (Fitted::RandomForest(fit.forest), fit.oob_accuracy)
        }
        ClassifierKind::Gbt => (Fitted::Gbt(GradientBoosting::fit(d, &params.gbt)), None),
    };
    let mut c = TrainedClassifier {
        format_version: MODEL_FORMAT_VERSION,
        kind,
        n_classes: d.n_classes(),
        feature_names: d.feature_names().to_vec(),
        in_sample_accuracy: 0.0,
        oob_accuracy,
        model,
    };
    let correct =
        d.rows().iter().zip(d.labels()).filter(|(row, &y)| c.raw_propensities(row).predicted() == y).count();
    c.in_sample_accuracy = correct as f64 / d.n_rows() as f64;
    Ok(c)
}

impl TrainedClassifier {
    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn in_sample_accuracy(&self) -> f64 {
        self.in_sample_accuracy
    }

    /// Out-of-bag accuracy (random forest only).
    pub fn oob_accuracy(&self) -> Option<f64> {
        self.oob_accuracy
    }

    fn raw_propensities(&self, row: &[f64]) -> Propensities {
        Propensities(match &self.model {
            Fitted::GaussianNb(m) => m.propensities(row),
            Fitted::RandomForest(m) => m.propensities(row),
            Fitted::Gbt(m) => m.propensities(row),
        })
    }

    pub fn predict_scores(&self, row: &[f64]) -> Result<ScoreVector> {
        if row.len() != self.n_features() {
            return Err(Error::WidthMismatch { expected: self.n_features(), got: row.len() });
        }
        ScoreVector::from_propensities(self.raw_propensities(row).0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Loads a persisted classifier, refusing other format versions.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format_version: u32,
        }
        let h: Header = serde_json::from_str(text)?;
        if h.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Version { found: h.format_version, expected: MODEL_FORMAT_VERSION });
        }
        Ok(serde_json::from_str(text)?)
    }
}

struct Propensities(Vec<f64>);

impl Propensities {
    fn predicted(&self) -> usize {
        argmax(&self.0)
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(xs: &[f64]) -> usize {
    (0..xs.len()).fold(0, |b, k| if xs[k] > xs[b] { k } else { b })
}

pub(crate) fn argmax_counts(xs: &[usize]) -> usize {
    (0..xs.len()).fold(0, |b, k| if xs[k] > xs[b] { k } else { b })
}

pub(crate) fn softmax(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return vec![1.0 / raw.len() as f64; raw.len()];
    }
    let e: Vec<f64> = raw.iter().map(|r| (r - max).exp()).collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|v| v / z).collect()
}

/// `s_i / max_j s_j`. The best class scores exactly 1.
pub fn normalize_scores(s: &[f64]) -> Result<Vec<f64>> {
    if s.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidArgument("scores must be finite and non-negative".into()));
    }
    let max = s.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::InvalidArgument("cannot normalize an all-zero score vector".into()));
    }
    Ok(s.iter().map(|x| x / max).collect())
}

/// Propensity scores and their normalized counterparts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub s: Vec<f64>,
    pub s_norm: Vec<f64>,
}

impl ScoreVector {
    /// Renormalizes `s` to sum to one and derives the normalized scores.
    pub fn from_propensities(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty score vector".into()));
        }
        let total: f64 = s.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidArgument("scores must have a positive finite sum".into()));
        }
        let s: Vec<f64> = s.iter().map(|x| x / total).collect();
        let s_norm = normalize_scores(&s)?;
        Ok(ScoreVector { s, s_norm })
    }

    pub fn predicted(&self) -> usize {
        argmax(&self.s)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}
