//! Laplacian spectra of graphs.

use std::fmt::Write as _;

use crate::eigen::{symmetric_eigenvalues, Matrix};
use crate::graph::{self, Graph};
use crate::{Error, Result};

/// Relative threshold under which negative eigenvalues are treated as
/// roundoff and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-8;

/// Ascending eigenvalues of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    tol: f64,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>, tol: f64) -> Self {
        values.sort_by(f64::total_cmp);
        Spectrum { values, tol }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// A posteriori error bound of the solver, `n * eps * ‖M‖_F`.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Second-smallest eigenvalue (the algebraic connectivity); zero for a
    /// single node.
    pub fn lambda2(&self) -> f64 {
        self.values.get(1).copied().unwrap_or(0.0)
    }

    /// Default zero threshold: `1e-6 * max(1, λ_max)`.
    pub fn default_zero_eps(&self) -> f64 {
        1e-6 * self.max().max(1.0)
    }
}

/// Eigenvalues of a symmetric matrix, ascending. Values in
/// `[-CLAMP_TOL * ‖M‖_F, 0)` are set to zero.
pub fn eigenvalues_symmetric(m: &Matrix) -> Result<Spectrum> {
    let norm = m.frobenius_norm();
    let mut values = symmetric_eigenvalues(m)?;
    let floor = -CLAMP_TOL * norm;
    for v in &mut values {
        if *v < 0.0 && *v >= floor {
            *v = 0.0;
        }
    }
    let tol = m.rows() as f64 * f64::EPSILON * norm;
    Ok(Spectrum::new(values, tol))
}

/// Laplacian spectrum of `g`: `diag(d) - X` when undirected, `B Bᵗ` when
/// directed. Always has exactly `g.n()` entries.
pub fn spectrum(g: &Graph) -> Result<Spectrum> {
    let m = if g.is_directed() { graph::directed_laplacian(g)? } else { graph::laplacian(g)? };
    eigenvalues_symmetric(&m)
}

/// Number of eigenvalues below `eps`.
pub fn zero_multiplicity(s: &Spectrum, eps: f64) -> usize {
    s.values().iter().filter(|&&v| v < eps).count()
}

/// One labelled row of the spectrum table.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub model_label: String,
    pub replicate_id: usize,
    pub spectrum: Spectrum,
}

/// CSV with columns `model_label,replicate_id,lambda_1..lambda_n`.
///
/// All rows must have the same length. Floats use Rust's shortest
/// round-trip formatting so the output is reproducible byte for byte.
pub fn spectra_csv(rows: &[SpectrumRow]) -> Result<String> {
    let n = rows.first().map_or(0, |r| r.spectrum.len());
    if let Some(bad) = rows.iter().find(|r| r.spectrum.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "spectrum lengths differ ({} vs {n})",
            bad.spectrum.len()
        )));
    }
    let mut out = String::from("model_label,replicate_id");
    for i in 1..=n {
        let _ = write!(out, ",lambda_{i}");
    }
    out.push('\n');
    for r in rows {
        if r.model_label.contains([',', '"', '\n']) {
            return Err(Error::InvalidArgument(format!(
                "model label {:?} contains a CSV delimiter",
                r.model_label
            )));
        }
        let _ = write!(out, "{},{}", r.model_label, r.replicate_id);
        for v in r.spectrum.values() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    Ok(out)
}
