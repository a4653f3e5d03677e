//! Model selection for network data using graph Laplacian spectra.
//!
//! Candidate network models are simulated, each simulated graph is reduced
//! to the ascending eigenvalues of its Laplacian, and a classifier trained on
//! those spectra scores the observed network against every candidate. The
//! normalized propensity scores give a relative goodness-of-fit measure that
//! does not depend on how many candidates were considered.
//!
//! ```
//! use specsel::{models::ModelSpec, pipeline::{select_model, SelectOptions}, Graph};
//!
//! let observed = Graph::complete(10);
//! let candidates = vec![
//!     ("empty".to_string(), ModelSpec::bernoulli(10, f64::NEG_INFINITY)),
//!     ("full".to_string(), ModelSpec::bernoulli(10, f64::INFINITY)),
//! ];
//! let opts = SelectOptions { k: 10, seed: 7, ..SelectOptions::default() };
//! let report = select_model(&observed, &candidates, &opts).unwrap();
//! assert_eq!(report.predicted_name(), "full");
//! ```

pub mod classify;
pub mod edgelist;
pub mod eigen;
mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod models;
pub mod pipeline;
pub mod rng;
pub mod spectra;

pub use error::{Error, Result};
pub use graph::Graph;
pub use spectra::Spectrum;
