//! Interpretable classification of single-cell blood smear images.
//!
//! The pipeline reduces each RGB cell crop to four aggregated features
//! (one Laplacian-sum per color channel plus the pixel length of the
//! inner edge ring), trains a random forest on them, and explains
//! individual predictions with a local linear surrogate fitted over
//! segment-masking perturbations of the input image.
//!
//! The crate is organized bottom-up:
//!
//! - [`raster`] — image containers, PNG I/O, masks and morphology
//! - [`features`] — Laplacian features, Canny edges, ring length
//! - [`tree`], [`forest`], [`logistic`] — classifiers
//! - [`tuning`] — grid search over stratified cross-validation
//! - [`model_io`] — versioned model persistence
//! - [`eval`] — splits, confusion metrics, ROC/PR curves, histograms
//! - [`explain`] — perturbation-based local explanations and overlays
//! - [`datagen`] — deterministic synthetic cell-image generator
//! - [`cli`] — subcommand implementations behind the `cidmp` binary

pub mod cli;
pub mod dataset;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod explain;
pub mod features;
pub mod forest;
pub mod logistic;
pub mod model_io;
pub mod raster;
pub mod rng;
pub mod tree;
pub mod tuning;

pub use error::{Error, Result};
