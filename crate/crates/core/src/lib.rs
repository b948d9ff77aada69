//! Numerical laboratory for the constructive side of double descent.
//!
//! The crate is organised around the objects the experiments manipulate:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`linalg`] | dense matrices, truncated SVD, Moore–Penrose pseudo-inverse, min-norm least squares |
//! | [`descent`] | full-batch gradient descent for least squares and separable classification |
//! | [`sparse_regression`] | p-feature Gaussian regression: closed-form risk and a Monte Carlo oracle |
//! | [`rff`] | random Fourier features, Gaussian-kernel checks, min-norm RFF fits and sweeps |
//! | [`separable`] | separable data, hard-margin SVM, direction-convergence diagnostics |
//! | [`polyfit`] | Legendre regression and the empirical bias–variance decomposition |
//! | [`harness`] | config files, IDX/MNIST ingestion, seeds, CSV output, EMC, experiment runner |
//!
//! All randomness is driven by explicit `u64` seeds; see [`seed`] for the
//! derivation policy that keeps parallel trials order-independent.

pub mod descent;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod polyfit;
pub mod rff;
pub mod seed;
pub mod separable;
pub mod sparse_regression;
pub(crate) mod stats;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector, LinearPredictor, SvdResult};
