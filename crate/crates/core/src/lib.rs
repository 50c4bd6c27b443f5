//! Overlap and distinctness measures for the components of Gaussian
//! mixture models.
//!
//! The crate computes four views of how well separated mixture components
//! are:
//!
//! * the integral MLE misclassification rate ([`overlap::mle_error_mc`],
//!   [`overlap::mle_error_quadrature`]),
//! * its best linear (minimax) approximation for two components
//!   ([`separator::best_linear_separator`]),
//! * the coefficients built from the non-zero eigenvalues of `T⁻¹B`
//!   ([`fisher::fisher_eigen`]),
//! * the between-within e-distance of two labeled samples
//!   ([`overlap::e_distance`]),
//!
//! plus the generators and the sweep harness that compare them.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fisher;
pub mod generate;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod mixture;
pub mod normal;
pub mod overlap;
pub mod scatter;
pub mod seed;
pub mod separator;
pub mod stats;

pub use error::{Error, Result};
pub use fisher::{fisher_eigen, fisher_from_data, fisher_from_model, FisherSolution};
pub use generate::{generate_random_mixture, generate_two_dim, RandomMixtureConfig, TwoDimConfig};
pub use linalg::{SpectralDecomposition, SymmetricMatrix};
pub use mixture::{classify_mle, estimate_from_labels, sample, GaussianComponent, LabeledDataset, MixtureModel};
pub use overlap::{e_distance, mle_error_mc, mle_error_quadrature, OverlapEstimate, OverlapMethod};
pub use scatter::{scatter_decomposition, ScatterDecomposition};
pub use separator::{best_linear_separator, SeparatorSolution};

pub use nalgebra::{DMatrix, DVector};
