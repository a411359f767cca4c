//! Estimation of a single structural change point in a high-dimensional
//! discrete Markov random field from a time-ordered sample.
//!
//! The model family: each observation is a length-`p` vector over a finite
//! alphabet, with joint density proportional to
//!
//! ```text
//! exp( sum_j  theta[j][j] * b0(x_j)  +  sum_{k<j}  theta[j][k] * b(x_j, x_k) )
//! ```
//!
//! for a node statistic `b0` and a symmetric pair statistic `b`. The binary
//! special case `b0(x) = x`, `b(x, y) = x * y` over `{0, 1}` is the classical
//! Ising model. A series of `T` observations is assumed to follow one
//! parameter matrix up to an unknown time `tau*` and another after it; the
//! library estimates `tau*` together with the two sparse parameter matrices.
//!
//! Estimation never touches the intractable normalising constant: every node
//! has a closed-form conditional distribution given the rest, and the sum of
//! negative log conditionals (the negative log-pseudo-likelihood, [`pseudo::phi`])
//! replaces the likelihood. Each candidate split `tau` gets an L1-penalized
//! fit per segment ([`solver::fit_penalized`]), and the unpenalized objective
//! profiled over `tau` is minimised — either over every candidate
//! ([`scan::basic_scan`]) or with a two-stage coarse-to-fine search
//! ([`scan::fast_scan`]) that smooths the profile before picking the minimum.
//!
//! Supporting machinery: Gibbs-sampled synthetic series with known truth
//! ([`sim`]), recovery/accuracy metrics ([`metrics`]), bootstrap stability
//! selection for edges ([`stability`]), and a vote-matrix ingestion path with
//! missing-value imputation ([`ingest`]). The `mrfscan` binary exposes all of
//! it as subcommands; the `guide` module mirrors the mdbook manual and keeps
//! its code snippets compiling.
//!
//! Time indexing convention, used everywhere: observations are numbered
//! `1..=T`, and a change point `tau` means "the first `tau` observations
//! follow the pre-change parameters". Matrix indices are 0-based.

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod error;
pub mod guide;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod pseudo;
pub mod scan;
pub mod sim;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};
pub use model::{Dataset, GroupLabels, ModelSpec, SymmetricParams, TimeRange};
