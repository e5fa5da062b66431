//! Variable selection with knockoffs for mixed continuous/categorical data.
//!
//! The crate builds up from a deterministic numeric substrate to the full
//! selection pipeline:
//!
//! - [`numeric`]: seeded substreams, Cholesky/eigen routines, multivariate
//!   Gaussian sampling, normal-score transform.
//! - [`elastic_net`]: coordinate-descent elastic net (Gaussian and
//!   multinomial) with cross-validated penalty selection.
//! - [`knockoff`]: Gaussian model-X knockoffs and the sequential
//!   mixed-type generator.
//! - [`filter`]: feature statistics from the augmented regression and the
//!   knockoff+ selection rule.
//! - [`multi`]: consensus selection across many knockoff draws.
//! - [`baselines`]: Benjamini-Hochberg / Benjamini-Yekutieli on regression
//!   p-values, and permutation lasso.
//! - [`sim`]: the simulation harness producing FDP/TPP score tables.

pub mod baselines;
pub mod data;
pub mod elastic_net;
pub mod error;
pub mod filter;
pub mod knockoff;
pub mod multi;
pub mod numeric;
pub mod sim;

pub use data::{Column, EncodedDesign, MixedDataMatrix, Response};
pub use error::{Error, Result};
pub use numeric::{CovarianceKind, CovarianceSpec, SeededStream};
