//! Deterministic numeric substrate: seeded substreams, small dense linear
//! algebra, multivariate Gaussian sampling, and the normal-score transform.

pub mod kernel;
pub mod linalg;
pub mod mvn;
pub mod stream;
pub mod transform;

pub use linalg::{
    chol_inverse, chol_solve, cholesky, cholesky_psd, min_eigenvalue, sample_covariance,
    symmetric_eigenvalues, to_correlation,
};
pub use mvn::{sample_mvn, CovarianceKind, CovarianceSpec};
pub use stream::{SeededStream, REPLICATE_STRIDE};
pub use transform::{average_ranks, normal_score_transform};
