use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::stream::SeededStream;

/// Structured covariance families used by the simulation experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceKind {
    Independent,
    Equicorrelated,
    Ar1,
}

impl std::fmt::Display for CovarianceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CovarianceKind::Independent => write!(f, "independent"),
            CovarianceKind::Equicorrelated => write!(f, "equicorrelated"),
            CovarianceKind::Ar1 => write!(f, "ar1"),
        }
    }
}

/// Parameterized covariance matrix: identity, constant off-diagonal, or
/// AR(1) decay, all scaled by `scale` (the experiments use `1/n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    pub p: usize,
    pub kind: CovarianceKind,
    pub rho: f64,
    pub scale: f64,
}

impl CovarianceSpec {
    pub fn new(p: usize, kind: CovarianceKind, rho: f64, scale: f64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInput("covariance dimension must be positive".into()));
        }
        if !(rho > -1.0 && rho < 1.0) && kind != CovarianceKind::Independent {
            return Err(Error::InvalidInput(format!(
                "rho must lie in (-1, 1), got {rho}"
            )));
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
        }
        Ok(CovarianceSpec { p, kind, rho, scale })
    }

    /// True when the realized matrix is positive definite.
    /// Equicorrelated matrices need `rho > -1/(p-1)`.
    pub fn is_positive_definite(&self) -> bool {
        match self.kind {
            CovarianceKind::Independent => true,
            CovarianceKind::Ar1 => self.rho.abs() < 1.0,
            CovarianceKind::Equicorrelated => {
                self.p < 2 || self.rho > -1.0 / (self.p as f64 - 1.0)
            }
        }
    }

    /// Realize the covariance matrix.
    pub fn matrix(&self) -> Array2<f64> {
        let p = self.p;
        let mut sigma = Array2::<f64>::zeros((p, p));
        for i in 0..p {
            for j in 0..p {
                let base = match self.kind {
                    CovarianceKind::Independent => {
                        if i == j {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    CovarianceKind::Equicorrelated => {
                        if i == j {
                            1.0
                        } else {
                            self.rho
                        }
                    }
                    CovarianceKind::Ar1 => self.rho.powi((i as i32 - j as i32).abs()),
                };
                sigma[[i, j]] = base * self.scale;
            }
        }
        sigma
    }
}

/// Draw `n` rows from `N(mean, L L^T)` given the lower Cholesky factor `L`.
///
/// Rows are generated in order from a single stream, so a fixed
/// `(seed, stream_id)` reproduces the matrix exactly.
pub fn sample_mvn(
    stream: SeededStream,
    mean: &[f64],
    chol: &Array2<f64>,
    n: usize,
) -> Result<Array2<f64>> {
    let p = mean.len();
    if chol.dim() != (p, p) {
        return Err(Error::DimensionMismatch(format!(
            "mean has length {p} but factor is {:?}",
            chol.dim()
        )));
    }
    let mut rng = stream.rng();
    let mut out = Array2::<f64>::zeros((n, p));
    let mut z = vec![0.0f64; p];
    for r in 0..n {
        for zj in z.iter_mut() {
            *zj = StandardNormal.sample(&mut rng);
        }
        for i in 0..p {
            // L is lower triangular: only k <= i contributes.
            let mut s = mean[i];
            for k in 0..=i {
                s += chol[[i, k]] * z[k];
            }
            out[[r, i]] = s;
        }
    }
    Ok(out)
}
