//! Gaussian model-X knockoffs: given `X ~ N(0, Sigma)`, sample
//! `X~ | X ~ N(mu, V)` with
//!
//! ```text
//! mu = X (I - Sigma^{-1} diag(s)),    V = 2 diag(s) - diag(s) Sigma^{-1} diag(s)
//! ```
//!
//! so that `[X, X~]` has the joint covariance
//! `G = [[Sigma, Sigma - diag(s)], [Sigma - diag(s), Sigma]]`, which is PSD
//! for a valid choice of `s`.

use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numeric::linalg::{chol_inverse, cholesky, cholesky_psd, to_correlation};
use crate::numeric::stream::SeededStream;

/// Equicorrelated construction of the knockoff gap vector `s`.
///
/// On the correlation scale every coordinate gets
/// `min(2 lambda_min(corr(Sigma)), 1)`, rescaled back by the diagonal
/// variances. This is the standard cheap choice that keeps `G` PSD.
pub fn equi_s(sigma: &Array2<f64>) -> Result<Vec<f64>> {
    cholesky(sigma)?; // fail early on non-SPD input
    let (corr, _) = to_correlation(sigma);
    let lambda_min = crate::numeric::linalg::min_eigenvalue(&corr)?;
    let s_corr = (2.0 * lambda_min).min(1.0);
    Ok((0..sigma.nrows()).map(|j| s_corr * sigma[[j, j]]).collect())
}

/// Precomputed pieces of the conditional distribution `X~ | X`.
#[derive(Debug, Clone)]
pub struct GaussianKnockoffModel {
    sigma: Array2<f64>,
    s: Vec<f64>,
    /// `I - Sigma^{-1} diag(s)`; the conditional mean is `X` times this.
    cond_coef: Array2<f64>,
    /// PSD Cholesky factor of `V`.
    cond_chol: Array2<f64>,
    /// Number of times `s` was shrunk by 0.95 to make `V` factorizable.
    shrink_steps: u32,
}

impl GaussianKnockoffModel {
    /// Build from a covariance matrix using the equicorrelated `s`.
    pub fn from_covariance(sigma: Array2<f64>) -> Result<GaussianKnockoffModel> {
        let s = equi_s(&sigma)?;
        GaussianKnockoffModel::with_s(sigma, s)
    }

    /// Build with an explicit `s`. If the conditional covariance fails to
    /// factor (boundary or indefinite from accumulated roundoff), `s` is
    /// shrunk by 0.95 at most 20 times, with the count recorded.
    pub fn with_s(sigma: Array2<f64>, mut s: Vec<f64>) -> Result<GaussianKnockoffModel> {
        let p = sigma.nrows();
        if s.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "s has length {} for a {p}x{p} covariance",
                s.len()
            )));
        }
        let l_sigma = cholesky(&sigma)?;
        let sigma_inv = chol_inverse(&l_sigma);
        let mut last_err = None;
        for attempt in 0..=20u32 {
            // cond_coef = I - Sigma^{-1} diag(s): scale column j by s_j.
            let mut cond_coef = Array2::<f64>::zeros((p, p));
            for i in 0..p {
                for j in 0..p {
                    let m = -sigma_inv[[i, j]] * s[j];
                    cond_coef[[i, j]] = if i == j { 1.0 + m } else { m };
                }
            }
            // V = 2 diag(s) - diag(s) Sigma^{-1} diag(s), symmetrized.
            let mut v = Array2::<f64>::zeros((p, p));
            for i in 0..p {
                for j in 0..p {
                    let mut val = -s[i] * sigma_inv[[i, j]] * s[j];
                    if i == j {
                        val += 2.0 * s[i];
                    }
                    v[[i, j]] = val;
                }
            }
            for i in 0..p {
                for j in (i + 1)..p {
                    let m = 0.5 * (v[[i, j]] + v[[j, i]]);
                    v[[i, j]] = m;
                    v[[j, i]] = m;
                }
            }
            match cholesky_psd(&v) {
                Ok(cond_chol) => {
                    return Ok(GaussianKnockoffModel {
                        sigma,
                        s,
                        cond_coef,
                        cond_chol,
                        shrink_steps: attempt,
                    })
                }
                Err(e) => {
                    last_err = Some(e);
                    s.iter_mut().for_each(|v| *v *= 0.95);
                }
            }
        }
        Err(last_err.expect("at least one factorization attempt"))
    }

    pub fn p(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn sigma(&self) -> &Array2<f64> {
        &self.sigma
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn shrink_steps(&self) -> u32 {
        self.shrink_steps
    }

    /// The joint covariance `G` of `[X, X~]`.
    pub fn joint_covariance(&self) -> Array2<f64> {
        let p = self.p();
        let mut g = Array2::<f64>::zeros((2 * p, 2 * p));
        for i in 0..p {
            for j in 0..p {
                let sig = self.sigma[[i, j]];
                let off = if i == j { sig - self.s[i] } else { sig };
                g[[i, j]] = sig;
                g[[p + i, p + j]] = sig;
                g[[i, p + j]] = off;
                g[[p + i, j]] = off;
            }
        }
        g
    }
}

/// Sample knockoffs row by row: `X~_i = X_i cond_coef + L z_i`.
pub fn gaussian_knockoffs(
    x: &Array2<f64>,
    model: &GaussianKnockoffModel,
    stream: SeededStream,
) -> Result<Array2<f64>> {
    let (n, p) = x.dim();
    if p != model.p() {
        return Err(Error::DimensionMismatch(format!(
            "data has {p} columns but model is {}-dimensional",
            model.p()
        )));
    }
    let mut rng = stream.rng();
    let mut out = Array2::<f64>::zeros((n, p));
    let mut z = vec![0.0f64; p];
    let l = &model.cond_chol;
    for r in 0..n {
        for zj in z.iter_mut() {
            *zj = StandardNormal.sample(&mut rng);
        }
        for i in 0..p {
            let mut v = 0.0;
            for j in 0..p {
                v += x[[r, j]] * model.cond_coef[[j, i]];
            }
            for k in 0..=i {
                v += l[[i, k]] * z[k];
            }
            out[[r, i]] = v;
        }
    }
    Ok(out)
}

/// Sample covariance with a small ridge added so downstream factorizations
/// are well defined even when `n` is close to `p`.
pub fn shrunk_covariance(x: &Array2<f64>) -> Array2<f64> {
    let mut cov = crate::numeric::linalg::sample_covariance(x);
    let p = cov.nrows();
    let ridge = 1e-6 * cov.diag().sum() / p as f64;
    for i in 0..p {
        cov[[i, i]] += ridge;
    }
    cov
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linalg::{min_eigenvalue, sample_covariance};
    use crate::numeric::mvn::{sample_mvn, CovarianceKind, CovarianceSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn equi_s_identity_is_all_ones() {
        let s = equi_s(&Array2::eye(5)).unwrap();
        for v in s {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn equi_s_equicorrelated_cases() {
        // lambda_min = 1 - rho for rho >= 0, so s = min(2 (1 - rho), 1).
        for (rho, expect) in [(0.5, 1.0), (0.8, 0.4f64)] {
            let spec = CovarianceSpec::new(10, CovarianceKind::Equicorrelated, rho, 1.0).unwrap();
            let sigma = spec.matrix();
            let s = equi_s(&sigma).unwrap();
            for v in &s {
                assert_abs_diff_eq!(*v, expect, epsilon = 1e-8);
            }
            // G stays PSD.
            let model = GaussianKnockoffModel::with_s(sigma.clone(), s.clone());
            // Even when V sits on the PSD boundary the joint covariance from
            // the *unshrunk* s must be PSD.
            let g = match model {
                Ok(m) => m.joint_covariance(),
                Err(_) => panic!("model construction failed"),
            };
            let tol = -1e-8 * g.diag().sum() / g.nrows() as f64;
            assert!(min_eigenvalue(&g).unwrap() >= tol);
        }
    }

    #[test]
    fn equi_s_rejects_indefinite_input() {
        let mut sigma = Array2::<f64>::from_elem((3, 3), -0.6);
        for i in 0..3 {
            sigma[[i, i]] = 1.0;
        }
        assert!(equi_s(&sigma).is_err());
    }

    #[test]
    fn zero_s_copies_the_data() {
        let spec = CovarianceSpec::new(3, CovarianceKind::Ar1, 0.4, 1.0).unwrap();
        let sigma = spec.matrix();
        let model = GaussianKnockoffModel::with_s(sigma.clone(), vec![0.0; 3]).unwrap();
        let l = cholesky(&sigma).unwrap();
        let x = sample_mvn(SeededStream::new(3, 0), &[0.0; 3], &l, 50).unwrap();
        let xk = gaussian_knockoffs(&x, &model, SeededStream::new(3, 1)).unwrap();
        for i in 0..50 {
            for j in 0..3 {
                assert_abs_diff_eq!(xk[[i, j]], x[[i, j]], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn identity_covariance_gives_independent_knockoffs() {
        let sigma = Array2::<f64>::eye(3);
        let model = GaussianKnockoffModel::from_covariance(sigma.clone()).unwrap();
        let n = 10_000;
        let l = cholesky(&sigma).unwrap();
        let x = sample_mvn(SeededStream::new(17, 0), &[0.0; 3], &l, n).unwrap();
        let xk = gaussian_knockoffs(&x, &model, SeededStream::new(17, 1)).unwrap();
        // s = 1 => mu = 0, V = I: cross-correlation of X_j with its knockoff
        // is zero in truth; the sample version stays small.
        for j in 0..3 {
            let xj = x.column(j);
            let kj = xk.column(j);
            let mx = xj.sum() / n as f64;
            let mk = kj.sum() / n as f64;
            let mut num = 0.0;
            let mut vx = 0.0;
            let mut vk = 0.0;
            for i in 0..n {
                num += (xj[i] - mx) * (kj[i] - mk);
                vx += (xj[i] - mx) * (xj[i] - mx);
                vk += (kj[i] - mk) * (kj[i] - mk);
            }
            let corr = num / (vx.sqrt() * vk.sqrt());
            assert!(corr.abs() <= 0.05, "column {j}: corr {corr}");
        }
    }

    #[test]
    fn joint_sample_covariance_matches_g() {
        let spec = CovarianceSpec::new(4, CovarianceKind::Ar1, 0.5, 1.0).unwrap();
        let sigma = spec.matrix();
        let model = GaussianKnockoffModel::from_covariance(sigma.clone()).unwrap();
        let n = 50_000;
        let l = cholesky(&sigma).unwrap();
        let x = sample_mvn(SeededStream::new(99, 0), &[0.0; 4], &l, n).unwrap();
        let xk = gaussian_knockoffs(&x, &model, SeededStream::new(99, 1)).unwrap();
        let mut joint = Array2::<f64>::zeros((n, 8));
        for i in 0..n {
            for j in 0..4 {
                joint[[i, j]] = x[[i, j]];
                joint[[i, 4 + j]] = xk[[i, j]];
            }
        }
        let emp = sample_covariance(&joint);
        let g = model.joint_covariance();
        for i in 0..8 {
            for j in 0..8 {
                assert!(
                    (emp[[i, j]] - g[[i, j]]).abs() <= 0.02,
                    "entry ({i},{j}): {} vs {}",
                    emp[[i, j]],
                    g[[i, j]]
                );
            }
        }
    }

    #[test]
    fn determinism_under_fixed_stream() {
        let spec = CovarianceSpec::new(3, CovarianceKind::Equicorrelated, 0.3, 1.0).unwrap();
        let sigma = spec.matrix();
        let model = GaussianKnockoffModel::from_covariance(sigma.clone()).unwrap();
        let l = cholesky(&sigma).unwrap();
        let x = sample_mvn(SeededStream::new(8, 0), &[0.0; 3], &l, 100).unwrap();
        let a = gaussian_knockoffs(&x, &model, SeededStream::new(8, 7)).unwrap();
        let b = gaussian_knockoffs(&x, &model, SeededStream::new(8, 7)).unwrap();
        assert_eq!(a, b);
    }
}
