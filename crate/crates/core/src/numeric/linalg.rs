//! Dense symmetric linear algebra: Cholesky factorizations, triangular
//! solves, and a cyclic Jacobi eigensolver. Everything here targets the
//! small, well-conditioned matrices that show up in covariance handling
//! (p up to a few hundred), not general-purpose use.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Relative pivot floor below which a matrix is declared not positive definite.
const PIVOT_RTOL: f64 = 1e-12;

fn check_square_symmetric(a: &Array2<f64>) -> Result<usize> {
    let (r, c) = a.dim();
    if r != c {
        return Err(Error::DimensionMismatch(format!(
            "expected square matrix, got {r}x{c}"
        )));
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-10 * scale.max(1e-300);
    for i in 0..r {
        for j in (i + 1)..r {
            if (a[[i, j]] - a[[j, i]]).abs() > tol {
                return Err(Error::InvalidInput(format!(
                    "matrix not symmetric at ({i},{j}): {} vs {}",
                    a[[i, j]],
                    a[[j, i]]
                )));
            }
        }
    }
    Ok(r)
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
///
/// Fails with [`Error::NotPositiveDefinite`] when a pivot drops to or below
/// `1e-12` times the largest diagonal entry.
pub fn cholesky(a: &Array2<f64>) -> Result<Array2<f64>> {
    let p = check_square_symmetric(a)?;
    let max_diag = (0..p).fold(0.0f64, |m, i| m.max(a[[i, i]]));
    let floor = PIVOT_RTOL * max_diag;
    let mut l = Array2::<f64>::zeros((p, p));
    for j in 0..p {
        let mut d = a[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if d <= floor {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let ljj = d.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..p {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }
    Ok(l)
}

/// Cholesky factor of a positive *semi*-definite matrix.
///
/// Pivots within numerical noise of zero produce a zero column (the factor
/// then spans the range of the matrix), so boundary cases like the zero
/// matrix or a singular conditional covariance factor cleanly. Genuinely
/// negative pivots still fail.
pub fn cholesky_psd(a: &Array2<f64>) -> Result<Array2<f64>> {
    let p = check_square_symmetric(a)?;
    let max_diag = (0..p).fold(0.0f64, |m, i| m.max(a[[i, i]]));
    let zero_tol = 1e-10 * max_diag.max(1e-300);
    let neg_tol = 1e-8 * max_diag.max(1e-300);
    let mut l = Array2::<f64>::zeros((p, p));
    for j in 0..p {
        let mut d = a[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if d < -neg_tol {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        if d <= zero_tol {
            // Degenerate direction: leave column j at zero.
            continue;
        }
        let ljj = d.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..p {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }
    Ok(l)
}

/// Solve `L L^T x = b` given the lower Cholesky factor.
pub fn chol_solve(l: &Array2<f64>, b: &[f64]) -> Vec<f64> {
    let p = l.nrows();
    debug_assert_eq!(b.len(), p);
    // Forward: L y = b
    let mut y = vec![0.0; p];
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= l[[i, k]] * y[k];
        }
        y[i] = s / l[[i, i]];
    }
    // Back: L^T x = y
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = y[i];
        for k in (i + 1)..p {
            s -= l[[k, i]] * x[k];
        }
        x[i] = s / l[[i, i]];
    }
    x
}

/// Inverse of `A = L L^T` from its lower Cholesky factor.
pub fn chol_inverse(l: &Array2<f64>) -> Array2<f64> {
    let p = l.nrows();
    let mut inv = Array2::<f64>::zeros((p, p));
    let mut e = vec![0.0; p];
    for j in 0..p {
        e[j] = 1.0;
        let col = chol_solve(l, &e);
        e[j] = 0.0;
        for i in 0..p {
            inv[[i, j]] = col[i];
        }
    }
    inv
}

/// Eigenvalues of a symmetric matrix (ascending), via cyclic Jacobi sweeps.
pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Result<Vec<f64>> {
    let p = check_square_symmetric(a)?;
    if p == 0 {
        return Ok(Vec::new());
    }
    let mut m = a.clone();
    let frob2: f64 = m.iter().map(|v| v * v).sum();
    let stop = 1e-28 * frob2.max(1e-300);
    for _sweep in 0..100 {
        let mut off2 = 0.0;
        for i in 0..p {
            for j in (i + 1)..p {
                off2 += 2.0 * m[[i, j]] * m[[i, j]];
            }
        }
        if off2 <= stop {
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let apq = m[[i, j]];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[[j, j]] - m[[i, i]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..p {
                    let mik = m[[i, k]];
                    let mjk = m[[j, k]];
                    m[[i, k]] = c * mik - s * mjk;
                    m[[j, k]] = s * mik + c * mjk;
                }
                for k in 0..p {
                    let mki = m[[k, i]];
                    let mkj = m[[k, j]];
                    m[[k, i]] = c * mki - s * mkj;
                    m[[k, j]] = s * mki + c * mkj;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..p).map(|i| m[[i, i]]).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    Ok(eig)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &Array2<f64>) -> Result<f64> {
    Ok(symmetric_eigenvalues(a)?[0])
}

/// Sample covariance of the rows of `x` (denominator `n - 1`).
pub fn sample_covariance(x: &Array2<f64>) -> Array2<f64> {
    let (n, p) = x.dim();
    assert!(n >= 2, "need at least two rows for a sample covariance");
    let means: Vec<f64> = (0..p).map(|j| x.column(j).sum() / n as f64).collect();
    let mut cov = Array2::<f64>::zeros((p, p));
    for i in 0..p {
        for j in i..p {
            let mut s = 0.0;
            for r in 0..n {
                s += (x[[r, i]] - means[i]) * (x[[r, j]] - means[j]);
            }
            let v = s / (n as f64 - 1.0);
            cov[[i, j]] = v;
            cov[[j, i]] = v;
        }
    }
    cov
}

/// Rescale a covariance matrix to a correlation matrix, returning the
/// correlation matrix and the diagonal standard deviations.
pub fn to_correlation(cov: &Array2<f64>) -> (Array2<f64>, Vec<f64>) {
    let p = cov.nrows();
    let sd: Vec<f64> = (0..p).map(|i| cov[[i, i]].sqrt()).collect();
    let mut corr = Array2::<f64>::zeros((p, p));
    for i in 0..p {
        for j in 0..p {
            corr[[i, j]] = cov[[i, j]] / (sd[i] * sd[j]);
        }
    }
    (corr, sd)
}
