//! Elastic-net regression via cyclic coordinate descent, for Gaussian
//! (least squares) and multinomial-logistic responses, with a regularization
//! path, warm starts, sequential strong-rule screening, and K-fold
//! cross-validation.
//!
//! The penalized objective is
//!
//! ```text
//! (1/n) sum_i loss(y_i, eta_i) + lambda * [ (1-alpha) ||beta||_2^2 / 2 + alpha ||beta||_1 ]
//! ```
//!
//! with `loss` the squared-error or multinomial negative log-likelihood
//! contribution. Columns are centered (and scaled to unit variance when
//! `standardize` is on) internally; reported coefficients are on the
//! original scale and the intercept is never penalized. Every returned fit
//! carries a KKT certificate checkable through [`kkt_max_violation`].

mod cv;
mod gaussian;
mod multinomial;
mod prepared;

pub use cv::{cross_validate, cross_validate_with_grid, fit_at_cv_minimum, CvResult};

use serde::{Deserialize, Serialize};

use crate::data::Response;
use crate::error::{Error, Result};
use crate::numeric::kernel::dot;
use prepared::Prepared;

/// Tolerance for the KKT stationarity certificate.
pub const KKT_TOL: f64 = 1e-6;

/// A regression problem: column-major numeric design plus typed response.
/// Categorical covariates must already be dummy-encoded.
#[derive(Debug, Clone)]
pub struct DesignSpec {
    cols: Vec<Vec<f64>>,
    names: Vec<String>,
    response: Response,
    standardize: bool,
}

impl DesignSpec {
    pub fn new(
        cols: Vec<Vec<f64>>,
        names: Option<Vec<String>>,
        response: Response,
        standardize: bool,
    ) -> Result<DesignSpec> {
        let n = response.len();
        if n < 2 {
            return Err(Error::InvalidInput("need at least 2 observations".into()));
        }
        if cols.is_empty() {
            return Err(Error::InvalidInput("design needs at least one column".into()));
        }
        if let Some(bad) = cols.iter().position(|c| c.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "column {bad} has length {} but response has {n}",
                cols[bad].len()
            )));
        }
        if let Response::Categorical { codes, levels } = &response {
            if levels.len() < 2 {
                return Err(Error::InvalidInput("multinomial response needs >= 2 levels".into()));
            }
            if codes.iter().any(|&c| (c as usize) >= levels.len()) {
                return Err(Error::InvalidInput("response code outside level set".into()));
            }
        }
        let names =
            names.unwrap_or_else(|| (0..cols.len()).map(|j| format!("x{}", j + 1)).collect());
        if names.len() != cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                cols.len()
            )));
        }
        Ok(DesignSpec { cols, names, response, standardize })
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn d(&self) -> usize {
        self.cols.len()
    }

    pub fn cols(&self) -> &[Vec<f64>] {
        &self.cols
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn response(&self) -> &Response {
        &self.response
    }

    pub fn standardize(&self) -> bool {
        self.standardize
    }

    /// Restrict to a subset of rows (used by cross-validation).
    pub fn subset_rows(&self, keep: &[usize]) -> DesignSpec {
        let cols = self
            .cols
            .iter()
            .map(|c| keep.iter().map(|&i| c[i]).collect())
            .collect();
        let response = match &self.response {
            Response::Gaussian(y) => Response::Gaussian(keep.iter().map(|&i| y[i]).collect()),
            Response::Categorical { codes, levels } => Response::Categorical {
                codes: keep.iter().map(|&i| codes[i]).collect(),
                levels: levels.clone(),
            },
        };
        DesignSpec {
            cols,
            names: self.names.clone(),
            response,
            standardize: self.standardize,
        }
    }
}

/// Solver controls. Defaults follow the crate-wide convergence contract:
/// stop when the largest coefficient update falls below `tol`, fail after
/// `max_cycles` full sweeps.
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub max_cycles: usize,
    pub tol: f64,
    /// Assert that the penalized objective never increases across sweeps.
    /// Costs an extra objective evaluation per sweep; used by tests.
    pub check_monotonicity: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_cycles: 10_000, tol: 1e-7, check_monotonicity: false }
    }
}

/// Fitted coefficients on the original data scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FitCoefs {
    Gaussian {
        beta: Vec<f64>,
        intercept: f64,
    },
    /// One coefficient vector per class (symmetric multi-logit); intercepts
    /// are mean-centered.
    Multinomial {
        beta: Vec<Vec<f64>>,
        intercepts: Vec<f64>,
    },
}

/// One elastic-net solution along the path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElasticNetFit {
    pub coefs: FitCoefs,
    pub lambda: f64,
    pub alpha: f64,
    /// Count of exactly-nonzero coefficients.
    pub nnz: usize,
    /// `RSS / (n - nnz)` for Gaussian fits (falls back to `RSS / n` when
    /// `n - nnz < 1`; see [`residual_variance`]).
    pub sigma2_hat: Option<f64>,
    pub objective: f64,
}

impl ElasticNetFit {
    pub fn is_multinomial(&self) -> bool {
        matches!(self.coefs, FitCoefs::Multinomial { .. })
    }
}

/// Predictions: fitted values (Gaussian) or per-row class probabilities.
#[derive(Debug, Clone)]
pub enum Prediction {
    Values(Vec<f64>),
    Probabilities(Vec<Vec<f64>>),
}

/// Result of [`residual_variance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualVariance {
    pub value: f64,
    /// Set when `n - nnz < 1` forced the `RSS / n` fallback.
    pub degenerate: bool,
}

/// Build the default 100-point log-spaced lambda grid for a design.
///
/// The top of the grid is the smallest penalty that zeroes every coefficient;
/// the bottom is `1e-4` (or `1e-2` when `n <= d`) times that.
pub fn default_lambda_grid(design: &DesignSpec, alpha: f64) -> Result<Vec<f64>> {
    let prep = Prepared::from_design(design);
    let n = design.n() as f64;
    let denom = alpha.max(1e-3);
    let mut max_grad: f64 = 0.0;
    match design.response() {
        Response::Gaussian(y) => {
            let ybar = y.iter().sum::<f64>() / n;
            let yc: Vec<f64> = y.iter().map(|v| v - ybar).collect();
            for xj in &prep.xs {
                max_grad = max_grad.max((dot(xj, &yc) / n).abs());
            }
        }
        Response::Categorical { codes, levels } => {
            let k = levels.len();
            for class in 0..k {
                let prop =
                    codes.iter().filter(|&&c| c as usize == class).count() as f64 / n;
                let u: Vec<f64> = codes
                    .iter()
                    .map(|&c| if c as usize == class { 1.0 - prop } else { -prop })
                    .collect();
                for xj in &prep.xs {
                    max_grad = max_grad.max((dot(xj, &u) / n).abs());
                }
            }
        }
    }
    let lambda_max = (max_grad / denom).max(1e-10);
    let floor = if design.n() > design.d() { 1e-4 } else { 1e-2 };
    let count = 100;
    let log_max = lambda_max.ln();
    let log_min = (lambda_max * floor).ln();
    Ok((0..count)
        .map(|i| (log_max + (log_min - log_max) * i as f64 / (count - 1) as f64).exp())
        .collect())
}

/// Fit the full regularization path.
///
/// When `lambda_grid` is absent the [`default_lambda_grid`] is used. The grid
/// must be strictly decreasing; fits are warm-started along it.
pub fn fit_path(
    design: &DesignSpec,
    alpha: f64,
    lambda_grid: Option<&[f64]>,
) -> Result<Vec<ElasticNetFit>> {
    fit_path_with(design, alpha, lambda_grid, &FitOptions::default())
}

pub fn fit_path_with(
    design: &DesignSpec,
    alpha: f64,
    lambda_grid: Option<&[f64]>,
    opts: &FitOptions,
) -> Result<Vec<ElasticNetFit>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidInput(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let owned;
    let grid: &[f64] = match lambda_grid {
        Some(g) => g,
        None => {
            owned = default_lambda_grid(design, alpha)?;
            &owned
        }
    };
    if grid.is_empty() {
        return Err(Error::InvalidInput("lambda grid must be nonempty".into()));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) || grid.iter().any(|&l| l < 0.0) {
        return Err(Error::InvalidInput(
            "lambda grid must be strictly decreasing and nonnegative".into(),
        ));
    }
    let prep = Prepared::from_design(design);
    match design.response() {
        Response::Gaussian(y) => gaussian::fit_path(&prep, y, alpha, grid, opts),
        Response::Categorical { codes, levels } => {
            multinomial::fit_path(&prep, codes, levels.len(), alpha, grid, opts)
        }
    }
}

/// Predict on new data given as column-major columns matching the fit design.
pub fn predict(fit: &ElasticNetFit, cols: &[Vec<f64>]) -> Result<Prediction> {
    let d = match &fit.coefs {
        FitCoefs::Gaussian { beta, .. } => beta.len(),
        FitCoefs::Multinomial { beta, .. } => beta[0].len(),
    };
    if cols.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "fit has {d} columns, new data has {}",
            cols.len()
        )));
    }
    let m = cols.first().map_or(0, |c| c.len());
    if let Some(bad) = cols.iter().position(|c| c.len() != m) {
        return Err(Error::DimensionMismatch(format!("ragged column {bad} in new data")));
    }
    match &fit.coefs {
        FitCoefs::Gaussian { beta, intercept } => {
            let mut eta = vec![*intercept; m];
            for (j, b) in beta.iter().enumerate() {
                if *b != 0.0 {
                    crate::numeric::kernel::axpy(*b, &cols[j], &mut eta);
                }
            }
            Ok(Prediction::Values(eta))
        }
        FitCoefs::Multinomial { beta, intercepts } => {
            let k = beta.len();
            let mut eta = vec![vec![0.0f64; k]; m];
            for (class, bk) in beta.iter().enumerate() {
                let b0 = intercepts[class];
                for row in eta.iter_mut() {
                    row[class] = b0;
                }
                for (j, b) in bk.iter().enumerate() {
                    if *b != 0.0 {
                        for (i, row) in eta.iter_mut().enumerate() {
                            row[class] += b * cols[j][i];
                        }
                    }
                }
            }
            let probs = eta
                .into_iter()
                .map(|row| {
                    let mx = row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
                    let ex: Vec<f64> = row.iter().map(|&e| (e - mx).exp()).collect();
                    let s: f64 = ex.iter().sum();
                    ex.into_iter().map(|e| e / s).collect()
                })
                .collect();
            Ok(Prediction::Probabilities(probs))
        }
    }
}

/// Adjusted residual variance `RSS / (n - nnz)` for a Gaussian fit.
///
/// When the fit is saturated (`n - nnz < 1`) the value falls back to
/// `RSS / n` and the `degenerate` flag is set.
pub fn residual_variance(fit: &ElasticNetFit, design: &DesignSpec) -> Result<ResidualVariance> {
    let y = match design.response() {
        Response::Gaussian(y) => y,
        _ => {
            return Err(Error::InvalidInput(
                "residual variance is defined for the Gaussian family only".into(),
            ))
        }
    };
    let eta = match predict(fit, design.cols())? {
        Prediction::Values(v) => v,
        _ => unreachable!("gaussian fit predicts values"),
    };
    let rss: f64 = y.iter().zip(&eta).map(|(yi, ei)| (yi - ei) * (yi - ei)).sum();
    let n = design.n();
    if n > fit.nnz {
        Ok(ResidualVariance { value: rss / (n - fit.nnz) as f64, degenerate: false })
    } else {
        Ok(ResidualVariance { value: rss / n as f64, degenerate: true })
    }
}

/// Largest KKT stationarity violation of a fit on its design.
///
/// For every zero coefficient the working-scale gradient must stay within
/// `lambda * alpha`; for nonzero coefficients the stationarity equation must
/// hold. Returns the largest excess, which certified fits keep at or below
/// [`KKT_TOL`].
pub fn kkt_max_violation(fit: &ElasticNetFit, design: &DesignSpec) -> Result<f64> {
    let prep = Prepared::from_design(design);
    let n = design.n() as f64;
    let lambda = fit.lambda;
    let alpha = fit.alpha;
    let mut worst: f64 = 0.0;
    match (&fit.coefs, design.response()) {
        (FitCoefs::Gaussian { beta, intercept }, Response::Gaussian(y)) => {
            // Reconstruct the working residual from original-scale coefficients.
            let mut eta = vec![*intercept; design.n()];
            for (j, b) in beta.iter().enumerate() {
                if *b != 0.0 {
                    crate::numeric::kernel::axpy(*b, &design.cols()[j], &mut eta);
                }
            }
            let r: Vec<f64> = y.iter().zip(&eta).map(|(yi, ei)| yi - ei).collect();
            for (kj, &orig) in prep.kept.iter().enumerate() {
                let g = dot(&prep.xs[kj], &r) / n;
                let b_std = beta[orig] * prep.scales[kj];
                let v = if b_std == 0.0 {
                    (g.abs() - lambda * alpha).max(0.0)
                } else {
                    (g - lambda * (1.0 - alpha) * b_std - lambda * alpha * b_std.signum()).abs()
                };
                worst = worst.max(v);
            }
        }
        (FitCoefs::Multinomial { beta, intercepts }, Response::Categorical { codes, .. }) => {
            let k = beta.len();
            let m = design.n();
            // Class probabilities from original-scale coefficients.
            let mut eta = vec![vec![0.0f64; k]; m];
            for class in 0..k {
                for (i, row) in eta.iter_mut().enumerate() {
                    let mut e = intercepts[class];
                    for (j, b) in beta[class].iter().enumerate() {
                        if *b != 0.0 {
                            e += b * design.cols()[j][i];
                        }
                    }
                    row[class] = e;
                }
            }
            for class in 0..k {
                let mut u = vec![0.0f64; m];
                for i in 0..m {
                    let row = &eta[i];
                    let mx = row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
                    let denom: f64 = row.iter().map(|&e| (e - mx).exp()).sum();
                    let pik = (row[class] - mx).exp() / denom;
                    let yik = if codes[i] as usize == class { 1.0 } else { 0.0 };
                    u[i] = pik - yik;
                }
                for (kj, &orig) in prep.kept.iter().enumerate() {
                    let g = dot(&prep.xs[kj], &u) / n;
                    let b_std = beta[class][orig] * prep.scales[kj];
                    let v = if b_std == 0.0 {
                        (g.abs() - lambda * alpha).max(0.0)
                    } else {
                        (g + lambda * (1.0 - alpha) * b_std + lambda * alpha * b_std.signum())
                            .abs()
                    };
                    worst = worst.max(v);
                }
            }
        }
        _ => {
            return Err(Error::InvalidInput(
                "fit family does not match design response".into(),
            ))
        }
    }
    Ok(worst)
}
