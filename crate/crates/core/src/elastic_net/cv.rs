//! K-fold cross-validation over a shared lambda grid: seeded near-equal
//! fold assignment, mean out-of-fold deviance per lambda (squared error or
//! multinomial negative log-likelihood), and the loss-minimizing lambda.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{default_lambda_grid, fit_path_with, DesignSpec, ElasticNetFit, FitOptions, Prediction};
use crate::data::Response;
use crate::error::{Error, Result};
use crate::numeric::stream::SeededStream;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvResult {
    /// Strictly decreasing penalty grid shared by all folds.
    pub lambda_grid: Vec<f64>,
    /// Mean out-of-fold deviance per lambda.
    pub cv_loss: Vec<f64>,
    /// Standard error of the per-fold losses per lambda.
    pub cv_se: Vec<f64>,
    /// Grid value minimizing `cv_loss` (largest such lambda on ties).
    pub lambda_min: f64,
    pub lambda_min_index: usize,
}

/// Deterministic fold assignment: a seeded shuffle dealt round-robin, so
/// fold sizes differ by at most one.
fn fold_assignment(n: usize, folds: usize, stream: SeededStream) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut stream.rng());
    let mut fold_of = vec![0usize; n];
    for (pos, &row) in order.iter().enumerate() {
        fold_of[row] = pos % folds;
    }
    fold_of
}

pub fn cross_validate(
    design: &DesignSpec,
    alpha: f64,
    folds: usize,
    stream: SeededStream,
) -> Result<CvResult> {
    let grid = default_lambda_grid(design, alpha)?;
    cross_validate_with_grid(design, alpha, folds, stream, &grid)
}

pub fn cross_validate_with_grid(
    design: &DesignSpec,
    alpha: f64,
    folds: usize,
    stream: SeededStream,
    grid: &[f64],
) -> Result<CvResult> {
    let n = design.n();
    if folds < 3 || folds > n {
        return Err(Error::InvalidInput(format!(
            "folds must lie in [3, n]; got {folds} with n = {n}"
        )));
    }
    let max_fold = n.div_ceil(folds);
    if n - max_fold < 2 {
        return Err(Error::InvalidInput(format!(
            "cross-validation would train on fewer than 2 observations (n = {n}, folds = {folds})"
        )));
    }
    let fold_of = fold_assignment(n, folds, stream);
    let opts = FitOptions::default();

    // fold_losses[f][l] = mean deviance of fold f at grid[l]
    let mut fold_losses = vec![vec![0.0f64; grid.len()]; folds];
    for f in 0..folds {
        let train: Vec<usize> = (0..n).filter(|i| fold_of[*i] != f).collect();
        let test: Vec<usize> = (0..n).filter(|i| fold_of[*i] == f).collect();
        if test.is_empty() {
            return Err(Error::InvalidInput(format!(
                "fold {f} is empty (n = {n}, folds = {folds})"
            )));
        }
        let train_design = design.subset_rows(&train);
        let path = fit_path_with(&train_design, alpha, Some(grid), &opts)?;
        let test_cols: Vec<Vec<f64>> = design
            .cols()
            .iter()
            .map(|c| test.iter().map(|&i| c[i]).collect())
            .collect();
        for (l, fit) in path.iter().enumerate() {
            fold_losses[f][l] = held_out_deviance(fit, &test_cols, design.response(), &test)?;
        }
    }

    let mut cv_loss = vec![0.0f64; grid.len()];
    let mut cv_se = vec![0.0f64; grid.len()];
    for l in 0..grid.len() {
        let mean = fold_losses.iter().map(|fl| fl[l]).sum::<f64>() / folds as f64;
        cv_loss[l] = mean;
        if folds > 1 {
            let var = fold_losses
                .iter()
                .map(|fl| (fl[l] - mean) * (fl[l] - mean))
                .sum::<f64>()
                / (folds as f64 - 1.0);
            cv_se[l] = (var / folds as f64).sqrt();
        }
        if !cv_loss[l].is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite cross-validation loss at lambda index {l}"
            )));
        }
    }
    let lambda_min_index = cv_loss
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty grid");
    Ok(CvResult {
        lambda_grid: grid.to_vec(),
        cv_loss,
        cv_se,
        lambda_min: grid[lambda_min_index],
        lambda_min_index,
    })
}

fn held_out_deviance(
    fit: &ElasticNetFit,
    test_cols: &[Vec<f64>],
    response: &Response,
    test_rows: &[usize],
) -> Result<f64> {
    let m = test_rows.len() as f64;
    match (super::predict(fit, test_cols)?, response) {
        (Prediction::Values(eta), Response::Gaussian(y)) => Ok(test_rows
            .iter()
            .zip(&eta)
            .map(|(&i, e)| (y[i] - e) * (y[i] - e))
            .sum::<f64>()
            / m),
        (Prediction::Probabilities(probs), Response::Categorical { codes, .. }) => Ok(test_rows
            .iter()
            .zip(&probs)
            .map(|(&i, row)| -(row[codes[i] as usize].max(1e-300)).ln())
            .sum::<f64>()
            / m),
        _ => Err(Error::InvalidInput("prediction kind does not match response".into())),
    }
}

/// Cross-validate on the default grid, then fit the full data path and
/// return the fit at `lambda_min` together with the CV table.
pub fn fit_at_cv_minimum(
    design: &DesignSpec,
    alpha: f64,
    folds: usize,
    stream: SeededStream,
) -> Result<(ElasticNetFit, CvResult)> {
    let grid = default_lambda_grid(design, alpha)?;
    let cv = cross_validate_with_grid(design, alpha, folds, stream, &grid)?;
    let mut path = fit_path_with(design, alpha, Some(&grid), &FitOptions::default())?;
    let fit = path.swap_remove(cv.lambda_min_index);
    Ok((fit, cv))
}
