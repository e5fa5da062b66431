//! Multinomial-logistic path solver: symmetric multi-logit with one
//! coefficient vector per class, fit by per-class quadratic approximation
//! (partial Newton) with weighted coordinate descent inside each class pass.
//!
//! Class probabilities use the softmax of all class scores; knockoff
//! generation relies on the symmetric form, which avoids singling out a
//! reference class. Uniqueness of the coefficients comes from the penalty;
//! the unpenalized intercepts are mean-centered after convergence.

use super::prepared::Prepared;
use super::{ElasticNetFit, FitCoefs, FitOptions, KKT_TOL};
use crate::error::{Error, Result};
use crate::numeric::kernel::{axpy, axpy_weighted, dot, weighted_sq_norm};

/// Probability clip used for the curvature weights only; score residuals
/// always use the exact probabilities.
const PROB_CLIP: f64 = 1e-5;

#[inline]
fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

struct State {
    k: usize,
    d: usize,
    n: usize,
    beta: Vec<Vec<f64>>,
    intercepts: Vec<f64>,
    /// eta[class][row] on the working (standardized) scale.
    eta: Vec<Vec<f64>>,
    /// Classes with zero training observations are frozen: their intercept
    /// is pinned far below the others and their coefficients stay zero.
    frozen: Vec<bool>,
}

/// Shift that minimizes the per-feature elastic penalty
/// `(1-alpha)/2 * sum_k (b_k - c)^2 + alpha * sum_k |b_k - c|` over `c`.
///
/// Class probabilities are invariant to such shifts, so applying the
/// minimizer strictly lowers the objective and removes the flat direction
/// of the symmetric parameterization that would otherwise let coordinate
/// descent drift without converging.
fn penalty_centering_shift(values: &[f64], alpha: f64) -> f64 {
    let k = values.len();
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    if alpha >= 1.0 {
        // Pure l1: lower median (deterministic choice on flat stretches).
        return sorted[(k - 1) / 2];
    }
    let sum: f64 = sorted.iter().sum();
    let ratio = alpha / (1.0 - alpha);
    // Derivative on the open segment with `below` values to the left:
    // (1-alpha) (K c - S) + alpha (below - above) = 0.
    for below in 0..=k {
        let above = k - below;
        let c = (sum - ratio * (below as f64 - above as f64)) / k as f64;
        let lo = if below == 0 { f64::NEG_INFINITY } else { sorted[below - 1] };
        let hi = if below == k { f64::INFINITY } else { sorted[below] };
        if c >= lo && c <= hi {
            return c;
        }
    }
    // Otherwise the minimum sits at a kink: first value where the right
    // derivative turns nonnegative.
    for (i, &b) in sorted.iter().enumerate() {
        let below = i + 1;
        let above = k - below;
        let right = (1.0 - alpha) * (k as f64 * b - sum) + alpha * (below as f64 - above as f64);
        if right >= 0.0 {
            return b;
        }
    }
    *sorted.last().expect("nonempty")
}

impl State {
    fn probabilities_for_class(&self, class: usize, out: &mut [f64]) {
        for i in 0..self.n {
            let mut mx = f64::NEG_INFINITY;
            for l in 0..self.k {
                mx = mx.max(self.eta[l][i]);
            }
            let mut denom = 0.0;
            for l in 0..self.k {
                denom += (self.eta[l][i] - mx).exp();
            }
            out[i] = (self.eta[class][i] - mx).exp() / denom;
        }
    }

    fn mean_nll(&self, codes: &[u32]) -> f64 {
        let mut nll = 0.0;
        for i in 0..self.n {
            let mut mx = f64::NEG_INFINITY;
            for l in 0..self.k {
                mx = mx.max(self.eta[l][i]);
            }
            let mut denom = 0.0;
            for l in 0..self.k {
                denom += (self.eta[l][i] - mx).exp();
            }
            nll += denom.ln() + mx - self.eta[codes[i] as usize][i];
        }
        nll / self.n as f64
    }

    fn penalty(&self, alpha: f64) -> f64 {
        let (mut l1, mut l2) = (0.0, 0.0);
        for bk in &self.beta {
            for b in bk {
                l1 += b.abs();
                l2 += b * b;
            }
        }
        (1.0 - alpha) * l2 / 2.0 + alpha * l1
    }

    fn recompute_eta(&mut self, prep: &Prepared, class: usize) {
        let b0 = self.intercepts[class];
        let eta = &mut self.eta[class];
        eta.iter_mut().for_each(|e| *e = b0);
        for j in 0..self.d {
            let b = self.beta[class][j];
            if b != 0.0 {
                axpy(b, &prep.xs[j], eta);
            }
        }
    }
}

pub(crate) fn fit_path(
    prep: &Prepared,
    codes: &[u32],
    k: usize,
    alpha: f64,
    lambdas: &[f64],
    opts: &FitOptions,
) -> Result<Vec<ElasticNetFit>> {
    let n = prep.n;
    let nf = n as f64;
    let d = prep.d;

    let counts: Vec<usize> = (0..k)
        .map(|class| codes.iter().filter(|&&c| c as usize == class).count())
        .collect();
    let frozen: Vec<bool> = counts.iter().map(|&c| c == 0).collect();

    let mut state = State {
        k,
        d,
        n,
        beta: vec![vec![0.0; d]; k],
        intercepts: vec![0.0; k],
        eta: vec![vec![0.0; n]; k],
        frozen,
    };
    // Intercept-only warm start: log proportions; empty classes pinned low
    // enough that their gradients vanish at double precision.
    let base = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| (c as f64 / nf).ln())
        .fold(f64::NEG_INFINITY, f64::max);
    for class in 0..k {
        state.intercepts[class] = if counts[class] > 0 {
            (counts[class] as f64 / nf).ln()
        } else {
            base - 40.0
        };
        state.recompute_eta(prep, class);
    }

    let y_ind: Vec<Vec<f64>> = (0..k)
        .map(|class| {
            codes
                .iter()
                .map(|&c| if c as usize == class { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();

    let mut fits = Vec::with_capacity(lambdas.len());
    let mut lambda_prev = lambdas[0];
    let mut in_model = vec![vec![false; d]; k];
    let mut pik = vec![0.0f64; n];

    for &lambda in lambdas {
        // Strong-rule screening on the warm-start gradients.
        let strong_cut = alpha * (2.0 * lambda - lambda_prev);
        let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); k];
        for class in 0..k {
            if state.frozen[class] {
                continue;
            }
            state.probabilities_for_class(class, &mut pik);
            let u: Vec<f64> = (0..n).map(|i| y_ind[class][i] - pik[i]).collect();
            for j in 0..d {
                let active = state.beta[class][j] != 0.0;
                let include = active || (dot(&prep.xs[j], &u) / nf).abs() >= strong_cut;
                in_model[class][j] = include;
                if include {
                    candidates[class].push(j);
                }
            }
        }

        let mut cycles = 0usize;
        'outer: loop {
            let mut last_outer_change = f64::INFINITY;
            while cycles < opts.max_cycles {
                let obj_before = if opts.check_monotonicity {
                    Some(state.mean_nll(codes) + lambda * state.penalty(alpha))
                } else {
                    None
                };
                let mut outer_change: f64 = 0.0;
                for class in 0..k {
                    if state.frozen[class] {
                        continue;
                    }
                    outer_change = outer_change.max(class_pass(
                        prep,
                        &mut state,
                        &y_ind[class],
                        class,
                        &candidates[class],
                        lambda,
                        alpha,
                        opts,
                        &mut pik,
                    ));
                    state.recompute_eta(prep, class);
                }
                // Canonicalize the symmetric parameterization: shift each
                // feature's coefficients across classes to the penalty
                // minimizer (likelihood-invariant), and re-center intercepts.
                let mut shifted = false;
                let mut scratch = vec![0.0f64; k];
                for j in 0..d {
                    for class in 0..k {
                        scratch[class] = state.beta[class][j];
                    }
                    if scratch.iter().all(|b| *b == 0.0) {
                        continue;
                    }
                    let c = penalty_centering_shift(&scratch, alpha);
                    if c != 0.0 {
                        for class in 0..k {
                            state.beta[class][j] -= c;
                            if state.beta[class][j] != 0.0 && !in_model[class][j] {
                                in_model[class][j] = true;
                                candidates[class].push(j);
                            }
                        }
                        outer_change = outer_change.max(c.abs());
                        shifted = true;
                    }
                }
                let mean_b = state.intercepts.iter().sum::<f64>() / k as f64;
                if mean_b != 0.0 {
                    for b in state.intercepts.iter_mut() {
                        *b -= mean_b;
                    }
                    shifted = true;
                }
                if shifted {
                    for class in 0..k {
                        state.recompute_eta(prep, class);
                    }
                }
                cycles += 1;
                if let Some(before) = obj_before {
                    let after = state.mean_nll(codes) + lambda * state.penalty(alpha);
                    assert!(
                        after <= before + 1e-10 * before.abs().max(1.0),
                        "objective increased across outer sweep: {before} -> {after}"
                    );
                }
                last_outer_change = outer_change;
                if outer_change < opts.tol {
                    break;
                }
            }
            if last_outer_change >= opts.tol && cycles >= opts.max_cycles {
                return Err(Error::NonConvergence {
                    max_cycles: opts.max_cycles,
                    last_change: last_outer_change,
                });
            }

            // Full KKT sweep on the exact gradient.
            let mut violations = false;
            for class in 0..k {
                if state.frozen[class] {
                    continue;
                }
                state.probabilities_for_class(class, &mut pik);
                let u: Vec<f64> = (0..n).map(|i| pik[i] - y_ind[class][i]).collect();
                for j in 0..d {
                    if in_model[class][j] {
                        continue;
                    }
                    let g = dot(&prep.xs[j], &u) / nf;
                    if g.abs() > lambda * alpha + 0.5 * KKT_TOL {
                        in_model[class][j] = true;
                        candidates[class].push(j);
                        violations = true;
                    }
                }
            }
            if !violations {
                break 'outer;
            }
        }

        // Center the unpenalized intercepts; probabilities are unchanged.
        let mean_b = state.intercepts.iter().sum::<f64>() / k as f64;
        for class in 0..k {
            state.intercepts[class] -= mean_b;
            state.recompute_eta(prep, class);
        }

        let nnz = state
            .beta
            .iter()
            .map(|bk| bk.iter().filter(|b| **b != 0.0).count())
            .sum();
        let objective = state.mean_nll(codes) + lambda * state.penalty(alpha);
        let mut beta_orig = Vec::with_capacity(k);
        let mut intercepts_orig = Vec::with_capacity(k);
        for class in 0..k {
            let (b, shift) = prep.unstandardize(&state.beta[class]);
            beta_orig.push(b);
            intercepts_orig.push(state.intercepts[class] - shift);
        }
        // Re-center after the mean shift from unstandardization.
        let m = intercepts_orig.iter().sum::<f64>() / k as f64;
        intercepts_orig.iter_mut().for_each(|b| *b -= m);
        fits.push(ElasticNetFit {
            coefs: FitCoefs::Multinomial { beta: beta_orig, intercepts: intercepts_orig },
            lambda,
            alpha,
            nnz,
            sigma2_hat: None,
            objective,
        });
        lambda_prev = lambda;
    }
    Ok(fits)
}

/// One quadratic-approximation pass over a single class: build the weighted
/// least-squares model at the current probabilities and run coordinate
/// descent on it to convergence. Returns the largest coefficient change.
#[allow(clippy::too_many_arguments)]
fn class_pass(
    prep: &Prepared,
    state: &mut State,
    y_class: &[f64],
    class: usize,
    candidates: &[usize],
    lambda: f64,
    alpha: f64,
    opts: &FitOptions,
    pik: &mut [f64],
) -> f64 {
    let n = prep.n;
    let nf = n as f64;
    state.probabilities_for_class(class, pik);
    let mut w = vec![0.0f64; n];
    let mut wr = vec![0.0f64; n];
    for i in 0..n {
        let p = pik[i];
        let pc = p.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
        w[i] = pc * (1.0 - pc);
        // Working residual w * (z - fitted) equals the score y - p at the
        // start of the pass.
        wr[i] = y_class[i] - p;
    }
    let wsum: f64 = w.iter().sum();
    let denom0: Vec<f64> = candidates
        .iter()
        .map(|&j| weighted_sq_norm(&w, &prep.xs[j]) / nf)
        .collect();

    let mut pass_change: f64 = 0.0;
    for _ in 0..opts.max_cycles.max(1) {
        let mut max_delta: f64 = 0.0;
        for (idx, &j) in candidates.iter().enumerate() {
            let xj = &prep.xs[j];
            let bj = state.beta[class][j];
            let g = dot(xj, &wr) / nf;
            let u = g + denom0[idx] * bj;
            let bnew = soft_threshold(u, lambda * alpha) / (denom0[idx] + lambda * (1.0 - alpha));
            let delta = bnew - bj;
            if delta != 0.0 {
                axpy_weighted(-delta, &w, xj, &mut wr);
                state.beta[class][j] = bnew;
                max_delta = max_delta.max(delta.abs());
            }
        }
        // Unpenalized intercept step.
        let db = wr.iter().sum::<f64>() / wsum;
        if db != 0.0 {
            axpy(-db, &w, &mut wr);
            state.intercepts[class] += db;
            max_delta = max_delta.max(db.abs());
        }
        pass_change = pass_change.max(max_delta);
        if max_delta < opts.tol {
            break;
        }
    }
    pass_change
}
