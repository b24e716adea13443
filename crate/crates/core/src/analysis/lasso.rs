use serde::{Deserialize, Serialize};

use crate::analysis::{aic, DesignMatrix, RegressionResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LassoConfig {
    /// Points on the log-spaced alpha grid.
    pub grid_points: usize,
    /// Grid endpoints as multiples of alpha_max.
    pub grid_lo: f64,
    pub grid_hi: f64,
    /// Cross-validation folds (row index modulo folds).
    pub folds: usize,
    /// Leave-one-out instead of k folds.
    pub leave_one_out: bool,
    /// Convergence: max coefficient change per sweep.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoConfig {
    fn default() -> Self {
        LassoConfig {
            grid_points: 50,
            grid_lo: 1e-4,
            grid_hi: 10.0,
            folds: 5,
            leave_one_out: false,
            tol: 1e-6,
            max_sweeps: 100_000,
        }
    }
}

/// Lasso with the regularization strength chosen by cross-validation.
///
/// Predictors are standardized to mean 0 / variance 1 (constant columns
/// dropped), then the objective `(1/2n)||y - X b - b0||^2 + alpha*||b||_1`
/// is minimized by cyclic coordinate descent with soft-thresholding.
/// `alpha` is picked by minimum mean fold MSE over a log grid spanning
/// `[grid_lo, grid_hi] * alpha_max`; ties prefer the sparser (larger)
/// alpha. Reported CV metrics come from out-of-fold predictions at the
/// selected alpha; coefficients come from a final refit on all rows.
pub fn lasso_cv(x: &DesignMatrix, y: &[f64], cfg: &LassoConfig) -> Result<RegressionResult> {
    let n = x.n_rows();
    if n != y.len() {
        return Err(Error::invalid("design and target lengths differ"));
    }
    let folds = if cfg.leave_one_out { n } else { cfg.folds };
    if folds < 2 || n < folds {
        return Err(Error::invalid(format!(
            "need n >= folds >= 2 (n={n}, folds={folds})"
        )));
    }
    let (xs, _dropped) = x.standardized();
    if xs.n_cols() == 0 {
        return Err(Error::invalid("no usable predictors after dropping constants"));
    }
    let cols: Vec<Vec<f64>> = (0..xs.n_cols()).map(|j| xs.column(j)).collect();

    let ybar = y.iter().sum::<f64>() / n as f64;
    let alpha_max = cols
        .iter()
        .map(|c| {
            (c.iter().zip(y).map(|(xi, yi)| xi * (yi - ybar)).sum::<f64>() / n as f64).abs()
        })
        .fold(0.0f64, f64::max);
    if alpha_max <= 0.0 {
        return Err(Error::invalid("target is constant; nothing to fit"));
    }
    let grid = log_grid(cfg.grid_lo * alpha_max, cfg.grid_hi * alpha_max, cfg.grid_points);

    // Per-alpha out-of-fold predictions, filled fold by fold with warm starts
    // along the (descending) alpha path.
    let mut oof: Vec<Vec<f64>> = vec![vec![0.0; n]; grid.len()];
    for fold in 0..folds {
        let train_idx: Vec<usize> = (0..n).filter(|i| i % folds != fold).collect();
        let val_idx: Vec<usize> = (0..n).filter(|i| i % folds == fold).collect();
        let prob = CdProblem::new(&cols, y, &train_idx);
        let mut beta = vec![0.0; cols.len()];
        for (a_idx, &alpha) in grid.iter().enumerate() {
            prob.descend(&mut beta, alpha, cfg.tol, cfg.max_sweeps)?;
            for &i in &val_idx {
                let row: Vec<f64> = cols.iter().map(|c| c[i]).collect();
                oof[a_idx][i] = prob.predict(&beta, &row);
            }
        }
    }

    let mut best: Option<(usize, f64)> = None;
    for (a_idx, preds) in oof.iter().enumerate() {
        let mse = y
            .iter()
            .zip(preds)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / n as f64;
        if best.map_or(true, |(_, m)| mse < m) {
            best = Some((a_idx, mse));
        }
    }
    let (best_idx, best_mse) = best.expect("non-empty grid");
    let alpha = grid[best_idx];

    let ss_tot: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum::<f64>();
    let cv_r2 = 1.0 - best_mse * n as f64 / ss_tot;
    let cv_rmse = best_mse.sqrt();

    // Final refit on all rows at the selected alpha.
    let all: Vec<usize> = (0..n).collect();
    let prob = CdProblem::new(&cols, y, &all);
    let mut beta = vec![0.0; cols.len()];
    for &a in grid.iter().take_while(|&&a| a >= alpha) {
        prob.descend(&mut beta, a, cfg.tol, cfg.max_sweeps)?;
    }
    prob.descend(&mut beta, alpha, cfg.tol, cfg.max_sweeps)?;
    let intercept = prob.intercept(&beta);
    let rss: f64 = (0..n)
        .map(|i| {
            let row: Vec<f64> = cols.iter().map(|c| c[i]).collect();
            let e = y[i] - prob.predict(&beta, &row);
            e * e
        })
        .sum();
    let nonzero_count = beta.iter().filter(|&&b| b != 0.0).count();
    let k = nonzero_count + 1;
    let aic_value = if n > k { aic(rss, n, k) } else { f64::NAN };

    Ok(RegressionResult {
        coefficients: xs.columns.iter().cloned().zip(beta).collect(),
        intercept,
        alpha: Some(alpha),
        nonzero_count,
        cv_r2: Some(cv_r2),
        cv_rmse: Some(cv_rmse),
        rss,
        n,
        k,
        aic: aic_value,
    })
}

/// Fit at one fixed alpha on all rows (standardizing internally).
/// Returns named coefficients and the intercept.
pub fn lasso_path_fixed_alpha(
    x: &DesignMatrix,
    y: &[f64],
    alpha: f64,
    cfg: &LassoConfig,
) -> Result<(Vec<(String, f64)>, f64)> {
    let (xs, _) = x.standardized();
    if xs.n_cols() == 0 {
        return Err(Error::invalid("no usable predictors after dropping constants"));
    }
    let cols: Vec<Vec<f64>> = (0..xs.n_cols()).map(|j| xs.column(j)).collect();
    let all: Vec<usize> = (0..x.n_rows()).collect();
    let prob = CdProblem::new(&cols, y, &all);
    let mut beta = vec![0.0; cols.len()];
    prob.descend(&mut beta, alpha, cfg.tol, cfg.max_sweeps)?;
    let intercept = prob.intercept(&beta);
    Ok((xs.columns.iter().cloned().zip(beta).collect(), intercept))
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![hi];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    // descending so warm starts walk from sparse to dense
    (0..points)
        .map(|i| (lhi + (llo - lhi) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Centered coordinate-descent subproblem over a row subset.
struct CdProblem {
    /// Centered columns restricted to the subset.
    xc: Vec<Vec<f64>>,
    yc: Vec<f64>,
    col_means: Vec<f64>,
    y_mean: f64,
    /// (1/m)||xc_j||^2 per column.
    col_sq: Vec<f64>,
    m: usize,
}

impl CdProblem {
    fn new(cols: &[Vec<f64>], y: &[f64], subset: &[usize]) -> Self {
        let m = subset.len();
        let col_means: Vec<f64> = cols
            .iter()
            .map(|c| subset.iter().map(|&i| c[i]).sum::<f64>() / m as f64)
            .collect();
        let y_mean = subset.iter().map(|&i| y[i]).sum::<f64>() / m as f64;
        let xc: Vec<Vec<f64>> = cols
            .iter()
            .zip(&col_means)
            .map(|(c, &mu)| subset.iter().map(|&i| c[i] - mu).collect())
            .collect();
        let yc: Vec<f64> = subset.iter().map(|&i| y[i] - y_mean).collect();
        let col_sq = xc
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>() / m as f64)
            .collect();
        CdProblem { xc, yc, col_means, y_mean, col_sq, m }
    }

    fn descend(&self, beta: &mut [f64], alpha: f64, tol: f64, max_sweeps: usize) -> Result<()> {
        let m = self.m as f64;
        let mut resid: Vec<f64> = self.yc.clone();
        for (j, col) in self.xc.iter().enumerate() {
            if beta[j] != 0.0 {
                for (r, x) in resid.iter_mut().zip(col) {
                    *r -= beta[j] * x;
                }
            }
        }
        for sweep in 1..=max_sweeps {
            let mut max_delta = 0.0f64;
            for j in 0..self.xc.len() {
                if self.col_sq[j] <= 0.0 {
                    beta[j] = 0.0;
                    continue;
                }
                let col = &self.xc[j];
                let grad =
                    col.iter().zip(&resid).map(|(x, r)| x * r).sum::<f64>() / m
                        + self.col_sq[j] * beta[j];
                let new = soft_threshold(grad, alpha) / self.col_sq[j];
                let delta = new - beta[j];
                if delta != 0.0 {
                    for (r, x) in resid.iter_mut().zip(col) {
                        *r -= delta * x;
                    }
                    beta[j] = new;
                    max_delta = max_delta.max(delta.abs());
                }
            }
            if max_delta < tol {
                return Ok(());
            }
            if sweep == max_sweeps {
                return Err(Error::numeric(format!(
                    "coordinate descent did not converge at alpha {alpha:.6e} after {sweep} sweeps"
                )));
            }
        }
        Ok(())
    }

    fn intercept(&self, beta: &[f64]) -> f64 {
        self.y_mean
            - beta
                .iter()
                .zip(&self.col_means)
                .map(|(b, mu)| b * mu)
                .sum::<f64>()
    }

    /// Predict from an uncentered row.
    fn predict(&self, beta: &[f64], row: &[f64]) -> f64 {
        self.intercept(beta) + beta.iter().zip(row).map(|(b, x)| b * x).sum::<f64>()
    }
}

fn soft_threshold(z: f64, alpha: f64) -> f64 {
    if z > alpha {
        z - alpha
    } else if z < -alpha {
        z + alpha
    } else {
        0.0
    }
}
