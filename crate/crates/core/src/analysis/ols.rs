use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Akaike Information Criterion in the Gaussian-likelihood form
/// `n * ln(rss/n) + 2k`, with constant terms dropped consistently across
/// compared models. `rss == 0` yields a negative-infinity sentinel.
pub fn aic(rss: f64, n: usize, k: usize) -> f64 {
    assert!(n > k, "aic requires n > k (got n={n}, k={k})");
    if rss <= 0.0 {
        log::warn!("AIC of a zero-residual fit; returning -inf sentinel");
        return f64::NEG_INFINITY;
    }
    n as f64 * (rss / n as f64).ln() + 2.0 * k as f64
}

/// Ordinary least squares with an implicit intercept column.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Standard errors aligned as [intercept, coefficients...].
    pub standard_errors: Vec<f64>,
    pub rss: f64,
    pub sigma2: f64,
    pub r2: f64,
    pub n: usize,
    /// Estimated parameters including the intercept.
    pub k: usize,
    pub aic: f64,
}

impl OlsFit {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(b, x)| b * x)
                .sum::<f64>()
    }
}

/// Fit y ~ 1 + X by least squares. Errors on rank-deficient designs,
/// listing the offending columns.
pub fn ols_fit(names: &[String], rows: &[Vec<f64>], y: &[f64]) -> Result<OlsFit> {
    let n = rows.len();
    let p = names.len() + 1;
    if n != y.len() {
        return Err(Error::invalid("design and target lengths differ"));
    }
    if n <= p {
        return Err(Error::invalid(format!(
            "need more observations ({n}) than parameters ({p})"
        )));
    }

    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        x[(i, 0)] = 1.0;
        for j in 0..p - 1 {
            x[(i, j + 1)] = rows[i][j];
        }
    }

    if let Some(collinear) = dependent_columns(&x, names) {
        return Err(Error::invalid(format!(
            "rank-deficient design; collinear columns: {}",
            collinear.join(", ")
        )));
    }

    let xtx = x.transpose() * &x;
    let xty = x.transpose() * DVector::from_column_slice(y);
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::numeric("normal equations not positive definite"))?;
    let beta = chol.solve(&xty);

    let yhat = &x * &beta;
    let rss: f64 = y
        .iter()
        .zip(yhat.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - rss / ss_tot } else { 1.0 };
    let sigma2 = rss / (n - p) as f64;
    let cov = chol.inverse() * sigma2;
    let standard_errors = (0..p).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();

    Ok(OlsFit {
        names: names.to_vec(),
        intercept: beta[0],
        coefficients: beta.iter().skip(1).copied().collect(),
        standard_errors,
        rss,
        sigma2,
        r2,
        n,
        k: p,
        aic: aic(rss, n, p),
    })
}

/// Sequential Gram-Schmidt over the design columns (intercept first);
/// returns the names of columns that add no new direction.
fn dependent_columns(x: &DMatrix<f64>, names: &[String]) -> Option<Vec<String>> {
    let n = x.nrows();
    let p = x.ncols();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut bad = Vec::new();
    for j in 0..p {
        let col = DVector::from_fn(n, |i, _| x[(i, j)]);
        let orig_norm = col.norm();
        let mut resid = col;
        for b in &basis {
            let proj = b.dot(&resid);
            resid -= b * proj;
        }
        // re-orthogonalize once for numerical safety
        for b in &basis {
            let proj = b.dot(&resid);
            resid -= b * proj;
        }
        let norm = resid.norm();
        if norm <= 1e-10 * orig_norm.max(1.0) {
            let name = if j == 0 { "(intercept)".to_string() } else { names[j - 1].clone() };
            bad.push(name);
        } else {
            basis.push(resid / norm);
        }
    }
    if bad.is_empty() {
        None
    } else {
        Some(bad)
    }
}
