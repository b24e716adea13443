//! Predictor analyses over experiment results: Spearman correlations,
//! cross-validated Lasso, gradient-boosted trees with importances,
//! top-feature aggregation, scaling regressions, and AIC utilities.

mod aggregate;
mod gbt;
mod lasso;
mod ols;
mod scaling;
mod spearman;

pub use aggregate::{aggregate_top_features, CellRanking, FeatureAggregateRow, Method};
pub use gbt::{gbt_fit, GbtConfig, GbtModel};
pub use lasso::{lasso_cv, lasso_path_fixed_alpha, LassoConfig};
pub use ols::{aic, ols_fit, OlsFit};
pub use scaling::{scaling_fit, ExperimentPoint, InteractionTest, ScalingFit};
pub use spearman::{average_ranks, spearman};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows are experiments, columns are features. Missing cells are imputed
/// with the column median at construction; all-missing columns are dropped.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    /// Row-major, `rows.len() x columns.len()`.
    pub data: Vec<Vec<f64>>,
}

/// Per-column missingness recorded while building a design matrix.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MissingnessReport {
    /// column -> number of imputed cells
    pub imputed: BTreeMap<String, usize>,
    /// columns dropped because no row had a value
    pub dropped: Vec<String>,
}

impl DesignMatrix {
    /// Assemble from named per-row feature maps. The column set is the
    /// union of all row keys; gaps are filled with the column median.
    pub fn from_feature_maps(
        rows: &[(String, BTreeMap<String, f64>)],
    ) -> Result<(Self, MissingnessReport)> {
        if rows.is_empty() {
            return Err(Error::invalid("design matrix needs at least one row"));
        }
        let mut columns: Vec<String> = Vec::new();
        for (_, m) in rows {
            for k in m.keys() {
                if !columns.contains(k) {
                    columns.push(k.clone());
                }
            }
        }
        columns.sort();
        let mut report = MissingnessReport::default();
        let mut keep = Vec::new();
        let mut cols_data: Vec<Vec<f64>> = Vec::new();
        for col in &columns {
            let values: Vec<Option<f64>> = rows.iter().map(|(_, m)| m.get(col).copied()).collect();
            let mut present: Vec<f64> = values.iter().flatten().copied().collect();
            if present.is_empty() {
                report.dropped.push(col.clone());
                continue;
            }
            let n_missing = values.len() - present.len();
            if n_missing > 0 {
                report.imputed.insert(col.clone(), n_missing);
            }
            present.sort_by(|a, b| a.partial_cmp(b).expect("finite features"));
            let median = if present.len() % 2 == 1 {
                present[present.len() / 2]
            } else {
                (present[present.len() / 2 - 1] + present[present.len() / 2]) / 2.0
            };
            keep.push(col.clone());
            cols_data.push(values.into_iter().map(|v| v.unwrap_or(median)).collect());
        }
        let n = rows.len();
        let data: Vec<Vec<f64>> = (0..n)
            .map(|i| cols_data.iter().map(|c| c[i]).collect())
            .collect();
        Ok((
            DesignMatrix {
                rows: rows.iter().map(|(name, _)| name.clone()).collect(),
                columns: keep,
                data,
            },
            report,
        ))
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.iter().map(|r| r[j]).collect()
    }

    /// Standardize columns to mean 0, variance 1 (population variance).
    /// Constant columns are dropped; their names are returned.
    pub fn standardized(&self) -> (DesignMatrix, Vec<String>) {
        let n = self.n_rows() as f64;
        let mut columns = Vec::new();
        let mut kept_idx = Vec::new();
        let mut dropped = Vec::new();
        let mut stats = Vec::new();
        for j in 0..self.n_cols() {
            let col = self.column(j);
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            if var <= 1e-24 {
                dropped.push(self.columns[j].clone());
            } else {
                columns.push(self.columns[j].clone());
                kept_idx.push(j);
                stats.push((mean, var.sqrt()));
            }
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                kept_idx
                    .iter()
                    .zip(&stats)
                    .map(|(&j, &(m, s))| (row[j] - m) / s)
                    .collect()
            })
            .collect();
        (
            DesignMatrix { rows: self.rows.clone(), columns, data },
            dropped,
        )
    }
}

/// A fitted regression with enough bookkeeping to compare models.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionResult {
    /// Named coefficients (standardized scale for the Lasso).
    pub coefficients: Vec<(String, f64)>,
    pub intercept: f64,
    /// Regularization strength, when regularized.
    pub alpha: Option<f64>,
    pub nonzero_count: usize,
    /// Out-of-fold R^2 at the selected alpha, when cross-validated.
    pub cv_r2: Option<f64>,
    /// Out-of-fold RMSE at the selected alpha, when cross-validated.
    pub cv_rmse: Option<f64>,
    pub rss: f64,
    pub n: usize,
    /// Number of estimated parameters (including the intercept).
    pub k: usize,
    pub aic: f64,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.coefficients
            .iter()
            .find(|(c, _)| c == name)
            .map(|&(_, v)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imputation_fills_with_column_median() {
        let rows = vec![
            ("a".to_string(), BTreeMap::from([("x".to_string(), 1.0)])),
            ("b".to_string(), BTreeMap::from([("x".to_string(), 3.0)])),
            ("c".to_string(), BTreeMap::new()),
        ];
        let (dm, rep) = DesignMatrix::from_feature_maps(&rows).unwrap();
        assert_eq!(dm.column(0), vec![1.0, 3.0, 2.0]);
        assert_eq!(rep.imputed["x"], 1);
    }

    #[test]
    fn standardization_is_idempotent() {
        let rows = vec![
            ("a".to_string(), BTreeMap::from([("x".to_string(), 1.0), ("y".to_string(), 5.0)])),
            ("b".to_string(), BTreeMap::from([("x".to_string(), 2.0), ("y".to_string(), 5.0)])),
            ("c".to_string(), BTreeMap::from([("x".to_string(), 6.0), ("y".to_string(), 5.0)])),
        ];
        let (dm, _) = DesignMatrix::from_feature_maps(&rows).unwrap();
        let (s1, dropped) = dm.standardized();
        assert_eq!(dropped, vec!["y".to_string()]);
        let (s2, dropped2) = s1.standardized();
        assert!(dropped2.is_empty());
        for (r1, r2) in s1.data.iter().zip(&s2.data) {
            for (a, b) in r1.iter().zip(r2) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
