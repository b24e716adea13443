use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::analysis::{ols_fit, RegressionResult};
use crate::error::{Error, Result};

/// One experiment outcome for the scaling regression.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPoint {
    pub group: String,
    pub tokens: f64,
    pub metric: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteractionTest {
    pub name: String,
    pub estimate: f64,
    pub standard_error: f64,
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingFit {
    pub groups: Vec<String>,
    pub result: RegressionResult,
    pub r2: f64,
    /// One test per non-reference group's `group x log10(tokens)` term.
    pub interactions: Vec<InteractionTest>,
}

/// OLS of metric on {group indicators, log10(tokens), their interactions},
/// with two-sided t-tests on the interaction coefficients at p < 0.05.
/// The lexicographically first group is the reference level.
pub fn scaling_fit(points: &[ExperimentPoint]) -> Result<ScalingFit> {
    let mut groups: Vec<String> = points.iter().map(|p| p.group.clone()).collect();
    groups.sort();
    groups.dedup();
    if groups.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 dataset groups, got {}",
            groups.len()
        )));
    }
    for g in &groups {
        let count = points.iter().filter(|p| &p.group == g).count();
        if count < 3 {
            return Err(Error::invalid(format!(
                "group {g:?} has {count} points; need at least 3"
            )));
        }
    }
    if points.iter().any(|p| p.tokens <= 0.0) {
        return Err(Error::invalid("token counts must be positive"));
    }

    let mut names = Vec::new();
    for g in &groups[1..] {
        names.push(format!("group[{g}]"));
    }
    names.push("log10_tokens".to_string());
    for g in &groups[1..] {
        names.push(format!("group[{g}]:log10_tokens"));
    }

    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let log_tokens = p.tokens.log10();
            let mut row = Vec::with_capacity(names.len());
            for g in &groups[1..] {
                row.push(if &p.group == g { 1.0 } else { 0.0 });
            }
            row.push(log_tokens);
            for g in &groups[1..] {
                row.push(if &p.group == g { log_tokens } else { 0.0 });
            }
            row
        })
        .collect();
    let y: Vec<f64> = points.iter().map(|p| p.metric).collect();

    let fit = ols_fit(&names, &rows, &y)?;
    let df = (fit.n - fit.k) as f64;
    let t_dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::numeric(format!("t distribution: {e}")))?;

    let mut interactions = Vec::new();
    for (j, name) in names.iter().enumerate() {
        if !name.contains(":log10_tokens") {
            continue;
        }
        let estimate = fit.coefficients[j];
        let se = fit.standard_errors[j + 1]; // offset for the intercept
        let (t, p) = if se > 0.0 {
            let t = estimate / se;
            (t, 2.0 * (1.0 - t_dist.cdf(t.abs())))
        } else if estimate.abs() < 1e-8 {
            // perfect fit with a null interaction: clearly not significant
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        };
        interactions.push(InteractionTest {
            name: name.clone(),
            estimate,
            standard_error: se,
            t,
            p,
            significant: p < 0.05,
        });
    }

    let result = RegressionResult {
        coefficients: names.iter().cloned().zip(fit.coefficients.clone()).collect(),
        intercept: fit.intercept,
        alpha: None,
        nonzero_count: fit.coefficients.iter().filter(|&&b| b != 0.0).count(),
        cv_r2: None,
        cv_rmse: None,
        rss: fit.rss,
        n: fit.n,
        k: fit.k,
        aic: fit.aic,
    };
    Ok(ScalingFit { groups, result, r2: fit.r2, interactions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn planted(slope_a: f64, slope_b: f64, noise: f64, n: usize, seed: u64) -> Vec<ExperimentPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::new();
        for i in 0..n {
            let tokens = 10f64.powf(3.0 + 4.0 * i as f64 / (n - 1) as f64);
            let eps_a: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal) * noise;
            let eps_b: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal) * noise;
            pts.push(ExperimentPoint {
                group: "a".into(),
                tokens,
                metric: 1.0 + slope_a * tokens.log10() + eps_a,
            });
            pts.push(ExperimentPoint {
                group: "b".into(),
                tokens,
                metric: 1.0 + slope_b * tokens.log10() + eps_b,
            });
        }
        pts
    }

    #[test]
    fn constructed_null_has_zero_interaction_and_perfect_fit() {
        let pts = planted(5.0, 5.0, 0.0, 10, 0);
        let fit = scaling_fit(&pts).unwrap();
        assert_eq!(fit.interactions.len(), 1);
        assert!(fit.interactions[0].estimate.abs() < 1e-8);
        assert!(!fit.interactions[0].significant);
        assert!((fit.r2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn recovers_planted_interaction() {
        let pts = planted(5.0, 9.0, 0.1, 10, 42);
        let fit = scaling_fit(&pts).unwrap();
        let inter = &fit.interactions[0];
        assert!((inter.estimate - 4.0).abs() < 0.5, "estimate {}", inter.estimate);
        assert!(inter.p < 0.01, "p {}", inter.p);
        assert!(inter.significant);
        let slope = fit.result.coefficient("log10_tokens").unwrap();
        assert!((slope - 5.0).abs() < 0.5);
    }

    #[test]
    fn single_group_errors() {
        let pts: Vec<ExperimentPoint> = (0..5)
            .map(|i| ExperimentPoint {
                group: "only".into(),
                tokens: 10f64.powi(i + 1),
                metric: i as f64,
            })
            .collect();
        assert!(scaling_fit(&pts).is_err());
    }

    #[test]
    fn rank_deficient_design_names_columns() {
        // all points share one token count: log10_tokens is constant,
        // collinear with the intercept
        let pts: Vec<ExperimentPoint> = (0..8)
            .map(|i| ExperimentPoint {
                group: if i % 2 == 0 { "a" } else { "b" }.into(),
                tokens: 1000.0,
                metric: i as f64,
            })
            .collect();
        let err = scaling_fit(&pts).unwrap_err();
        assert!(err.to_string().contains("collinear"), "{err}");
        assert!(err.to_string().contains("log10_tokens"), "{err}");
    }
}
