use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// The three complementary per-cell analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    Spearman,
    Lasso,
    Gbt,
}

/// Ranked features from one (model, target, method) analysis cell.
/// Scores are |rho|, |beta|, or importance depending on the method,
/// already sorted descending.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellRanking {
    pub model: String,
    pub target: String,
    pub method: Method,
    pub ranked: Vec<(String, f64)>,
}

/// One row of the aggregated top-predictor table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureAggregateRow {
    pub feature: String,
    /// Appearances across all top-k lists (all methods and cells).
    pub top10: usize,
    /// Distinct methods that selected the feature at least once.
    pub n_methods: usize,
    pub spearman_hits: usize,
    pub lasso_hits: usize,
    pub gbt_hits: usize,
    /// Average 1-based within-list rank when selected.
    pub mean_rank: f64,
    /// Mean |rho| over Spearman top-k appearances (0 when never selected).
    pub mean_abs_rho: f64,
    /// Mean |beta| over Lasso top-k appearances.
    pub mean_abs_beta: f64,
    /// Mean importance over boosted-tree top-k appearances.
    pub mean_importance: f64,
}

#[derive(Default)]
struct Tally {
    top: usize,
    hits: [usize; 3],
    score_sums: [f64; 3],
    rank_sum: f64,
}

/// Count how often each feature lands in the top-k list of each analysis
/// cell, with per-method averages over those appearances. Features that
/// never reach a top-k list are absent. Sorted by top-k count descending,
/// then mean rank, then name.
pub fn aggregate_top_features(cells: &[CellRanking], k: usize) -> Vec<FeatureAggregateRow> {
    let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
    for cell in cells {
        let m = match cell.method {
            Method::Spearman => 0,
            Method::Lasso => 1,
            Method::Gbt => 2,
        };
        for (pos, (feature, score)) in cell.ranked.iter().take(k).enumerate() {
            let t = tallies.entry(feature.clone()).or_default();
            t.top += 1;
            t.hits[m] += 1;
            t.score_sums[m] += score.abs();
            t.rank_sum += (pos + 1) as f64;
        }
    }
    let mut rows: Vec<FeatureAggregateRow> = tallies
        .into_iter()
        .map(|(feature, t)| {
            let mean_of = |i: usize| {
                if t.hits[i] > 0 {
                    t.score_sums[i] / t.hits[i] as f64
                } else {
                    0.0
                }
            };
            FeatureAggregateRow {
                feature,
                top10: t.top,
                n_methods: t.hits.iter().filter(|&&h| h > 0).count(),
                spearman_hits: t.hits[0],
                lasso_hits: t.hits[1],
                gbt_hits: t.hits[2],
                mean_rank: t.rank_sum / t.top as f64,
                mean_abs_rho: mean_of(0),
                mean_abs_beta: mean_of(1),
                mean_importance: mean_of(2),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.top10
            .cmp(&a.top10)
            .then(a.mean_rank.partial_cmp(&b.mean_rank).expect("finite ranks"))
            .then(a.feature.cmp(&b.feature))
    });
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(model: &str, target: &str, method: Method, feats: &[(&str, f64)]) -> CellRanking {
        CellRanking {
            model: model.into(),
            target: target.into(),
            method,
            ranked: feats.iter().map(|(f, s)| (f.to_string(), *s)).collect(),
        }
    }

    #[test]
    fn feature_in_every_list_counts_all_appearances() {
        // 12 cells x 3 methods, "star" always present
        let mut cells = Vec::new();
        for model in ["m1", "m2", "m3", "m4"] {
            for target in ["t1", "t2", "t3"] {
                for method in [Method::Spearman, Method::Lasso, Method::Gbt] {
                    cells.push(cell(model, target, method, &[("star", 0.9), ("noise", 0.1)]));
                }
            }
        }
        let rows = aggregate_top_features(&cells, 10);
        let star = rows.iter().find(|r| r.feature == "star").unwrap();
        assert_eq!(star.top10, 36);
        assert_eq!(star.n_methods, 3);
        assert_eq!(star.spearman_hits, 12);
        assert_eq!(star.lasso_hits, 12);
        assert_eq!(star.gbt_hits, 12);
        assert!((star.mean_rank - 1.0).abs() < 1e-12);
        assert!((star.mean_abs_rho - 0.9).abs() < 1e-12);
    }

    #[test]
    fn feature_never_in_top_k_is_absent() {
        let many: Vec<(String, f64)> = (0..12).map(|i| (format!("f{i:02}"), 1.0 - i as f64 * 0.05)).collect();
        let ranked: Vec<(&str, f64)> = many.iter().map(|(f, s)| (f.as_str(), *s)).collect();
        let cells = vec![cell("m", "t", Method::Spearman, &ranked)];
        let rows = aggregate_top_features(&cells, 10);
        assert_eq!(rows.len(), 10);
        assert!(rows.iter().all(|r| r.feature != "f10" && r.feature != "f11"));
    }

    #[test]
    fn counts_invariant_to_cell_order() {
        let a = cell("m1", "t1", Method::Spearman, &[("x", 0.8), ("y", 0.6)]);
        let b = cell("m1", "t1", Method::Lasso, &[("y", 0.4)]);
        let c = cell("m2", "t1", Method::Gbt, &[("x", 0.5)]);
        let fwd = aggregate_top_features(&[a.clone(), b.clone(), c.clone()], 10);
        let rev = aggregate_top_features(&[c, b, a], 10);
        assert_eq!(fwd.len(), rev.len());
        for (x, y) in fwd.iter().zip(&rev) {
            assert_eq!(x.feature, y.feature);
            assert_eq!(x.top10, y.top10);
            assert_eq!(x.n_methods, y.n_methods);
            assert_eq!(
                (x.spearman_hits, x.lasso_hits, x.gbt_hits),
                (y.spearman_hits, y.lasso_hits, y.gbt_hits)
            );
        }
    }

    // Row shape mirrors the published-table layout: feature, Top10,
    // methods, and per-method means.
    #[test]
    fn row_renders_like_the_summary_table() {
        let cells: Vec<CellRanking> = (0..9)
            .map(|i| {
                cell(
                    "m",
                    &format!("t{i}"),
                    if i % 3 == 0 { Method::Spearman } else if i % 3 == 1 { Method::Lasso } else { Method::Gbt },
                    &[("bigram_mutual_information", 0.72)],
                )
            })
            .collect();
        let rows = aggregate_top_features(&cells, 10);
        let r = &rows[0];
        let line = format!(
            "{}, Top10 {}, Meth. {}, mean |rho| {:.2}",
            r.feature, r.top10, r.n_methods, r.mean_abs_rho
        );
        assert_eq!(
            line,
            "bigram_mutual_information, Top10 9, Meth. 3, mean |rho| 0.72"
        );
    }
}
