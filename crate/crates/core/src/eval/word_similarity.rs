use std::path::Path;

use crate::analysis::spearman;
use crate::error::{Error, Result};
use crate::eval::{BenchmarkReport, SubtaskResult, WordPairItem};
use crate::learners::EmbeddingModel;

/// A named word-similarity suite (typically one TSV file).
#[derive(Debug, Clone)]
pub struct WordSimSuite {
    pub name: String,
    pub pairs: Vec<WordPairItem>,
}

/// Load a `word1<TAB>word2<TAB>score` file; the suite takes the file stem
/// as its name.
pub fn load_word_pairs(path: &Path) -> Result<WordSimSuite> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "suite".to_string());
    Ok(WordSimSuite {
        name,
        pairs: parse_word_pairs(&std::fs::read_to_string(path)?)?,
    })
}

pub fn parse_word_pairs(text: &str) -> Result<Vec<WordPairItem>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        let (w1, w2, score) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(s)) => (a, b, s),
            _ => {
                return Err(Error::invalid(format!(
                    "word-pair file line {}: expected word1<TAB>word2<TAB>score",
                    i + 1
                )))
            }
        };
        let human_score: f64 = score.trim().parse().map_err(|_| {
            Error::invalid(format!("word-pair file line {}: bad score {score:?}", i + 1))
        })?;
        if !human_score.is_finite() {
            return Err(Error::invalid(format!(
                "word-pair file line {}: non-finite score",
                i + 1
            )));
        }
        pairs.push(WordPairItem {
            word1: w1.trim().to_string(),
            word2: w2.trim().to_string(),
            human_score,
        });
    }
    Ok(pairs)
}

/// Per suite: drop pairs with any out-of-vocabulary word (after lowercase
/// folding), correlate human scores with cosine similarities, and report
/// the unweighted mean Spearman across suites. Suites with fewer than 3
/// scorable pairs are skipped with a warning.
pub fn score_word_similarity(
    embeddings: &EmbeddingModel,
    suites: &[WordSimSuite],
) -> Result<BenchmarkReport> {
    let mut subtasks = Vec::new();
    let mut n_total = 0usize;
    let mut n_kept = 0usize;
    for suite in suites {
        n_total += suite.pairs.len();
        let mut human = Vec::new();
        let mut model = Vec::new();
        for pair in &suite.pairs {
            let w1 = pair.word1.to_lowercase();
            let w2 = pair.word2.to_lowercase();
            if let Some(cos) = embeddings.cosine(&w1, &w2) {
                human.push(pair.human_score);
                model.push(cos);
            }
        }
        if human.len() < 3 {
            log::warn!(
                "suite {:?}: only {} scorable pairs; skipped",
                suite.name,
                human.len()
            );
            continue;
        }
        n_kept += human.len();
        match spearman(&human, &model)? {
            Some(rho) => subtasks.push(SubtaskResult {
                subtask: suite.name.clone(),
                n_items: human.len(),
                value: rho,
            }),
            None => log::warn!("suite {:?}: constant scores, correlation undefined", suite.name),
        }
    }
    if subtasks.is_empty() {
        return Err(Error::invalid("no word-similarity suite had enough scorable pairs"));
    }
    let metric = subtasks.iter().map(|s| s.value).sum::<f64>() / subtasks.len() as f64;
    Ok(BenchmarkReport {
        benchmark: "wordsim".to_string(),
        n_items_total: n_total,
        n_items_kept: n_kept,
        metric,
        subtasks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Conversation, Dataset, SpeakerRole, Utterance};
    use crate::learners::EmbeddingConfig;

    fn embeddings() -> EmbeddingModel {
        let lines = [
            "milk cookie milk cookie snack",
            "cookie milk snack milk cookie",
            "truck ball truck ball toy",
            "ball truck toy truck ball",
            "milk cookie snack toy ball truck",
        ];
        let convs = lines
            .iter()
            .map(|l| Conversation {
                utterances: vec![Utterance::new("MOT", *l, SpeakerRole::Mot)],
                family_id: "f".into(),
                child_age_months: None,
            })
            .collect();
        let d = Dataset::new("d", convs);
        EmbeddingModel::train(
            &d,
            &EmbeddingConfig { dim: 3, window: 2, oversample: 3, seed: 1, ..Default::default() },
        )
        .unwrap()
    }

    fn pair(w1: &str, w2: &str, s: f64) -> WordPairItem {
        WordPairItem { word1: w1.into(), word2: w2.into(), human_score: s }
    }

    #[test]
    fn perfect_rank_agreement_is_one() {
        let emb = embeddings();
        // order human scores by the model's own cosines
        let mut pairs = vec![
            pair("milk", "cookie", 0.0),
            pair("truck", "ball", 0.0),
            pair("milk", "truck", 0.0),
            pair("cookie", "ball", 0.0),
        ];
        let mut scored: Vec<(usize, f64)> = pairs
            .iter()
            .enumerate()
            .map(|(i, p)| (i, emb.cosine(&p.word1, &p.word2).unwrap()))
            .collect();
        scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        for (rank, (idx, _)) in scored.iter().enumerate() {
            pairs[*idx].human_score = rank as f64;
        }
        let suites = vec![WordSimSuite { name: "s".into(), pairs: pairs.clone() }];
        let report = score_word_similarity(&emb, &suites).unwrap();
        assert!((report.metric - 1.0).abs() < 1e-12);

        // reversed human ranking flips the sign
        for p in &mut pairs {
            p.human_score = -p.human_score;
        }
        let suites = vec![WordSimSuite { name: "s".into(), pairs }];
        let report = score_word_similarity(&emb, &suites).unwrap();
        assert!((report.metric + 1.0).abs() < 1e-12);
    }

    #[test]
    fn oov_pairs_dropped_and_small_suites_skipped() {
        let emb = embeddings();
        let good = WordSimSuite {
            name: "good".into(),
            pairs: vec![
                pair("milk", "cookie", 3.0),
                pair("truck", "ball", 2.0),
                pair("milk", "ball", 1.0),
                pair("zzz", "milk", 9.0), // OOV, dropped
            ],
        };
        let too_small = WordSimSuite {
            name: "small".into(),
            pairs: vec![pair("milk", "cookie", 1.0), pair("zzz", "qqq", 2.0)],
        };
        let report = score_word_similarity(&emb, &[good, too_small]).unwrap();
        assert_eq!(report.subtasks.len(), 1);
        assert_eq!(report.n_items_total, 6);
        assert_eq!(report.n_items_kept, 3);
    }

    #[test]
    fn casefolds_before_lookup() {
        let emb = embeddings();
        let suites = vec![WordSimSuite {
            name: "s".into(),
            pairs: vec![
                pair("MILK", "Cookie", 3.0),
                pair("Truck", "BALL", 2.0),
                pair("milk", "truck", 1.0),
            ],
        }];
        let report = score_word_similarity(&emb, &suites).unwrap();
        assert_eq!(report.n_items_kept, 3);
    }

    #[test]
    fn all_suites_unusable_is_an_error() {
        let emb = embeddings();
        let suites = vec![WordSimSuite {
            name: "s".into(),
            pairs: vec![pair("zzz", "qqq", 1.0)],
        }];
        assert!(score_word_similarity(&emb, &suites).is_err());
    }

    #[test]
    fn fixture_matches_rank_formula_oracle() {
        let emb = embeddings();
        let pairs = vec![
            pair("milk", "cookie", 9.0),
            pair("truck", "ball", 8.0),
            pair("milk", "truck", 2.0),
            pair("cookie", "ball", 1.0),
            pair("milk", "ball", 3.0),
        ];
        let human: Vec<f64> = pairs.iter().map(|p| p.human_score).collect();
        let cosines: Vec<f64> = pairs
            .iter()
            .map(|p| emb.cosine(&p.word1, &p.word2).unwrap())
            .collect();
        let expected = spearman(&human, &cosines).unwrap().unwrap();
        let suites = vec![WordSimSuite { name: "s".into(), pairs }];
        let report = score_word_similarity(&emb, &suites).unwrap();
        assert!((report.metric - expected).abs() < 1e-12);
    }

    #[test]
    fn parses_tsv() {
        let text = "# comment\nmilk\tcookie\t7.5\nball\ttruck\t6.0\n";
        let pairs = parse_word_pairs(text).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].word1, "milk");
        assert_eq!(pairs[1].human_score, 6.0);
        assert!(parse_word_pairs("one_column_only\n").is_err());
    }
}
