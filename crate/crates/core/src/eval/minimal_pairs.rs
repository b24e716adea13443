use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::corpus::tokenize;
use crate::error::{Error, Result};
use crate::eval::{BenchmarkReport, MinimalPairItem, SubtaskResult};
use crate::learners::{ScoreTable, SequenceScorer};

/// Scores one minimal pair, returning (logprob_good, logprob_bad).
pub trait PairScorer {
    fn score_pair(&self, item: &MinimalPairItem) -> Result<(f64, f64)>;
}

impl<S: SequenceScorer> PairScorer for S {
    fn score_pair(&self, item: &MinimalPairItem) -> Result<(f64, f64)> {
        Ok((
            self.sequence_logprob(&item.good_tokens)?,
            self.sequence_logprob(&item.bad_tokens)?,
        ))
    }
}

/// Adapter that reads pair scores from an external score table using the
/// `<item_id>/good` and `<item_id>/bad` key convention.
pub struct ScoreTablePairs<'a>(pub &'a ScoreTable);

impl PairScorer for ScoreTablePairs<'_> {
    fn score_pair(&self, item: &MinimalPairItem) -> Result<(f64, f64)> {
        let fetch = |side: &str| {
            self.0
                .logprob(&format!("{}/{side}", item.id))
                .ok_or_else(|| {
                    Error::invalid(format!("score table has no entry for {}/{side}", item.id))
                })
        };
        Ok((fetch("good")?, fetch("bad")?))
    }
}

#[derive(Deserialize)]
struct RawItem {
    id: String,
    benchmark: String,
    #[serde(default)]
    subtask: String,
    sentence_good: String,
    sentence_bad: String,
}

/// Load a JSONL minimal-pair suite:
/// `{id, benchmark, subtask, sentence_good, sentence_bad}` per line.
/// Sentences are tokenized with the corpus tokenizer.
pub fn load_minimal_pairs(path: &Path) -> Result<Vec<MinimalPairItem>> {
    parse_minimal_pairs(&std::fs::read_to_string(path)?)
}

pub fn parse_minimal_pairs(text: &str) -> Result<Vec<MinimalPairItem>> {
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawItem = serde_json::from_str(line)
            .map_err(|e| Error::invalid(format!("minimal-pair file line {}: {e}", i + 1)))?;
        let good_tokens = tokenize(&raw.sentence_good);
        let bad_tokens = tokenize(&raw.sentence_bad);
        if good_tokens.is_empty() || bad_tokens.is_empty() {
            return Err(Error::invalid(format!(
                "item {:?} has an empty sentence after tokenization",
                raw.id
            )));
        }
        if good_tokens == bad_tokens {
            return Err(Error::invalid(format!(
                "item {:?}: good and bad sides tokenize identically",
                raw.id
            )));
        }
        items.push(MinimalPairItem {
            id: raw.id,
            benchmark: raw.benchmark,
            subtask: if raw.subtask.is_empty() { "default".into() } else { raw.subtask },
            good_tokens,
            bad_tokens,
        });
    }
    Ok(items)
}

/// Keep an item only if every token of both sentences appears in the
/// reference vocabulary.
pub fn vocab_filter(
    items: &[MinimalPairItem],
    vocab: &BTreeMap<String, u64>,
) -> Vec<MinimalPairItem> {
    items
        .iter()
        .filter(|item| {
            item.good_tokens
                .iter()
                .chain(item.bad_tokens.iter())
                .all(|t| vocab.contains_key(t))
        })
        .cloned()
        .collect()
}

/// Forced-choice scoring: an item earns credit 1 when the good sentence
/// scores strictly higher, 0.5 on an exact tie. Subtask accuracies are
/// 100 x mean credit; the benchmark metric is their macro-average.
pub fn score_minimal_pairs(
    scorer: &dyn PairScorer,
    benchmark: &str,
    kept: &[MinimalPairItem],
    n_items_total: usize,
) -> Result<BenchmarkReport> {
    if kept.is_empty() {
        return Err(Error::invalid(format!(
            "benchmark {benchmark:?} has no items left after vocabulary filtering"
        )));
    }
    let mut by_subtask: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for item in kept {
        let (good, bad) = scorer.score_pair(item)?;
        let credit = if good > bad {
            1.0
        } else if good == bad {
            0.5
        } else {
            0.0
        };
        by_subtask.entry(item.subtask.as_str()).or_default().push(credit);
    }
    let subtasks: Vec<SubtaskResult> = by_subtask
        .iter()
        .map(|(name, credits)| SubtaskResult {
            subtask: name.to_string(),
            n_items: credits.len(),
            value: 100.0 * credits.iter().sum::<f64>() / credits.len() as f64,
        })
        .collect();
    let metric = subtasks.iter().map(|s| s.value).sum::<f64>() / subtasks.len() as f64;
    Ok(BenchmarkReport {
        benchmark: benchmark.to_string(),
        n_items_total,
        n_items_kept: kept.len(),
        metric,
        subtasks,
    })
}
