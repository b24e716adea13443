//! Benchmark harnesses: vocabulary-filtered minimal-pair forced choice and
//! word-similarity correlation, over any learner or external score table.

mod minimal_pairs;
mod word_similarity;

pub use minimal_pairs::{
    load_minimal_pairs, parse_minimal_pairs, score_minimal_pairs, vocab_filter, PairScorer,
    ScoreTablePairs,
};
pub use word_similarity::{
    load_word_pairs, parse_word_pairs, score_word_similarity, WordSimSuite,
};

use serde::{Deserialize, Serialize};

/// A forced-choice item: the learner is correct when it assigns the
/// acceptable sentence higher probability than the unacceptable one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalPairItem {
    pub id: String,
    pub benchmark: String,
    pub subtask: String,
    pub good_tokens: Vec<String>,
    pub bad_tokens: Vec<String>,
}

/// A human-rated word pair for similarity benchmarks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordPairItem {
    pub word1: String,
    pub word2: String,
    pub human_score: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubtaskResult {
    pub subtask: String,
    pub n_items: usize,
    pub value: f64,
}

/// Benchmark outcome. For minimal pairs `metric` is the macro-average
/// accuracy across subtasks in [0, 100]; for word similarity it is the
/// unweighted mean Spearman correlation across suites in [-1, 1].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub benchmark: String,
    pub n_items_total: usize,
    pub n_items_kept: usize,
    pub metric: f64,
    pub subtasks: Vec<SubtaskResult>,
}

impl BenchmarkReport {
    /// (benchmark, subtask, n_items, value) rows; the overall metric comes
    /// first under the pseudo-subtask name "(all)".
    pub fn rows(&self) -> Vec<(String, String, usize, f64)> {
        let mut rows = vec![(
            self.benchmark.clone(),
            "(all)".to_string(),
            self.n_items_kept,
            self.metric,
        )];
        for s in &self.subtasks {
            rows.push((self.benchmark.clone(), s.subtask.clone(), s.n_items, s.value));
        }
        rows
    }
}
