//! Reference learners: a Kneser–Ney n-gram model for sequence scoring,
//! PPMI + truncated-SVD word embeddings for similarity, and an adapter for
//! score files computed by external models.
//!
//! Trained models are immutable; sharing one model across concurrent
//! scorers is safe.

mod embedding;
mod ngram;
mod scores;

pub use embedding::{EmbeddingConfig, EmbeddingModel};
pub use ngram::{NgramConfig, NgramModel};
pub use scores::ScoreTable;

use crate::error::Result;

/// Anything that can assign log-probabilities to token sequences.
pub trait SequenceScorer {
    /// Natural-log probability of the whole sequence.
    fn sequence_logprob(&self, tokens: &[String]) -> Result<f64>;

    /// Per-position negative log-likelihood in nats;
    /// `sequence_logprob == -sum(per_token_nll)`.
    fn per_token_nll(&self, tokens: &[String]) -> Result<Vec<f64>>;
}

/// Know-nothing baseline: every token gets probability `1/vocab_size`.
/// Length-matched alternatives always tie under this scorer.
#[derive(Debug, Clone, Copy)]
pub struct UniformScorer {
    pub vocab_size: usize,
}

impl SequenceScorer for UniformScorer {
    fn sequence_logprob(&self, tokens: &[String]) -> Result<f64> {
        if tokens.is_empty() {
            return Err(crate::Error::invalid("cannot score an empty token sequence"));
        }
        Ok(-(tokens.len() as f64) * (self.vocab_size as f64).ln())
    }

    fn per_token_nll(&self, tokens: &[String]) -> Result<Vec<f64>> {
        if tokens.is_empty() {
            return Err(crate::Error::invalid("cannot score an empty token sequence"));
        }
        Ok(vec![(self.vocab_size as f64).ln(); tokens.len()])
    }
}
