//! Transcript parsing, tokenization, and dataset assembly.
//!
//! A transcript file holds one conversation per record; each conversation
//! is an ordered list of speaker-labeled utterances. Datasets are immutable
//! after construction so they can be shared freely across readers.

mod mixture;
mod parse;
mod split;
mod tokenize;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use mixture::{build_mixture, proportional_quotas};
pub use parse::{
    load_manifest, parse_transcript_str, parse_transcripts, serialize_transcripts, ManifestEntry,
    ParseOptions, SpeakerAliases, TranscriptFormat, END_OF_TEXT,
};
pub use split::{split_train_val, SplitPair};
pub use tokenize::tokenize;

/// Speaker roles. The raw label string is preserved on each [`Utterance`];
/// the role is resolved through a configurable alias table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpeakerRole {
    /// Target child.
    Chi,
    /// Mother.
    Mot,
    /// Father.
    Fat,
    /// Another child in the household.
    Ochi,
    /// Any other speaker.
    Other,
}

impl SpeakerRole {
    pub fn is_caregiver(self) -> bool {
        matches!(self, SpeakerRole::Mot | SpeakerRole::Fat)
    }

    pub fn is_target_child(self) -> bool {
        self == SpeakerRole::Chi
    }
}

/// A single speaker turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub role: SpeakerRole,
    /// Label exactly as written between the asterisks, round-trips byte-exactly.
    pub raw_label: String,
    pub raw_text: String,
    /// Lowercased word-level tokens; empty only for marker-only utterances.
    pub tokens: Vec<String>,
}

impl Utterance {
    pub fn new(raw_label: impl Into<String>, raw_text: impl Into<String>, role: SpeakerRole) -> Self {
        let raw_text = raw_text.into();
        let tokens = tokenize(&raw_text);
        Utterance {
            role,
            raw_label: raw_label.into(),
            raw_text,
            tokens,
        }
    }
}

/// An ordered sequence of utterances from one recording session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conversation {
    pub utterances: Vec<Utterance>,
    pub family_id: String,
    pub child_age_months: Option<u32>,
}

impl Conversation {
    pub fn token_count(&self) -> usize {
        self.utterances.iter().map(|u| u.tokens.len()).sum()
    }
}

/// A named, immutable collection of conversations with cached counts.
///
/// `token_count` always equals the sum of conversation token counts and the
/// vocabulary counts always sum to `token_count`; both are established at
/// construction and never mutated.
#[derive(Debug, Clone)]
pub struct Dataset {
    name: String,
    conversations: Vec<Conversation>,
    families: BTreeSet<String>,
    token_count: usize,
    vocabulary: BTreeMap<String, u64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, conversations: Vec<Conversation>) -> Self {
        let mut families = BTreeSet::new();
        let mut vocabulary = BTreeMap::new();
        let mut token_count = 0usize;
        for conv in &conversations {
            families.insert(conv.family_id.clone());
            for utt in &conv.utterances {
                for tok in &utt.tokens {
                    *vocabulary.entry(tok.clone()).or_insert(0u64) += 1;
                    token_count += 1;
                }
            }
        }
        Dataset {
            name: name.into(),
            conversations,
            families,
            token_count,
            vocabulary,
        }
    }

    /// Concatenation of several datasets under a new name.
    pub fn concat(name: impl Into<String>, parts: &[&Dataset]) -> Self {
        let conversations = parts
            .iter()
            .flat_map(|d| d.conversations.iter().cloned())
            .collect();
        Dataset::new(name, conversations)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn conversations(&self) -> &[Conversation] {
        &self.conversations
    }

    pub fn len(&self) -> usize {
        self.conversations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conversations.is_empty()
    }

    pub fn families(&self) -> &BTreeSet<String> {
        &self.families
    }

    pub fn token_count(&self) -> usize {
        self.token_count
    }

    /// Word type -> occurrence count.
    pub fn vocabulary(&self) -> &BTreeMap<String, u64> {
        &self.vocabulary
    }

    pub fn type_count(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn utterances(&self) -> impl Iterator<Item = &Utterance> {
        self.conversations.iter().flat_map(|c| c.utterances.iter())
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.utterances().flat_map(|u| u.tokens.iter().map(String::as_str))
    }

    /// Type–token ratio: unique word types divided by total tokens.
    pub fn ttr(&self) -> Result<f64> {
        if self.token_count == 0 {
            return Err(Error::invalid(format!(
                "ttr undefined for empty dataset {:?}",
                self.name
            )));
        }
        Ok(self.vocabulary.len() as f64 / self.token_count as f64)
    }
}
