use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Scores computed by an external model, keyed by item id. One JSONL row
/// per item: `{"item_id": "...", "logprob": -12.5, "token_nlls": [...]}`,
/// with `token_nlls` optional.
#[derive(Debug, Clone, Default)]
pub struct ScoreTable {
    logprobs: BTreeMap<String, f64>,
    token_nlls: BTreeMap<String, Vec<f64>>,
}

#[derive(Deserialize)]
struct ScoreRow {
    item_id: String,
    logprob: f64,
    #[serde(default)]
    token_nlls: Option<Vec<f64>>,
}

impl ScoreTable {
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_jsonl(&std::fs::read_to_string(path)?)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut table = ScoreTable::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: ScoreRow = serde_json::from_str(line).map_err(|e| {
                Error::invalid(format!("score file line {}: {e}", i + 1))
            })?;
            table.insert(row.item_id, row.logprob, row.token_nlls)?;
        }
        Ok(table)
    }

    pub fn insert(
        &mut self,
        item_id: String,
        logprob: f64,
        token_nlls: Option<Vec<f64>>,
    ) -> Result<()> {
        if !logprob.is_finite() {
            return Err(Error::invalid(format!(
                "non-finite logprob for item {item_id:?}"
            )));
        }
        if let Some(nlls) = &token_nlls {
            if nlls.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!(
                    "non-finite token nll for item {item_id:?}"
                )));
            }
        }
        if self.logprobs.insert(item_id.clone(), logprob).is_some() {
            return Err(Error::invalid(format!("duplicate item_id {item_id:?}")));
        }
        if let Some(nlls) = token_nlls {
            self.token_nlls.insert(item_id, nlls);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.logprobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logprobs.is_empty()
    }

    pub fn logprob(&self, item_id: &str) -> Option<f64> {
        self.logprobs.get(item_id).copied()
    }

    pub fn token_nlls(&self, item_id: &str) -> Option<&[f64]> {
        self.token_nlls.get(item_id).map(Vec::as_slice)
    }
}
