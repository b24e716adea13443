use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Dataset;
use crate::error::{Error, Result};
use crate::learners::SequenceScorer;

const UNK: u32 = 0;
const BOS: u32 = 1;
const EOS: u32 = 2;

const UNK_STR: &str = "<unk>";
const BOS_STR: &str = "<s>";
const EOS_STR: &str = "</s>";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NgramConfig {
    /// Model order, 1..=5.
    pub order: usize,
    /// Types with training frequency below this are folded into `<unk>`.
    /// The default of 1 keeps every observed type.
    pub unk_threshold: u64,
}

impl Default for NgramConfig {
    fn default() -> Self {
        NgramConfig { order: 3, unk_threshold: 1 }
    }
}

/// Per-context aggregates used by the discounting formula.
#[derive(Debug, Clone, Copy, Default)]
struct CtxStats {
    total: u64,
    n1: u32,
    n2: u32,
    n3p: u32,
}

/// Interpolated modified Kneser–Ney n-gram model.
///
/// The highest order uses raw counts; lower orders use continuation counts
/// (distinct left extensions), following Chen & Goodman (1999). Three
/// count-dependent discounts per order are estimated from count-of-counts:
/// with `Y = n1/(n1 + 2*n2)`, `D1 = 1 - 2*Y*n2/n1`, `D2 = 2 - 3*Y*n3/n2`,
/// `D3+ = 3 - 4*Y*n4/n3`. Every utterance is padded with begin/end
/// sentinels, so standalone sentences score the same way training
/// utterances do. The unigram level interpolates with a uniform
/// distribution over the vocabulary, which keeps every conditional
/// probability strictly positive.
#[derive(Debug, Clone)]
pub struct NgramModel {
    order: usize,
    unk_threshold: u64,
    words: Vec<String>,
    ids: HashMap<String, u32>,
    /// counts[k-1]: k-gram -> count (raw at the top order, continuation below).
    counts: Vec<HashMap<Box<[u32]>, u64>>,
    /// ctx_stats[k-1]: (k-1)-gram context -> aggregates over level-k counts.
    ctx_stats: Vec<HashMap<Box<[u32]>, CtxStats>>,
    /// discounts[k-1] = [D1, D2, D3+] for level k.
    discounts: Vec<[f64; 3]>,
}

impl NgramModel {
    pub fn train(train: &Dataset, order: usize) -> Result<Self> {
        Self::train_with(train, &NgramConfig { order, ..NgramConfig::default() })
    }

    pub fn train_with(train: &Dataset, cfg: &NgramConfig) -> Result<Self> {
        let order = cfg.order;
        if !(1..=5).contains(&order) {
            return Err(Error::invalid(format!("n-gram order must be in [1,5], got {order}")));
        }
        if train.token_count() == 0 {
            return Err(Error::invalid("cannot train an n-gram model on an empty dataset"));
        }
        let longest = train
            .utterances()
            .map(|u| u.tokens.len())
            .max()
            .unwrap_or(0);
        if order > longest + 2 {
            return Err(Error::invalid(format!(
                "order {order} exceeds longest utterance plus sentinels ({})",
                longest + 2
            )));
        }

        // Vocabulary with UNK folding.
        let mut words = vec![UNK_STR.to_string(), BOS_STR.to_string(), EOS_STR.to_string()];
        let mut ids = HashMap::new();
        for (w, &c) in train.vocabulary() {
            if c >= cfg.unk_threshold {
                ids.insert(w.clone(), words.len() as u32);
                words.push(w.clone());
            }
        }

        // Top-order raw counts over sentinel-padded utterances.
        let mut top: HashMap<Box<[u32]>, u64> = HashMap::new();
        for utt in train.utterances() {
            if utt.tokens.is_empty() {
                continue;
            }
            let mut seq: Vec<u32> = vec![BOS; order - 1];
            seq.extend(utt.tokens.iter().map(|t| ids.get(t).copied().unwrap_or(UNK)));
            seq.push(EOS);
            for win in seq.windows(order) {
                *top.entry(win.into()).or_insert(0) += 1;
            }
        }

        // Continuation counts: distinct left extensions of each suffix.
        let mut counts = vec![top];
        for _ in 1..order {
            let prev = counts.last().expect("at least one level");
            let mut cont: HashMap<Box<[u32]>, u64> = HashMap::new();
            for gram in prev.keys() {
                *cont.entry(gram[1..].into()).or_insert(0) += 1;
            }
            counts.push(cont);
        }
        counts.reverse(); // counts[k-1] now holds level k

        let ctx_stats = counts.iter().map(|level| context_stats(level)).collect();
        let discounts = counts.iter().map(|level| estimate_discounts(level)).collect();

        Ok(NgramModel {
            order,
            unk_threshold: cfg.unk_threshold,
            words,
            ids,
            counts,
            ctx_stats,
            discounts,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of scorable types: retained word types plus `<unk>` and the
    /// end sentinel. The begin sentinel is never predicted.
    pub fn vocab_size(&self) -> usize {
        self.words.len() - 1
    }

    /// All scorable token ids (vocabulary plus `<unk>` and end sentinel).
    fn predictable_ids(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.words.len() as u32).filter(|&i| i != BOS)
    }

    fn token_id(&self, token: &str) -> u32 {
        self.ids.get(token).copied().unwrap_or(UNK)
    }

    /// p(word | context). `context` is the preceding-token window; only the
    /// last `order - 1` entries are used, padded with begin sentinels.
    pub fn prob(&self, context: &[&str], word: &str) -> f64 {
        let ctx = self.context_ids(context);
        self.prob_ids(&ctx, self.token_id(word))
    }

    fn context_ids(&self, context: &[&str]) -> Vec<u32> {
        let need = self.order - 1;
        let mut ctx = vec![BOS; need.saturating_sub(context.len())];
        let start = context.len().saturating_sub(need);
        ctx.extend(context[start..].iter().map(|t| self.token_id(t)));
        ctx
    }

    fn prob_ids(&self, ctx: &[u32], word: u32) -> f64 {
        debug_assert_eq!(ctx.len(), self.order - 1);
        self.prob_at(self.order, ctx, word)
    }

    fn prob_at(&self, level: usize, ctx: &[u32], word: u32) -> f64 {
        if level == 0 {
            return 1.0 / self.vocab_size() as f64;
        }
        let stats = self.ctx_stats[level - 1].get(ctx).copied();
        let next_ctx = if level >= 2 { &ctx[1..] } else { ctx };
        let stats = match stats {
            Some(s) if s.total > 0 => s,
            _ => return self.prob_at(level - 1, next_ctx, word),
        };
        let mut gram = Vec::with_capacity(level);
        gram.extend_from_slice(ctx);
        gram.push(word);
        let c = self.counts[level - 1].get(gram.as_slice()).copied().unwrap_or(0);
        let [d1, d2, d3] = self.discounts[level - 1];
        let d = match c {
            0 => 0.0,
            1 => d1,
            2 => d2,
            _ => d3,
        };
        let total = stats.total as f64;
        let gamma = (d1 * stats.n1 as f64 + d2 * stats.n2 as f64 + d3 * stats.n3p as f64) / total;
        (c as f64 - d) / total + gamma * self.prob_at(level - 1, next_ctx, word)
    }

    /// Brute-force sum of p(w|context) over the whole scorable vocabulary.
    pub fn conditional_sum(&self, context: &[&str]) -> f64 {
        let ctx = self.context_ids(context);
        self.predictable_ids().map(|w| self.prob_ids(&ctx, w)).sum()
    }

    /// Mean per-token NLL (nats) over a held-out dataset.
    pub fn held_out_nll(&self, held_out: &Dataset) -> Result<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for utt in held_out.utterances() {
            if utt.tokens.is_empty() {
                continue;
            }
            for nll in self.per_token_nll(&utt.tokens)? {
                sum += nll;
                n += 1;
            }
        }
        if n == 0 {
            return Err(Error::invalid("held-out dataset has no tokens"));
        }
        Ok(sum / n as f64)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let dump = NgramDump {
            format: DUMP_FORMAT.to_string(),
            version: DUMP_VERSION,
            order: self.order,
            unk_threshold: self.unk_threshold,
            words: self.words.clone(),
            levels: self
                .counts
                .iter()
                .map(|level| {
                    let mut rows: Vec<(Vec<u32>, u64)> =
                        level.iter().map(|(k, &v)| (k.to_vec(), v)).collect();
                    rows.sort();
                    rows
                })
                .collect(),
        };
        std::fs::write(path, serde_json::to_string(&dump)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let dump: NgramDump = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if dump.format != DUMP_FORMAT || dump.version != DUMP_VERSION {
            return Err(Error::invalid(format!(
                "unsupported model dump {}/{}",
                dump.format, dump.version
            )));
        }
        let ids = dump
            .words
            .iter()
            .enumerate()
            .skip(3)
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let counts: Vec<HashMap<Box<[u32]>, u64>> = dump
            .levels
            .into_iter()
            .map(|level| level.into_iter().map(|(k, v)| (k.into_boxed_slice(), v)).collect())
            .collect();
        let ctx_stats = counts.iter().map(|level| context_stats(level)).collect();
        let discounts = counts.iter().map(|level| estimate_discounts(level)).collect();
        Ok(NgramModel {
            order: dump.order,
            unk_threshold: dump.unk_threshold,
            words: dump.words,
            ids,
            counts,
            ctx_stats,
            discounts,
        })
    }
}

const DUMP_FORMAT: &str = "talklab-ngram";
const DUMP_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NgramDump {
    format: String,
    version: u32,
    order: usize,
    unk_threshold: u64,
    words: Vec<String>,
    levels: Vec<Vec<(Vec<u32>, u64)>>,
}

impl SequenceScorer for NgramModel {
    fn sequence_logprob(&self, tokens: &[String]) -> Result<f64> {
        Ok(-self.per_token_nll(tokens)?.iter().sum::<f64>())
    }

    fn per_token_nll(&self, tokens: &[String]) -> Result<Vec<f64>> {
        if tokens.is_empty() {
            return Err(Error::invalid("cannot score an empty token sequence"));
        }
        let ids: Vec<u32> = tokens.iter().map(|t| self.token_id(t)).collect();
        let mut padded: Vec<u32> = vec![BOS; self.order - 1];
        padded.extend_from_slice(&ids);
        let mut out = Vec::with_capacity(ids.len());
        for i in 0..ids.len() {
            let ctx = &padded[i..i + self.order - 1];
            let p = self.prob_at(self.order, ctx, ids[i]);
            out.push(-p.ln());
        }
        Ok(out)
    }
}

fn context_stats(level: &HashMap<Box<[u32]>, u64>) -> HashMap<Box<[u32]>, CtxStats> {
    let mut stats: HashMap<Box<[u32]>, CtxStats> = HashMap::new();
    for (gram, &c) in level {
        let ctx = &gram[..gram.len() - 1];
        let entry = stats.entry(ctx.into()).or_default();
        entry.total += c;
        match c {
            1 => entry.n1 += 1,
            2 => entry.n2 += 1,
            _ => entry.n3p += 1,
        }
    }
    stats
}

/// Modified Kneser–Ney discounts from count-of-counts, with a clamped
/// fallback when the histogram is too sparse for the closed form.
fn estimate_discounts(level: &HashMap<Box<[u32]>, u64>) -> [f64; 3] {
    let mut n = [0u64; 4];
    for &c in level.values() {
        if (1..=4).contains(&c) {
            n[(c - 1) as usize] += 1;
        }
    }
    let fallback = [0.5, 1.0, 1.5];
    let (n1, n2, n3, n4) = (n[0] as f64, n[1] as f64, n[2] as f64, n[3] as f64);
    if n1 == 0.0 || n2 == 0.0 {
        return fallback;
    }
    let y = n1 / (n1 + 2.0 * n2);
    let mut d = [
        1.0 - 2.0 * y * n2 / n1,
        if n2 > 0.0 { 2.0 - 3.0 * y * n3 / n2 } else { fallback[1] },
        if n3 > 0.0 { 3.0 - 4.0 * y * n4 / n3 } else { fallback[2] },
    ];
    for (i, v) in d.iter_mut().enumerate() {
        let cap = (i + 1) as f64;
        if !v.is_finite() || *v <= 0.0 {
            *v = fallback[i];
        }
        *v = v.clamp(1e-3, cap);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Conversation, SpeakerRole, Utterance};
    use crate::synth;

    fn dataset_from_lines(lines: &[&str]) -> Dataset {
        let convs = lines
            .iter()
            .map(|l| Conversation {
                utterances: vec![Utterance::new("MOT", *l, SpeakerRole::Mot)],
                family_id: "f".into(),
                child_age_months: None,
            })
            .collect();
        Dataset::new("d", convs)
    }

    fn strs(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn symmetric_counts_give_symmetric_unigrams() {
        let d = dataset_from_lines(&["a b"]);
        let m = NgramModel::train(&d, 1).unwrap();
        let pa = m.prob(&[], "a");
        let pb = m.prob(&[], "b");
        assert!((pa - pb).abs() < 1e-12);
        assert!(pa > 0.0);
    }

    #[test]
    fn conditionals_sum_to_one_on_random_contexts() {
        let d = synth::synth_family(&synth::SynthConfig::new("f1", 40), 11);
        let m = NgramModel::train(&d, 3).unwrap();
        // observed contexts plus a few unseen ones
        let contexts: Vec<Vec<&str>> = vec![
            vec![],
            vec!["the"],
            vec!["the", "ball"],
            vec!["you", "see"],
            vec!["zzz-unseen", "words"],
            vec!["."],
        ];
        for ctx in contexts {
            let s = m.conditional_sum(&ctx);
            assert!((s - 1.0).abs() < 1e-9, "context {ctx:?} sums to {s}");
        }
    }

    #[test]
    fn logprob_is_negative_sum_of_nlls() {
        let d = synth::synth_family(&synth::SynthConfig::new("f1", 20), 5);
        let m = NgramModel::train(&d, 3).unwrap();
        let toks = strs(&["the", "ball", "rolls", "."]);
        let lp = m.sequence_logprob(&toks).unwrap();
        let nlls = m.per_token_nll(&toks).unwrap();
        assert!((lp + nlls.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_corpus_drives_nll_to_zero() {
        let line = vec!["a"; 1000].join(" ");
        let d = dataset_from_lines(&[&line]);
        let m = NgramModel::train(&d, 3).unwrap();
        let nll = m.per_token_nll(&strs(&["a", "a", "a", "a", "a"])).unwrap();
        // deep context p(a|a,a) -> 1 as the corpus grows
        assert!(nll[4] < 0.01, "nll {nll:?}");
    }

    #[test]
    fn unseen_word_scores_like_unk() {
        let d = synth::synth_family(&synth::SynthConfig::new("f1", 20), 5);
        let m = NgramModel::train(&d, 3).unwrap();
        let ctx = ["you", "see"];
        let p_unseen = m.prob(&ctx, "qwertyuiop");
        let p_unk = m.prob(&ctx, UNK_STR);
        assert!((p_unseen - p_unk).abs() < 1e-15);
    }

    #[test]
    fn order_beyond_longest_utterance_errors() {
        let d = dataset_from_lines(&["a b"]);
        // longest utterance is 2 tokens; with sentinels that allows order 4
        assert!(NgramModel::train(&d, 4).is_ok());
        assert!(NgramModel::train(&d, 5).is_err());
    }

    #[test]
    fn empty_sequence_errors() {
        let d = dataset_from_lines(&["a b"]);
        let m = NgramModel::train(&d, 2).unwrap();
        assert!(m.sequence_logprob(&[]).is_err());
    }

    /// Maximum-likelihood trigram with a tiny probability floor; the
    /// comparison baseline for smoothing quality.
    struct MleFloor {
        counts: HashMap<Vec<String>, u64>,
        ctx_totals: HashMap<Vec<String>, u64>,
        floor: f64,
    }

    impl MleFloor {
        fn train(d: &Dataset, order: usize) -> Self {
            let mut counts = HashMap::new();
            let mut ctx_totals = HashMap::new();
            for utt in d.utterances() {
                if utt.tokens.is_empty() {
                    continue;
                }
                let mut seq = vec![BOS_STR.to_string(); order - 1];
                seq.extend(utt.tokens.iter().cloned());
                seq.push(EOS_STR.to_string());
                for win in seq.windows(order) {
                    *counts.entry(win.to_vec()).or_insert(0) += 1;
                    *ctx_totals.entry(win[..order - 1].to_vec()).or_insert(0) += 1;
                }
            }
            MleFloor { counts, ctx_totals, floor: 1e-10 }
        }

        fn nll(&self, d: &Dataset, order: usize) -> f64 {
            let mut sum = 0.0;
            let mut n = 0usize;
            for utt in d.utterances() {
                if utt.tokens.is_empty() {
                    continue;
                }
                let mut seq = vec![BOS_STR.to_string(); order - 1];
                seq.extend(utt.tokens.iter().cloned());
                for i in 0..utt.tokens.len() {
                    let gram = seq[i..i + order].to_vec();
                    let c = self.counts.get(&gram).copied().unwrap_or(0) as f64;
                    let t = self.ctx_totals.get(&gram[..order - 1]).copied().unwrap_or(0) as f64;
                    let p = if c > 0.0 && t > 0.0 { c / t } else { self.floor };
                    sum += -p.ln();
                    n += 1;
                }
            }
            sum / n as f64
        }
    }

    #[test]
    fn kneser_ney_beats_mle_with_floor_on_held_out_text() {
        let train = synth::synth_family(&synth::SynthConfig::new("f1", 160), 21);
        let held = synth::synth_family(&synth::SynthConfig::new("f1", 40), 99);
        assert!(train.token_count() > 8_000, "corpus of {} tokens", train.token_count());
        let kn = NgramModel::train(&train, 3).unwrap();
        let mle = MleFloor::train(&train, 3);
        let kn_nll = kn.held_out_nll(&held).unwrap();
        let mle_nll = mle.nll(&held, 3);
        assert!(kn_nll < mle_nll, "KN {kn_nll} vs MLE+floor {mle_nll}");
    }

    #[test]
    fn save_load_round_trip_preserves_probabilities() {
        let d = synth::synth_family(&synth::SynthConfig::new("f1", 15), 3);
        let m = NgramModel::train(&d, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        m.save(&path).unwrap();
        let m2 = NgramModel::load(&path).unwrap();
        let toks = strs(&["the", "ball", "."]);
        assert_eq!(
            m.sequence_logprob(&toks).unwrap(),
            m2.sequence_logprob(&toks).unwrap()
        );
    }
}
