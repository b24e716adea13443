//! Linguistic feature catalog computed per dataset: lexical/distributional
//! scale, syntactic composition, conversational structure, cross-dataset
//! divergence, semantic proxies, data-quality indicators, and mixture
//! metadata. Every emitted feature name appears in [`registry`].

mod conversational;
mod divergence;
mod lexical;
mod metadata;
mod pos;
mod quality;
mod semantic;
mod syntactic;

pub use conversational::conversational_features;
pub use divergence::divergence_features;
pub use lexical::lexical_features;
pub use metadata::mixture_metadata;
pub use pos::{PosTag, PosTaggedUtterance, PosTagger, ALL_TAGS};
pub use quality::quality_features;
pub use semantic::semantic_features;
pub use syntactic::syntactic_features;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Dataset;
use crate::error::Result;
use crate::learners::EmbeddingModel;

/// Named real-valued features for one dataset. Values are always finite;
/// undefined features are simply absent.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    pub dataset: String,
    values: BTreeMap<String, f64>,
}

impl FeatureVector {
    pub fn new(dataset: impl Into<String>) -> Self {
        FeatureVector { dataset: dataset.into(), values: BTreeMap::new() }
    }

    /// Insert a feature; non-finite values are dropped with a warning
    /// instead of poisoning the vector.
    pub fn insert(&mut self, name: &str, value: f64) {
        if value.is_finite() {
            self.values.insert(name.to_string(), value);
        } else {
            log::warn!("feature {name} is non-finite for {:?}; omitted", self.dataset);
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn values(&self) -> &BTreeMap<String, f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Absorb another partial vector (same dataset).
    pub fn merge(&mut self, other: FeatureVector) {
        self.values.extend(other.values);
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// Moving-average TTR window, in tokens.
    pub mattr_window: usize,
    /// Types entering the Zipf rank-frequency fit.
    pub zipf_top_types: usize,
    /// Add-alpha smoothing for divergence distributions.
    pub divergence_alpha: f64,
    pub unintelligible_markers: Vec<String>,
    pub nonlinguistic_markers: Vec<String>,
    pub wh_words: Vec<String>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect();
        FeatureConfig {
            mattr_window: 50,
            zipf_top_types: 1000,
            divergence_alpha: 0.5,
            unintelligible_markers: s(&["xxx", "yyy", "[unintelligible]"]),
            nonlinguistic_markers: s(&["[laughs]", "[noise]", "hm", "uh", "um"]),
            wh_words: s(&["what", "who", "where", "when", "why", "how", "which", "whose", "whom"]),
        }
    }
}

/// One entry of the documented feature catalog.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FeatureDef {
    pub name: &'static str,
    pub category: &'static str,
    pub description: &'static str,
}

macro_rules! defs {
    ($($name:literal, $cat:literal, $desc:literal;)*) => {
        &[$(FeatureDef { name: $name, category: $cat, description: $desc }),*]
    };
}

/// The full feature catalog; extraction emits a subset of these names.
pub fn registry() -> &'static [FeatureDef] {
    defs![
        "token_count", "lexical", "Total word tokens";
        "conversation_count", "lexical", "Number of conversations";
        "ttr", "lexical", "Unique word types divided by total tokens";
        "mattr", "lexical", "Mean TTR over sliding windows within conversations";
        "unigram_entropy", "lexical", "Shannon entropy of the unigram distribution (bits)";
        "trigram_entropy", "lexical", "Shannon entropy of within-utterance trigrams (bits)";
        "hapax_ratio", "lexical", "Frequency-1 types divided by total types";
        "zipf_slope", "lexical", "OLS slope of log frequency on log rank over top types";
        "frequency_skewness", "lexical", "Standardized third moment of type counts";
        "bigram_mutual_information", "lexical", "Mutual information of symmetric adjacent within-utterance pairs (bits)";
        "pos_prop_noun", "syntactic", "Proportion of NOUN tags";
        "pos_prop_verb", "syntactic", "Proportion of VERB tags";
        "pos_prop_adj", "syntactic", "Proportion of ADJ tags";
        "pos_prop_adv", "syntactic", "Proportion of ADV tags";
        "pos_prop_pron", "syntactic", "Proportion of PRON tags";
        "pos_prop_det", "syntactic", "Proportion of DET tags";
        "pos_prop_adp", "syntactic", "Proportion of ADP tags";
        "pos_prop_num", "syntactic", "Proportion of NUM tags";
        "pos_prop_conj", "syntactic", "Proportion of CONJ tags";
        "pos_prop_prt", "syntactic", "Proportion of PRT tags";
        "pos_prop_punct", "syntactic", "Proportion of PUNCT tags";
        "pos_prop_x", "syntactic", "Proportion of unknown (X) tags";
        "pos_bigram_entropy", "syntactic", "Entropy of adjacent tag pairs (bits)";
        "pos_bigram_diversity", "syntactic", "Distinct tag pairs over possible tag pairs";
        "caregiver_pos_token_count", "syntactic", "Tagged non-X tokens in caregiver utterances";
        "child_pos_token_count", "syntactic", "Tagged non-X tokens in target-child utterances";
        "total_parse_eligible", "syntactic", "Utterances eligible for parsing";
        "turns_per_conversation", "conversational", "Mean utterances per conversation";
        "speaker_switch_rate", "conversational", "Adjacent utterance pairs with different speakers over adjacent pairs";
        "question_rate", "conversational", "Utterances ending in ? over utterances";
        "wh_question_rate", "conversational", "Questions opening with a wh-word over utterances";
        "caregiver_token_share", "conversational", "Caregiver tokens over caregiver plus child tokens";
        "child_token_share", "conversational", "One minus the caregiver token share";
        "expansion_rate", "conversational", "Child-then-caregiver pairs where the caregiver covers the child's tokens";
        "mean_kl_from_others", "divergence", "Mean KL divergence from the other datasets (bits)";
        "mean_js_from_others", "divergence", "Mean Jensen-Shannon divergence from the other datasets (bits)";
        "adjacent_turn_similarity", "semantic", "Mean cosine of adjacent different-speaker turn vectors";
        "child_to_caregiver_semantic_pair_count", "semantic", "Child-to-caregiver adjacent pairs with defined vectors";
        "unintelligible_rate", "quality", "Unintelligible-marker tokens over tokens";
        "partial_word_rate", "quality", "Partial-word tokens over tokens";
        "nonlinguistic_rate", "quality", "Non-linguistic tokens over tokens";
        "n_families", "metadata", "Number of component families";
        "age_mean", "metadata", "Mean child age in months over conversations with known age";
        "age_sd", "metadata", "Age standard deviation (months)";
        "age_min", "metadata", "Minimum age (months)";
        "age_max", "metadata", "Maximum age (months)";
    ]
}

/// Run every extractor that applies and merge the results. `universe` is
/// the set of datasets for divergence features (usually including
/// `dataset` itself); `embeddings` come from the reference corpus.
pub fn extract_all(
    dataset: &Dataset,
    universe: &[&Dataset],
    embeddings: Option<&EmbeddingModel>,
    tagger: &PosTagger,
    cfg: &FeatureConfig,
) -> Result<FeatureVector> {
    let mut fv = lexical_features(dataset, cfg)?;
    fv.merge(syntactic_features(dataset, tagger));
    fv.merge(conversational_features(dataset, cfg));
    if universe.len() >= 2 {
        fv.merge(divergence_features(dataset, universe, cfg.divergence_alpha));
    }
    if let Some(emb) = embeddings {
        fv.merge(semantic_features(dataset, emb));
    }
    fv.merge(quality_features(dataset, cfg));
    fv.merge(mixture_metadata(dataset));
    Ok(fv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::EmbeddingConfig;
    use crate::synth;

    #[test]
    fn emitted_names_stay_within_the_registry() {
        let d1 = synth::synth_family(&synth::SynthConfig::new("f1", 25), 1);
        let d2 = synth::synth_family(&synth::SynthConfig::new("f2", 25), 2);
        let emb = EmbeddingModel::train(
            &d1,
            &EmbeddingConfig { dim: 8, window: 3, oversample: 4, seed: 0, ..Default::default() },
        )
        .unwrap();
        let fv = extract_all(
            &d1,
            &[&d1, &d2],
            Some(&emb),
            &PosTagger::default(),
            &FeatureConfig::default(),
        )
        .unwrap();
        let names: Vec<&str> = registry().iter().map(|d| d.name).collect();
        for key in fv.values().keys() {
            assert!(names.contains(&key.as_str()), "unregistered feature {key}");
        }
        assert!(fv.len() > 30, "only {} features emitted", fv.len());
        for (k, v) in fv.values() {
            assert!(v.is_finite(), "{k} not finite");
        }
    }

    #[test]
    fn registry_names_are_unique() {
        let mut names: Vec<&str> = registry().iter().map(|d| d.name).collect();
        let before = names.len();
        names.sort();
        names.dedup();
        assert_eq!(before, names.len());
    }

    #[test]
    fn extraction_is_stable_across_runs() {
        let d = synth::synth_family(&synth::SynthConfig::new("f1", 20), 9);
        let cfg = FeatureConfig::default();
        let a = extract_all(&d, &[], None, &PosTagger::default(), &cfg).unwrap();
        let b = extract_all(&d, &[], None, &PosTagger::default(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corpus_global_features_ignore_conversation_order() {
        let d = synth::synth_family(&synth::SynthConfig::new("f1", 30), 4);
        let mut convs = d.conversations().to_vec();
        convs.reverse();
        let shuffled = Dataset::new("f1", convs);
        let cfg = FeatureConfig::default();
        let a = lexical_features(&d, &cfg).unwrap();
        let b = lexical_features(&shuffled, &cfg).unwrap();
        assert_eq!(a.values(), b.values());

        let other = synth::synth_family(&synth::SynthConfig::new("f2", 30), 5);
        let da = divergence_features(&d, &[&d, &other], cfg.divergence_alpha);
        let db = divergence_features(&shuffled, &[&shuffled, &other], cfg.divergence_alpha);
        assert_eq!(da.values(), db.values());
    }
}
