use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Utterance;
use crate::error::{Error, Result};

/// The 12-tag universal part-of-speech set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PosTag {
    Noun,
    Verb,
    Adj,
    Adv,
    Pron,
    Det,
    Adp,
    Num,
    Conj,
    Prt,
    Punct,
    X,
}

pub const ALL_TAGS: [PosTag; 12] = [
    PosTag::Noun,
    PosTag::Verb,
    PosTag::Adj,
    PosTag::Adv,
    PosTag::Pron,
    PosTag::Det,
    PosTag::Adp,
    PosTag::Num,
    PosTag::Conj,
    PosTag::Prt,
    PosTag::Punct,
    PosTag::X,
];

impl PosTag {
    pub fn name(self) -> &'static str {
        match self {
            PosTag::Noun => "noun",
            PosTag::Verb => "verb",
            PosTag::Adj => "adj",
            PosTag::Adv => "adv",
            PosTag::Pron => "pron",
            PosTag::Det => "det",
            PosTag::Adp => "adp",
            PosTag::Num => "num",
            PosTag::Conj => "conj",
            PosTag::Prt => "prt",
            PosTag::Punct => "punct",
            PosTag::X => "x",
        }
    }

    fn parse(s: &str) -> Option<PosTag> {
        ALL_TAGS.iter().copied().find(|t| t.name() == s.to_lowercase())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosTaggedUtterance {
    pub tokens: Vec<String>,
    pub tags: Vec<PosTag>,
    /// False when unknown tags dominate or no content tag survives.
    pub parse_eligible: bool,
}

/// Deterministic lexicon tagger: word -> most-frequent-tag lookup with
/// suffix fallback rules and default X. Punctuation, bracketed markers,
/// and numerals are recognized structurally.
#[derive(Debug, Clone)]
pub struct PosTagger {
    lexicon: HashMap<String, PosTag>,
    suffix_rules: Vec<(String, PosTag)>,
}

impl Default for PosTagger {
    fn default() -> Self {
        let mut lexicon = HashMap::new();
        for (tag, words) in BUILTIN_LEXICON {
            for w in *words {
                lexicon.insert(w.to_string(), *tag);
            }
        }
        let suffix_rules = [
            ("ing", PosTag::Verb),
            ("tion", PosTag::Noun),
            ("ment", PosTag::Noun),
            ("ness", PosTag::Noun),
            ("ies", PosTag::Noun),
            ("ed", PosTag::Verb),
            ("ly", PosTag::Adv),
            ("est", PosTag::Adj),
            ("er", PosTag::Adj),
            ("s", PosTag::Noun),
        ]
        .iter()
        .map(|(s, t)| (s.to_string(), *t))
        .collect();
        PosTagger { lexicon, suffix_rules }
    }
}

impl PosTagger {
    pub fn with_entry(mut self, word: &str, tag: PosTag) -> Self {
        self.lexicon.insert(word.to_lowercase(), tag);
        self
    }

    /// Extend the lexicon from a `word<TAB>tag` file.
    pub fn load_lexicon(mut self, path: &Path) -> Result<Self> {
        for (i, line) in std::fs::read_to_string(path)?.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line.split_once('\t').ok_or_else(|| {
                Error::invalid(format!("lexicon line {}: expected word<TAB>tag", i + 1))
            })?;
            let tag = PosTag::parse(tag.trim()).ok_or_else(|| {
                Error::invalid(format!("lexicon line {}: unknown tag {tag:?}", i + 1))
            })?;
            self.lexicon.insert(word.trim().to_lowercase(), tag);
        }
        Ok(self)
    }

    pub fn tag_token(&self, token: &str) -> PosTag {
        if token.chars().count() == 1
            && matches!(token.chars().next(), Some('.' | ',' | '?' | '!' | '\'' | '"' | ';' | ':'))
        {
            return PosTag::Punct;
        }
        if token.starts_with('[') && token.ends_with(']') {
            return PosTag::X;
        }
        if !token.is_empty() && token.chars().all(|c| c.is_ascii_digit()) {
            return PosTag::Num;
        }
        if let Some(&tag) = self.lexicon.get(token) {
            return tag;
        }
        for (suffix, tag) in &self.suffix_rules {
            if token.len() > suffix.len() && token.ends_with(suffix.as_str()) {
                return *tag;
            }
        }
        PosTag::X
    }

    pub fn tag(&self, utterance: &Utterance) -> PosTaggedUtterance {
        let tags: Vec<PosTag> = utterance.tokens.iter().map(|t| self.tag_token(t)).collect();
        let x_count = tags.iter().filter(|&&t| t == PosTag::X).count();
        let content = tags
            .iter()
            .filter(|&&t| t != PosTag::X && t != PosTag::Punct)
            .count();
        let parse_eligible =
            !tags.is_empty() && content > 0 && x_count * 2 <= tags.len();
        PosTaggedUtterance { tokens: utterance.tokens.clone(), tags, parse_eligible }
    }
}

#[rustfmt::skip]
const BUILTIN_LEXICON: &[(PosTag, &[&str])] = &[
    (PosTag::Det, &[
        "the", "a", "an", "this", "that", "these", "those", "my", "your", "his",
        "its", "our", "their", "some", "any", "no", "every", "each", "another",
    ]),
    (PosTag::Pron, &[
        "i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them",
        "mine", "yours", "hers", "himself", "herself", "itself", "myself",
        "yourself", "what", "who", "whom", "whose", "something", "anything",
        "nothing", "everything", "somebody", "anybody", "everybody",
    ]),
    (PosTag::Adp, &[
        "in", "on", "at", "of", "for", "with", "from", "to", "by", "about",
        "into", "over", "under", "after", "before", "between", "behind",
        "inside", "outside", "near", "off", "through",
    ]),
    (PosTag::Conj, &[
        "and", "or", "but", "because", "if", "while", "although", "so", "than",
        "when", "since",
    ]),
    (PosTag::Prt, &["not", "n't", "up", "down", "out", "away", "back", "there"]),
    (PosTag::Verb, &[
        "is", "am", "are", "was", "were", "be", "been", "being", "do", "does",
        "did", "have", "has", "had", "can", "could", "will", "would", "shall",
        "should", "may", "might", "must", "go", "goes", "went", "come", "comes",
        "came", "look", "looks", "see", "sees", "saw", "put", "puts", "get",
        "gets", "got", "want", "wants", "like", "likes", "eat", "eats", "play",
        "plays", "run", "runs", "jump", "jumps", "sleep", "sleeps", "read",
        "reads", "throw", "throws", "push", "pushes", "build", "builds",
        "roll", "rolls", "sing", "sings", "hop", "hops", "swim", "swims",
        "try", "tries", "hold", "let", "let's", "make", "makes", "say", "says",
        "know", "knows", "think", "thinks", "taste", "tastes", "cook", "cooks",
        "drink", "drinks", "help", "helps", "open", "opens", "close", "closes",
        "fill", "fills", "clean", "cleans",
    ]),
    (PosTag::Noun, &[
        "baby", "oven", "ball", "truck", "doll", "block", "puzzle", "book",
        "car", "train", "apple", "banana", "cookie", "milk", "bread", "cheese",
        "egg", "soup", "snack", "toy", "dog", "cat", "bird", "cow", "duck",
        "horse", "pig", "frog", "bear", "bunny", "mommy", "daddy", "boy",
        "girl", "house", "door", "box", "crayon", "lid", "teacher", "child",
        "water", "juice", "spoon", "cup", "plate", "chair", "table", "bed",
        "shoe", "sock", "hat", "hand", "head", "eye", "nose", "mouth",
    ]),
    (PosTag::Adj, &[
        "big", "little", "small", "red", "yellow", "blue", "green", "nice",
        "funny", "good", "bad", "happy", "sad", "hot", "cold", "empty", "full",
        "tight", "helpful", "all", "more",
    ]),
    (PosTag::Adv, &[
        "now", "here", "again", "very", "too", "just", "then", "soon", "where",
        "why", "how", "today", "yes", "yeah", "okay", "please",
    ]),
    (PosTag::Num, &[
        "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
        "ten",
    ]),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SpeakerRole;

    fn utt(text: &str) -> Utterance {
        Utterance::new("MOT", text, SpeakerRole::Mot)
    }

    #[test]
    fn lexicon_lookup_fixture() {
        let tagger = PosTagger::default();
        let tagged = tagger.tag(&utt("the oven"));
        assert_eq!(tagged.tags, vec![PosTag::Det, PosTag::Noun]);
        assert!(tagged.parse_eligible);
    }

    #[test]
    fn all_punctuation_is_parse_ineligible() {
        let tagger = PosTagger::default();
        let tagged = tagger.tag(&utt(". . ?"));
        assert!(tagged.tags.iter().all(|&t| t == PosTag::Punct));
        assert!(!tagged.parse_eligible);
    }

    #[test]
    fn unknown_word_without_suffix_is_x() {
        let tagger = PosTagger::default();
        assert_eq!(tagger.tag_token("blicket"), PosTag::X);
    }

    #[test]
    fn suffix_rules_fire_in_order() {
        let tagger = PosTagger::default();
        assert_eq!(tagger.tag_token("flurbing"), PosTag::Verb);
        assert_eq!(tagger.tag_token("flurbly"), PosTag::Adv);
        assert_eq!(tagger.tag_token("flurbs"), PosTag::Noun);
        assert_eq!(tagger.tag_token("flurbiest"), PosTag::Adj);
    }

    #[test]
    fn structural_tags() {
        let tagger = PosTagger::default();
        assert_eq!(tagger.tag_token("."), PosTag::Punct);
        assert_eq!(tagger.tag_token("[laughs]"), PosTag::X);
        assert_eq!(tagger.tag_token("42"), PosTag::Num);
    }

    #[test]
    fn mostly_unknown_utterance_is_ineligible() {
        let tagger = PosTagger::default();
        let tagged = tagger.tag(&utt("blicket florp zam the"));
        assert!(!tagged.parse_eligible);
    }

    #[test]
    fn custom_entry_overrides() {
        let tagger = PosTagger::default().with_entry("blicket", PosTag::Noun);
        assert_eq!(tagger.tag_token("blicket"), PosTag::Noun);
    }
}
