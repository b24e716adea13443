/// Punctuation that always becomes a standalone token.
const SPLIT_PUNCT: &[char] = &['.', ',', '?', '!', '"', ';', ':'];

/// Word-level tokenizer: lowercase, split listed punctuation into standalone
/// tokens, keep word-internal apostrophes ("don't" stays whole), collapse
/// whitespace. Bracketed markers like `[laughs]` survive as single tokens.
pub fn tokenize(raw: &str) -> Vec<String> {
    let lowered = raw.to_lowercase();
    let mut out = Vec::new();
    for chunk in lowered.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut word = String::new();
        for (i, &c) in chars.iter().enumerate() {
            if SPLIT_PUNCT.contains(&c) {
                flush(&mut word, &mut out);
                out.push(c.to_string());
            } else if c == '\'' {
                let internal = i > 0
                    && i + 1 < chars.len()
                    && chars[i - 1].is_alphanumeric()
                    && chars[i + 1].is_alphanumeric();
                if internal {
                    word.push(c);
                } else {
                    flush(&mut word, &mut out);
                    out.push(c.to_string());
                }
            } else {
                word.push(c);
            }
        }
        flush(&mut word, &mut out);
    }
    out
}

fn flush(word: &mut String, out: &mut Vec<String>) {
    if !word.is_empty() {
        out.push(std::mem::take(word));
    }
}
