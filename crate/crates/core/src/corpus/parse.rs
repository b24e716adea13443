use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Conversation, Dataset, SpeakerRole, Utterance};
use crate::error::{Error, Result};

/// Sentinel that terminates every conversation.
pub const END_OF_TEXT: &str = "<|endoftext|>";

/// Literal two-escape separator used in the one-conversation-per-line format.
const ESCAPED_SEP: &str = "\\n\\n";

/// On-disk layout of a transcript file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TranscriptFormat {
    /// One conversation per line; utterances joined by the literal text
    /// `\n\n`; the end-of-text sentinel closes the line.
    SingleLine,
    /// Utterances separated by blank lines; a line holding only the
    /// end-of-text sentinel closes each conversation.
    MultiLine,
}

/// Maps raw speaker labels (the text between the asterisks) to roles.
/// Lookup is case-insensitive; unknown labels resolve to [`SpeakerRole::Other`].
#[derive(Debug, Clone)]
pub struct SpeakerAliases {
    map: BTreeMap<String, SpeakerRole>,
}

impl Default for SpeakerAliases {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        map.insert("MOT".to_string(), SpeakerRole::Mot);
        map.insert("FAT".to_string(), SpeakerRole::Fat);
        map.insert("CHI".to_string(), SpeakerRole::Chi);
        map.insert("OCHI".to_string(), SpeakerRole::Ochi);
        SpeakerAliases { map }
    }
}

impl SpeakerAliases {
    pub fn with_alias(mut self, raw_label: &str, role: SpeakerRole) -> Self {
        self.map.insert(raw_label.to_uppercase(), role);
        self
    }

    pub fn resolve(&self, raw_label: &str) -> SpeakerRole {
        self.map
            .get(&raw_label.to_uppercase())
            .copied()
            .unwrap_or(SpeakerRole::Other)
    }
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub name: String,
    pub family_id: String,
    pub child_age_months: Option<u32>,
    pub format: TranscriptFormat,
    pub aliases: SpeakerAliases,
}

impl ParseOptions {
    pub fn new(name: impl Into<String>, family_id: impl Into<String>) -> Self {
        ParseOptions {
            name: name.into(),
            family_id: family_id.into(),
            child_age_months: None,
            format: TranscriptFormat::SingleLine,
            aliases: SpeakerAliases::default(),
        }
    }

    pub fn age(mut self, months: Option<u32>) -> Self {
        self.child_age_months = months;
        self
    }

    pub fn format(mut self, format: TranscriptFormat) -> Self {
        self.format = format;
        self
    }
}

/// One transcript file in a corpus manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub family_id: String,
    #[serde(default)]
    pub child_age_months: Option<u32>,
}

pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn parse_transcripts(path: &Path, opts: &ParseOptions) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_transcript_str(&text, opts)
}

pub fn parse_transcript_str(text: &str, opts: &ParseOptions) -> Result<Dataset> {
    if text.trim().is_empty() {
        log::warn!("transcript for {:?} is empty", opts.name);
        return Ok(Dataset::new(opts.name.clone(), Vec::new()));
    }
    let conversations = match opts.format {
        TranscriptFormat::SingleLine => parse_single_line(text, opts)?,
        TranscriptFormat::MultiLine => parse_multi_line(text, opts)?,
    };
    Ok(Dataset::new(opts.name.clone(), conversations))
}

fn parse_single_line(text: &str, opts: &ParseOptions) -> Result<Vec<Conversation>> {
    let mut conversations = Vec::new();
    let mut record = 0usize;
    for (line_idx, line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        record += 1;
        let body = trimmed.strip_suffix(END_OF_TEXT).ok_or_else(|| Error::Parse {
            record,
            line: line_no,
            message: format!("missing end-of-text sentinel {END_OF_TEXT:?}"),
        })?;
        let body = body.trim_end();
        if !body.contains("**") {
            return Err(Error::Parse {
                record,
                line: line_no,
                message: "no speaker headers found".to_string(),
            });
        }
        let mut utterances = Vec::new();
        for chunk in body.split(ESCAPED_SEP) {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                continue;
            }
            utterances.push(parse_utterance(chunk, record, line_no, &opts.aliases)?);
        }
        if utterances.is_empty() {
            return Err(Error::Parse {
                record,
                line: line_no,
                message: "conversation has no utterances".to_string(),
            });
        }
        conversations.push(Conversation {
            utterances,
            family_id: opts.family_id.clone(),
            child_age_months: opts.child_age_months,
        });
    }
    Ok(conversations)
}

fn parse_multi_line(text: &str, opts: &ParseOptions) -> Result<Vec<Conversation>> {
    let mut conversations = Vec::new();
    let mut record = 1usize;
    let mut record_start_line = 0usize;
    let mut utterance_lines: Vec<&str> = Vec::new();
    let mut utterances: Vec<Utterance> = Vec::new();

    let flush_utterance = |lines: &mut Vec<&str>,
                               utts: &mut Vec<Utterance>,
                               record: usize,
                               line_no: usize,
                               aliases: &SpeakerAliases|
     -> Result<()> {
        if lines.is_empty() {
            return Ok(());
        }
        let joined = lines.join(" ");
        lines.clear();
        utts.push(parse_utterance(joined.trim(), record, line_no, aliases)?);
        Ok(())
    };

    for (line_idx, line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let trimmed = line.trim();
        if record_start_line == 0 && !trimmed.is_empty() {
            record_start_line = line_no;
        }
        if trimmed == END_OF_TEXT {
            flush_utterance(&mut utterance_lines, &mut utterances, record, line_no, &opts.aliases)?;
            if utterances.is_empty() {
                return Err(Error::Parse {
                    record,
                    line: record_start_line.max(line_no),
                    message: "no speaker headers found".to_string(),
                });
            }
            conversations.push(Conversation {
                utterances: std::mem::take(&mut utterances),
                family_id: opts.family_id.clone(),
                child_age_months: opts.child_age_months,
            });
            record += 1;
            record_start_line = 0;
        } else if trimmed.is_empty() {
            flush_utterance(&mut utterance_lines, &mut utterances, record, line_no, &opts.aliases)?;
        } else {
            utterance_lines.push(trimmed);
        }
    }
    if !utterance_lines.is_empty() || !utterances.is_empty() {
        return Err(Error::Parse {
            record,
            line: record_start_line,
            message: format!("missing end-of-text sentinel {END_OF_TEXT:?}"),
        });
    }
    Ok(conversations)
}

fn parse_utterance(
    chunk: &str,
    record: usize,
    line: usize,
    aliases: &SpeakerAliases,
) -> Result<Utterance> {
    let rest = chunk.strip_prefix("**").ok_or_else(|| Error::Parse {
        record,
        line,
        message: format!("utterance does not start with a speaker header: {chunk:?}"),
    })?;
    let close = rest.find("**").ok_or_else(|| Error::Parse {
        record,
        line,
        message: format!("speaker header has no closing \"**\": {chunk:?}"),
    })?;
    let label = &rest[..close];
    if label.is_empty() {
        return Err(Error::Parse {
            record,
            line,
            message: "empty speaker label".to_string(),
        });
    }
    let mut text = &rest[close + 2..];
    if let Some(t) = text.strip_prefix(':') {
        text = t;
    }
    if let Some(t) = text.strip_prefix(' ') {
        text = t;
    }
    Ok(Utterance::new(label, text, aliases.resolve(label)))
}

/// Render a dataset back to transcript text in the requested format.
/// Applied to the output of [`parse_transcript_str`], re-parsing yields an
/// identical dataset, and for canonically formatted input the text itself
/// is byte-identical.
pub fn serialize_transcripts(dataset: &Dataset, format: TranscriptFormat) -> String {
    let mut out = String::new();
    for conv in dataset.conversations() {
        let rendered: Vec<String> = conv.utterances.iter().map(render_utterance).collect();
        match format {
            TranscriptFormat::SingleLine => {
                out.push_str(&rendered.join(&format!(" {ESCAPED_SEP} ")));
                out.push(' ');
                out.push_str(END_OF_TEXT);
                out.push('\n');
            }
            TranscriptFormat::MultiLine => {
                out.push_str(&rendered.join("\n\n"));
                out.push('\n');
                out.push_str(END_OF_TEXT);
                out.push_str("\n\n");
            }
        }
    }
    out
}

fn render_utterance(utt: &Utterance) -> String {
    if utt.raw_text.is_empty() {
        format!("**{}**:", utt.raw_label)
    } else {
        format!("**{}**: {}", utt.raw_label, utt.raw_text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> ParseOptions {
        ParseOptions::new("test", "fam1").age(Some(24))
    }

    #[test]
    fn parses_single_line_record() {
        let text = "**MOT**: Put it in the oven for baby and me. \\n\\n **CHI**: Whoopsie. <|endoftext|>\n";
        let d = parse_transcript_str(text, &opts()).unwrap();
        assert_eq!(d.len(), 1);
        let conv = &d.conversations()[0];
        assert_eq!(conv.utterances.len(), 2);
        assert_eq!(conv.utterances[0].role, SpeakerRole::Mot);
        assert_eq!(conv.utterances[0].raw_label, "MOT");
        assert_eq!(
            conv.utterances[0].tokens,
            vec!["put", "it", "in", "the", "oven", "for", "baby", "and", "me", "."]
        );
        assert_eq!(conv.utterances[1].role, SpeakerRole::Chi);
        assert_eq!(conv.utterances[1].tokens, vec!["whoopsie", "."]);
        assert_eq!(conv.child_age_months, Some(24));
    }

    #[test]
    fn parses_multi_line_record() {
        let text = "**MOT**: Oh, hold on.\n\n**OCHI**: Hey, Rosa, look at me.\n<|endoftext|>\n\n**MOT**: Look at me.\n<|endoftext|>\n";
        let d = parse_transcript_str(text, &opts().format(TranscriptFormat::MultiLine)).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.conversations()[0].utterances.len(), 2);
        assert_eq!(d.conversations()[0].utterances[1].role, SpeakerRole::Ochi);
        assert_eq!(d.conversations()[1].utterances.len(), 1);
    }

    #[test]
    fn record_without_headers_names_the_record() {
        let text = "**MOT**: hi <|endoftext|>\njust some text <|endoftext|>\n";
        let err = parse_transcript_str(text, &opts()).unwrap_err();
        match err {
            Error::Parse { record, line, ref message } => {
                assert_eq!(record, 2);
                assert_eq!(line, 2);
                assert!(message.contains("no speaker headers"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn unclosed_header_reports_line() {
        let text = "**MOT: hi <|endoftext|>\n";
        let err = parse_transcript_str(text, &opts()).unwrap_err();
        match err {
            Error::Parse { line, ref message, .. } => {
                assert_eq!(line, 1);
                assert!(message.contains("no closing"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn missing_sentinel_is_an_error() {
        let text = "**MOT**: hi there\n";
        assert!(parse_transcript_str(text, &opts()).is_err());
    }

    #[test]
    fn empty_file_gives_empty_dataset() {
        let d = parse_transcript_str("", &opts()).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.token_count(), 0);
    }

    #[test]
    fn unknown_label_maps_to_other_and_round_trips() {
        let text = "**Teacher**: Alright, everyone. <|endoftext|>\n";
        let d = parse_transcript_str(text, &opts()).unwrap();
        assert_eq!(d.conversations()[0].utterances[0].role, SpeakerRole::Other);
        assert_eq!(d.conversations()[0].utterances[0].raw_label, "Teacher");

        let aliased = SpeakerAliases::default().with_alias("Teacher", SpeakerRole::Mot);
        let mut o = opts();
        o.aliases = aliased;
        let d = parse_transcript_str(text, &o).unwrap();
        assert_eq!(d.conversations()[0].utterances[0].role, SpeakerRole::Mot);
    }

    #[test]
    fn round_trip_is_a_fixed_point_in_both_formats() {
        let text = "**MOT**: Put it in the oven. \\n\\n **CHI**: Whoopsie. \\n\\n **MOT**: Let's try to put it on. <|endoftext|>\n**OCHI**: Hey, Rosa, look at me. <|endoftext|>\n";
        for format in [TranscriptFormat::SingleLine, TranscriptFormat::MultiLine] {
            let mut o = opts().format(TranscriptFormat::SingleLine);
            let d1 = parse_transcript_str(text, &o).unwrap();
            let s1 = serialize_transcripts(&d1, format);
            o.format = format;
            let d2 = parse_transcript_str(&s1, &o).unwrap();
            assert_eq!(d1.conversations(), d2.conversations());
            assert_eq!(s1, serialize_transcripts(&d2, format));
        }
    }

    #[test]
    fn canonical_single_line_serialization_is_byte_stable() {
        let text = "**MOT**: hi. \\n\\n **CHI**: ball! <|endoftext|>\n";
        let d = parse_transcript_str(text, &opts()).unwrap();
        assert_eq!(serialize_transcripts(&d, TranscriptFormat::SingleLine), text);
    }
}
