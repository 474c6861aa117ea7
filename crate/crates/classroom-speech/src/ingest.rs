//! Parsers for the three input annotation formats plus the canonical stream
//! interchange JSON.
//!
//! All parsers are pure functions of their input bytes and a role mapping.
//! They report recoverable oddities (unknown speaker tags) as warnings and
//! reserve errors for inputs that violate the format contract.

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{AnnotationStream, RawSpeakerClass, Role, RoleMap, Source, Utterance};
use crate::time::Tenths;

/// A non-fatal observation made while parsing, tied to a 1-based line (or
/// row index for JSON segments).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Clone, Debug)]
pub struct ParsedStream {
    pub stream: AnnotationStream,
    pub warnings: Vec<ParseWarning>,
}

/// Normalize raw utterance text into the word tokens every comparison in the
/// crate operates on.
///
/// Rules, centralized here so word error rate and lexical overlap always see
/// identical tokens:
/// - curly quotes are folded to their ASCII forms;
/// - the punctuation characters `. , ! ? ; : " ( )` act as separators;
/// - text is lowercased;
/// - whitespace runs collapse;
/// - apostrophes inside words are kept, leading/trailing ones are trimmed.
///
/// Total and idempotent; the empty string yields an empty list.
pub fn normalize_tokens(raw: &str) -> Vec<String> {
    let mut cleaned = String::with_capacity(raw.len());
    for ch in raw.chars() {
        let ch = match ch {
            '\u{2018}' | '\u{2019}' => '\'',
            '\u{201c}' | '\u{201d}' => '"',
            c => c,
        };
        if matches!(ch, '.' | ',' | '!' | '?' | ';' | ':' | '"' | '(' | ')') {
            cleaned.push(' ');
        } else {
            for lc in ch.to_lowercase() {
                cleaned.push(lc);
            }
        }
    }
    cleaned
        .split_whitespace()
        .map(|w| w.trim_matches('\''))
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

#[derive(Deserialize)]
struct TranscriberDoc {
    #[serde(default)]
    recording_id: String,
    #[serde(default)]
    duration_s: f64,
    /// Optional: role of the person wearing the recorder. Not part of the
    /// minimal schema but needed to select recorder-specific metrics.
    #[serde(default)]
    wearer: Option<Role>,
    segments: Vec<TranscriberSegment>,
}

#[derive(Deserialize)]
struct TranscriberSegment {
    start: f64,
    end: f64,
    text: String,
}

/// Parse transcriber output: a JSON document with a `segments` array of
/// `{start, end, text}` objects (times in seconds).
///
/// The transcriber carries no speaker identity, so every utterance gets
/// speaker `UNKNOWN` and the mapped role for it.
pub fn parse_transcriber_json(bytes: &[u8], map: &RoleMap) -> Result<ParsedStream> {
    let doc: TranscriberDoc = serde_json::from_slice(bytes).map_err(|e| json_error(bytes, &e))?;

    let bad: Vec<usize> = doc
        .segments
        .iter()
        .enumerate()
        .filter(|(_, s)| Tenths::from_seconds(s.end) <= Tenths::from_seconds(s.start))
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        return Err(Error::InvalidSegments { indices: bad });
    }

    let utterances = doc
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Utterance::new(
                format!("t{i:04}"),
                Source::Transcriber,
                Tenths::from_seconds(s.start),
                Tenths::from_seconds(s.end),
                RawSpeakerClass::Unknown,
                map.role_of(RawSpeakerClass::Unknown),
                s.text.as_str(),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ParsedStream {
        stream: AnnotationStream::new(
            doc.recording_id,
            doc.wearer.unwrap_or(Role::Other),
            Source::Transcriber,
            Tenths::from_seconds(doc.duration_s),
            utterances,
        ),
        warnings: Vec::new(),
    })
}

const DIARIZER_HEADER: &str = "onset,offset,speaker";

/// Parse diarizer output: CSV with header `onset,offset,speaker`, times in
/// decimal seconds, speaker as a class tag.
///
/// Unknown tags degrade to `UNKNOWN`/mapped role with a warning instead of
/// aborting a batch.
pub fn parse_diarizer_csv(bytes: &[u8], map: &RoleMap) -> Result<ParsedStream> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Utf8 {
        context: "diarizer csv".into(),
    })?;
    let mut warnings = Vec::new();
    let mut utterances = Vec::new();
    let mut header_seen = false;
    let mut row = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if !header_seen {
            if trimmed != DIARIZER_HEADER {
                return Err(Error::Header {
                    expected: DIARIZER_HEADER.into(),
                    found: trimmed.into(),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::ColumnCount {
                line: line_no,
                expected: 3,
                found: fields.len(),
            });
        }
        let onset = parse_number(fields[0], line_no, "onset")?;
        let offset = parse_number(fields[1], line_no, "offset")?;
        let (start, end) = (Tenths::from_seconds(onset), Tenths::from_seconds(offset));
        if end <= start {
            return Err(Error::InvalidInterval {
                place: format!("line {line_no}"),
                start: onset,
                end: offset,
            });
        }
        let tag = fields[2].trim();
        let speaker = RawSpeakerClass::parse_tag(tag);
        if speaker == RawSpeakerClass::Unknown && !tag.eq_ignore_ascii_case("UNKNOWN") {
            warnings.push(ParseWarning {
                line: line_no,
                message: format!("unknown speaker tag {tag:?} mapped to UNKNOWN"),
            });
        }
        utterances.push(Utterance::new(
            format!("d{row:04}"),
            Source::Diarizer,
            start,
            end,
            speaker,
            map.role_of(speaker),
            "",
        )?);
        row += 1;
    }
    if !header_seen {
        return Err(Error::Header {
            expected: DIARIZER_HEADER.into(),
            found: String::new(),
        });
    }

    Ok(ParsedStream {
        stream: AnnotationStream::new("", Role::Other, Source::Diarizer, Tenths::ZERO, utterances),
        warnings,
    })
}

const EXPERT_HEADER: &str = "tier\tstart_s\tend_s\ttext";

/// Parse an expert annotation export: UTF-8 tab-delimited lines with four
/// columns `tier`, `start_s`, `end_s`, `text` (the usual shape of a
/// tier-per-speaker export from annotation tools such as ELAN).
///
/// A literal header line is tolerated. The text column may be empty and may
/// itself contain tabs (everything after the third tab is text).
pub fn parse_expert_export(bytes: &[u8], map: &RoleMap) -> Result<ParsedStream> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Utf8 {
        context: "expert export".into(),
    })?;
    let mut warnings = Vec::new();
    let mut utterances = Vec::new();
    let mut row = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if idx == 0 && line.trim_end() == EXPERT_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.splitn(4, '\t').collect();
        if fields.len() < 4 {
            return Err(Error::ColumnCount {
                line: line_no,
                expected: 4,
                found: fields.len(),
            });
        }
        let start_raw = parse_number(fields[1], line_no, "start_s")?;
        let end_raw = parse_number(fields[2], line_no, "end_s")?;
        let (start, end) = (
            Tenths::from_seconds(start_raw),
            Tenths::from_seconds(end_raw),
        );
        if end <= start {
            return Err(Error::InvalidInterval {
                place: format!("line {line_no}"),
                start: start_raw,
                end: end_raw,
            });
        }
        let tag = fields[0].trim();
        let speaker = RawSpeakerClass::parse_tag(tag);
        if speaker == RawSpeakerClass::Unknown && !tag.eq_ignore_ascii_case("UNKNOWN") {
            warnings.push(ParseWarning {
                line: line_no,
                message: format!("unknown speaker tag {tag:?} mapped to UNKNOWN"),
            });
        }
        utterances.push(Utterance::new(
            format!("e{row:04}"),
            Source::Expert,
            start,
            end,
            speaker,
            map.role_of(speaker),
            fields[3],
        )?);
        row += 1;
    }

    Ok(ParsedStream {
        stream: AnnotationStream::new("", Role::Other, Source::Expert, Tenths::ZERO, utterances),
        warnings,
    })
}

/// Serialize a stream in the canonical interchange JSON (what every parser
/// emits under `--emit-canonical` and what `dedup` reads and writes).
pub fn canonical_json(stream: &AnnotationStream) -> String {
    serde_json::to_string_pretty(stream).expect("annotation stream serializes")
}

/// Load a canonical stream JSON, re-deriving tokens and question flags and
/// re-checking interval and ordering invariants.
pub fn parse_canonical_json(bytes: &[u8]) -> Result<ParsedStream> {
    let mut stream: AnnotationStream =
        serde_json::from_slice(bytes).map_err(|e| json_error(bytes, &e))?;
    for (i, u) in stream.utterances.iter_mut().enumerate() {
        if u.end <= u.start {
            return Err(Error::InvalidInterval {
                place: format!("utterance {i}"),
                start: u.start.seconds(),
                end: u.end.seconds(),
            });
        }
        u.renormalize();
    }
    let stream = AnnotationStream::new(
        stream.recording_id,
        stream.wearer_role,
        stream.source,
        stream.duration,
        stream.utterances,
    );
    Ok(ParsedStream {
        stream,
        warnings: Vec::new(),
    })
}

/// Read an annotation file, picking the parser from the extension:
/// `.csv` diarizer, `.tsv`/`.txt` expert, `.json` transcriber or canonical
/// (sniffed on the top-level keys).
pub fn load_stream_file(path: &Path, map: &RoleMap) -> Result<ParsedStream> {
    let bytes = std::fs::read(path)?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let mut parsed = match ext.as_str() {
        "csv" => parse_diarizer_csv(&bytes, map)?,
        "tsv" | "txt" => parse_expert_export(&bytes, map)?,
        "json" => {
            let value: serde_json::Value =
                serde_json::from_slice(&bytes).map_err(|e| json_error(&bytes, &e))?;
            if value.get("segments").is_some() {
                parse_transcriber_json(&bytes, map)?
            } else if value.get("utterances").is_some() {
                parse_canonical_json(&bytes)?
            } else {
                return Err(Error::Invalid(format!(
                    "{}: json has neither \"segments\" nor \"utterances\"",
                    path.display()
                )));
            }
        }
        other => {
            return Err(Error::Invalid(format!(
                "{}: unsupported annotation extension {other:?}",
                path.display()
            )))
        }
    };
    if parsed.stream.recording_id.is_empty() {
        parsed.stream.recording_id = recording_id_from_path(path);
    }
    Ok(parsed)
}

/// File stem with the conventional `.transcriber` / `.diarizer` / `.expert`
/// suffix stripped, used when a format carries no embedded recording id.
pub fn recording_id_from_path(path: &Path) -> String {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("")
        .to_string();
    for suffix in [".transcriber", ".diarizer", ".expert"] {
        if let Some(prefix) = stem.strip_suffix(suffix) {
            return prefix.to_string();
        }
    }
    stem
}

fn parse_number(field: &str, line: usize, name: &'static str) -> Result<f64> {
    let trimmed = field.trim();
    let value: f64 = trimmed.parse().map_err(|_| Error::NumberField {
        line,
        field: name,
        value: trimmed.into(),
    })?;
    if !value.is_finite() {
        return Err(Error::NumberField {
            line,
            field: name,
            value: trimmed.into(),
        });
    }
    Ok(value)
}

fn json_error(bytes: &[u8], err: &serde_json::Error) -> Error {
    Error::Json {
        offset: byte_offset(bytes, err.line(), err.column()),
        message: err.to_string(),
    }
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut current_line = 1usize;
    let mut line_start = 0usize;
    for (i, b) in bytes.iter().enumerate() {
        if current_line == line {
            line_start = i;
            break;
        }
        if *b == b'\n' {
            current_line += 1;
            line_start = i + 1;
        }
    }
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map() -> RoleMap {
        RoleMap::default()
    }

    #[test]
    fn transcriber_basic_segment() {
        let input = br#"{"segments":[{"start":1.2,"end":3.4,"text":"Where is it?"}]}"#;
        let parsed = parse_transcriber_json(input, &map()).unwrap();
        let stream = &parsed.stream;
        assert_eq!(stream.utterances.len(), 1);
        let u = &stream.utterances[0];
        assert_eq!(u.start.tenths(), 12);
        assert_eq!(u.end.tenths(), 34);
        assert!(u.is_question);
        assert_eq!(u.speaker, RawSpeakerClass::Unknown);
        assert_eq!(u.role, Role::Other);
    }

    #[test]
    fn transcriber_empty_segments_ok() {
        let parsed = parse_transcriber_json(br#"{"segments":[]}"#, &map()).unwrap();
        assert!(parsed.stream.utterances.is_empty());
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn transcriber_reversed_segment_lists_index() {
        let input = br#"{"segments":[{"start":3.0,"end":2.0,"text":"x"}]}"#;
        match parse_transcriber_json(input, &map()).unwrap_err() {
            Error::InvalidSegments { indices } => assert_eq!(indices, vec![0]),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn transcriber_missing_field_named() {
        let input = br#"{"segments":[{"start":3.0,"text":"x"}]}"#;
        match parse_transcriber_json(input, &map()).unwrap_err() {
            Error::Json { message, .. } => assert!(message.contains("end"), "{message}"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn transcriber_malformed_json_reports_offset() {
        let input = br#"{"segments": [{"start":1.0,"#;
        match parse_transcriber_json(input, &map()).unwrap_err() {
            Error::Json { offset, .. } => assert!(offset > 0 && offset <= input.len()),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn diarizer_rows_map_roles() {
        let input = b"onset,offset,speaker\n10.0,12.5,FEM\n0.0,1.0,KCHI\n";
        let parsed = parse_diarizer_csv(input, &map()).unwrap();
        let s = &parsed.stream;
        assert_eq!(s.utterances.len(), 2);
        // sorted by start, so KCHI first
        assert_eq!(s.utterances[0].role, Role::Child);
        assert_eq!(s.utterances[1].role, Role::Teacher);
        assert!(s.utterances.iter().all(|u| u.raw_text.is_empty()));
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn diarizer_unknown_tag_warns_once() {
        let input = b"onset,offset,speaker\n5.0,6.0,ROBOT\n";
        let parsed = parse_diarizer_csv(input, &map()).unwrap();
        assert_eq!(
            parsed.stream.utterances[0].speaker,
            RawSpeakerClass::Unknown
        );
        assert_eq!(parsed.stream.utterances[0].role, Role::Other);
        assert_eq!(parsed.warnings.len(), 1);
        assert!(parsed.warnings[0].message.contains("ROBOT"));
    }

    #[test]
    fn diarizer_bad_number_reports_row() {
        let input = b"onset,offset,speaker\n1.0,2.0,FEM\nxx,3.0,FEM\n";
        match parse_diarizer_csv(input, &map()).unwrap_err() {
            Error::NumberField { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field, "onset");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn expert_lines_parse_with_tokens_and_flags() {
        let input =
            "FEM\t8.0\t9.5\tWhat do you think is going to happen?\nKCHI\t9.6\t10.4\tit's going to explode\n";
        let parsed = parse_expert_export(input.as_bytes(), &map()).unwrap();
        let s = &parsed.stream;
        assert_eq!(s.utterances.len(), 2);
        assert_eq!(s.utterances[0].role, Role::Teacher);
        assert_eq!(s.utterances[0].tokens.len(), 8);
        assert!(s.utterances[0].is_question);
        assert_eq!(s.utterances[1].role, Role::Child);
        assert_eq!(
            s.utterances[1].tokens,
            vec!["it's", "going", "to", "explode"]
        );
        assert!(!s.utterances[1].is_question);
    }

    #[test]
    fn expert_three_columns_is_an_error() {
        let input = "FEM\t8.0\t9.5\n";
        match parse_expert_export(input.as_bytes(), &map()).unwrap_err() {
            Error::ColumnCount { line, found, .. } => {
                assert_eq!(line, 1);
                assert_eq!(found, 3);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn expert_empty_text_allowed() {
        let input = "FEM\t8.0\t9.5\t\n";
        let parsed = parse_expert_export(input.as_bytes(), &map()).unwrap();
        assert!(parsed.stream.utterances[0].tokens.is_empty());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_tokens("Where is it?"), vec!["where", "is", "it"]);
        assert_eq!(
            normalize_tokens("it's going to explode"),
            vec!["it's", "going", "to", "explode"]
        );
        assert!(normalize_tokens("  ").is_empty());
        assert_eq!(
            normalize_tokens("\u{201c}Hi,\u{201d} she said\u{2019}s"),
            vec!["hi", "she", "said's"]
        );
    }

    #[test]
    fn canonical_round_trip() {
        let input = br#"{"recording_id":"rec7","duration_s":30.0,"segments":[{"start":1.2,"end":3.4,"text":"Where is it?"},{"start":4.0,"end":5.0,"text":"ok"}]}"#;
        let parsed = parse_transcriber_json(input, &map()).unwrap();
        let json = canonical_json(&parsed.stream);
        let back = parse_canonical_json(json.as_bytes()).unwrap();
        assert_eq!(back.stream, parsed.stream);
        // a second trip is byte identical
        assert_eq!(canonical_json(&back.stream), json);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(raw in "\\PC{0,60}") {
            let once = normalize_tokens(&raw);
            let twice = normalize_tokens(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn parsed_streams_are_sorted_and_positive(
            rows in proptest::collection::vec((0.0f64..500.0, 0.1f64..20.0, 0usize..5), 0..40)
        ) {
            let mut csv = String::from("onset,offset,speaker\n");
            for (onset, len, tag) in &rows {
                let tag = ["KCHI", "CHI", "FEM", "MAL", "XX"][*tag];
                csv.push_str(&format!("{:.1},{:.1},{}\n", onset, onset + len, tag));
            }
            match parse_diarizer_csv(csv.as_bytes(), &RoleMap::default()) {
                Ok(parsed) => {
                    let utts = &parsed.stream.utterances;
                    for w in utts.windows(2) {
                        prop_assert!((w[0].start, w[0].end) <= (w[1].start, w[1].end));
                    }
                    for u in utts {
                        prop_assert!(u.end > u.start);
                    }
                }
                // rows whose rounded length collapses to zero are rejected
                Err(Error::InvalidInterval { .. }) => {}
                Err(other) => return Err(TestCaseError::fail(other.to_string())),
            }
        }
    }
}
