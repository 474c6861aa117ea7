//! Shared domain model: speaker classes, roles, utterances, and annotation
//! streams. Every parser produces these types and every metric consumes them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::Tenths;

/// Which system produced an annotation stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Transcriber,
    Diarizer,
    Expert,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Source::Transcriber => "transcriber",
            Source::Diarizer => "diarizer",
            Source::Expert => "expert",
        };
        f.write_str(s)
    }
}

/// Speaker class tags as emitted by the diarizer and the expert coder.
///
/// The set is closed; parsers map any unrecognized label to `Unknown`
/// instead of failing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RawSpeakerClass {
    /// Key child: the child wearing the recorder.
    #[serde(rename = "KCHI")]
    Kchi,
    /// A child other than the key child.
    #[serde(rename = "CHI")]
    Chi,
    /// Female adult.
    #[serde(rename = "FEM")]
    Fem,
    /// Male adult.
    #[serde(rename = "MAL")]
    Mal,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl RawSpeakerClass {
    pub const ALL: [RawSpeakerClass; 5] = [
        RawSpeakerClass::Kchi,
        RawSpeakerClass::Chi,
        RawSpeakerClass::Fem,
        RawSpeakerClass::Mal,
        RawSpeakerClass::Unknown,
    ];

    /// Case-insensitive tag lookup; anything outside the closed set is `Unknown`.
    pub fn parse_tag(tag: &str) -> RawSpeakerClass {
        match tag.trim().to_ascii_uppercase().as_str() {
            "KCHI" => RawSpeakerClass::Kchi,
            "CHI" => RawSpeakerClass::Chi,
            "FEM" => RawSpeakerClass::Fem,
            "MAL" => RawSpeakerClass::Mal,
            _ => RawSpeakerClass::Unknown,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            RawSpeakerClass::Kchi => "KCHI",
            RawSpeakerClass::Chi => "CHI",
            RawSpeakerClass::Fem => "FEM",
            RawSpeakerClass::Mal => "MAL",
            RawSpeakerClass::Unknown => "UNKNOWN",
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            RawSpeakerClass::Kchi => 0,
            RawSpeakerClass::Chi => 1,
            RawSpeakerClass::Fem => 2,
            RawSpeakerClass::Mal => 3,
            RawSpeakerClass::Unknown => 4,
        }
    }
}

impl fmt::Display for RawSpeakerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Binary classroom role derived from a speaker class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Teacher,
    Child,
    Other,
}

impl Role {
    pub fn parse_name(name: &str) -> Result<Role> {
        match name.trim().to_ascii_lowercase().as_str() {
            "teacher" => Ok(Role::Teacher),
            "child" => Ok(Role::Child),
            "other" => Ok(Role::Other),
            other => Err(Error::Invalid(format!(
                "unknown role {other:?}; expected teacher, child, or other"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Teacher => "teacher",
            Role::Child => "child",
            Role::Other => "other",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Configurable mapping from speaker class to role.
///
/// The default keeps the binary adult/child task: both child classes map to
/// `Child`, both adult classes to `Teacher`, and `UNKNOWN` to `Other`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoleMap {
    pub kchi: Role,
    pub chi: Role,
    pub fem: Role,
    pub mal: Role,
    pub unknown: Role,
}

impl Default for RoleMap {
    fn default() -> RoleMap {
        RoleMap {
            kchi: Role::Child,
            chi: Role::Child,
            fem: Role::Teacher,
            mal: Role::Teacher,
            unknown: Role::Other,
        }
    }
}

impl RoleMap {
    pub fn role_of(&self, class: RawSpeakerClass) -> Role {
        match class {
            RawSpeakerClass::Kchi => self.kchi,
            RawSpeakerClass::Chi => self.chi,
            RawSpeakerClass::Fem => self.fem,
            RawSpeakerClass::Mal => self.mal,
            RawSpeakerClass::Unknown => self.unknown,
        }
    }

    pub fn set(&mut self, class: RawSpeakerClass, role: Role) {
        match class {
            RawSpeakerClass::Kchi => self.kchi = role,
            RawSpeakerClass::Chi => self.chi = role,
            RawSpeakerClass::Fem => self.fem = role,
            RawSpeakerClass::Mal => self.mal = role,
            RawSpeakerClass::Unknown => self.unknown = role,
        }
    }
}

/// One timestamped speech segment from a single source.
///
/// `tokens` and `is_question` are always derived from `raw_text` by
/// [`crate::ingest::normalize_tokens`] and [`crate::features::classify_question`];
/// constructors and deserialization enforce this.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub source: Source,
    #[serde(rename = "start_s")]
    pub start: Tenths,
    #[serde(rename = "end_s")]
    pub end: Tenths,
    pub speaker: RawSpeakerClass,
    pub role: Role,
    pub raw_text: String,
    pub tokens: Vec<String>,
    pub is_question: bool,
}

impl Utterance {
    pub fn new(
        id: impl Into<String>,
        source: Source,
        start: Tenths,
        end: Tenths,
        speaker: RawSpeakerClass,
        role: Role,
        raw_text: impl Into<String>,
    ) -> Result<Utterance> {
        let id = id.into();
        if end <= start {
            return Err(Error::InvalidInterval {
                place: format!("utterance {id}"),
                start: start.seconds(),
                end: end.seconds(),
            });
        }
        let raw_text = raw_text.into();
        let tokens = crate::ingest::normalize_tokens(&raw_text);
        let is_question = crate::features::classify_question(&raw_text);
        Ok(Utterance {
            id,
            source,
            start,
            end,
            speaker,
            role,
            raw_text,
            tokens,
            is_question,
        })
    }

    pub fn duration(&self) -> Tenths {
        self.end - self.start
    }

    /// Recompute the derived fields from `raw_text`. Used when loading
    /// serialized streams so the token/question invariants cannot drift.
    pub fn renormalize(&mut self) {
        self.tokens = crate::ingest::normalize_tokens(&self.raw_text);
        self.is_question = crate::features::classify_question(&self.raw_text);
    }
}

/// Ordered utterances from one source for one recording.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationStream {
    pub recording_id: String,
    /// Role of the person who wore the recorder, `Other` when unknown.
    pub wearer_role: Role,
    pub source: Source,
    /// Total clip length including silence; never less than the last
    /// utterance end.
    #[serde(rename = "duration_s")]
    pub duration: Tenths,
    pub utterances: Vec<Utterance>,
}

impl AnnotationStream {
    /// Sorts utterances by (start, end) — ties keep insertion order — and
    /// stretches `duration` to cover the last utterance if needed.
    pub fn new(
        recording_id: impl Into<String>,
        wearer_role: Role,
        source: Source,
        duration: Tenths,
        mut utterances: Vec<Utterance>,
    ) -> AnnotationStream {
        utterances.sort_by_key(|u| (u.start, u.end));
        let max_end = utterances
            .iter()
            .map(|u| u.end)
            .max()
            .unwrap_or(Tenths::ZERO);
        AnnotationStream {
            recording_id: recording_id.into(),
            wearer_role,
            source,
            duration: duration.max(max_end),
            utterances,
        }
    }

    pub fn max_end(&self) -> Tenths {
        self.utterances
            .iter()
            .map(|u| u.end)
            .max()
            .unwrap_or(Tenths::ZERO)
    }

    pub fn total_tokens(&self) -> usize {
        self.utterances.iter().map(|u| u.tokens.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn role_map_is_total_and_defaults_match() {
        let map = RoleMap::default();
        assert_eq!(map.role_of(RawSpeakerClass::Kchi), Role::Child);
        assert_eq!(map.role_of(RawSpeakerClass::Chi), Role::Child);
        assert_eq!(map.role_of(RawSpeakerClass::Fem), Role::Teacher);
        assert_eq!(map.role_of(RawSpeakerClass::Mal), Role::Teacher);
        assert_eq!(map.role_of(RawSpeakerClass::Unknown), Role::Other);
        for class in RawSpeakerClass::ALL {
            // total: every class yields some role without panicking
            let _ = map.role_of(class);
        }
    }

    #[test]
    fn unknown_tags_degrade_to_unknown() {
        assert_eq!(RawSpeakerClass::parse_tag("FEM"), RawSpeakerClass::Fem);
        assert_eq!(RawSpeakerClass::parse_tag("fem "), RawSpeakerClass::Fem);
        assert_eq!(
            RawSpeakerClass::parse_tag("ROBOT"),
            RawSpeakerClass::Unknown
        );
    }

    #[test]
    fn utterance_derives_tokens_and_question_flag() {
        let u = Utterance::new(
            "x1",
            Source::Expert,
            Tenths::from_tenths(10),
            Tenths::from_tenths(20),
            RawSpeakerClass::Fem,
            Role::Teacher,
            "Where is it?",
        )
        .unwrap();
        assert_eq!(u.tokens, vec!["where", "is", "it"]);
        assert!(u.is_question);
        assert_eq!(u.duration().tenths(), 10);
    }

    #[test]
    fn zero_length_interval_rejected() {
        let err = Utterance::new(
            "x1",
            Source::Expert,
            Tenths::from_tenths(30),
            Tenths::from_tenths(30),
            RawSpeakerClass::Fem,
            Role::Teacher,
            "hi",
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInterval { .. }));
    }

    #[test]
    fn stream_sorts_and_covers_duration() {
        let u = |id: &str, s: i64, e: i64| {
            Utterance::new(
                id,
                Source::Expert,
                Tenths::from_tenths(s),
                Tenths::from_tenths(e),
                RawSpeakerClass::Fem,
                Role::Teacher,
                "hello",
            )
            .unwrap()
        };
        let stream = AnnotationStream::new(
            "rec",
            Role::Other,
            Source::Expert,
            Tenths::from_tenths(5),
            vec![u("b", 20, 30), u("a", 0, 10)],
        );
        assert_eq!(stream.utterances[0].id, "a");
        assert_eq!(stream.duration.tenths(), 30);
    }
}
