//! Run configuration: the handful of knobs the analyses take, with defaults
//! matching the measurement procedure the toolkit implements (120 s epochs,
//! 2.5 s response window, all-words overlap, 0.1 s timestamp resolution).
//!
//! The file format is flat `key = value` lines; every key can also be set by
//! a CLI flag of the same name.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{StopwordMode, ZeroAlignmentScope};
use crate::model::{RawSpeakerClass, Role, RoleMap};
use crate::time::Tenths;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Epoch length for audio chunking, seconds.
    pub epoch_len_s: u32,
    /// Maximum gap between a prior utterance's end and a response's start.
    pub response_window: Tenths,
    pub stopword_mode: StopwordMode,
    pub zero_alignment_scope: ZeroAlignmentScope,
    /// Count one-sided aligned units as errors in reliability accuracy.
    pub missing_as_error: bool,
    /// Include transcriber-only utterances in corpus WER.
    pub include_hyp_only: bool,
    pub role_map: RoleMap,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            epoch_len_s: 120,
            response_window: Tenths::from_tenths(25),
            stopword_mode: StopwordMode::All,
            zero_alignment_scope: ZeroAlignmentScope::QuestionResponses,
            missing_as_error: false,
            include_hyp_only: false,
            role_map: RoleMap::default(),
        }
    }
}

fn parse_bool(value: &str, line: usize) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::Config {
            line,
            message: format!("expected true or false, got {other:?}"),
        }),
    }
}

impl RunConfig {
    pub fn set_key(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let value = value.trim();
        match key {
            "epoch_len_s" => {
                self.epoch_len_s = value.parse().map_err(|_| Error::Config {
                    line,
                    message: format!("epoch_len_s must be a positive integer, got {value:?}"),
                })?;
                if self.epoch_len_s == 0 {
                    return Err(Error::Config {
                        line,
                        message: "epoch_len_s must be positive".into(),
                    });
                }
            }
            "response_window_s" => {
                let seconds: f64 = value.parse().map_err(|_| Error::Config {
                    line,
                    message: format!("response_window_s must be a number, got {value:?}"),
                })?;
                if seconds.is_nan() || seconds < 0.0 {
                    return Err(Error::Config {
                        line,
                        message: "response_window_s must be non-negative".into(),
                    });
                }
                self.response_window = Tenths::from_seconds(seconds);
            }
            "stopword_mode" => {
                self.stopword_mode = match value {
                    "all" => StopwordMode::All,
                    "content" => StopwordMode::Content,
                    other => {
                        return Err(Error::Config {
                            line,
                            message: format!("stopword_mode must be all or content, got {other:?}"),
                        })
                    }
                };
            }
            "zero_alignment_scope" => {
                self.zero_alignment_scope = match value {
                    "question_responses" => ZeroAlignmentScope::QuestionResponses,
                    "all_responses" => ZeroAlignmentScope::AllResponses,
                    other => {
                        return Err(Error::Config {
                            line,
                            message: format!(
                                "zero_alignment_scope must be question_responses or all_responses, got {other:?}"
                            ),
                        })
                    }
                };
            }
            "missing_as_error" => self.missing_as_error = parse_bool(value, line)?,
            "include_hyp_only" => self.include_hyp_only = parse_bool(value, line)?,
            _ => {
                if let Some(class_key) = key.strip_prefix("role_map.") {
                    let class = match class_key {
                        "kchi" => RawSpeakerClass::Kchi,
                        "chi" => RawSpeakerClass::Chi,
                        "fem" => RawSpeakerClass::Fem,
                        "mal" => RawSpeakerClass::Mal,
                        "unknown" => RawSpeakerClass::Unknown,
                        other => {
                            return Err(Error::Config {
                                line,
                                message: format!("unknown role_map class {other:?}"),
                            })
                        }
                    };
                    let role = Role::parse_name(value).map_err(|e| Error::Config {
                        line,
                        message: e.to_string(),
                    })?;
                    self.role_map.set(class, role);
                } else {
                    return Err(Error::Config {
                        line,
                        message: format!("unknown key {key:?}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("expected key = value, got {line:?}"),
            })?;
            config.set_key(key.trim(), value, line_no)?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::parse(&text)
    }

    /// Canonical file representation; `parse(to_file_string(c)) == c`.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "epoch_len_s = {}", self.epoch_len_s);
        let _ = writeln!(out, "response_window_s = {}", self.response_window);
        let _ = writeln!(
            out,
            "stopword_mode = {}",
            match self.stopword_mode {
                StopwordMode::All => "all",
                StopwordMode::Content => "content",
            }
        );
        let _ = writeln!(
            out,
            "zero_alignment_scope = {}",
            match self.zero_alignment_scope {
                ZeroAlignmentScope::QuestionResponses => "question_responses",
                ZeroAlignmentScope::AllResponses => "all_responses",
            }
        );
        let _ = writeln!(out, "missing_as_error = {}", self.missing_as_error);
        let _ = writeln!(out, "include_hyp_only = {}", self.include_hyp_only);
        let _ = writeln!(out, "role_map.kchi = {}", self.role_map.kchi);
        let _ = writeln!(out, "role_map.chi = {}", self.role_map.chi);
        let _ = writeln!(out, "role_map.fem = {}", self.role_map.fem);
        let _ = writeln!(out, "role_map.mal = {}", self.role_map.mal);
        let _ = writeln!(out, "role_map.unknown = {}", self.role_map.unknown);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_stated_parameters() {
        let c = RunConfig::default();
        assert_eq!(c.epoch_len_s, 120);
        assert_eq!(c.response_window, Tenths::from_seconds(2.5));
        assert_eq!(c.stopword_mode, StopwordMode::All);
        assert_eq!(
            c.zero_alignment_scope,
            ZeroAlignmentScope::QuestionResponses
        );
        assert!(!c.missing_as_error);
        assert!(!c.include_hyp_only);
        assert_eq!(c.role_map, RoleMap::default());
    }

    #[test]
    fn file_round_trip_is_lossless() {
        let mut c = RunConfig {
            epoch_len_s: 60,
            response_window: Tenths::from_seconds(3.0),
            stopword_mode: StopwordMode::Content,
            zero_alignment_scope: ZeroAlignmentScope::AllResponses,
            missing_as_error: true,
            ..RunConfig::default()
        };
        c.role_map.set(RawSpeakerClass::Mal, Role::Other);
        let text = c.to_file_string();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_file_string(), text);
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let text = "# a comment\n\nepoch_len_s = 30\n";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.epoch_len_s, 30);
    }

    #[test]
    fn bad_keys_and_values_error_with_line() {
        match RunConfig::parse("epoch_len_s = x\n").unwrap_err() {
            Error::Config { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other}"),
        }
        assert!(RunConfig::parse("nonsense = 1\n").is_err());
        assert!(RunConfig::parse("stopword_mode = sometimes\n").is_err());
        assert!(RunConfig::parse("role_map.fem = robot\n").is_err());
    }
}
