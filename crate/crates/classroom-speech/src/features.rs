//! Teacher/child speech features: utterance length, speech rate, questions,
//! responses within a latency window, and lexical alignment of responses.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::align::AlignedTimeline;
use crate::error::{Error, Result};
use crate::model::{Role, Source, Utterance};
use crate::time::Tenths;

/// An utterance is a question iff its raw text contains a question mark.
/// This runs on raw text on purpose: tokenization strips the `?`.
pub fn classify_question(raw_text: &str) -> bool {
    raw_text.contains('?')
}

/// Mean length of utterance in words over the given utterances.
pub fn mlu(utterances: &[Utterance]) -> Result<f64> {
    if utterances.is_empty() {
        return Err(Error::Empty {
            what: "utterance set for MLU".into(),
        });
    }
    let total: usize = utterances.iter().map(|u| u.tokens.len()).sum();
    Ok(total as f64 / utterances.len() as f64)
}

/// Paired MLU with omissions penalized: each slot is a (side A length,
/// side B length) pair over the union of utterances, where a side that
/// missed the utterance contributes length 0.
pub fn mlu_paired(pairs: &[(usize, usize)]) -> Result<(f64, f64)> {
    if pairs.is_empty() {
        return Err(Error::Empty {
            what: "paired utterance set for MLU".into(),
        });
    }
    let n = pairs.len() as f64;
    let a: usize = pairs.iter().map(|p| p.0).sum();
    let b: usize = pairs.iter().map(|p| p.1).sum();
    Ok((a as f64 / n, b as f64 / n))
}

/// Words per minute over a clip duration that includes silence.
pub fn words_per_minute(utterances: &[Utterance], duration: Tenths) -> Result<f64> {
    if !duration.is_positive() {
        return Err(Error::Invalid(format!(
            "words_per_minute needs a positive duration, got {duration}"
        )));
    }
    let total: usize = utterances.iter().map(|u| u.tokens.len()).sum();
    Ok(total as f64 / duration.minutes())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopwordMode {
    /// Every word type counts toward overlap.
    All,
    /// Function words from [`STOPWORDS`] are ignored.
    Content,
}

/// Function words excluded from lexical overlap in `content` mode.
pub const STOPWORDS: &[&str] = &[
    "a", "an", "the", "and", "or", "but", "so", "if", "then", "that", "this", "these", "those",
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "my", "your",
    "his", "its", "our", "their", "is", "am", "are", "was", "were", "be", "been", "being", "do",
    "does", "did", "have", "has", "had", "will", "would", "can", "could", "shall", "should", "may",
    "might", "must", "to", "of", "in", "on", "at", "by", "for", "with", "from", "up", "down",
    "out", "off", "over", "under", "again", "not", "no", "yes", "what", "who", "whom", "which",
    "when", "where", "why", "how", "there", "here", "it's", "i'm", "you're", "don't", "didn't",
    "isn't", "aren't", "wasn't",
];

/// Number of word types shared by two token lists. Symmetric.
pub fn lexical_overlap(a: &[String], b: &[String], mode: StopwordMode) -> usize {
    let keep = |w: &&String| match mode {
        StopwordMode::All => true,
        StopwordMode::Content => !STOPWORDS.contains(&w.as_str()),
    };
    let set_a: BTreeSet<&String> = a.iter().filter(keep).collect();
    let set_b: BTreeSet<&String> = b.iter().filter(keep).collect();
    set_a.intersection(&set_b).count()
}

/// A detected response: the first utterance by the other role to start
/// within the latency window after a prior utterance.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseEvent {
    /// Index of the prior utterance in the input slice.
    pub prior: usize,
    /// Index of the responding utterance in the input slice.
    pub response: usize,
    /// Gap from prior end to response start, clamped at zero for overlapping
    /// speech. Never exceeds the window.
    pub latency: Tenths,
    pub prior_is_question: bool,
    /// Shared word types between response and prior.
    pub overlap_words: usize,
    pub zero_alignment: bool,
}

/// Detect cross-role responses among teacher/child utterances.
///
/// For each prior utterance `u`, the candidate response is the first
/// utterance of the other role after `u` in (start, end, input order); it
/// counts when `max(0, v.start - u.end) <= window`. When several priors end
/// up with the same candidate, the response is credited to the latest
/// qualifying prior only. Utterances with role `Other` are ignored.
pub fn detect_responses(
    utterances: &[Utterance],
    window: Tenths,
    mode: StopwordMode,
) -> Vec<ResponseEvent> {
    let mut order: Vec<usize> = (0..utterances.len())
        .filter(|&i| utterances[i].role != Role::Other)
        .collect();
    order.sort_by_key(|&i| (utterances[i].start, utterances[i].end, i));

    // response position -> prior position; later (i.e. latest) priors win
    let mut credited: BTreeMap<usize, usize> = BTreeMap::new();
    for (pos, &ui) in order.iter().enumerate() {
        let u = &utterances[ui];
        let candidate = (pos + 1..order.len()).find(|&p| utterances[order[p]].role != u.role);
        if let Some(vpos) = candidate {
            let v = &utterances[order[vpos]];
            let latency = Tenths::from_tenths((v.start.tenths() - u.end.tenths()).max(0));
            if latency <= window {
                credited.insert(vpos, pos);
            }
        }
    }

    credited
        .into_iter()
        .map(|(vpos, upos)| {
            let (ui, vi) = (order[upos], order[vpos]);
            let (u, v) = (&utterances[ui], &utterances[vi]);
            let latency = Tenths::from_tenths((v.start.tenths() - u.end.tenths()).max(0));
            let overlap_words = lexical_overlap(&v.tokens, &u.tokens, mode);
            ResponseEvent {
                prior: ui,
                response: vi,
                latency,
                prior_is_question: u.is_question,
                overlap_words,
                zero_alignment: overlap_words == 0,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroAlignmentScope {
    /// Zero-alignment proportion over responses to questions only.
    QuestionResponses,
    /// Over responses to all utterances.
    AllResponses,
}

#[derive(Clone, Copy, Debug)]
pub struct FeatureOptions {
    pub response_window: Tenths,
    pub stopword_mode: StopwordMode,
    pub zero_alignment_scope: ZeroAlignmentScope,
}

impl Default for FeatureOptions {
    fn default() -> FeatureOptions {
        FeatureOptions {
            response_window: Tenths::from_tenths(25),
            stopword_mode: StopwordMode::All,
            zero_alignment_scope: ZeroAlignmentScope::QuestionResponses,
        }
    }
}

/// One recording's classified utterances plus its total duration
/// (including silence).
#[derive(Clone, Debug)]
pub struct FeatureInput {
    pub utterances: Vec<Utterance>,
    pub duration: Tenths,
}

/// Speech-feature row for one role. Proportions are `None` when their
/// denominator is zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RoleFeatures {
    pub mlu: Option<f64>,
    pub words_per_minute: Option<f64>,
    pub total_utterances: usize,
    pub questions: usize,
    pub non_questions: usize,
    pub responses_received_to_questions: usize,
    pub responses_received_to_non_questions: usize,
    pub prop_questions_responded: Option<f64>,
    pub prop_non_questions_responded: Option<f64>,
    pub mean_response_latency_s: Option<f64>,
    pub prop_question_responses_zero_alignment: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FeatureSummary {
    pub teacher: RoleFeatures,
    pub child: RoleFeatures,
}

impl FeatureSummary {
    pub fn role(&self, role: Role) -> &RoleFeatures {
        match role {
            Role::Teacher => &self.teacher,
            _ => &self.child,
        }
    }
}

#[derive(Default)]
struct RoleAccumulator {
    tokens: usize,
    utterances: usize,
    questions: usize,
    responded_questions: usize,
    responded_non_questions: usize,
    latency_tenths: i64,
    latency_count: usize,
    zero_align_zero: usize,
    zero_align_total: usize,
}

impl RoleAccumulator {
    fn finish(&self, duration: Tenths) -> RoleFeatures {
        let ratio = |num: usize, denom: usize| (denom > 0).then(|| num as f64 / denom as f64);
        RoleFeatures {
            mlu: (self.utterances > 0).then(|| self.tokens as f64 / self.utterances as f64),
            words_per_minute: duration
                .is_positive()
                .then(|| self.tokens as f64 / duration.minutes()),
            total_utterances: self.utterances,
            questions: self.questions,
            non_questions: self.utterances - self.questions,
            responses_received_to_questions: self.responded_questions,
            responses_received_to_non_questions: self.responded_non_questions,
            prop_questions_responded: ratio(self.responded_questions, self.questions),
            prop_non_questions_responded: ratio(
                self.responded_non_questions,
                self.utterances - self.questions,
            ),
            mean_response_latency_s: (self.latency_count > 0)
                .then(|| self.latency_tenths as f64 / 10.0 / self.latency_count as f64),
            prop_question_responses_zero_alignment: ratio(
                self.zero_align_zero,
                self.zero_align_total,
            ),
        }
    }
}

/// Pool speech features over a corpus of recordings.
///
/// Input utterances should already carry teacher/child classification;
/// role `Other` is excluded. Responses are detected within each recording.
/// Words per minute uses the summed durations.
pub fn feature_table(recordings: &[FeatureInput], opts: &FeatureOptions) -> FeatureSummary {
    let mut teacher = RoleAccumulator::default();
    let mut child = RoleAccumulator::default();
    let mut total_duration = Tenths::ZERO;

    for recording in recordings {
        total_duration = total_duration + recording.duration;
        for u in &recording.utterances {
            let acc = match u.role {
                Role::Teacher => &mut teacher,
                Role::Child => &mut child,
                Role::Other => continue,
            };
            acc.tokens += u.tokens.len();
            acc.utterances += 1;
            if u.is_question {
                acc.questions += 1;
            }
        }
        let events = detect_responses(
            &recording.utterances,
            opts.response_window,
            opts.stopword_mode,
        );
        for ev in &events {
            let acc = match recording.utterances[ev.prior].role {
                Role::Teacher => &mut teacher,
                Role::Child => &mut child,
                Role::Other => continue,
            };
            if ev.prior_is_question {
                acc.responded_questions += 1;
            } else {
                acc.responded_non_questions += 1;
            }
            acc.latency_tenths += ev.latency.tenths();
            acc.latency_count += 1;
            let in_scope = match opts.zero_alignment_scope {
                ZeroAlignmentScope::QuestionResponses => ev.prior_is_question,
                ZeroAlignmentScope::AllResponses => true,
            };
            if in_scope {
                acc.zero_align_total += 1;
                if ev.zero_alignment {
                    acc.zero_align_zero += 1;
                }
            }
        }
    }

    FeatureSummary {
        teacher: teacher.finish(total_duration),
        child: child.finish(total_duration),
    }
}

/// Which side of the aligned timeline supplies teacher/child classification
/// for transcriber-method features.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodClassifier {
    ExpertRoles,
    DiarizerRoles,
}

/// Utterance sets reconstructed from an aligned timeline, one per method.
#[derive(Clone, Debug)]
pub struct MethodUtterances {
    /// Expert method: the expert's own text and classification.
    pub expert_method: Vec<Utterance>,
    /// Transcriber method: the transcriber's text with classification taken
    /// from the chosen side.
    pub transcriber_method: Vec<Utterance>,
    /// Anchor units skipped because the classifying side was absent.
    pub unclassified: usize,
}

/// Rebuild per-method utterance lists from an aligned timeline so the same
/// feature code can run on both methods.
pub fn extract_method_utterances(
    timeline: &AlignedTimeline,
    classifier: MethodClassifier,
) -> Result<MethodUtterances> {
    let mut expert_method = Vec::new();
    let mut transcriber_method = Vec::new();
    let mut unclassified = 0usize;

    for unit in &timeline.units {
        if let Some(expert) = &unit.expert {
            expert_method.push(Utterance::new(
                format!("u{:04}e", unit.unit_id),
                Source::Expert,
                unit.start,
                unit.end,
                expert.speaker,
                expert.role,
                expert.text.as_str(),
            )?);
        }
        if let Some(anchor) = &unit.anchor {
            let side = match classifier {
                MethodClassifier::ExpertRoles => unit.expert.as_ref(),
                MethodClassifier::DiarizerRoles => unit.diarizer.as_ref(),
            };
            match side {
                Some(side) => transcriber_method.push(Utterance::new(
                    format!("u{:04}t", unit.unit_id),
                    Source::Transcriber,
                    anchor.start,
                    anchor.end,
                    side.speaker,
                    side.role,
                    anchor.raw_text.as_str(),
                )?),
                None => unclassified += 1,
            }
        }
    }

    Ok(MethodUtterances {
        expert_method,
        transcriber_method,
        unclassified,
    })
}
