//! Word-level Levenshtein distance and word error rate between the
//! transcriber (hypothesis) and the expert (reference).

use serde::Serialize;

use crate::align::AlignedTimeline;
use crate::error::{Error, Result};
use crate::ingest::normalize_tokens;
use crate::model::{RawSpeakerClass, Role};

/// Minimum number of insertions, deletions, and substitutions (unit costs)
/// transforming `a` into `b`. Symmetric.
pub fn word_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    // two-row dynamic program over b
    let mut current: Vec<usize> = (0..=b.len()).collect();
    for (i, wa) in a.iter().enumerate() {
        let mut previous_diagonal = current[0];
        current[0] = i + 1;
        for (j, wb) in b.iter().enumerate() {
            let previous = current[j + 1];
            let substitution = previous_diagonal + usize::from(wa != wb);
            current[j + 1] = substitution.min(previous + 1).min(current[j] + 1);
            previous_diagonal = previous;
        }
    }
    current[b.len()]
}

/// Per-utterance word error rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WerOutcome {
    pub ld: usize,
    pub ref_len: usize,
    pub hyp_len: usize,
    pub wer: f64,
    /// Denominator used for the corpus micro average: the reference length,
    /// or the hypothesis length when the reference is absent (omission rule).
    pub denom: usize,
}

/// WER for one aligned pair of token lists.
///
/// With a non-empty reference this is LD / reference length. When one side
/// transcribed an utterance the other missed entirely, every word counts as
/// an error: an empty reference with a non-empty hypothesis reports
/// wer = 1.0 with the hypothesis length as the effective denominator, and an
/// empty hypothesis against a non-empty reference naturally yields the same
/// through the distance itself. Returns `None` when both sides are empty
/// (callers should warn and skip).
pub fn utterance_wer(hyp: &[String], reference: &[String]) -> Option<WerOutcome> {
    if hyp.is_empty() && reference.is_empty() {
        return None;
    }
    if reference.is_empty() {
        return Some(WerOutcome {
            ld: hyp.len(),
            ref_len: 0,
            hyp_len: hyp.len(),
            wer: 1.0,
            denom: hyp.len(),
        });
    }
    let ld = word_levenshtein(hyp, reference);
    Some(WerOutcome {
        ld,
        ref_len: reference.len(),
        hyp_len: hyp.len(),
        wer: ld as f64 / reference.len() as f64,
        denom: reference.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorpusWer {
    /// Total edit mass over total denominators.
    pub micro: f64,
    /// Unweighted mean of per-utterance rates.
    pub macro_mean: f64,
    pub pairs: usize,
    pub total_ld: usize,
    pub total_denom: usize,
}

/// Pool per-utterance outcomes into corpus-level micro and macro rates.
/// `filter_label` names the selection in the empty-selection error.
pub fn corpus_wer(outcomes: &[WerOutcome], filter_label: &str) -> Result<CorpusWer> {
    if outcomes.is_empty() {
        return Err(Error::EmptySelection {
            filter: filter_label.to_string(),
        });
    }
    let total_ld: usize = outcomes.iter().map(|o| o.ld).sum();
    let total_denom: usize = outcomes.iter().map(|o| o.denom).sum();
    let macro_mean = outcomes.iter().map(|o| o.wer).sum::<f64>() / outcomes.len() as f64;
    Ok(CorpusWer {
        micro: if total_denom > 0 {
            total_ld as f64 / total_denom as f64
        } else {
            0.0
        },
        macro_mean,
        pairs: outcomes.len(),
        total_ld,
        total_denom,
    })
}

/// Which speaker a WER pair must belong to, judged from the expert side
/// (falling back to the diarizer side for hypothesis-only units).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpeakerFilter {
    Any,
    /// Adult speech (speaker class FEM or MAL).
    Adult,
    /// The key child wearing the recorder (class KCHI).
    KeyChild,
}

impl SpeakerFilter {
    fn matches(self, speaker: Option<RawSpeakerClass>) -> bool {
        match self {
            SpeakerFilter::Any => true,
            SpeakerFilter::Adult => matches!(
                speaker,
                Some(RawSpeakerClass::Fem) | Some(RawSpeakerClass::Mal)
            ),
            SpeakerFilter::KeyChild => matches!(speaker, Some(RawSpeakerClass::Kchi)),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WerFilter {
    /// Required role of whoever wore the recorder; `None` accepts any.
    pub wearer: Option<Role>,
    pub speaker: SpeakerFilter,
    /// Include transcriber-only utterances the expert never saw.
    pub include_hyp_only: bool,
}

impl WerFilter {
    /// Teacher speech from teacher-worn recorders.
    pub fn teacher(include_hyp_only: bool) -> WerFilter {
        WerFilter {
            wearer: Some(Role::Teacher),
            speaker: SpeakerFilter::Adult,
            include_hyp_only,
        }
    }

    /// Key-child speech from child-worn recorders.
    pub fn child(include_hyp_only: bool) -> WerFilter {
        WerFilter {
            wearer: Some(Role::Child),
            speaker: SpeakerFilter::KeyChild,
            include_hyp_only,
        }
    }

    pub fn all(include_hyp_only: bool) -> WerFilter {
        WerFilter {
            wearer: None,
            speaker: SpeakerFilter::Any,
            include_hyp_only,
        }
    }
}

/// One selected hypothesis/reference pair, ready for scoring.
#[derive(Clone, Debug)]
pub struct WerPair {
    pub unit_id: usize,
    pub hyp: Vec<String>,
    pub reference: Vec<String>,
}

/// Pull scoring pairs out of an aligned timeline.
///
/// Pairs come from units with an anchor (hypothesis) and/or an expert side
/// (reference). Units where both texts normalize to nothing are skipped and
/// counted. Hypothesis-only units are included only when the filter says so.
pub fn select_pairs(timeline: &AlignedTimeline, filter: &WerFilter) -> (Vec<WerPair>, usize) {
    let mut pairs = Vec::new();
    let mut skipped_empty = 0usize;
    if filter
        .wearer
        .is_some_and(|wearer| timeline.anchor_wearer != wearer)
    {
        return (pairs, 0);
    }
    for unit in &timeline.units {
        let hyp: Vec<String> = unit
            .anchor
            .as_ref()
            .map(|a| a.tokens.clone())
            .unwrap_or_default();
        let reference: Vec<String> = unit
            .expert
            .as_ref()
            .map(|e| normalize_tokens(&e.text))
            .unwrap_or_default();
        if unit.expert.is_none() && !filter.include_hyp_only {
            continue;
        }
        let speaker = unit
            .expert
            .as_ref()
            .map(|e| e.speaker)
            .or_else(|| unit.diarizer.as_ref().map(|d| d.speaker));
        if !filter.speaker.matches(speaker) {
            continue;
        }
        if hyp.is_empty() && reference.is_empty() {
            if unit.anchor.is_some() || unit.expert.is_some() {
                skipped_empty += 1;
            }
            continue;
        }
        pairs.push(WerPair {
            unit_id: unit.unit_id,
            hyp,
            reference,
        });
    }
    (pairs, skipped_empty)
}
