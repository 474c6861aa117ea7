//! Synchronize annotation streams onto the transcriber's segments.
//!
//! The transcriber stream is the anchor: every other stream's segments are
//! assigned to the anchor segment they overlap most, merged per anchor, and
//! segments with no overlapping anchor become blank-anchor units so nothing
//! is dropped. Timestamps are already quantized to 0.1 s when streams are
//! parsed, so all overlap arithmetic here is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AnnotationStream, RawSpeakerClass, Role, Source, Utterance};
use crate::time::Tenths;

/// A secondary stream merged onto one aligned unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergedSide {
    /// Speaker class occupying the longest summed overlap with the anchor.
    pub speaker: RawSpeakerClass,
    pub role: Role,
    /// Time-ordered concatenation of the merged segments' texts.
    pub text: String,
    #[serde(rename = "total_overlap_s")]
    pub total_overlap: Tenths,
    /// Ids of the input utterances this side represents.
    pub source_ids: Vec<String>,
}

/// One slot of the aligned timeline: an anchor utterance and/or merged
/// expert and diarizer annotations covering the same speech event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignedUnit {
    pub unit_id: usize,
    #[serde(rename = "start_s")]
    pub start: Tenths,
    #[serde(rename = "end_s")]
    pub end: Tenths,
    pub anchor: Option<Utterance>,
    pub expert: Option<MergedSide>,
    pub diarizer: Option<MergedSide>,
}

impl AlignedUnit {
    pub fn is_blank_anchor(&self) -> bool {
        self.anchor.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignedTimeline {
    pub recording_id: String,
    #[serde(rename = "duration_s")]
    pub duration: Tenths,
    /// Role of whoever wore the recorder for the anchor stream.
    pub anchor_wearer: Role,
    pub provenance: Vec<Source>,
    pub units: Vec<AlignedUnit>,
}

impl AlignedTimeline {
    pub fn has_source(&self, source: Source) -> bool {
        self.provenance.contains(&source)
    }

    pub fn blank_anchor_count(&self) -> usize {
        self.units.iter().filter(|u| u.is_blank_anchor()).count()
    }

    /// Units whose secondary side merged more than one input utterance.
    pub fn merged_count(&self) -> usize {
        self.units
            .iter()
            .filter(|u| {
                u.expert.as_ref().is_some_and(|s| s.source_ids.len() > 1)
                    || u.diarizer.as_ref().is_some_and(|s| s.source_ids.len() > 1)
            })
            .count()
    }
}

fn overlap_tenths(a_start: Tenths, a_end: Tenths, b_start: Tenths, b_end: Tenths) -> i64 {
    (a_end.min(b_end).tenths() - a_start.max(b_start).tenths()).max(0)
}

fn check_recording_match(a: &AnnotationStream, b: &AnnotationStream) -> Result<()> {
    if !a.recording_id.is_empty() && !b.recording_id.is_empty() && a.recording_id != b.recording_id
    {
        return Err(Error::RecordingMismatch {
            left: a.recording_id.clone(),
            right: b.recording_id.clone(),
        });
    }
    Ok(())
}

/// Map each secondary utterance to the anchor utterance with maximal
/// temporal overlap (`None` when it overlaps no anchor).
///
/// Ties go to the earlier anchor. Deterministic: anchors are scanned in
/// stream order and only a strictly larger overlap displaces the best.
pub fn assign_overlaps(
    anchor: &AnnotationStream,
    secondary: &AnnotationStream,
) -> Result<Vec<Option<usize>>> {
    check_recording_match(anchor, secondary)?;
    Ok(secondary
        .utterances
        .iter()
        .map(|s| {
            let mut best: Option<(usize, i64)> = None;
            for (i, a) in anchor.utterances.iter().enumerate() {
                if a.start >= s.end {
                    break; // anchors are sorted by start; nothing later can overlap
                }
                let ov = overlap_tenths(a.start, a.end, s.start, s.end);
                if ov > 0 && best.is_none_or(|(_, b)| ov > b) {
                    best = Some((i, ov));
                }
            }
            best.map(|(i, _)| i)
        })
        .collect())
}

/// Merge the assigned secondary segments of one anchor into a single side.
///
/// The winning speaker class is the one with the largest summed overlap; on
/// a tie, the class of the earliest-starting assigned segment among the tied
/// classes wins.
fn merge_side(anchor_utt: &Utterance, segments: &[&Utterance]) -> MergedSide {
    let mut per_class = [0i64; 5];
    let mut total = 0i64;
    for s in segments {
        let ov = overlap_tenths(anchor_utt.start, anchor_utt.end, s.start, s.end);
        per_class[s.speaker.index()] += ov;
        total += ov;
    }
    let max = *per_class.iter().max().unwrap_or(&0);
    let winner = segments
        .iter()
        .find(|s| per_class[s.speaker.index()] == max)
        .expect("merge_side called with at least one segment");

    let text = segments
        .iter()
        .map(|s| s.raw_text.trim())
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join(" ");

    MergedSide {
        speaker: winner.speaker,
        role: winner.role,
        text,
        total_overlap: Tenths::from_tenths(total),
        source_ids: segments.iter().map(|s| s.id.clone()).collect(),
    }
}

fn single_side(s: &Utterance) -> MergedSide {
    MergedSide {
        speaker: s.speaker,
        role: s.role,
        text: s.raw_text.trim().to_string(),
        total_overlap: Tenths::ZERO,
        source_ids: vec![s.id.clone()],
    }
}

/// Per-anchor merged sides plus the blank-anchor leftovers for one
/// secondary stream.
struct PairParts {
    per_anchor: Vec<Option<MergedSide>>,
    blanks: Vec<(Tenths, Tenths, MergedSide)>,
}

fn pair_parts(anchor: &AnnotationStream, secondary: &AnnotationStream) -> Result<PairParts> {
    let assignment = assign_overlaps(anchor, secondary)?;
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); anchor.utterances.len()];
    let mut blanks = Vec::new();
    for (si, slot) in assignment.iter().enumerate() {
        match slot {
            Some(ai) => assigned[*ai].push(si),
            None => {
                let s = &secondary.utterances[si];
                blanks.push((s.start, s.end, single_side(s)));
            }
        }
    }
    let per_anchor = anchor
        .utterances
        .iter()
        .enumerate()
        .map(|(ai, a)| {
            if assigned[ai].is_empty() {
                None
            } else {
                let segments: Vec<&Utterance> = assigned[ai]
                    .iter()
                    .map(|&si| &secondary.utterances[si])
                    .collect();
                Some(merge_side(a, &segments))
            }
        })
        .collect();
    Ok(PairParts { per_anchor, blanks })
}

fn slot_for(source: Source) -> Source {
    // a transcriber-vs-transcriber pair (self-alignment) lands in the
    // text-bearing expert slot
    match source {
        Source::Diarizer => Source::Diarizer,
        _ => Source::Expert,
    }
}

struct UnitDraft {
    start: Tenths,
    end: Tenths,
    anchor: Option<Utterance>,
    expert: Option<MergedSide>,
    diarizer: Option<MergedSide>,
}

fn finalize(
    recording_id: String,
    duration: Tenths,
    anchor_wearer: Role,
    provenance: Vec<Source>,
    mut drafts: Vec<UnitDraft>,
) -> AlignedTimeline {
    drafts.sort_by(|a, b| {
        let key = |d: &UnitDraft| {
            (
                d.start,
                d.end,
                d.anchor.is_none(),
                d.anchor
                    .as_ref()
                    .map(|u| u.id.clone())
                    .or_else(|| {
                        d.expert
                            .as_ref()
                            .or(d.diarizer.as_ref())
                            .and_then(|s| s.source_ids.first().cloned())
                    })
                    .unwrap_or_default(),
            )
        };
        key(a).cmp(&key(b))
    });
    let units = drafts
        .into_iter()
        .enumerate()
        .map(|(i, d)| AlignedUnit {
            unit_id: i,
            start: d.start,
            end: d.end,
            anchor: d.anchor,
            expert: d.expert,
            diarizer: d.diarizer,
        })
        .collect();
    AlignedTimeline {
        recording_id,
        duration,
        anchor_wearer,
        provenance,
        units,
    }
}

/// Align one secondary stream onto the anchor stream.
pub fn align_pair(
    anchor: &AnnotationStream,
    secondary: &AnnotationStream,
) -> Result<AlignedTimeline> {
    let parts = pair_parts(anchor, secondary)?;
    let slot = slot_for(secondary.source);

    let mut drafts: Vec<UnitDraft> = Vec::with_capacity(anchor.utterances.len());
    for (a, side) in anchor.utterances.iter().zip(parts.per_anchor) {
        let (expert, diarizer) = match slot {
            Source::Diarizer => (None, side),
            _ => (side, None),
        };
        drafts.push(UnitDraft {
            start: a.start,
            end: a.end,
            anchor: Some(a.clone()),
            expert,
            diarizer,
        });
    }
    for (start, end, side) in parts.blanks {
        let (expert, diarizer) = match slot {
            Source::Diarizer => (None, Some(side)),
            _ => (Some(side), None),
        };
        drafts.push(UnitDraft {
            start,
            end,
            anchor: None,
            expert,
            diarizer,
        });
    }

    let recording_id = if anchor.recording_id.is_empty() {
        secondary.recording_id.clone()
    } else {
        anchor.recording_id.clone()
    };
    Ok(finalize(
        recording_id,
        anchor.duration.max(secondary.duration),
        anchor.wearer_role,
        vec![anchor.source, secondary.source],
        drafts,
    ))
}

/// Align expert and diarizer streams onto the transcriber anchor and join
/// the two pair alignments.
///
/// Anchor units join on the anchor utterance; blank-anchor units from the
/// two runs join when their intervals overlap (each diarizer-only segment
/// joins the expert-only segment of maximal positive overlap, earlier one
/// on ties, one-to-one), and the joined unit spans the hull of the two
/// intervals.
pub fn align_three_way(
    expert: &AnnotationStream,
    transcriber: &AnnotationStream,
    diarizer: &AnnotationStream,
) -> Result<AlignedTimeline> {
    check_recording_match(transcriber, expert)?;
    check_recording_match(transcriber, diarizer)?;
    check_recording_match(expert, diarizer)?;

    let expert_parts = pair_parts(transcriber, expert)?;
    let diarizer_parts = pair_parts(transcriber, diarizer)?;

    let mut drafts: Vec<UnitDraft> = transcriber
        .utterances
        .iter()
        .zip(expert_parts.per_anchor)
        .zip(diarizer_parts.per_anchor)
        .map(|((a, e), d)| UnitDraft {
            start: a.start,
            end: a.end,
            anchor: Some(a.clone()),
            expert: e,
            diarizer: d,
        })
        .collect();

    // join blank-anchor units on positive overlap
    let expert_blanks = expert_parts.blanks;
    let mut diarizer_taken = vec![false; diarizer_parts.blanks.len()];
    for (e_start, e_end, e_side) in expert_blanks {
        let mut best: Option<(usize, i64)> = None;
        for (di, (d_start, d_end, _)) in diarizer_parts.blanks.iter().enumerate() {
            if diarizer_taken[di] {
                continue;
            }
            let ov = overlap_tenths(e_start, e_end, *d_start, *d_end);
            if ov > 0 && best.is_none_or(|(_, b)| ov > b) {
                best = Some((di, ov));
            }
        }
        match best {
            Some((di, _)) => {
                diarizer_taken[di] = true;
                let (d_start, d_end, d_side) = &diarizer_parts.blanks[di];
                drafts.push(UnitDraft {
                    start: e_start.min(*d_start),
                    end: e_end.max(*d_end),
                    anchor: None,
                    expert: Some(e_side),
                    diarizer: Some(d_side.clone()),
                });
            }
            None => drafts.push(UnitDraft {
                start: e_start,
                end: e_end,
                anchor: None,
                expert: Some(e_side),
                diarizer: None,
            }),
        }
    }
    for (di, (d_start, d_end, d_side)) in diarizer_parts.blanks.into_iter().enumerate() {
        if !diarizer_taken[di] {
            drafts.push(UnitDraft {
                start: d_start,
                end: d_end,
                anchor: None,
                expert: None,
                diarizer: Some(d_side),
            });
        }
    }

    let recording_id = [
        &transcriber.recording_id,
        &expert.recording_id,
        &diarizer.recording_id,
    ]
    .into_iter()
    .find(|id| !id.is_empty())
    .cloned()
    .unwrap_or_default();
    Ok(finalize(
        recording_id,
        transcriber
            .duration
            .max(expert.duration)
            .max(diarizer.duration),
        transcriber.wearer_role,
        vec![Source::Transcriber, Source::Expert, Source::Diarizer],
        drafts,
    ))
}

#[derive(Serialize, Deserialize)]
struct TimelineMeta {
    recording_id: String,
    #[serde(rename = "duration_s")]
    duration: Tenths,
    anchor_wearer: Role,
    provenance: Vec<Source>,
}

#[derive(Serialize, Deserialize)]
struct MetaLine {
    meta: TimelineMeta,
}

/// Serialize a timeline as JSON lines: a `{"meta": ...}` header line, then
/// one [`AlignedUnit`] object per line.
pub fn write_jsonl(timeline: &AlignedTimeline) -> String {
    let meta = MetaLine {
        meta: TimelineMeta {
            recording_id: timeline.recording_id.clone(),
            duration: timeline.duration,
            anchor_wearer: timeline.anchor_wearer,
            provenance: timeline.provenance.clone(),
        },
    };
    let mut out = serde_json::to_string(&meta).expect("meta serializes");
    out.push('\n');
    for unit in &timeline.units {
        out.push_str(&serde_json::to_string(unit).expect("unit serializes"));
        out.push('\n');
    }
    out
}

pub fn read_jsonl(text: &str) -> Result<AlignedTimeline> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines.next().ok_or_else(|| Error::Empty {
        what: "timeline file".into(),
    })?;
    let meta: MetaLine = serde_json::from_str(first).map_err(|e| Error::Json {
        offset: 0,
        message: format!("timeline meta line: {e}"),
    })?;
    let mut units = Vec::new();
    for (i, line) in lines.enumerate() {
        let unit: AlignedUnit = serde_json::from_str(line).map_err(|e| Error::Json {
            offset: 0,
            message: format!("timeline unit line {}: {e}", i + 2),
        })?;
        units.push(unit);
    }
    Ok(AlignedTimeline {
        recording_id: meta.meta.recording_id,
        duration: meta.meta.duration,
        anchor_wearer: meta.meta.anchor_wearer,
        provenance: meta.meta.provenance,
        units,
    })
}
