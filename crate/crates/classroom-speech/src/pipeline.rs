//! The end-to-end batch pipeline: discover recordings in a directory,
//! dedup the transcriber streams, align three ways, and emit every report.
//! Recordings are processed concurrently; report assembly is an ordered
//! reduction, so outputs are byte-identical run to run.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::align::{self, AlignedTimeline};
use crate::audio::dedup_repeats;
use crate::cli::feature_options;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::features::MethodClassifier;
use crate::ingest;
use crate::reliability::ReliabilityOptions;
use crate::report;

/// Input file set for one recording under the pipeline's directory layout:
/// `<id>.transcriber.json`, `<id>.expert.tsv`, `<id>.diarizer.csv`.
#[derive(Clone, Debug)]
struct RecordingFiles {
    id: String,
    transcriber: PathBuf,
    expert: PathBuf,
    diarizer: PathBuf,
}

fn discover(input_dir: &Path) -> Result<(Vec<RecordingFiles>, Vec<String>)> {
    let mut ids = Vec::new();
    for entry in std::fs::read_dir(input_dir)? {
        let path = entry?.path();
        let name = match path.file_name().and_then(|n| n.to_str()) {
            Some(n) => n,
            None => continue,
        };
        if let Some(id) = name.strip_suffix(".transcriber.json") {
            ids.push(id.to_string());
        }
    }
    ids.sort();

    let mut recordings = Vec::new();
    let mut warnings = Vec::new();
    for id in ids {
        let files = RecordingFiles {
            transcriber: input_dir.join(format!("{id}.transcriber.json")),
            expert: input_dir.join(format!("{id}.expert.tsv")),
            diarizer: input_dir.join(format!("{id}.diarizer.csv")),
            id,
        };
        if !files.expert.exists() || !files.diarizer.exists() {
            warnings.push(format!(
                "{}: missing expert or diarizer file, recording skipped",
                files.id
            ));
            continue;
        }
        recordings.push(files);
    }
    Ok((recordings, warnings))
}

struct RecordingArtifacts {
    id: String,
    timeline: AlignedTimeline,
    notes: Vec<String>,
    dedup_removed: usize,
}

fn process_recording(files: &RecordingFiles, config: &RunConfig) -> Result<RecordingArtifacts> {
    let mut notes = Vec::new();
    let mut note = |path: &Path, parsed: &ingest::ParsedStream| {
        for w in &parsed.warnings {
            notes.push(format!("{}: {}", path.display(), w));
        }
    };

    let transcriber = ingest::load_stream_file(&files.transcriber, &config.role_map)?;
    note(&files.transcriber, &transcriber);
    let expert = ingest::load_stream_file(&files.expert, &config.role_map)?;
    note(&files.expert, &expert);
    let diarizer = ingest::load_stream_file(&files.diarizer, &config.role_map)?;
    note(&files.diarizer, &diarizer);

    let (deduped, dedup_removed) = dedup_repeats(&transcriber.stream);
    let timeline = align::align_three_way(&expert.stream, &deduped, &diarizer.stream)?;

    Ok(RecordingArtifacts {
        id: files.id.clone(),
        timeline,
        notes,
        dedup_removed,
    })
}

/// Run a function over items on up to `jobs` worker threads, preserving
/// input order in the results.
fn map_jobs<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let chunk_size = items.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk_size)
            .map(|chunk| scope.spawn(|| chunk.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("pipeline worker panicked"))
            .collect()
    })
}

#[derive(Serialize)]
struct PipelineSummary {
    recordings: Vec<RecordingSummary>,
    reports: Vec<String>,
    warnings: Vec<String>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct RecordingSummary {
    id: String,
    units: usize,
    blank_anchor_units: usize,
    merged_units: usize,
    dedup_removed: usize,
}

pub struct PipelineOutcome {
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

/// Chain dedup, three-way alignment, and all four reports over a directory
/// of recordings.
pub fn run(
    input_dir: &Path,
    out_dir: &Path,
    jobs: usize,
    config: &RunConfig,
) -> Result<PipelineOutcome> {
    let (recordings, mut notes) = discover(input_dir)?;
    let mut warnings: Vec<String> = Vec::new();
    if recordings.is_empty() {
        return Err(Error::Empty {
            what: format!("recording set under {}", input_dir.display()),
        });
    }

    let timeline_dir = out_dir.join("timelines");
    std::fs::create_dir_all(&timeline_dir)?;

    let results = map_jobs(&recordings, jobs, |files| process_recording(files, config));
    let mut artifacts = Vec::with_capacity(results.len());
    for result in results {
        artifacts.push(result?);
    }

    let mut outputs = Vec::new();
    let mut recording_summaries = Vec::new();
    for art in &artifacts {
        notes.extend(art.notes.iter().cloned());
        let path = timeline_dir.join(format!("{}.timeline.jsonl", art.id));
        std::fs::write(&path, align::write_jsonl(&art.timeline))?;
        outputs.push(path);
        recording_summaries.push(RecordingSummary {
            id: art.id.clone(),
            units: art.timeline.units.len(),
            blank_anchor_units: art.timeline.blank_anchor_count(),
            merged_units: art.timeline.merged_count(),
            dedup_removed: art.dedup_removed,
        });
    }

    let labeled: Vec<(String, &AlignedTimeline)> = artifacts
        .iter()
        .map(|a| (a.id.clone(), &a.timeline))
        .collect();
    let mut report_names = Vec::new();

    let reliability = report::render_reliability(
        &labeled,
        &ReliabilityOptions {
            missing_as_error: config.missing_as_error,
        },
    )?;
    warnings.extend(reliability.warnings.iter().cloned());
    notes.extend(reliability.notes.iter().cloned());
    std::fs::write(out_dir.join("reliability.csv"), &reliability.csv)?;
    std::fs::write(out_dir.join("reliability.md"), &reliability.markdown)?;
    outputs.push(out_dir.join("reliability.csv"));
    outputs.push(out_dir.join("reliability.md"));
    report_names.push("reliability".into());

    match report::render_wer(&labeled, config.include_hyp_only) {
        Ok(wer) => {
            warnings.extend(wer.warnings.iter().cloned());
            notes.extend(wer.notes.iter().cloned());
            std::fs::write(out_dir.join("wer_utterances.csv"), &wer.utterances_csv)?;
            std::fs::write(out_dir.join("wer_summary.json"), &wer.summary_json)?;
            outputs.push(out_dir.join("wer_utterances.csv"));
            outputs.push(out_dir.join("wer_summary.json"));
            report_names.push("wer".into());
        }
        Err(Error::EmptySelection { filter }) => {
            warnings.push(format!(
                "wer report skipped: no pairs for filter {filter:?}"
            ));
        }
        Err(e) => return Err(e),
    }

    let options = feature_options(config);
    let features = report::render_features(&labeled, MethodClassifier::ExpertRoles, &options)?;
    warnings.extend(features.warnings.iter().cloned());
    notes.extend(features.notes.iter().cloned());
    std::fs::write(out_dir.join("features.csv"), &features.csv)?;
    std::fs::write(out_dir.join("features.md"), &features.markdown)?;
    outputs.push(out_dir.join("features.csv"));
    outputs.push(out_dir.join("features.md"));
    report_names.push("features".into());

    match report::render_icc(&labeled, MethodClassifier::ExpertRoles, &options) {
        Ok(icc) => {
            warnings.extend(icc.warnings.iter().cloned());
            notes.extend(icc.notes.iter().cloned());
            std::fs::write(out_dir.join("icc.csv"), &icc.csv)?;
            std::fs::write(out_dir.join("icc.md"), &icc.markdown)?;
            outputs.push(out_dir.join("icc.csv"));
            outputs.push(out_dir.join("icc.md"));
            report_names.push("icc".into());
        }
        Err(e @ (Error::TooFew { .. } | Error::IncompleteMatrix { .. })) => {
            warnings.push(format!("icc report skipped: {e}"));
        }
        Err(e) => return Err(e),
    }

    let correlations =
        report::render_correlations(&labeled, MethodClassifier::ExpertRoles, &options)?;
    warnings.extend(correlations.warnings);
    notes.extend(correlations.notes);
    std::fs::write(out_dir.join("correlations.json"), &correlations.json)?;
    outputs.push(out_dir.join("correlations.json"));
    report_names.push("correlations".into());

    let summary = PipelineSummary {
        recordings: recording_summaries,
        reports: report_names,
        warnings: warnings.clone(),
        notes: notes.clone(),
    };
    let summary_path = out_dir.join("pipeline_summary.json");
    std::fs::write(
        &summary_path,
        serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    outputs.push(summary_path);

    Ok(PipelineOutcome {
        outputs,
        warnings,
        notes,
    })
}
