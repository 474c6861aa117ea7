//! Implementations behind the binary's subcommands. Each function does the
//! file I/O and delegates the actual work to the library modules, returning
//! collected warnings so the binary can map them to exit codes.

use std::path::{Path, PathBuf};

use crate::align::{self, AlignedTimeline};
use crate::audio::dedup_repeats;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::features::{FeatureOptions, MethodClassifier};
use crate::ingest::{self, ParsedStream};
use crate::model::{Role, Source};
use crate::reliability::ReliabilityOptions;
use crate::report;
use crate::wav;

/// What a subcommand wants the binary to surface: `warnings` drive exit
/// code 1 (metric-level degeneracies, absent metrics), `notes` are routine
/// observations printed to stderr without affecting the exit code.
#[derive(Debug, Default)]
pub struct CmdOutcome {
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl CmdOutcome {
    fn note_parse(&mut self, path: &Path, parsed: &ParsedStream) {
        for w in &parsed.warnings {
            self.notes.push(format!("{}: {}", path.display(), w));
        }
    }
}

pub fn feature_options(config: &RunConfig) -> FeatureOptions {
    FeatureOptions {
        response_window: config.response_window,
        stopword_mode: config.stopword_mode,
        zero_alignment_scope: config.zero_alignment_scope,
    }
}

/// `chunk`: split a wav file into epoch files plus a JSON manifest.
pub fn chunk(input: &Path, out_dir: &Path, config: &RunConfig) -> Result<CmdOutcome> {
    let manifest = wav::chunk_wav_file(input, out_dir, config.epoch_len_s)?;
    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("audio");
    let manifest_path = out_dir.join(format!("{stem}_chunks.json"));
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    println!(
        "wrote {} epoch file(s) and {}",
        manifest.epochs.len(),
        manifest_path.display()
    );
    Ok(CmdOutcome::default())
}

/// `resample`: streaming mono 16 kHz conversion.
pub fn resample(input: &Path, output: &Path) -> Result<CmdOutcome> {
    let path = wav::resample_wav_file(input, output)?;
    println!("wrote {}", path.display());
    Ok(CmdOutcome::default())
}

/// `dedup`: collapse hallucinated transcription loops; reads a transcriber
/// or canonical stream file, writes the canonical stream JSON.
pub fn dedup(input: &Path, output: &Path, config: &RunConfig) -> Result<CmdOutcome> {
    let mut outcome = CmdOutcome::default();
    let parsed = ingest::load_stream_file(input, &config.role_map)?;
    outcome.note_parse(input, &parsed);
    let (stream, removed) = dedup_repeats(&parsed.stream);
    std::fs::write(output, ingest::canonical_json(&stream))?;
    println!(
        "removed {removed} repeated utterance(s); kept {}; wrote {}",
        stream.utterances.len(),
        output.display()
    );
    Ok(outcome)
}

fn load_expected(
    path: &Path,
    expected: Source,
    config: &RunConfig,
    outcome: &mut CmdOutcome,
) -> Result<ParsedStream> {
    let parsed = ingest::load_stream_file(path, &config.role_map)?;
    if parsed.stream.source != expected {
        return Err(Error::Invalid(format!(
            "{}: expected a {expected} stream, found {}",
            path.display(),
            parsed.stream.source
        )));
    }
    outcome.note_parse(path, &parsed);
    Ok(parsed)
}

pub struct AlignArgs<'a> {
    pub transcriber: &'a Path,
    pub expert: Option<&'a Path>,
    pub diarizer: Option<&'a Path>,
    pub output: &'a Path,
    pub mode: Option<&'a str>,
    pub wearer: Option<Role>,
    pub emit_canonical: bool,
}

/// `align`: synchronize expert and/or diarizer streams onto the transcriber.
pub fn align_cmd(args: &AlignArgs, config: &RunConfig) -> Result<CmdOutcome> {
    let mut outcome = CmdOutcome::default();
    let mut transcriber =
        load_expected(args.transcriber, Source::Transcriber, config, &mut outcome)?;
    if let Some(wearer) = args.wearer {
        transcriber.stream.wearer_role = wearer;
    }
    let expert = args
        .expert
        .map(|p| load_expected(p, Source::Expert, config, &mut outcome))
        .transpose()?;
    let diarizer = args
        .diarizer
        .map(|p| load_expected(p, Source::Diarizer, config, &mut outcome))
        .transpose()?;

    let three_way = expert.is_some() && diarizer.is_some();
    match (args.mode, three_way) {
        (Some("pair"), true) => {
            return Err(Error::Invalid(
                "mode pair given but both expert and diarizer streams provided".into(),
            ))
        }
        (Some("three"), false) => {
            return Err(Error::Invalid(
                "mode three needs both --expert and --diarizer".into(),
            ))
        }
        (Some(other), _) if other != "pair" && other != "three" => {
            return Err(Error::Invalid(format!(
                "unknown mode {other:?}; expected pair or three"
            )))
        }
        _ => {}
    }

    // recording ids: all embedded ids must agree; file stems fill the gaps
    let timeline = match (&expert, &diarizer) {
        (Some(e), Some(d)) => align::align_three_way(&e.stream, &transcriber.stream, &d.stream)?,
        (Some(e), None) => align::align_pair(&transcriber.stream, &e.stream)?,
        (None, Some(d)) => align::align_pair(&transcriber.stream, &d.stream)?,
        (None, None) => {
            return Err(Error::Invalid(
                "align needs at least one of --expert / --diarizer".into(),
            ))
        }
    };

    if args.emit_canonical {
        let stem = args.output.with_extension("");
        let emit = |stream: &crate::model::AnnotationStream| -> Result<()> {
            let path = PathBuf::from(format!("{}.{}.stream.json", stem.display(), stream.source));
            std::fs::write(&path, ingest::canonical_json(stream))?;
            println!("wrote {}", path.display());
            Ok(())
        };
        emit(&transcriber.stream)?;
        if let Some(e) = &expert {
            emit(&e.stream)?;
        }
        if let Some(d) = &diarizer {
            emit(&d.stream)?;
        }
    }

    std::fs::write(args.output, align::write_jsonl(&timeline))?;
    println!(
        "wrote {}: units={} blank_anchor={} merged={}",
        args.output.display(),
        timeline.units.len(),
        timeline.blank_anchor_count(),
        timeline.merged_count()
    );
    Ok(outcome)
}

/// Load timeline files, labeling each by its recording id (file stem as a
/// fallback).
pub fn load_timelines(paths: &[PathBuf]) -> Result<Vec<(String, AlignedTimeline)>> {
    if paths.is_empty() {
        return Err(Error::Empty {
            what: "timeline input set".into(),
        });
    }
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(path)?;
        let timeline = align::read_jsonl(&text)?;
        let label = if timeline.recording_id.is_empty() {
            path.file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("timeline")
                .to_string()
        } else {
            timeline.recording_id.clone()
        };
        out.push((label, timeline));
    }
    Ok(out)
}

fn borrow_timelines(owned: &[(String, AlignedTimeline)]) -> Vec<(String, &AlignedTimeline)> {
    owned
        .iter()
        .map(|(label, tl)| (label.clone(), tl))
        .collect()
}

fn write_pair(prefix: &Path, rendered: &report::Rendered) -> Result<(PathBuf, PathBuf)> {
    let csv = prefix.with_extension("csv");
    let md = prefix.with_extension("md");
    std::fs::write(&csv, &rendered.csv)?;
    std::fs::write(&md, &rendered.markdown)?;
    Ok((csv, md))
}

/// `reliability`: per-file and pooled speaker-classification report.
pub fn reliability_cmd(
    timelines: &[PathBuf],
    out_prefix: &Path,
    config: &RunConfig,
) -> Result<CmdOutcome> {
    let owned = load_timelines(timelines)?;
    let rendered = report::render_reliability(
        &borrow_timelines(&owned),
        &ReliabilityOptions {
            missing_as_error: config.missing_as_error,
        },
    )?;
    let (csv, md) = write_pair(out_prefix, &rendered)?;
    println!("wrote {} and {}", csv.display(), md.display());
    Ok(CmdOutcome {
        warnings: rendered.warnings,
        notes: rendered.notes,
    })
}

/// `wer`: per-utterance word error rates plus a corpus summary.
pub fn wer_cmd(timelines: &[PathBuf], out_prefix: &Path, config: &RunConfig) -> Result<CmdOutcome> {
    let owned = load_timelines(timelines)?;
    let rendered = report::render_wer(&borrow_timelines(&owned), config.include_hyp_only)?;
    let csv_path = PathBuf::from(format!("{}_utterances.csv", out_prefix.display()));
    let json_path = PathBuf::from(format!("{}_summary.json", out_prefix.display()));
    std::fs::write(&csv_path, &rendered.utterances_csv)?;
    std::fs::write(&json_path, &rendered.summary_json)?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(CmdOutcome {
        warnings: rendered.warnings,
        notes: rendered.notes,
    })
}

pub fn parse_classifier(name: &str) -> Result<MethodClassifier> {
    match name {
        "expert" => Ok(MethodClassifier::ExpertRoles),
        "diarizer" => Ok(MethodClassifier::DiarizerRoles),
        other => Err(Error::Invalid(format!(
            "unknown classifier {other:?}; expected expert or diarizer"
        ))),
    }
}

/// `features`: pooled speech-feature table per method and role.
pub fn features_cmd(
    timelines: &[PathBuf],
    out_prefix: &Path,
    classifier: MethodClassifier,
    config: &RunConfig,
) -> Result<CmdOutcome> {
    let owned = load_timelines(timelines)?;
    let rendered = report::render_features(
        &borrow_timelines(&owned),
        classifier,
        &feature_options(config),
    )?;
    let (csv, md) = write_pair(out_prefix, &rendered)?;
    println!("wrote {} and {}", csv.display(), md.display());
    Ok(CmdOutcome {
        warnings: rendered.warnings,
        notes: rendered.notes,
    })
}

/// `icc`: intraclass correlations of per-file features across methods,
/// plus the Pearson/kappa correlation report.
pub fn icc_cmd(
    timelines: &[PathBuf],
    out_prefix: &Path,
    classifier: MethodClassifier,
    config: &RunConfig,
) -> Result<CmdOutcome> {
    let owned = load_timelines(timelines)?;
    let labeled = borrow_timelines(&owned);
    let options = feature_options(config);
    let rendered = report::render_icc(&labeled, classifier, &options)?;
    let (csv, md) = write_pair(out_prefix, &rendered)?;
    let mut warnings = rendered.warnings;
    let mut notes = rendered.notes;

    let correlations = report::render_correlations(&labeled, classifier, &options)?;
    warnings.extend(correlations.warnings);
    notes.extend(correlations.notes);
    let corr_path = PathBuf::from(format!("{}_correlations.json", out_prefix.display()));
    std::fs::write(&corr_path, &correlations.json)?;

    println!(
        "wrote {}, {} and {}",
        csv.display(),
        md.display(),
        corr_path.display()
    );
    Ok(CmdOutcome { warnings, notes })
}
