//! Deterministic CSV and markdown table rendering shared by the report
//! commands. Same inputs always produce byte-identical output.

use serde::Serialize;

use crate::align::AlignedTimeline;
use crate::error::{Error, Result};
use crate::features::{
    extract_method_utterances, feature_table, FeatureInput, FeatureOptions, FeatureSummary,
    MethodClassifier, RoleFeatures,
};
use crate::reliability::{reliability_report, ReliabilityOptions};
use crate::stats::{icc_table, PerFileFeatures, ICC_FEATURES};
use crate::wer::{corpus_wer, select_pairs, utterance_wer, CorpusWer, WerFilter};

/// Four-decimal fixed formatting; negative zero normalizes to zero.
pub fn fmt4(value: f64) -> String {
    let s = format!("{value:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// Absent values render as the empty string.
pub fn fmt_opt4(value: Option<f64>) -> String {
    value.map(fmt4).unwrap_or_default()
}

pub fn fmt1(value: f64) -> String {
    let s = format!("{value:.1}");
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

fn csv_field(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(
        &header
            .iter()
            .map(|h| csv_field(h))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for row in rows {
        out.push_str(
            &row.iter()
                .map(|f| csv_field(f))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
    }
    out
}

pub fn markdown_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("| {} |\n", header.join(" | ")));
    out.push_str(&format!(
        "|{}\n",
        header.iter().map(|_| " --- |").collect::<String>()
    ));
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

/// A fully rendered tabular report. `warnings` are metric-level
/// degeneracies that should surface in the exit code; `notes` are routine
/// observations (exclusion counts, skipped units) that should not.
#[derive(Clone, Debug)]
pub struct Rendered {
    pub csv: String,
    pub markdown: String,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

pub const RELIABILITY_COLUMNS: [&str; 7] = [
    "file",
    "duration_min",
    "accuracy",
    "weighted_f1",
    "tpv",
    "cpv",
    "kappa",
];

/// Reliability table with exactly the columns above: one row per file,
/// pooled Overall row last. Exclusion counts surface as notes so detection
/// misses stay visible without flagging the run.
pub fn render_reliability(
    files: &[(String, &AlignedTimeline)],
    opts: &ReliabilityOptions,
) -> Result<Rendered> {
    let report = reliability_report(files, opts)?;
    let warnings = report.warnings.clone();
    let mut notes = Vec::new();
    let mut rows = Vec::new();
    for row in report.rows.iter().chain(std::iter::once(&report.overall)) {
        if row.excluded_one_sided + row.excluded_role_other + row.excluded_unclassified > 0 {
            notes.push(format!(
                "{}: excluded units: one-sided={}, role-other={}, unclassified={}",
                row.file,
                row.excluded_one_sided,
                row.excluded_role_other,
                row.excluded_unclassified
            ));
        }
        rows.push(vec![
            row.file.clone(),
            fmt1(row.duration_min),
            fmt_opt4(row.accuracy),
            fmt_opt4(row.weighted_f1),
            fmt_opt4(row.tpv),
            fmt_opt4(row.cpv),
            fmt_opt4(row.kappa),
        ]);
    }
    Ok(Rendered {
        csv: csv_table(&RELIABILITY_COLUMNS, &rows),
        markdown: markdown_table(&RELIABILITY_COLUMNS, &rows),
        warnings,
        notes,
    })
}

#[derive(Serialize)]
struct WerSummary {
    teacher: Option<CorpusWer>,
    child: Option<CorpusWer>,
    all: CorpusWer,
    skipped_empty_pairs: usize,
    include_hyp_only: bool,
}

/// Rendered word-error-rate report: a per-utterance CSV plus a summary JSON.
#[derive(Clone, Debug)]
pub struct WerRendered {
    pub utterances_csv: String,
    pub summary_json: String,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

pub fn render_wer(
    files: &[(String, &AlignedTimeline)],
    include_hyp_only: bool,
) -> Result<WerRendered> {
    let mut sorted: Vec<&(String, &AlignedTimeline)> = files.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));

    let mut warnings = Vec::new();
    let mut notes = Vec::new();
    let mut rows = Vec::new();
    let mut skipped = 0usize;
    let mut all_outcomes = Vec::new();
    let mut teacher_outcomes = Vec::new();
    let mut child_outcomes = Vec::new();

    for (label, timeline) in &sorted {
        let (pairs, skipped_here) = select_pairs(timeline, &WerFilter::all(include_hyp_only));
        skipped += skipped_here;
        if skipped_here > 0 {
            notes.push(format!(
                "{label}: skipped {skipped_here} unit(s) with no words on either side"
            ));
        }
        for pair in &pairs {
            if let Some(outcome) = utterance_wer(&pair.hyp, &pair.reference) {
                rows.push(vec![
                    label.clone(),
                    pair.unit_id.to_string(),
                    outcome.ld.to_string(),
                    outcome.ref_len.to_string(),
                    outcome.hyp_len.to_string(),
                    fmt4(outcome.wer),
                ]);
                all_outcomes.push(outcome);
            }
        }
        for (filter, bucket) in [
            (WerFilter::teacher(include_hyp_only), &mut teacher_outcomes),
            (WerFilter::child(include_hyp_only), &mut child_outcomes),
        ] {
            let (pairs, _) = select_pairs(timeline, &filter);
            bucket.extend(
                pairs
                    .iter()
                    .filter_map(|p| utterance_wer(&p.hyp, &p.reference)),
            );
        }
    }

    let all = corpus_wer(&all_outcomes, "all")?;
    let teacher = match corpus_wer(&teacher_outcomes, "teacher") {
        Ok(c) => Some(c),
        Err(Error::EmptySelection { .. }) => {
            warnings.push("teacher filter matched no pairs (no teacher-worn recorders?)".into());
            None
        }
        Err(e) => return Err(e),
    };
    let child = match corpus_wer(&child_outcomes, "child") {
        Ok(c) => Some(c),
        Err(Error::EmptySelection { .. }) => {
            warnings.push("child filter matched no pairs (no child-worn recorders?)".into());
            None
        }
        Err(e) => return Err(e),
    };

    let summary = WerSummary {
        teacher,
        child,
        all,
        skipped_empty_pairs: skipped,
        include_hyp_only,
    };
    Ok(WerRendered {
        utterances_csv: csv_table(
            &["file", "unit_id", "ld", "ref_len", "hyp_len", "wer"],
            &rows,
        ),
        summary_json: serde_json::to_string_pretty(&summary).expect("summary serializes"),
        warnings,
        notes,
    })
}

/// Build per-method feature inputs from timelines (durations come from the
/// timeline metadata).
fn method_inputs(
    files: &[(String, &AlignedTimeline)],
    classifier: MethodClassifier,
) -> Result<(Vec<FeatureInput>, Vec<FeatureInput>, Vec<String>)> {
    let mut expert_inputs = Vec::new();
    let mut transcriber_inputs = Vec::new();
    let mut notes = Vec::new();
    for (label, timeline) in files {
        let extracted = extract_method_utterances(timeline, classifier)?;
        if extracted.unclassified > 0 {
            notes.push(format!(
                "{label}: {} transcriber unit(s) had no classification and were skipped",
                extracted.unclassified
            ));
        }
        expert_inputs.push(FeatureInput {
            utterances: extracted.expert_method,
            duration: timeline.duration,
        });
        transcriber_inputs.push(FeatureInput {
            utterances: extracted.transcriber_method,
            duration: timeline.duration,
        });
    }
    Ok((expert_inputs, transcriber_inputs, notes))
}

pub const FEATURE_COLUMNS: [&str; 13] = [
    "method",
    "role",
    "mlu",
    "words_per_minute",
    "total_utterances",
    "questions",
    "non_questions",
    "responses_received_to_questions",
    "responses_received_to_non_questions",
    "prop_questions_responded",
    "prop_non_questions_responded",
    "mean_response_latency_s",
    "prop_question_responses_zero_alignment",
];

fn feature_row(method: &str, role: &str, f: &RoleFeatures) -> Vec<String> {
    vec![
        method.to_string(),
        role.to_string(),
        fmt_opt4(f.mlu),
        fmt_opt4(f.words_per_minute),
        f.total_utterances.to_string(),
        f.questions.to_string(),
        f.non_questions.to_string(),
        f.responses_received_to_questions.to_string(),
        f.responses_received_to_non_questions.to_string(),
        fmt_opt4(f.prop_questions_responded),
        fmt_opt4(f.prop_non_questions_responded),
        fmt_opt4(f.mean_response_latency_s),
        fmt_opt4(f.prop_question_responses_zero_alignment),
    ]
}

/// Pooled feature table, one row per (method, role).
pub fn render_features(
    files: &[(String, &AlignedTimeline)],
    classifier: MethodClassifier,
    options: &FeatureOptions,
) -> Result<Rendered> {
    if files.is_empty() {
        return Err(Error::Empty {
            what: "feature input set".into(),
        });
    }
    let (expert_inputs, transcriber_inputs, notes) = method_inputs(files, classifier)?;
    let expert = feature_table(&expert_inputs, options);
    let transcriber = feature_table(&transcriber_inputs, options);

    let rows = vec![
        feature_row("transcriber", "child", &transcriber.child),
        feature_row("expert", "child", &expert.child),
        feature_row("transcriber", "teacher", &transcriber.teacher),
        feature_row("expert", "teacher", &expert.teacher),
    ];
    Ok(Rendered {
        csv: csv_table(&FEATURE_COLUMNS, &rows),
        markdown: markdown_table(&FEATURE_COLUMNS, &rows),
        warnings: Vec::new(),
        notes,
    })
}

/// Per-file feature summaries for both methods, the ICC table input.
pub fn per_file_features(
    files: &[(String, &AlignedTimeline)],
    classifier: MethodClassifier,
    options: &FeatureOptions,
) -> Result<(Vec<PerFileFeatures>, Vec<String>)> {
    let mut sorted: Vec<&(String, &AlignedTimeline)> = files.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = Vec::new();
    let mut notes = Vec::new();
    for (label, timeline) in sorted {
        let extracted = extract_method_utterances(timeline, classifier)?;
        if extracted.unclassified > 0 {
            notes.push(format!(
                "{label}: {} transcriber unit(s) had no classification and were skipped",
                extracted.unclassified
            ));
        }
        let expert: FeatureSummary = feature_table(
            &[FeatureInput {
                utterances: extracted.expert_method,
                duration: timeline.duration,
            }],
            options,
        );
        let transcriber = feature_table(
            &[FeatureInput {
                utterances: extracted.transcriber_method,
                duration: timeline.duration,
            }],
            options,
        );
        out.push(PerFileFeatures {
            file: label.clone(),
            duration: timeline.duration,
            expert,
            transcriber,
        });
    }
    Ok((out, notes))
}

#[derive(Serialize)]
struct KappaJson {
    value: Option<f64>,
    degenerate: bool,
    pairs: usize,
}

#[derive(Serialize)]
struct RoleCorrelations {
    pearson: std::collections::BTreeMap<&'static str, Option<f64>>,
    question_kappa: Option<KappaJson>,
}

#[derive(Serialize)]
struct CorrelationReport {
    child: RoleCorrelations,
    teacher: RoleCorrelations,
}

#[derive(Clone, Debug)]
pub struct CorrelationsRendered {
    pub json: String,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

/// Cross-method correlation report: Pearson r of each per-file feature
/// between the two methods, plus chance-corrected agreement on question
/// flags over the units both methods produced. Emitted as JSON.
pub fn render_correlations(
    files: &[(String, &AlignedTimeline)],
    classifier: MethodClassifier,
    options: &FeatureOptions,
) -> Result<CorrelationsRendered> {
    use crate::features::classify_question;
    use crate::model::Role;
    use crate::stats::{binary_kappa, pearson_r, per_file_feature_value};

    let (per_file, notes) = per_file_features(files, classifier, options)?;
    let mut warnings = Vec::new();

    let mut report_rows = Vec::new();
    for role in [Role::Child, Role::Teacher] {
        let mut pearson = std::collections::BTreeMap::new();
        for feature in ICC_FEATURES {
            let mut expert_values = Vec::new();
            let mut transcriber_values = Vec::new();
            for f in &per_file {
                let e = per_file_feature_value(&f.expert, role, feature, f.duration);
                let t = per_file_feature_value(&f.transcriber, role, feature, f.duration);
                if let (Some(e), Some(t)) = (e, t) {
                    expert_values.push(e);
                    transcriber_values.push(t);
                }
            }
            let r = match pearson_r(&transcriber_values, &expert_values) {
                Ok(r) => Some(r),
                Err(e) => {
                    warnings.push(format!("pearson {role}/{feature}: {e}"));
                    None
                }
            };
            pearson.insert(feature, r);
        }

        // question flags on units where both methods produced an utterance,
        // grouped by the expert's role
        let mut pairs = Vec::new();
        for (_, timeline) in files {
            for unit in &timeline.units {
                if let (Some(anchor), Some(expert)) = (&unit.anchor, &unit.expert) {
                    if expert.role == role {
                        pairs.push((anchor.is_question, classify_question(&expert.text)));
                    }
                }
            }
        }
        let question_kappa = if pairs.is_empty() {
            warnings.push(format!("question kappa {role}: no paired units"));
            None
        } else {
            match binary_kappa(&pairs) {
                Ok(k) => {
                    if k.degenerate {
                        warnings.push(format!("question kappa {role}: degenerate marginals"));
                    }
                    Some(KappaJson {
                        value: k.value,
                        degenerate: k.degenerate,
                        pairs: pairs.len(),
                    })
                }
                Err(e) => {
                    warnings.push(format!("question kappa {role}: {e}"));
                    None
                }
            }
        };

        report_rows.push(RoleCorrelations {
            pearson,
            question_kappa,
        });
    }

    let mut rows = report_rows.into_iter();
    let report = CorrelationReport {
        child: rows.next().expect("child row"),
        teacher: rows.next().expect("teacher row"),
    };
    Ok(CorrelationsRendered {
        json: serde_json::to_string_pretty(&report).expect("report serializes"),
        warnings,
        notes,
    })
}

/// Intraclass-correlation table: child and teacher rows over the five
/// per-file features.
pub fn render_icc(
    files: &[(String, &AlignedTimeline)],
    classifier: MethodClassifier,
    options: &FeatureOptions,
) -> Result<Rendered> {
    let (per_file, notes) = per_file_features(files, classifier, options)?;
    let report = icc_table(&per_file)?;
    let warnings = report.warnings.clone();

    let mut header = vec!["role"];
    header.extend(ICC_FEATURES);
    let mut rows = Vec::new();
    for (role, row) in [("child", &report.child), ("teacher", &report.teacher)] {
        let mut cells = vec![role.to_string()];
        for feature in ICC_FEATURES {
            cells.push(fmt4(row.cell(feature).value));
        }
        rows.push(cells);
    }
    Ok(Rendered {
        csv: csv_table(&header, &rows),
        markdown: markdown_table(&header, &rows),
        warnings,
        notes,
    })
}
