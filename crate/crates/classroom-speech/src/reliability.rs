//! Speaker-classification reliability between the diarizer (predictions)
//! and the expert (reference) on an aligned timeline: accuracy, Cohen's
//! kappa, predictive values, and weighted F1, per file and pooled.

use serde::Serialize;

use crate::align::AlignedTimeline;
use crate::error::{Error, Result};
use crate::model::{Role, Source};

fn role_index(role: Role) -> Option<usize> {
    match role {
        Role::Teacher => Some(0),
        Role::Child => Some(1),
        Role::Other => None,
    }
}

/// 2x2 teacher/child counts, predicted role by expert role.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[u64; 2]; 2],
}

impl ConfusionMatrix {
    pub fn new() -> ConfusionMatrix {
        ConfusionMatrix::default()
    }

    pub fn from_counts(counts: [[u64; 2]; 2]) -> ConfusionMatrix {
        ConfusionMatrix { counts }
    }

    /// Record one classified unit; roles outside {Teacher, Child} are the
    /// caller's problem and return false.
    pub fn add(&mut self, predicted: Role, expert: Role) -> bool {
        match (role_index(predicted), role_index(expert)) {
            (Some(p), Some(e)) => {
                self.counts[p][e] += 1;
                true
            }
            _ => false,
        }
    }

    pub fn get(&self, predicted: Role, expert: Role) -> u64 {
        match (role_index(predicted), role_index(expert)) {
            (Some(p), Some(e)) => self.counts[p][e],
            _ => 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Number of units the diarizer labeled with this role.
    pub fn predicted_total(&self, role: Role) -> u64 {
        role_index(role).map_or(0, |p| self.counts[p][0] + self.counts[p][1])
    }

    /// Number of units the expert labeled with this role.
    pub fn expert_total(&self, role: Role) -> u64 {
        role_index(role).map_or(0, |e| self.counts[0][e] + self.counts[1][e])
    }

    pub fn diagonal(&self) -> u64 {
        self.counts[0][0] + self.counts[1][1]
    }

    /// Elementwise sum, used to pool per-file matrices into an overall one.
    pub fn pooled(&self, other: &ConfusionMatrix) -> ConfusionMatrix {
        let mut counts = self.counts;
        for (row, other_row) in counts.iter_mut().zip(&other.counts) {
            for (cell, other_cell) in row.iter_mut().zip(other_row) {
                *cell += other_cell;
            }
        }
        ConfusionMatrix { counts }
    }
}

/// A metric value that may be undefined (absent) or defined only by a
/// degenerate-case convention worth flagging in reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub value: Option<f64>,
    pub degenerate: bool,
}

impl Metric {
    pub fn defined(value: f64) -> Metric {
        Metric {
            value: Some(value),
            degenerate: false,
        }
    }

    pub fn flagged(value: f64) -> Metric {
        Metric {
            value: Some(value),
            degenerate: true,
        }
    }

    pub fn absent() -> Metric {
        Metric {
            value: None,
            degenerate: false,
        }
    }

    pub fn absent_flagged() -> Metric {
        Metric {
            value: None,
            degenerate: true,
        }
    }
}

/// Proportion of agreement: diagonal over total.
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Empty {
            what: "confusion matrix".into(),
        });
    }
    Ok(cm.diagonal() as f64 / total as f64)
}

/// Cohen's kappa with expected agreement from the row/column marginals.
///
/// Degenerate marginals (either labeler constant) are flagged. Expected
/// agreement of exactly 1 can only happen with unanimous observed agreement
/// in a 2x2 table; that case is 1.0 by convention and flagged. A marginal
/// degeneracy that still leaves expected agreement below 1 keeps its
/// computed value, flagged.
pub fn cohens_kappa(cm: &ConfusionMatrix) -> Result<Metric> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Empty {
            what: "confusion matrix".into(),
        });
    }
    let predicted_t = cm.predicted_total(Role::Teacher);
    let expert_t = cm.expert_total(Role::Teacher);
    let constant_marginal =
        predicted_t == 0 || predicted_t == total || expert_t == 0 || expert_t == total;

    let marginal_mass: u128 = (0..2)
        .map(|i| cm.predicted_total(index_role(i)) as u128 * cm.expert_total(index_role(i)) as u128)
        .sum();
    let total_sq = total as u128 * total as u128;
    if marginal_mass == total_sq {
        // expected agreement is exactly 1
        return Ok(if cm.diagonal() == total {
            Metric::flagged(1.0)
        } else {
            Metric::absent_flagged()
        });
    }
    let p_o = cm.diagonal() as f64 / total as f64;
    let p_e = marginal_mass as f64 / total_sq as f64;
    let value = (p_o - p_e) / (1.0 - p_e);
    Ok(Metric {
        value: Some(value),
        degenerate: constant_marginal,
    })
}

fn index_role(i: usize) -> Role {
    if i == 0 {
        Role::Teacher
    } else {
        Role::Child
    }
}

/// Predictive value for a role: agreements over everything the diarizer
/// labeled with that role. Absent when the diarizer never predicted it.
pub fn predictive_value(cm: &ConfusionMatrix, role: Role) -> Metric {
    let predicted = cm.predicted_total(role);
    if predicted == 0 {
        return Metric::absent();
    }
    Metric::defined(cm.get(role, role) as f64 / predicted as f64)
}

/// Per-class F1 = 2TP / (2TP + FP + FN). A class absent from both sides
/// gets 0 by convention, flagged.
pub fn class_f1(cm: &ConfusionMatrix, role: Role) -> Metric {
    let tp = cm.get(role, role);
    let fp = cm.predicted_total(role) - tp;
    let fn_ = cm.expert_total(role) - tp;
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        return Metric::flagged(0.0);
    }
    Metric::defined(2.0 * tp as f64 / denom as f64)
}

/// Mean of the class F1 values weighted by expert-labeled class counts.
pub fn weighted_f1(cm: &ConfusionMatrix) -> Result<Metric> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Empty {
            what: "confusion matrix".into(),
        });
    }
    let mut weighted = 0.0;
    let mut degenerate = false;
    for role in [Role::Teacher, Role::Child] {
        let weight = cm.expert_total(role) as f64 / total as f64;
        let f1 = class_f1(cm, role);
        degenerate |= f1.degenerate && weight > 0.0;
        weighted += weight * f1.value.unwrap_or(0.0);
    }
    Ok(Metric {
        value: Some(weighted),
        degenerate,
    })
}

/// How units were used when building a confusion matrix from a timeline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOutcome {
    pub matrix: ConfusionMatrix,
    /// Exactly one of expert/diarizer present: one method missed the event.
    pub excluded_one_sided: usize,
    /// Both present but at least one role outside the binary task.
    pub excluded_role_other: usize,
    /// Neither side present (anchor-only units).
    pub excluded_unclassified: usize,
}

/// Count classified units from a timeline carrying both expert and
/// diarizer annotations. Units missing a side or with roles outside
/// {Teacher, Child} are excluded and counted.
pub fn build_confusion(timeline: &AlignedTimeline) -> Result<BuildOutcome> {
    for required in [Source::Expert, Source::Diarizer] {
        if !timeline.has_source(required) {
            return Err(Error::MissingStream {
                missing: required.to_string(),
            });
        }
    }
    let mut outcome = BuildOutcome::default();
    for unit in &timeline.units {
        match (&unit.diarizer, &unit.expert) {
            (Some(d), Some(e)) => {
                if !outcome.matrix.add(d.role, e.role) {
                    outcome.excluded_role_other += 1;
                }
            }
            (None, None) => outcome.excluded_unclassified += 1,
            _ => outcome.excluded_one_sided += 1,
        }
    }
    Ok(outcome)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ReliabilityOptions {
    /// Count one-sided units as classification errors in the accuracy
    /// denominator (they still cannot enter the 2x2 metrics).
    pub missing_as_error: bool,
}

/// One row of the reliability table.
#[derive(Clone, Debug, Serialize)]
pub struct ReliabilityRow {
    pub file: String,
    pub duration_min: f64,
    pub accuracy: Option<f64>,
    pub weighted_f1: Option<f64>,
    pub tpv: Option<f64>,
    pub cpv: Option<f64>,
    pub kappa: Option<f64>,
    pub excluded_one_sided: usize,
    pub excluded_role_other: usize,
    pub excluded_unclassified: usize,
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReliabilityReport {
    pub rows: Vec<ReliabilityRow>,
    pub overall: ReliabilityRow,
    pub warnings: Vec<String>,
}

fn metrics_row(
    file: String,
    duration_min: f64,
    outcome: &BuildOutcome,
    opts: &ReliabilityOptions,
    warnings: &mut Vec<String>,
) -> Result<ReliabilityRow> {
    let cm = &outcome.matrix;
    let mut degenerate = false;

    let accuracy = if cm.total() == 0 {
        warnings.push(format!("{file}: no classified units; metrics absent"));
        degenerate = true;
        None
    } else {
        let mut denominator = cm.total() as f64;
        if opts.missing_as_error {
            denominator += outcome.excluded_one_sided as f64;
        }
        Some(cm.diagonal() as f64 / denominator)
    };

    let mut take = |name: &str, m: Metric| {
        if m.degenerate {
            degenerate = true;
            warnings.push(format!("{file}: {name} degenerate"));
        }
        if m.value.is_none() && !m.degenerate {
            warnings.push(format!("{file}: {name} undefined, reported absent"));
        }
        m.value
    };

    let (weighted, kappa, tpv, cpv) = if cm.total() == 0 {
        (None, None, None, None)
    } else {
        (
            take("weighted_f1", weighted_f1(cm)?),
            take("kappa", cohens_kappa(cm)?),
            take("tpv", predictive_value(cm, Role::Teacher)),
            take("cpv", predictive_value(cm, Role::Child)),
        )
    };

    Ok(ReliabilityRow {
        file,
        duration_min,
        accuracy,
        weighted_f1: weighted,
        tpv,
        cpv,
        kappa,
        excluded_one_sided: outcome.excluded_one_sided,
        excluded_role_other: outcome.excluded_role_other,
        excluded_unclassified: outcome.excluded_unclassified,
        degenerate,
    })
}

/// Per-file metric rows plus an Overall row computed on the pooled
/// confusion matrix (not the mean of per-file metrics). Rows are sorted by
/// file name; Overall goes last.
pub fn reliability_report(
    files: &[(String, &AlignedTimeline)],
    opts: &ReliabilityOptions,
) -> Result<ReliabilityReport> {
    if files.is_empty() {
        return Err(Error::Empty {
            what: "reliability input set".into(),
        });
    }
    let mut warnings = Vec::new();
    let mut indexed: Vec<(String, &AlignedTimeline)> = files.to_vec();
    indexed.sort_by(|a, b| a.0.cmp(&b.0));

    let mut rows = Vec::new();
    let mut pooled = BuildOutcome::default();
    let mut total_minutes = 0.0;
    for (name, timeline) in &indexed {
        let outcome = build_confusion(timeline)?;
        pooled.matrix = pooled.matrix.pooled(&outcome.matrix);
        pooled.excluded_one_sided += outcome.excluded_one_sided;
        pooled.excluded_role_other += outcome.excluded_role_other;
        pooled.excluded_unclassified += outcome.excluded_unclassified;
        let minutes = timeline.duration.minutes();
        total_minutes += minutes;
        rows.push(metrics_row(
            name.clone(),
            minutes,
            &outcome,
            opts,
            &mut warnings,
        )?);
    }
    let overall = metrics_row(
        "Overall".into(),
        total_minutes,
        &pooled,
        opts,
        &mut warnings,
    )?;

    Ok(ReliabilityReport {
        rows,
        overall,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The worked 2x2 fixture used across the metric tests:
    /// predicted-teacher row (40, 10), predicted-child row (14, 36).
    fn fixture() -> ConfusionMatrix {
        ConfusionMatrix::from_counts([[40, 10], [14, 36]])
    }

    #[test]
    fn accuracy_examples() {
        assert!((accuracy(&fixture()).unwrap() - 0.76).abs() < 1e-12);
        let perfect = ConfusionMatrix::from_counts([[7, 0], [0, 5]]);
        assert_eq!(accuracy(&perfect).unwrap(), 1.0);
        let all_off = ConfusionMatrix::from_counts([[0, 4], [6, 0]]);
        assert_eq!(accuracy(&all_off).unwrap(), 0.0);
        assert!(accuracy(&ConfusionMatrix::new()).is_err());
    }

    #[test]
    fn kappa_examples() {
        // hand-derived: p_o = 0.76, p_e = (50*54 + 50*46)/100^2 = 0.50
        let k = cohens_kappa(&fixture()).unwrap();
        assert!((k.value.unwrap() - 0.52).abs() < 1e-12);
        assert!(!k.degenerate);

        let perfect = ConfusionMatrix::from_counts([[9, 0], [0, 3]]);
        assert_eq!(cohens_kappa(&perfect).unwrap().value, Some(1.0));

        // counts proportional to the product of marginals -> kappa 0
        let independent = ConfusionMatrix::from_counts([[30, 30], [20, 20]]);
        assert!(cohens_kappa(&independent).unwrap().value.unwrap().abs() < 1e-12);
    }

    #[test]
    fn kappa_degenerate_marginals() {
        // everything predicted teacher and labeled teacher: p_e = 1, p_o = 1
        let unanimous = ConfusionMatrix::from_counts([[12, 0], [0, 0]]);
        let k = cohens_kappa(&unanimous).unwrap();
        assert_eq!(k.value, Some(1.0));
        assert!(k.degenerate);

        // everything predicted teacher, everything labeled child: the
        // marginals are constant, the value itself is p_o = 0
        let off = ConfusionMatrix::from_counts([[0, 12], [0, 0]]);
        let k = cohens_kappa(&off).unwrap();
        assert_eq!(k.value, Some(0.0));
        assert!(k.degenerate);
    }

    #[test]
    fn kappa_is_one_iff_off_diagonal_empty() {
        let diag = ConfusionMatrix::from_counts([[3, 0], [0, 9]]);
        assert_eq!(cohens_kappa(&diag).unwrap().value, Some(1.0));
        let near = ConfusionMatrix::from_counts([[3, 1], [0, 9]]);
        assert!(cohens_kappa(&near).unwrap().value.unwrap() < 1.0);
    }

    #[test]
    fn predictive_values() {
        assert!((predictive_value(&fixture(), Role::Teacher).value.unwrap() - 0.80).abs() < 1e-12);
        assert!((predictive_value(&fixture(), Role::Child).value.unwrap() - 0.72).abs() < 1e-12);
        let perfect = ConfusionMatrix::from_counts([[5, 0], [0, 5]]);
        assert_eq!(predictive_value(&perfect, Role::Teacher).value, Some(1.0));
        assert_eq!(predictive_value(&perfect, Role::Child).value, Some(1.0));
        // never predicted child -> absent
        let no_child = ConfusionMatrix::from_counts([[5, 5], [0, 0]]);
        assert_eq!(predictive_value(&no_child, Role::Child).value, None);
    }

    #[test]
    fn f1_examples() {
        // 2*40 / (2*40 + 10 + 14)
        let f1_t = class_f1(&fixture(), Role::Teacher).value.unwrap();
        assert!((f1_t - 80.0 / 104.0).abs() < 1e-12);
        let f1_c = class_f1(&fixture(), Role::Child).value.unwrap();
        assert!((f1_c - 72.0 / 96.0).abs() < 1e-12);

        // weighted by expert counts 54/46
        let weighted = weighted_f1(&fixture()).unwrap().value.unwrap();
        let expected = (80.0 / 104.0) * 0.54 + (72.0 / 96.0) * 0.46;
        assert!((weighted - expected).abs() < 1e-12);

        let perfect = ConfusionMatrix::from_counts([[5, 0], [0, 5]]);
        assert_eq!(weighted_f1(&perfect).unwrap().value, Some(1.0));
    }

    #[test]
    fn weighted_f1_weighted_mean_example() {
        // F1_T = 0.8, F1_C = 0.7, expert counts 60/40 -> 0.76
        // teacher: tp=40, fp=10, fn=20 -> 80/110 != .8; construct directly instead
        let f1 = |tp: f64, fp: f64, fnn: f64| 2.0 * tp / (2.0 * tp + fp + fnn);
        // choose counts with expert totals 60/40: [[48,16],[12,24]]
        let cm = ConfusionMatrix::from_counts([[48, 16], [12, 24]]);
        let t = f1(48.0, 16.0, 12.0);
        let c = f1(24.0, 12.0, 16.0);
        let expected = t * 0.6 + c * 0.4;
        assert!((weighted_f1(&cm).unwrap().value.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn weighted_f1_concentrated_weights() {
        // expert only ever labeled teacher: weighted F1 equals teacher F1
        let cm = ConfusionMatrix::from_counts([[30, 0], [5, 0]]);
        let w = weighted_f1(&cm).unwrap();
        let t = class_f1(&cm, Role::Teacher).value.unwrap();
        assert!((w.value.unwrap() - t).abs() < 1e-12);
    }

    #[test]
    fn metrics_stay_in_unit_interval() {
        let cases = [
            [[40u64, 10], [14, 36]],
            [[1, 0], [0, 1]],
            [[0, 9], [9, 0]],
            [[3, 3], [3, 3]],
            [[100, 1], [1, 1]],
        ];
        for counts in cases {
            let cm = ConfusionMatrix::from_counts(counts);
            let a = accuracy(&cm).unwrap();
            assert!((0.0..=1.0).contains(&a));
            for role in [Role::Teacher, Role::Child] {
                if let Some(v) = predictive_value(&cm, role).value {
                    assert!((0.0..=1.0).contains(&v));
                }
                if let Some(v) = class_f1(&cm, role).value {
                    assert!((0.0..=1.0).contains(&v));
                }
            }
            if let Some(v) = weighted_f1(&cm).unwrap().value {
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn pooling_is_elementwise() {
        let a = ConfusionMatrix::from_counts([[1, 2], [3, 4]]);
        let b = ConfusionMatrix::from_counts([[10, 20], [30, 40]]);
        let pooled = a.pooled(&b);
        assert_eq!(pooled.get(Role::Teacher, Role::Teacher), 11);
        assert_eq!(pooled.get(Role::Child, Role::Child), 44);
        assert_eq!(pooled.total(), 110);
    }

    use crate::align::{AlignedTimeline, AlignedUnit, MergedSide};
    use crate::model::{RawSpeakerClass, Source};
    use crate::time::Tenths;

    fn side(speaker: RawSpeakerClass, role: Role) -> Option<MergedSide> {
        Some(MergedSide {
            speaker,
            role,
            text: String::new(),
            total_overlap: Tenths::ZERO,
            source_ids: vec![],
        })
    }

    fn timeline(units: Vec<(Option<MergedSide>, Option<MergedSide>)>) -> AlignedTimeline {
        let units = units
            .into_iter()
            .enumerate()
            .map(|(i, (expert, diarizer))| AlignedUnit {
                unit_id: i,
                start: Tenths::from_tenths(i as i64 * 20),
                end: Tenths::from_tenths(i as i64 * 20 + 10),
                anchor: None,
                expert,
                diarizer,
            })
            .collect();
        AlignedTimeline {
            recording_id: "rec".into(),
            duration: Tenths::from_seconds(600.0),
            anchor_wearer: Role::Child,
            provenance: vec![Source::Transcriber, Source::Expert, Source::Diarizer],
            units,
        }
    }

    #[test]
    fn build_confusion_counts_and_exclusions() {
        let fem = || side(RawSpeakerClass::Fem, Role::Teacher);
        let kchi = || side(RawSpeakerClass::Kchi, Role::Child);
        let other = || side(RawSpeakerClass::Unknown, Role::Other);

        let mut units: Vec<(Option<MergedSide>, Option<MergedSide>)> =
            (0..10).map(|_| (fem(), fem())).collect();
        units.push((kchi(), fem())); // expert child, diarizer teacher
        units.push((None, fem())); // expert missing
        units.push((fem(), None)); // diarizer missing
        units.push((None, None)); // anchor-only unit
        units.push((other(), fem())); // role outside the binary task

        let outcome = build_confusion(&timeline(units)).unwrap();
        assert_eq!(outcome.matrix.get(Role::Teacher, Role::Teacher), 10);
        assert_eq!(outcome.matrix.get(Role::Teacher, Role::Child), 1);
        assert_eq!(outcome.matrix.total(), 11);
        assert_eq!(outcome.excluded_one_sided, 2);
        assert_eq!(outcome.excluded_unclassified, 1);
        assert_eq!(outcome.excluded_role_other, 1);
    }

    #[test]
    fn build_confusion_is_order_invariant() {
        let fem = || side(RawSpeakerClass::Fem, Role::Teacher);
        let kchi = || side(RawSpeakerClass::Kchi, Role::Child);
        let units = vec![(fem(), fem()), (kchi(), fem()), (kchi(), kchi())];
        let mut reversed = units.clone();
        reversed.reverse();
        let a = build_confusion(&timeline(units)).unwrap();
        let b = build_confusion(&timeline(reversed)).unwrap();
        assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn build_confusion_needs_both_streams() {
        let mut tl = timeline(vec![]);
        tl.provenance = vec![Source::Transcriber, Source::Expert];
        assert!(matches!(
            build_confusion(&tl),
            Err(Error::MissingStream { .. })
        ));
    }

    #[test]
    fn report_pools_overall_and_handles_disjoint_roles() {
        let fem = || side(RawSpeakerClass::Fem, Role::Teacher);
        let kchi = || side(RawSpeakerClass::Kchi, Role::Child);

        // file a: teacher-only predictions; CPV undefined there
        let a = timeline(vec![(fem(), fem()), (fem(), fem()), (kchi(), fem())]);
        // file b: child-only predictions; TPV undefined there
        let b = timeline(vec![(kchi(), kchi()), (fem(), kchi())]);

        let report = reliability_report(
            &[("b".to_string(), &b), ("a".to_string(), &a)],
            &ReliabilityOptions::default(),
        )
        .unwrap();
        // rows sorted by file name
        assert_eq!(report.rows[0].file, "a");
        assert_eq!(report.rows[1].file, "b");
        assert_eq!(report.rows[0].cpv, None);
        assert_eq!(report.rows[1].tpv, None);
        // overall works on the pooled matrix: [[2,1],[1,1]] over 5 units
        let overall = &report.overall;
        assert_eq!(overall.file, "Overall");
        assert!((overall.accuracy.unwrap() - 3.0 / 5.0).abs() < 1e-12);
        assert!(overall.tpv.is_some() && overall.cpv.is_some());
    }

    #[test]
    fn missing_as_error_changes_only_accuracy() {
        let fem = || side(RawSpeakerClass::Fem, Role::Teacher);
        let tl = timeline(vec![
            (fem(), fem()),
            (fem(), fem()),
            (None, fem()),
            (fem(), None),
        ]);
        let strict = reliability_report(
            &[("x".to_string(), &tl)],
            &ReliabilityOptions {
                missing_as_error: true,
            },
        )
        .unwrap();
        let lenient =
            reliability_report(&[("x".to_string(), &tl)], &ReliabilityOptions::default()).unwrap();
        assert!((lenient.overall.accuracy.unwrap() - 1.0).abs() < 1e-12);
        assert!((strict.overall.accuracy.unwrap() - 2.0 / 4.0).abs() < 1e-12);
        assert_eq!(strict.overall.excluded_one_sided, 2);
    }
}
