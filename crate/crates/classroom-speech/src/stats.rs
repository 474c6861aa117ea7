//! Cross-method statistics over audio files: Pearson correlation, binary
//! agreement kappa, and two-way random absolute-agreement intraclass
//! correlations (single measure).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::FeatureSummary;
use crate::model::Role;
use crate::reliability::Metric;
use crate::time::Tenths;

/// Product-moment correlation. Needs at least three pairs and nonzero
/// variance on both sides.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::TooFew {
            need: 3,
            what: "pairs".into(),
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mean_x) * (b - mean_y);
        var_x += (a - mean_x).powi(2);
        var_y += (b - mean_y).powi(2);
    }
    if var_x == 0.0 || var_y == 0.0 {
        let which = if var_x == 0.0 { "x" } else { "y" };
        return Err(Error::ZeroVariance {
            which: which.into(),
        });
    }
    Ok(cov / (var_x * var_y).sqrt())
}

/// Cohen's kappa over paired binary judgments (e.g. question flags from two
/// methods on the units both methods produced).
///
/// Computed directly from the pair counts; a cross-check against the
/// reliability module's matrix kappa is property-tested.
pub fn binary_kappa(pairs: &[(bool, bool)]) -> Result<Metric> {
    if pairs.is_empty() {
        return Err(Error::Empty {
            what: "binary pair set".into(),
        });
    }
    let n = pairs.len() as u64;
    let agree = pairs.iter().filter(|(a, b)| a == b).count() as u64;
    let a_true = pairs.iter().filter(|(a, _)| *a).count() as u64;
    let b_true = pairs.iter().filter(|(_, b)| *b).count() as u64;
    let constant_marginal = a_true == 0 || a_true == n || b_true == 0 || b_true == n;

    let marginal_mass =
        a_true as u128 * b_true as u128 + (n - a_true) as u128 * (n - b_true) as u128;
    let n_sq = n as u128 * n as u128;
    if marginal_mass == n_sq {
        return Ok(if agree == n {
            Metric::flagged(1.0)
        } else {
            Metric::absent_flagged()
        });
    }
    let p_o = agree as f64 / n as f64;
    let p_e = marginal_mass as f64 / n_sq as f64;
    Ok(Metric {
        value: Some((p_o - p_e) / (1.0 - p_e)),
        degenerate: constant_marginal,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IccValue {
    pub value: f64,
    /// Set when the value comes from the constant-matrix convention.
    pub degenerate: bool,
}

/// Absolute-agreement intraclass correlation, single measure, two-way
/// random effects, for an n-files-by-2-methods matrix:
///
/// `(MSR - MSE) / (MSR + (k-1) MSE + (k/n)(MSC - MSE))`
///
/// with MSR/MSC/MSE the row, column, and residual mean squares. A constant
/// matrix is 1.0 by convention, flagged degenerate.
pub fn icc_absolute(matrix: &[[f64; 2]]) -> Result<IccValue> {
    let n = matrix.len();
    if n < 3 {
        return Err(Error::TooFew {
            need: 3,
            what: "files".into(),
            got: n,
        });
    }
    let k = 2.0;
    let nf = n as f64;

    let first = matrix[0][0];
    if matrix.iter().flatten().all(|&v| v == first) {
        return Ok(IccValue {
            value: 1.0,
            degenerate: true,
        });
    }

    let grand = matrix.iter().flatten().sum::<f64>() / (nf * k);
    let row_means: Vec<f64> = matrix.iter().map(|r| (r[0] + r[1]) / k).collect();
    let col_means = [
        matrix.iter().map(|r| r[0]).sum::<f64>() / nf,
        matrix.iter().map(|r| r[1]).sum::<f64>() / nf,
    ];

    let ss_rows: f64 = row_means.iter().map(|m| k * (m - grand).powi(2)).sum();
    let ss_cols: f64 = col_means.iter().map(|m| nf * (m - grand).powi(2)).sum();
    let ss_err: f64 = matrix
        .iter()
        .zip(&row_means)
        .map(|(row, rm)| {
            (row[0] - rm - col_means[0] + grand).powi(2)
                + (row[1] - rm - col_means[1] + grand).powi(2)
        })
        .sum();

    let ms_rows = ss_rows / (nf - 1.0);
    let ms_cols = ss_cols / (k - 1.0);
    let ms_err = ss_err / ((nf - 1.0) * (k - 1.0));

    let denom = ms_rows + (k - 1.0) * ms_err + (k / nf) * (ms_cols - ms_err);
    if denom == 0.0 {
        return Ok(IccValue {
            value: 1.0,
            degenerate: true,
        });
    }
    Ok(IccValue {
        value: (ms_rows - ms_err) / denom,
        degenerate: false,
    })
}

/// Per-file features from both methods, the input to the ICC table.
#[derive(Clone, Debug)]
pub struct PerFileFeatures {
    pub file: String,
    pub duration: Tenths,
    pub expert: FeatureSummary,
    pub transcriber: FeatureSummary,
}

pub const ICC_FEATURES: [&str; 5] = [
    "mlu",
    "questions_per_min",
    "non_questions_per_min",
    "prop_responses_to_questions",
    "prop_responses_to_non_questions",
];

#[derive(Clone, Debug, Serialize)]
pub struct IccRow {
    pub mlu: IccValue,
    pub questions_per_min: IccValue,
    pub non_questions_per_min: IccValue,
    pub prop_responses_to_questions: IccValue,
    pub prop_responses_to_non_questions: IccValue,
}

impl IccRow {
    pub fn cell(&self, feature: &str) -> &IccValue {
        match feature {
            "mlu" => &self.mlu,
            "questions_per_min" => &self.questions_per_min,
            "non_questions_per_min" => &self.non_questions_per_min,
            "prop_responses_to_questions" => &self.prop_responses_to_questions,
            _ => &self.prop_responses_to_non_questions,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IccReport {
    pub child: IccRow,
    pub teacher: IccRow,
    pub warnings: Vec<String>,
}

/// Extract one ICC-table feature value from a per-file summary.
pub fn per_file_feature_value(
    summary: &FeatureSummary,
    role: Role,
    feature: &str,
    duration: Tenths,
) -> Option<f64> {
    let row = summary.role(role);
    match feature {
        "mlu" => row.mlu,
        "questions_per_min" => duration
            .is_positive()
            .then(|| row.questions as f64 / duration.minutes()),
        "non_questions_per_min" => duration
            .is_positive()
            .then(|| row.non_questions as f64 / duration.minutes()),
        "prop_responses_to_questions" => row.prop_questions_responded,
        "prop_responses_to_non_questions" => row.prop_non_questions_responded,
        _ => None,
    }
}

/// Build the per-role ICC table over audio files. Every (file, role,
/// feature) cell must be defined for both methods; otherwise the set of
/// missing cells is reported as an error.
pub fn icc_table(files: &[PerFileFeatures]) -> Result<IccReport> {
    if files.len() < 3 {
        return Err(Error::TooFew {
            need: 3,
            what: "audio files".into(),
            got: files.len(),
        });
    }
    let mut missing: Vec<String> = Vec::new();
    let mut rows: Vec<IccRow> = Vec::new();
    let mut warnings = Vec::new();

    for role in [Role::Child, Role::Teacher] {
        let mut cells: Vec<IccValue> = Vec::new();
        for feature in ICC_FEATURES {
            let mut matrix: Vec<[f64; 2]> = Vec::with_capacity(files.len());
            for f in files {
                let expert = per_file_feature_value(&f.expert, role, feature, f.duration);
                let transcriber = per_file_feature_value(&f.transcriber, role, feature, f.duration);
                match (expert, transcriber) {
                    (Some(e), Some(t)) => matrix.push([e, t]),
                    _ => missing.push(format!("{}/{}/{}", f.file, role, feature)),
                }
            }
            if missing.is_empty() {
                let icc = icc_absolute(&matrix)?;
                if icc.degenerate {
                    warnings.push(format!("{role}/{feature}: degenerate (constant matrix)"));
                }
                cells.push(icc);
            }
        }
        if missing.is_empty() {
            rows.push(IccRow {
                mlu: cells[0],
                questions_per_min: cells[1],
                non_questions_per_min: cells[2],
                prop_responses_to_questions: cells[3],
                prop_responses_to_non_questions: cells[4],
            });
        }
    }

    if !missing.is_empty() {
        return Err(Error::IncompleteMatrix { cells: missing });
    }
    let mut rows = rows.into_iter();
    Ok(IccReport {
        child: rows.next().expect("child row"),
        teacher: rows.next().expect("teacher row"),
        warnings,
    })
}
