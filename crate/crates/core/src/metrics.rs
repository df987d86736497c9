//! Accuracy, per-class and macro-averaged precision / recall / F1.
//!
//! Zero-division convention: a ratio with a zero denominator is 0. A class that
//! never occurs in truth or prediction therefore contributes 0 to every macro mean.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// Keyed by label, in `labels` order.
    pub per_class: IndexMap<String, ClassScores>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// Row = true label, column = predicted label, both in `labels` order.
    pub confusion: Vec<Vec<u64>>,
    pub labels: Vec<String>,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("length mismatch: {truth} true labels vs {pred} predictions")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("label {0:?} is not in the label set")]
    UnknownLabel(String),
    #[error("label {0:?} appears twice in the label set")]
    DuplicateLabel(String),
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

pub fn evaluate<S: AsRef<str>, L: AsRef<str>>(
    y_true: &[S],
    y_pred: &[S],
    label_set: &[L],
) -> Result<EvalReport, MetricsError> {
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::LengthMismatch { truth: y_true.len(), pred: y_pred.len() });
    }
    if y_true.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(label_set.len());
    for (i, l) in label_set.iter().enumerate() {
        if index.insert(l.as_ref(), i).is_some() {
            return Err(MetricsError::DuplicateLabel(l.as_ref().to_owned()));
        }
    }
    let lookup =
        |s: &S| index.get(s.as_ref()).copied().ok_or_else(|| MetricsError::UnknownLabel(s.as_ref().to_owned()));

    let k = label_set.len();
    let mut confusion = vec![vec![0u64; k]; k];
    for (t, p) in y_true.iter().zip(y_pred) {
        confusion[lookup(t)?][lookup(p)?] += 1;
    }
    Ok(report_from_confusion(confusion, label_set))
}

/// Builds a report from a square confusion matrix (rows = truth).
pub fn report_from_confusion<L: AsRef<str>>(confusion: Vec<Vec<u64>>, label_set: &[L]) -> EvalReport {
    let k = label_set.len();
    let n: u64 = confusion.iter().flatten().sum();
    let trace: u64 = (0..k).map(|i| confusion[i][i]).sum();

    let mut per_class = IndexMap::with_capacity(k);
    for (c, label) in label_set.iter().enumerate() {
        let tp = confusion[c][c];
        let predicted: u64 = confusion.iter().map(|row| row[c]).sum();
        let actual: u64 = confusion[c].iter().sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, actual);
        per_class.insert(label.as_ref().to_owned(), ClassScores { precision, recall, f1: f1_score(precision, recall) });
    }
    let mean = |f: fn(&ClassScores) -> f64| {
        if k == 0 {
            0.0
        } else {
            per_class.values().map(f).sum::<f64>() / k as f64
        }
    };
    EvalReport {
        accuracy: ratio(trace, n),
        macro_precision: mean(|s| s.precision),
        macro_recall: mean(|s| s.recall),
        macro_f1: mean(|s| s.f1),
        per_class,
        confusion,
        labels: label_set.iter().map(|l| l.as_ref().to_owned()).collect(),
        n,
    }
}

impl EvalReport {
    /// Fixed-width text table.
    pub fn to_table(&self) -> String {
        let width = self.labels.iter().map(String::len).max().unwrap_or(5).max(5);
        let mut out = format!("{:<width$}  precision  recall     f1\n", "class");
        for (label, s) in &self.per_class {
            out.push_str(&format!("{label:<width$}  {:>9.5}  {:>6.5}  {:>6.5}\n", s.precision, s.recall, s.f1));
        }
        out.push_str(&format!(
            "{:<width$}  {:>9.5}  {:>6.5}  {:>6.5}\n",
            "macro", self.macro_precision, self.macro_recall, self.macro_f1
        ));
        out.push_str(&format!("accuracy {:.5}  (n = {})\n", self.accuracy, self.n));
        out
    }
}
