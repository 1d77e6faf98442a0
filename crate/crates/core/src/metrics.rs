//! Confusion counts and the six evaluation measures, in percent.
//!
//! Targets are the positive class. Undefined ratios stay `NaN` and poison
//! run averages, so reproduced tables line up cell for cell with reports
//! that print `NAN`.

use alloc::vec::Vec;

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::stats;
use crate::threshold::Decision;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// Balanced accuracy at the fitted threshold, not ROC area.
    pub auc: f64,
    pub std_auc: f64,
    pub run_count: usize,
}

pub fn confuse(decisions: &[Decision], labels: &[Label]) -> Result<ConfusionCounts> {
    if decisions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: decisions.len(),
            right: labels.len(),
        });
    }
    if decisions.is_empty() {
        return Err(Error::TooFewSamples {
            needed: 1,
            found: 0,
        });
    }
    let mut c = ConfusionCounts::default();
    for (d, &l) in decisions.iter().zip(labels) {
        match (d.is_target, l) {
            (true, Label::Target) => c.tp += 1,
            (true, Label::Outlier) => c.fp += 1,
            (false, Label::Outlier) => c.tn += 1,
            (false, Label::Target) => c.fn_ += 1,
        }
    }
    Ok(c)
}

fn percent(num: usize, den: usize) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        100.0 * num as f64 / den as f64
    }
}

pub fn measures(c: &ConfusionCounts) -> EvalReport {
    let precision = percent(c.tp, c.tp + c.fp);
    let recall = percent(c.tp, c.tp + c.fn_);
    let specificity = percent(c.tn, c.tn + c.fp);
    let f1 = 2.0 * precision * recall / (precision + recall);
    EvalReport {
        precision,
        recall,
        specificity,
        f1,
        accuracy: percent(c.tp + c.tn, c.total()),
        auc: 0.5 * (recall + specificity),
        std_auc: 0.0,
        run_count: 1,
    }
}

/// Mean of every measure over runs; `std_auc` is the sample deviation of the
/// per-run AUC.
pub fn aggregate(runs: &[EvalReport]) -> Result<EvalReport> {
    if runs.is_empty() {
        return Err(Error::EmptyRuns);
    }
    let mean = |f: fn(&EvalReport) -> f64| runs.iter().map(f).sum::<f64>() / runs.len() as f64;
    let aucs: Vec<f64> = runs.iter().map(|r| r.auc).collect();
    Ok(EvalReport {
        precision: mean(|r| r.precision),
        recall: mean(|r| r.recall),
        specificity: mean(|r| r.specificity),
        f1: mean(|r| r.f1),
        accuracy: mean(|r| r.accuracy),
        auc: mean(|r| r.auc),
        std_auc: stats::mean_std(&aucs).1,
        run_count: runs.len(),
    })
}
