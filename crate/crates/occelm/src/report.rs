//! Report tables.

use std::io::Write;

use occelm_core::metrics::EvalReport;
use occelm_core::modelsel::Selection;
use occelm_core::variant::{Hyper, Variant};

use crate::bench::RunRecord;

/// Two decimals, or the literal `NAN`.
pub fn measure(v: f64) -> String {
    if v.is_nan() {
        "NAN".into()
    } else {
        format!("{v:.2}")
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub variant: Variant,
    pub report: EvalReport,
}

pub fn write_report<W: Write>(writer: W, rows: &[ReportRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["dataset", "classifier", "variant", "F1", "ACC", "AUC", "Std_AUC"])?;
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.variant.classifier_name().to_string(),
            r.variant.variant_name(),
            measure(r.report.f1),
            measure(r.report.accuracy),
            measure(r.report.auc),
            measure(r.report.std_auc),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-run table: confusion counts and all six measures.
pub fn write_runs<W: Write>(writer: W, dataset: &str, variant: &Variant, runs: &[RunRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "dataset",
        "classifier",
        "variant",
        "run",
        "params",
        "TP",
        "FP",
        "TN",
        "FN",
        "precision",
        "recall",
        "specificity",
        "F1",
        "ACC",
        "AUC",
    ])?;
    for r in runs {
        let m = &r.report;
        w.write_record([
            dataset.to_string(),
            variant.classifier_name().to_string(),
            variant.variant_name(),
            r.run.to_string(),
            r.hyper.to_string(),
            r.counts.tp.to_string(),
            r.counts.fp.to_string(),
            r.counts.tn.to_string(),
            r.counts.fn_.to_string(),
            measure(m.precision),
            measure(m.recall),
            measure(m.specificity),
            measure(m.f1),
            measure(m.accuracy),
            measure(m.auc),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Every evaluated candidate of a model-selection pass.
pub fn write_selection<W: Write>(writer: W, sel: &Selection<Hyper>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "params", "rejection", "err_thr", "consistent", "chosen"])?;
    for (i, t) in sel.trials.iter().enumerate() {
        let rejection = if t.rejection.is_nan() {
            "NAN".to_string()
        } else {
            format!("{:.6}", t.rejection)
        };
        w.write_record([
            i.to_string(),
            t.params.to_string(),
            rejection,
            format!("{:.6}", sel.err_thr),
            t.consistent.to_string(),
            (i == sel.chosen_index).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
