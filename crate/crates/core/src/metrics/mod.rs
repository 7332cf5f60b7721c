//! Evaluation metrics and report files.

mod report;
mod scores;

pub use report::{emit_report, EvalReport, ModelEval, SearchSummary, METRICS_SCHEMA};
pub use scores::{confusion, roc, ConfusionMatrix, Rate, RocCurve, RocPoint};
