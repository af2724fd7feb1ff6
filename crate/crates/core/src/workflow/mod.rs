//! Iteration workflow: gates, project history, the end-to-end pipeline and
//! its reports.

mod gate;
mod iteration;
mod pipeline;
mod report;

pub use gate::{decide, evaluate_gates, ConstructDiagnostics, Effect, GateDecision, GateReason, GateStatus, Outcome, Stage};
pub use iteration::{check_iteration_overlap, load_history, save_record, IterationRecord};
pub use pipeline::{iteration_record, run_pipeline, PipelineInputs};
pub use report::{ConstructReport, ContentValidity, Report, Summary, REPORT_VERSION};
