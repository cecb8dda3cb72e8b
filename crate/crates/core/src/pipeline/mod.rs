//! Convergence pipelines: quantized Meixner compositions against Loewner
//! flow references, exact graph cross-checks and report output.

mod config;
mod report;
mod run;

pub use config::{
    CellRule, Checks, DriverSpec, FieldSpec, GridKeyword, PipelineConfig, ReferenceSource, Refinement, TimeSelection,
    Tolerances, Trend,
};
pub use report::{emit_report, format_g15, parse_csv, CheckOutcome, ConvergenceReport, ReportMetadata, ReportRow, CSV_HEADER};
pub use run::{
    approximant_moments, composed_meixner, discretize_field, run_field_approximation, run_graph_verify,
    run_slit_approximation, slit_approximant, steps_until, GRAPH_MAX_ORDER, GRAPH_MAX_RESOLUTION,
};
