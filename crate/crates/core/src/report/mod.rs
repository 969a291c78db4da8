//! Run files, the compute-and-verify pipeline, and report output.

mod config;
mod emit;
mod explicit;
mod pipeline;

pub use config::{
    parse_config, CheckKind, ConeConfig, ConeKind, MuEntry, OutputConfig, OutputFormat, RunConfig,
    VerifyConfig,
};
pub use emit::{body_json, emit_report, format_sig12, parse_report_json, report_json, CONSTANTS_HEADER};
pub use explicit::{
    domain_summary, ftt_samples, ftt_summary, ConeDomainSummary, DomainSummary, FttSummary,
    FIELD_TOLERANCE, FTT_RESIDUAL_TOLERANCE, IDENTITY_TOLERANCE,
};
pub use pipeline::{
    radial_null_report, run_pipeline, ConeSummary, ConvergenceRow, ErrorKind, ItemError, ReportBody,
    RunReport, StageTiming, VerificationRecord,
};
