//! Experiment orchestration, regret metrics and diagnostics.

mod config;
mod diagnostics;
mod experiment;
mod fmt;
mod metrics;
mod reference;
mod seed;

pub use config::{
    AnyEnv, EnvironmentSpec, ExperimentConfig, MethodName, MethodSpec, ReferenceSpec,
};
pub use diagnostics::{estimate_clean_event_rate, CleanEventEstimate};
pub use experiment::{
    cell_problem, run_experiment, run_method, CellError, ExperimentOutput, ERRORS_FILE,
    REFERENCES_FILE, SUMMARY_FILE, TRACE_DIR,
};
pub use fmt::{fmt_float, fmt_opt};
pub use metrics::{
    aggregate_runs, aggregate_series, csv_writer, cumulative_regret_series, moving_average,
    regret_series, write_summaries, write_trace, GroupStats, MeanStd, RunSummary, SeriesStats,
    SUMMARY_COLUMNS, TRACE_COLUMNS,
};
pub use reference::{compute_reference_value, Reference, ReferenceKind};
pub use seed::{derive_run_seed, splitmix64};
