//! Experiment configuration, study execution and result files.

mod config;
mod output;
mod study;

pub use config::{ExperimentConfig, StudyKind, Truth, SCHEMA_VERSION};
pub use output::{decisions, emit_outputs, render_svg, write_estimates_csv, write_metadata, write_summary_csv, ESTIMATES_FILE, METADATA_FILE, PLOT_FILE, SUMMARY_COLUMNS, SUMMARY_FILE};
pub use study::{data_seed, generate_observed, observed_shape, run_seed, run_study, DatasetEstimate, MethodRecord, ObservedSet, ResultRow, ResultTable, StudyOutput};
