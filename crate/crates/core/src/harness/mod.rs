//! Configuration, data files, result tables and the experiment drivers
//! behind the command-line tool.

mod commands;
mod config;
mod data;
mod table;

pub use commands::{
    ccr_trials, cluster_traces, execute, mean_stderr, regress_points, run, trace_series, CcrTrial,
    CertificateTally, RunSummary, TraceSeries,
};
pub use config::{Command, ExperimentConfig};
pub use data::{
    dense_labels, read_dataset, write_dataset, DatasetMeta, LoadedData, BASES_FILE, CLEAN_FILE, POINTS_FILE,
    SIDECAR_FILE,
};
pub use table::{strip_metadata, Cell, ResultTable};
