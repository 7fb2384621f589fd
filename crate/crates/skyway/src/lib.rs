//! File formats, the experiment harness and reporting for the skyway
//! composition engine in `skyway_core`.

pub mod config;
pub mod harness;
pub mod io;
pub mod report;

pub use config::{ConfigError, ExperimentConfig};
pub use harness::{run_experiment, ExperimentInputs, HarnessError, Method, MetricsRecord};
pub use io::IoError;
pub use report::{emit_report, summarize, CompositionReport, ReportError, SummaryRow};
