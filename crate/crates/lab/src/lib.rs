//! Monte Carlo experiments for random walks in random scenery: declarative
//! specs, a deterministic parallel runner, and CSV/JSON reports.

pub mod report;
pub mod runner;
pub mod spec;

pub use report::{emit, ExperimentReport, Format, ReportRow};
pub use runner::run;
pub use spec::{Experiment, ExperimentSpec, Preset};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] rwrs_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}
