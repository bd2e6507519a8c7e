//! Chain-instance generation, batch solver runs, CSV output and scaling fits.

mod chain;
mod experiment;
mod scaling;

use thiserror::Error;

pub use chain::{generate_chain, ChainSpec};
pub use experiment::{
    aggregate, aggregates_to_csv, config_for_scheme, rows_to_csv, run_experiment, scheme_label, AggregateRow, Encoding,
    ExperimentSpec, InstanceSource, ResultRow, Verdict, CSV_HEADER,
};
pub use scaling::{overlay_value, plotdata, scaling_report, ScalingPoint, ScalingReport, MIN_POINTS};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid chain parameters: {0}")]
    InvalidChain(String),
    #[error("the seed list is empty")]
    NoSeeds,
    #[error("the seed list contains duplicates")]
    DuplicateSeeds,
    #[error(transparent)]
    Encode(#[from] crate::encode::EncodeError),
    #[error(transparent)]
    Csp(#[from] crate::csp::CspError),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
