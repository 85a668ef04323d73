//! Experiment drivers for the dynlab numerical laboratory: configuration,
//! pipelines, reports and output emission.

pub mod config;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod output;
pub mod report;

pub use config::{Config, ExperimentId};
pub use error::LabError;
pub use experiments::run;
pub use report::{Report, Verdict};
