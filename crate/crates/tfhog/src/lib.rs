//! File formats, dataset handling and batch commands around `tfhog-core`.
//!
//! Layout on disk:
//! - datasets: `root/<class>/**/<name>.wav`
//! - features: binary `HFTR` matrix plus `.labels` and `.ids` sidecars ([`features`])
//! - models: binary `HSVM` ([`model`])
//! - reports: `key = value` header with CSV sections, plus a `.splits` manifest ([`report`])

mod atomic;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod features;
pub mod model;
pub mod pgm;
pub mod report;
pub mod wav;

pub use config::RunConfig;
pub use error::{Error, Result};
