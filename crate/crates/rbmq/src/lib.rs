//! File-level side of reduced bit median quantization: image IO, the corpus
//! pipeline and its CSV report, and the `rbmq` command line.
//!
//! The codec itself lives in [`rbmq_core`], re-exported here as [`core`].

pub mod cli;
mod error;
pub mod image_io;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
pub use rbmq_core as core;
