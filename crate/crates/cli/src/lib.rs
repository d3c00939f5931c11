//! Batch CLI companion to `vsf-core`: dataset ingestion and alignment,
//! synthetic trace generation, run settings, report serialization and the
//! `vsf` command-line surface.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod report_io;
pub mod settings;
pub mod synth;
