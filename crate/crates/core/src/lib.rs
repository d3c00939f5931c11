//! Virtual sensing core: sink-side virtual sensors that predict readings for
//! dormant or transmit-suppressed physical sensors using adaptive temporal
//! filters and spatial regression.
//!
//! The crate holds everything algorithmic — predictor fitting and adaptation,
//! companion selection and role rotation, the physical-node state machine,
//! per-node energy accounting, and a deterministic slot-driven simulator.
//! It is `no_std` (alloc required); CSV ingestion, synthetic dataset
//! generation and the batch CLI live in the companion `vsf-cli` crate.

#![no_std]

extern crate alloc;

pub mod config;
pub mod energy;
pub mod engine;
pub mod error;
mod linalg;
pub mod node;
pub mod phase;
pub mod predict;
pub mod sim;
pub mod trace;

pub use config::{EnergyMode, SimConfig};
pub use error::Error;
pub use phase::{Phase, PhaseSchedule, RevalidationOutcome};
pub use trace::{Dataset, SensorTrace};
