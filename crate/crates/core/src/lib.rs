//! Statevector simulation of coherent skip-gate Grover circuits.
//!
//! The crate builds three benchmark circuits (fixed-order Grover and two
//! realizations of the skip gate), lowers them to `{RZ, SX, X, CX}`,
//! schedules them for depth, simulates them exactly or under stochastic
//! Pauli noise, and reduces the results to success probability, expected
//! expensive-oracle calls and success per call.
//!
//! Amplitude indices are little-endian: qubit `k` is bit `k`.

pub mod builders;
pub mod circuit;
pub mod error;
pub mod experiment;
pub mod gate;
pub mod library;
pub mod metrics;
pub mod noise;
pub mod state;
pub mod transpile;
pub mod unitary;
pub mod verify;

pub use builders::{build, build_fixed, build_qsg, ExperimentConfig, SuccessRule, Variant};
pub use circuit::{run, Circuit, Probe, ProbeReadings, RegisterLayout};
pub use error::{Error, Result};
pub use experiment::{run_sweep, SweepConfig, SweepReport};
pub use gate::{Gate, GateKind};
pub use library::{Block, OracleSpec};
pub use metrics::RunMetrics;
pub use noise::{sample_shots, Histogram, NoiseConfig, ShotResult};
pub use state::{ProjectorQuery, Statevector};
pub use transpile::{cost, lower, CostReport};
pub use unitary::{to_unitary, Matrix};
