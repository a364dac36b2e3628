//! Dense qubit simulation and estimation toolkit for GHZ and linear-cluster
//! entanglement monotones: state preparation, noisy delay evolution,
//! shot-sampled Pauli expectations, readout correction, direct fidelity
//! estimation, and phase-drift compensation.
//!
//! The simulation kernel is generic over the real scalar ([`Real`], `f32`
//! or `f64`); the aliases below fix it to `f64`, which is what the
//! estimators and experiment drivers use.

pub mod circuits;
pub mod error;
pub mod experiments;
pub mod measure;
pub mod monotones;
pub mod noise;
pub mod qstate;
pub mod random;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use qstate::{Gate, GateKind, Matrix, Pauli, PauliString, QuantumState, Repr};
pub use scalar::{Real, C};

pub type State = QuantumState<f64>;
pub type StateF32 = QuantumState<f32>;
