//! Desk-scale simulator for two-point real-time correlation functions of
//! a small lattice model: exact reference dynamics, Trotterized
//! Hadamard-test circuit estimation under configurable noise, readout +
//! zero-noise-extrapolation mitigation, quality metrics, measurement and
//! error bounds, and time-to-frequency spectral reconstruction.

pub mod circuits;
pub mod error;
pub mod estimation;
pub mod mitigation;
pub mod model;
pub mod noisy_sim;
pub mod oracle;
pub mod pauli;
pub mod spectral;

pub use circuits::{Circuit, Gate, MeasureBasis, TrotterOrdering};
pub use error::CoreError;
pub use estimation::{CorrelatorSeries, QualityReport, Variant};
pub use mitigation::{Extrapolant, MitigatedValue, MitigationConfig, ValueWithSigma};
pub use model::{ModelParams, MomentumVector};
pub use noisy_sim::{DensityMatrix, NoiseModel, ShotRecord, StateVector};
pub use oracle::{CorrelatorEngine, EigenSystem};
pub use pauli::{PauliString, QubitOperator};
