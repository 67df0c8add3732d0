//! Monte Carlo wave-function simulator for noisy multi-qubit quantum protocols.
//!
//! The crate stochastically evolves pure state vectors under quantum jump
//! unravelings of Markovian noise channels and averages observables over an
//! ensemble of trajectories. An exact density-matrix path (the Kraus map on
//! dense matrices) is provided for small qubit counts as ground truth.
//!
//! Main pieces:
//! * [`state`] — dense state vectors, density matrices, fidelities.
//! * [`circuits`] — gate kernels, the quantum Fourier transform, and the
//!   quantized baker's map circuit.
//! * [`noise`] — n-qubit amplitude-damping and phase-flip channels as jump
//!   operator families.
//! * [`trajectory`] — the per-step jump sampling loop and ensemble averaging
//!   with reproducible per-trajectory RNG streams.
//! * [`oracle`] — exact superoperator evolution and Bell-measurement
//!   projections on dense density matrices.
//! * [`analytics`] — closed-form predictions (cascade class populations,
//!   fidelity decay laws, gate budgets).
//! * [`protocols`] — end-to-end drivers: teleportation through a noisy swap
//!   chain and forward/backward baker's-map fidelity experiments.

pub mod analytics;
pub mod circuits;
pub mod error;
pub mod noise;
pub mod oracle;
pub mod protocols;
pub mod state;
pub mod stats;
pub mod trajectory;

pub use error::{Error, Result};
pub use noise::{JumpOutcome, NoiseChannel, NoiseModel, NoiseParams};
pub use state::{DensityMatrix, StateVector};
pub use trajectory::{EnsembleEstimate, Schedule, ScheduleStep, TrajectoryConfig};
