//! Continuous-time quantum walks of one and two interacting particles on the
//! commensurate off-diagonal Aubry-André-Harper chain.
//!
//! The crate covers the whole digital-simulation pipeline:
//!
//! - [`lattice`]: model parameters and the modulated bond profile
//! - [`pauli`]: Pauli-string algebra, Jordan-Wigner ladder images, and the
//!   spin / fermionic Hamiltonians
//! - [`exact`]: dense spectral propagator used as the ground-truth oracle
//! - [`circuit`]: Trotterized gate circuits, the three-CNOT two-qubit block,
//!   and OpenQASM 2.0 export
//! - [`engine`]: statevector kernels, Z expectations and shot sampling
//! - [`readout`]: synthetic readout flips and confusion-matrix mitigation
//! - [`observables`]: densities, edge probability, radial distribution, edge
//!   density, correlations and participation entropy
//! - [`experiment`]: experiment configs, presets, sweeps and file output
//!
//! Basis convention: bit `i` of an amplitude index is the state of site `i`
//! (site 0 is the least significant bit) and `|1>` means occupied.

pub mod circuit;
pub mod engine;
mod error;
pub mod exact;
pub mod experiment;
pub mod lattice;
pub mod observables;
pub mod parallel;
pub mod pauli;
pub mod readout;
pub mod state;

pub use error::{ConfigIssue, Error, Result};
pub use lattice::{Flavor, ModelParams};
pub use state::StateVector;

pub use num_complex::Complex64;
