//! Simulation and spectral-analysis library for gap estimation from
//! time-resolved measurement probabilities.
//!
//! The pipeline: build a spin Hamiltonian or step circuit, evolve a basis
//! state over a uniform time grid (exactly or by Trotter steps), record
//! return/transition probabilities (exact values or finite-shot estimates,
//! optionally under a Pauli error channel), then DFT the mirrored series and
//! detect peaks against a shot-noise threshold. Peak positions give energy
//! gaps; an exact-diagonalization oracle validates them on small systems.

pub mod circuits;
pub mod config;
pub mod error;
pub mod evolution;
pub mod exact;
pub mod hamiltonian;
pub mod noise;
pub mod rng;
pub mod runner;
pub mod sampling;
pub mod spectral;
pub mod state;

pub use error::{MqteError, Result};
