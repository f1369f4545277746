//! Dissipative quantum kicked top.
//!
//! `N` spins-1/2 with Hamiltonian `H_0 = −2h S_x + (2/N) S_z²`, kicked every
//! period `τ` by `U_K = exp(−i K S_z² / S)` and decaying collectively through
//! the jump operator `√(γ/S) S_−`. The crate provides
//!
//! * [`meanfield`]: the `N → ∞` magnetization map and its chaos diagnostics
//!   (orbits, Lyapunov exponents, bifurcation scans, box-counting dimension);
//! * [`qtraj`]: finite-size quantum-jump trajectories in the Dicke sector;
//! * [`observables`]: magnetization, stabilizer Rényi entropy and
//!   entanglement entropy of Dicke-sector states;
//! * [`analysis`]: plateau averages, scaling fits and histograms.

pub mod analysis;
pub mod bloch;
pub mod combinatorics;
pub mod error;
pub mod linalg;
pub mod meanfield;
pub mod observables;
pub mod params;
pub mod qtraj;
pub mod rng;
pub mod spin;

pub use bloch::{bloch_from_phase, phase_from_bloch, BlochVector, PhasePoint};
pub use error::{Error, Result};
pub use params::ModelParams;
pub use spin::{
    bloch_from_state, build_collective_ops, spin_coherent_state, CollectiveOps, DickeState,
};
