//! Simulation of qubit teleportation through a quantum switch.
//!
//! The switch qubit `S` coherently controls whether the register
//! `A′ ⊗ A ⊗ B` undergoes a teleportation channel or a noisy one.

pub mod analytic;
pub mod channels;
pub mod cli;
pub mod error;
pub mod protocols;
pub mod qmat;
pub mod report;
pub mod states;

pub use error::{Error, Result};
