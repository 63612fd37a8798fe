//! Algorithmic core for simulating electronic-structure problems on qubits.
//!
//! The crate is `no_std` and needs only an allocator. File formats, the
//! command line and process-level concerns live in the companion `qchem` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod encoding;
pub mod error;
pub mod fermion;
pub mod linalg;
pub mod pauli;
pub mod reduction;
pub mod mitigation;
pub mod rng;
pub mod simulator;
pub mod spectra;
#[cfg(test)]
mod testutil;
pub mod vqe;

pub use error::{Error, Result};
