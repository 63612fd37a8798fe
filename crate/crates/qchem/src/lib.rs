//! Input handling, fixtures, configured runs and the command-line surface
//! around `qchem-core`.

pub mod curve;
pub mod error;
pub mod fcidump;
pub mod fixtures;
pub mod pipeline;

pub use error::{Error, Result};
pub use qchem_core;
