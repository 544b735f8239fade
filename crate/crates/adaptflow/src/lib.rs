//! Scenarios, configuration files, VTK/CSV/JSON output and the command line
//! of the adaptive Darcy / Forchheimer solver in [`adaptflow_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod scenario;
pub mod vtk;

pub use adaptflow_core as core;
pub use error::{Error, Result};
