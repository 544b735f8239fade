//! Adaptive Darcy / generalized-Forchheimer flow in heterogeneous porous media.
//!
//! This crate holds the algorithmic core and builds without `std` (it only
//! needs `alloc`):
//!
//! - [`constitutive`]: seepage laws, Reynolds/Forchheimer numbers, local
//!   errors between laws and the flux threshold `ū_δ`.
//! - [`special`]: the truncation ratio `G_m` of the exponential laws, its
//!   inverse, and Gauss–Legendre rules.
//! - [`regularize`]: dissipation potentials and the Gaussian-regularized
//!   drag multiplier used by the adaptive model.
//! - [`grid`]: tensor-product Cartesian grids with cell and face fields.
//! - [`linalg`]: symmetric sparse storage, banded Cholesky and CG.
//! - [`solver`]: two-point flux discretization of the mixed problem and the
//!   explicit fixed-point iteration for nonlinear drag.
//! - [`analysis`]: slow/fast region labels, region-wise L2 errors and the
//!   tolerance sweep.
//!
//! File formats, scenario presets and the command line live in the
//! `adaptflow` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod constitutive;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod regularize;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
