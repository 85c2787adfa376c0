//! Generalized Weyl integration for polar actions.
//!
//! Integrals of invariant functions over a manifold `M` with a polar action
//! of a compact group reduce to integrals over a section, weighted by the
//! orbit-map Jacobian `delta`. This crate computes `delta` numerically and in
//! closed form from root data, calibrates the normalizing constant, and runs
//! full and reduced integrations side by side.

pub mod actions;
pub mod cli;
pub mod error;
pub mod jacobians;
pub mod lie_core;
pub mod quadrature;
pub mod rng;
pub mod roots;

pub use error::{Error, Result};
