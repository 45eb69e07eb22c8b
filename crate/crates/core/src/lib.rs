//! Boundary integral solver for the biharmonic Dirichlet problem in the plane.
//!
//! The clamped-plate problem `Δ²w = 0`, `w = f`, `∂w/∂n = g` is recast as a
//! Stokes velocity problem for the stream function `w`, represented by the
//! completed Stokes double layer plus one biharmonic charge `r² log r` per
//! hole, and closed with one mean-value constraint per boundary component.

pub mod assembly;
pub mod driver;
pub mod error;
pub mod field_eval;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod stream_eval;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
