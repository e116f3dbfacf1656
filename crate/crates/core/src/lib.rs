//! Sextactic points of closed convex plane curves, the third-order periodic
//! equation of a curve's projective lift, and zero-count certificates for
//! functions orthogonal to solutions of disconjugate periodic equations.
//!
//! The runnable programs in `examples/` walk through each stage.

pub mod affine;
pub mod cli;
pub mod curve;
pub mod error;
pub mod input;
pub mod integrate;
pub mod periodic;
pub mod projective;
pub mod report;
pub mod sextactic;
pub mod settings;
pub mod sturm;
pub mod svg;
