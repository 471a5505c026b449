//! Exact computation of one-parameter Nielsen numbers for fiber-preserving
//! maps of torus bundles over the circle.
//!
//! Two independent routes are provided. The algebraic one builds the
//! cellular operators of a model homotopy, takes the one-parameter trace in
//! twisted Hochschild homology of Z[Z^2] and counts nonzero class indices.
//! The geometric one solves the fixed point congruences of the same
//! piecewise-affine homotopy over the rationals and counts fixed circles.

pub mod classify;
pub mod error;
pub mod geometry;
pub mod hochschild;
pub mod lattice;
pub mod matrix;
pub mod ring;

pub use error::*;
pub mod cells;
pub mod oracle;
pub mod pipeline;
pub mod serde_util;
pub mod trace;
