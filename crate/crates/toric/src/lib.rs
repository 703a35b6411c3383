//! Exact polyhedral machinery for complete simplicial toric fans.
//!
//! The crate decides, with certified exact arithmetic, whether the Seshadri
//! constant of the tangent sheaf at the torus identity of a complete toric
//! variety is positive, and provides the supporting fan combinatorics:
//! validation, completeness, smoothness, projectivity, primitive collections,
//! and intersection numbers against the torus-invariant curves.

pub mod fan;
pub mod intersection;
pub mod linalg;
pub mod lp;
pub mod positivity;
pub mod sampling;

pub use linalg::{Int, IntMatrix, IntVec, Rat};
