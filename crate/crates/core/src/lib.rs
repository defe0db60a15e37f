//! Complete hyperbolic structures on 1-vertex ideal triangulations.
//!
//! The volume functional is maximized over the angle-structure polytope; when the
//! maximum sits on the boundary, flat tetrahedra are removed with angle-preserving
//! Pachner moves and the maximization resumes.

pub mod angles;
pub mod bench;
pub mod exec;
pub mod fixtures;
pub mod geometric;
pub mod isosig;
pub mod lobachevsky;
pub mod lp;
pub mod moves;
pub mod perm;
pub mod pipeline;
pub mod search;
pub mod shape;
pub mod skeleton;
pub mod triangulation;
pub mod volume;

pub use exec::Exec;
pub use perm::Perm4;
pub use triangulation::{FaceGluing, Tetrahedron, Triangulation, TriangulationError};
