//! Spherical quasiconformal parameterization of genus-0 triangle meshes
//! with prescribed per-face dilation, and adaptive remeshing built on it.

// Negated float comparisons are used so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
mod error;
pub mod mesh;
pub mod qc;
pub mod remesh;
pub mod spherical;

pub use error::{FsqcError, Result};
pub use mesh::{FaceSelection, TriangleMesh};
pub use qc::{BeltramiField, DilationField, PlanarEmbedding, SphericalEmbedding};
