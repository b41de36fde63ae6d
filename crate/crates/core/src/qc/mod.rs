//! Quasiconformal measurement layer: planar and spherical embeddings,
//! stereographic projections, Beltrami coefficients and dilations.

mod beltrami;
pub mod fields_io;
mod stereo;

use nalgebra::Point3;
use num_complex::Complex64;

use crate::error::{FsqcError, Result};
use crate::mesh::TriangleMesh;

pub use beltrami::{
    affine_beltrami, beltrami_coefficient, dilation_from_mu, dilation_of, dilation_r3,
    max_dilation, mu_from_dilation, surface_beltrami,
};
pub(crate) use beltrami::hat_gradients;
pub(crate) use stereo::{inverse_stereographic_south, stereographic_south};
pub use stereo::{inverse_stereographic, rotation_to_north, stereographic_north};

/// Largest |mu| handed to the elliptic solver.
pub const MU_CAP: f64 = 1.0 - 1e-3;

/// Per-vertex complex coordinates over a fixed face list, optionally with
/// one face marked as the unbounded outer face.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarEmbedding {
    points: Vec<Complex64>,
    faces: Vec<[usize; 3]>,
    outer_face: Option<usize>,
}

impl PlanarEmbedding {
    pub fn new(
        points: Vec<Complex64>,
        faces: Vec<[usize; 3]>,
        outer_face: Option<usize>,
    ) -> Result<Self> {
        let n = points.len();
        for (f, face) in faces.iter().enumerate() {
            if let Some(&index) = face.iter().find(|&&i| i >= n) {
                return Err(FsqcError::IndexOutOfRange {
                    face: f,
                    index,
                    vertex_count: n,
                });
            }
        }
        if let Some(o) = outer_face {
            if o >= faces.len() {
                return Err(FsqcError::InvalidInput(format!(
                    "outer face {o} out of range for {} faces",
                    faces.len()
                )));
            }
        }
        if let Some((i, _)) = points.iter().enumerate().find(|(_, z)| !z.is_finite()) {
            return Err(FsqcError::InvalidInput(format!("vertex {i} is not finite")));
        }
        Ok(Self {
            points,
            faces,
            outer_face,
        })
    }

    /// Drops the z coordinate of a mesh lying in a plane.
    pub fn from_xy(mesh: &TriangleMesh) -> Self {
        Self {
            points: mesh
                .vertices()
                .iter()
                .map(|p| Complex64::new(p.x, p.y))
                .collect(),
            faces: mesh.faces().to_vec(),
            outer_face: None,
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn outer_face(&self) -> Option<usize> {
        self.outer_face
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_points(&self, f: usize) -> [Complex64; 3] {
        self.faces[f].map(|v| self.points[v])
    }

    /// Twice the signed area of face `f` (positive when counter-clockwise).
    pub fn signed_double_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.face_points(f);
        ((b - a).conj() * (c - a)).im
    }

    pub fn with_points(&self, points: Vec<Complex64>) -> Result<Self> {
        if points.len() != self.points.len() {
            return Err(FsqcError::SizeMismatch {
                expected: self.points.len(),
                found: points.len(),
            });
        }
        Self::new(points, self.faces.clone(), self.outer_face)
    }

    pub fn with_outer_face(mut self, outer_face: Option<usize>) -> Result<Self> {
        if matches!(outer_face, Some(o) if o >= self.faces.len()) {
            return Err(FsqcError::InvalidInput("outer face out of range".into()));
        }
        self.outer_face = outer_face;
        Ok(self)
    }

    /// Applies `z -> a * z + b` to every vertex.
    pub fn map_affine(&self, a: Complex64, b: Complex64) -> Self {
        Self {
            points: self.points.iter().map(|&z| a * z + b).collect(),
            faces: self.faces.clone(),
            outer_face: self.outer_face,
        }
    }

    /// Unweighted mean of the vertex coordinates.
    pub fn vertex_mean(&self) -> Complex64 {
        if self.points.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        self.points.iter().sum::<Complex64>() / self.points.len() as f64
    }

    /// Lifts the embedding into the z = 0 plane of R^3.
    pub fn to_mesh(&self) -> TriangleMesh {
        TriangleMesh::new(
            self.points
                .iter()
                .map(|z| Point3::new(z.re, z.im, 0.0))
                .collect(),
            self.faces.clone(),
        )
        .expect("embedding indices were checked")
    }
}

/// Per-vertex points on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalEmbedding {
    points: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
}

impl SphericalEmbedding {
    pub fn new(points: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            let r = p.coords.norm();
            if !((r - 1.0).abs() <= 1e-9) {
                return Err(FsqcError::InvalidInput(format!(
                    "vertex {i} has norm {r}, expected 1"
                )));
            }
        }
        TriangleMesh::new(points.clone(), faces.clone())?;
        Ok(Self { points, faces })
    }

    /// Pushes every vertex of `mesh` radially onto the sphere.
    pub fn from_mesh_radial(mesh: &TriangleMesh) -> Result<Self> {
        let points = mesh
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let r = p.coords.norm();
                if r > 0.0 {
                    Ok(Point3::from(p.coords / r))
                } else {
                    Err(FsqcError::InvalidInput(format!("vertex {i} is at the origin")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            faces: mesh.faces().to_vec(),
        })
    }

    pub fn points(&self) -> &[Point3<f64>] {
        &self.points
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn to_mesh(&self) -> TriangleMesh {
        TriangleMesh::new(self.points.clone(), self.faces.clone())
            .expect("embedding indices were checked")
    }

    /// Faces whose orientation points into the sphere.
    pub fn flipped_faces(&self) -> Vec<usize> {
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, &[a, b, c])| {
                let (p, q, r) = (self.points[a].coords, self.points[b].coords, self.points[c].coords);
                p.dot(&q.cross(&r)) <= 0.0
            })
            .map(|(f, _)| f)
            .collect()
    }
}

/// Per-face Beltrami coefficients, each strictly inside the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct BeltramiField {
    values: Vec<Complex64>,
}

impl BeltramiField {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        for (face, mu) in values.iter().enumerate() {
            let modulus = mu.norm();
            if !(modulus < 1.0) {
                return Err(FsqcError::InvalidBeltrami { face, modulus });
            }
        }
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }
}

/// Per-face quasiconformal dilation K >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationField {
    values: Vec<f64>,
}

impl DilationField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (face, &value) in values.iter().enumerate() {
            if !(value >= 1.0 && value.is_finite()) {
                return Err(FsqcError::InvalidDilation { face, value });
            }
        }
        Ok(Self { values })
    }

    pub fn uniform(len: usize, k: f64) -> Result<Self> {
        Self::new(vec![k; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
