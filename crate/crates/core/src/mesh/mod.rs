//! Triangle meshes, topology checks, file formats and per-face geometric
//! primitives shared by the rest of the crate.

pub mod generate;
mod geometry;
pub mod io;
mod validate;

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use crate::error::{FsqcError, Result};

pub use geometry::{
    corner_angles, cotangent_weights, face_regularity_scores, isometric_face_embedding,
    most_regular_face, triangle_area, EdgeWeightField,
};
pub use validate::{validate_genus0, ValidationReport, Violation};

/// An indexed triangle mesh in R^3.
///
/// Construction only checks that face indices are in range; topology is
/// checked separately with [`validate_genus0`].
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        for (f, face) in faces.iter().enumerate() {
            if let Some(&index) = face.iter().find(|&&i| i >= n) {
                return Err(FsqcError::IndexOutOfRange {
                    face: f,
                    index,
                    vertex_count: n,
                });
            }
        }
        Ok(Self { vertices, faces })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        undirected_edges(&self.faces).len()
    }

    pub fn face_points(&self, f: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Same connectivity, new positions.
    pub fn with_vertices(&self, vertices: Vec<Point3<f64>>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(FsqcError::SizeMismatch {
                expected: self.vertices.len(),
                found: vertices.len(),
            });
        }
        Ok(Self {
            vertices,
            faces: self.faces.clone(),
        })
    }

    /// Same positions, new connectivity.
    pub fn with_faces(&self, faces: Vec<[usize; 3]>) -> Result<Self> {
        Self::new(self.vertices.clone(), faces)
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        bounding_box_diagonal(&self.vertices)
    }

    /// Area threshold below which a face counts as degenerate.
    pub fn degenerate_area_tolerance(&self) -> f64 {
        let d = self.bounding_box_diagonal();
        1e-12 * d * d
    }

    /// Signed volume enclosed by the surface (positive for outward faces).
    pub fn signed_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|&[a, b, c]| {
                let (p, q, r) = (
                    self.vertices[a].coords,
                    self.vertices[b].coords,
                    self.vertices[c].coords,
                );
                p.dot(&q.cross(&r)) / 6.0
            })
            .sum()
    }

    pub fn face_normal(&self, f: usize) -> Vector3<f64> {
        let [p, q, r] = self.face_points(f);
        (q - p).cross(&(r - p))
    }

    /// Returns true if the two meshes have identical face lists.
    pub fn same_connectivity(&self, other: &TriangleMesh) -> bool {
        self.vertices.len() == other.vertices.len() && self.faces == other.faces
    }

    /// For every face, the face sharing each of its edges (`None` on a
    /// boundary or non-manifold edge). Entry `i` is the neighbour across
    /// the edge `(face[i], face[(i + 1) % 3])`.
    pub fn face_neighbours(&self) -> Vec<[Option<usize>; 3]> {
        face_neighbours(&self.faces)
    }
}

/// A set of face indices, kept sorted and unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaceSelection {
    faces: Vec<usize>,
}

impl FaceSelection {
    pub fn new(mut faces: Vec<usize>, face_count: usize) -> Result<Self> {
        faces.sort_unstable();
        if faces.windows(2).any(|w| w[0] == w[1]) {
            return Err(FsqcError::InvalidInput(
                "face selection contains duplicate indices".into(),
            ));
        }
        if let Some(&bad) = faces.last().filter(|&&f| f >= face_count) {
            return Err(FsqcError::InvalidInput(format!(
                "face selection index {bad} out of range for {face_count} faces"
            )));
        }
        Ok(Self { faces })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(face: usize) -> Self {
        Self { faces: vec![face] }
    }

    pub fn contains(&self, face: usize) -> bool {
        self.faces.binary_search(&face).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Boolean mask over all faces.
    pub fn mask(&self, face_count: usize) -> Vec<bool> {
        let mut mask = vec![false; face_count];
        for &f in &self.faces {
            if f < face_count {
                mask[f] = true;
            }
        }
        mask
    }
}

pub(crate) fn bounding_box_diagonal(points: &[Point3<f64>]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut lo = points[0].coords;
    let mut hi = lo;
    for p in points {
        lo = lo.inf(&p.coords);
        hi = hi.sup(&p.coords);
    }
    (hi - lo).norm()
}

/// Sorted list of undirected edges `(u, v)` with `u < v`.
pub(crate) fn undirected_edges(faces: &[[usize; 3]]) -> Vec<[usize; 2]> {
    let mut edges: Vec<[usize; 2]> = faces
        .iter()
        .flat_map(|&[a, b, c]| [[a, b], [b, c], [c, a]])
        .map(|[u, v]| if u < v { [u, v] } else { [v, u] })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Vertices on edges used by exactly one face, sorted.
pub fn boundary_vertices(faces: &[[usize; 3]]) -> Vec<usize> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 2);
    for &[a, b, c] in faces {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            *count.entry((u.min(v), u.max(v))).or_insert(0) += 1;
        }
    }
    let mut out: Vec<usize> = count
        .into_iter()
        .filter(|&(_, n)| n == 1)
        .flat_map(|((u, v), _)| [u, v])
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub(crate) fn face_neighbours(faces: &[[usize; 3]]) -> Vec<[Option<usize>; 3]> {
    let mut undirected: HashMap<(usize, usize), Vec<usize>> = HashMap::with_capacity(faces.len() * 2);
    for (f, face) in faces.iter().enumerate() {
        for i in 0..3 {
            let (u, v) = (face[i], face[(i + 1) % 3]);
            undirected.entry((u.min(v), u.max(v))).or_default().push(f);
        }
    }
    faces
        .iter()
        .enumerate()
        .map(|(f, face)| {
            let mut out = [None; 3];
            for (i, slot) in out.iter_mut().enumerate() {
                let (u, v) = (face[i], face[(i + 1) % 3]);
                if let Some(list) = undirected.get(&(u.min(v), u.max(v))) {
                    if list.len() == 2 {
                        *slot = list.iter().copied().find(|&g| g != f);
                    }
                }
            }
            out
        })
        .collect()
}
