use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_3;

use nalgebra::Point3;
use num_complex::Complex64;
use rayon::prelude::*;

use super::TriangleMesh;
use crate::error::{FsqcError, Result};

pub fn triangle_area(p: &[Point3<f64>; 3]) -> f64 {
    0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm()
}

/// Interior angles at the three corners, in radians.
pub fn corner_angles(p: &[Point3<f64>; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, angle) in out.iter_mut().enumerate() {
        let a = p[(k + 1) % 3] - p[k];
        let b = p[(k + 2) % 3] - p[k];
        *angle = a.cross(&b).norm().atan2(a.dot(&b));
    }
    out
}

/// Cotangent of the angle at corner `k`.
pub(crate) fn corner_cot(p: &[Point3<f64>; 3], k: usize) -> f64 {
    let a = p[(k + 1) % 3] - p[k];
    let b = p[(k + 2) % 3] - p[k];
    a.dot(&b) / a.cross(&b).norm()
}

/// Per-edge cotangent weights `k_uv = cot(alpha) + cot(beta)`.
///
/// Edges are stored as sorted `(u, v)` pairs with `u < v`. On an open mesh a
/// boundary edge carries a single cotangent.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeightField {
    edges: Vec<[usize; 2]>,
    weights: Vec<f64>,
}

impl EdgeWeightField {
    pub fn get(&self, u: usize, v: usize) -> Option<f64> {
        let key = if u < v { [u, v] } else { [v, u] };
        self.edges
            .binary_search(&key)
            .ok()
            .map(|i| self.weights[i])
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([usize; 2], f64)> + '_ {
        self.edges.iter().copied().zip(self.weights.iter().copied())
    }
}

pub fn cotangent_weights(mesh: &TriangleMesh) -> Result<EdgeWeightField> {
    let tol = mesh.degenerate_area_tolerance();
    let mut acc: BTreeMap<[usize; 2], f64> = BTreeMap::new();
    for (f, face) in mesh.faces().iter().enumerate() {
        let p = mesh.face_points(f);
        if triangle_area(&p) <= tol {
            return Err(FsqcError::DegenerateFace { face: f });
        }
        for k in 0..3 {
            let (u, v) = (face[(k + 1) % 3], face[(k + 2) % 3]);
            *acc.entry([u.min(v), u.max(v)]).or_insert(0.0) += corner_cot(&p, k);
        }
    }
    let (edges, weights) = acc.into_iter().unzip();
    Ok(EdgeWeightField { edges, weights })
}

fn angle_deviation(p: &[Point3<f64>; 3]) -> f64 {
    corner_angles(p)
        .iter()
        .map(|a| (a - FRAC_PI_3).powi(2))
        .sum()
}

/// Regularity score of every face: the squared deviation of corner angles
/// from 60 degrees, summed over the face and its edge-adjacent faces.
pub fn face_regularity_scores(mesh: &TriangleMesh) -> Vec<f64> {
    let own: Vec<f64> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| angle_deviation(&mesh.face_points(f)))
        .collect();
    let neighbours = mesh.face_neighbours();
    neighbours
        .iter()
        .enumerate()
        .map(|(f, adj)| own[f] + adj.iter().flatten().map(|&g| own[g]).sum::<f64>())
        .collect()
}

/// The face whose 1-ring is closest to equilateral; ties go to the lowest
/// index.
pub fn most_regular_face(mesh: &TriangleMesh) -> Option<usize> {
    let scores = face_regularity_scores(mesh);
    let mut best: Option<(usize, f64)> = None;
    for (f, &s) in scores.iter().enumerate() {
        match best {
            Some((_, b)) if s >= b => {}
            _ => best = Some((f, s)),
        }
    }
    best.map(|(f, _)| f)
}

/// Lays a 3D triangle flat in the complex plane: `p1` at the origin, `p2`
/// on the positive real axis and `p3` in the upper half-plane.
pub fn isometric_face_embedding(
    p1: &Point3<f64>,
    p2: &Point3<f64>,
    p3: &Point3<f64>,
) -> Result<[Complex64; 3]> {
    let e1 = p2 - p1;
    let e2 = p3 - p1;
    let l1 = e1.norm();
    let cross = e1.cross(&e2).norm();
    if l1 == 0.0 || !(cross > 1e-12 * l1 * e2.norm()) {
        return Err(FsqcError::DegenerateTriangle);
    }
    let x = e1.dot(&e2) / l1;
    let y = cross / l1;
    Ok([Complex64::new(0.0, 0.0), Complex64::new(l1, 0.0), Complex64::new(x, y)])
}
