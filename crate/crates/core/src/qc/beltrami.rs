use nalgebra::{Point3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{BeltramiField, DilationField, PlanarEmbedding, MU_CAP};
use crate::error::{FsqcError, Result};
use crate::mesh::{isometric_face_embedding, TriangleMesh};

/// Gradients of the three linear hat functions on a planar triangle, as
/// `(d/dx, d/dy, signed area)`. `None` when the triangle is degenerate
/// relative to its own size.
pub(crate) fn hat_gradients(z: &[Complex64; 3]) -> Option<([f64; 3], [f64; 3], f64)> {
    let [z1, z2, z3] = *z;
    let double_area = ((z2 - z1).conj() * (z3 - z1)).im;
    let longest = (z2 - z1)
        .norm_sqr()
        .max((z3 - z2).norm_sqr())
        .max((z1 - z3).norm_sqr());
    if !(double_area.abs() > 2e-12 * longest) || !double_area.is_finite() {
        return None;
    }
    let dx = [z2.im - z3.im, z3.im - z1.im, z1.im - z2.im].map(|v| v / double_area);
    let dy = [z3.re - z2.re, z1.re - z3.re, z2.re - z1.re].map(|v| v / double_area);
    Some((dx, dy, 0.5 * double_area))
}

enum FaceIssue {
    Degenerate,
    Derivative,
}

fn affine_mu(z: &[Complex64; 3], w: &[Complex64; 3]) -> Result<Complex64, FaceIssue> {
    let (dx, dy, _) = hat_gradients(z).ok_or(FaceIssue::Degenerate)?;
    let fx: Complex64 = (0..3).map(|k| w[k] * dx[k]).sum();
    let fy: Complex64 = (0..3).map(|k| w[k] * dy[k]).sum();
    let i = Complex64::i();
    let num = fx + i * fy;
    let den = fx - i * fy;
    let scale = fx.norm() + fy.norm();
    if !(den.norm() > 1e-14 * scale) {
        return Err(FaceIssue::Derivative);
    }
    Ok(num / den)
}

/// Beltrami coefficient of the affine map taking triangle `source` to
/// triangle `target`. Orientation reversing maps give |mu| > 1.
pub fn affine_beltrami(source: &[Complex64; 3], target: &[Complex64; 3]) -> Result<Complex64> {
    affine_mu(source, target).map_err(|e| match e {
        FaceIssue::Degenerate => FsqcError::DegenerateTriangle,
        FaceIssue::Derivative => FsqcError::DegenerateDerivative { face: 0 },
    })
}

/// Beltrami coefficient of the linear map from a planar triangle onto a
/// triangle in R^3, taking the surface orientation that makes the map
/// orientation preserving. Always |mu| < 1 for a non-degenerate target.
pub fn surface_beltrami(source: &[Complex64; 3], target: &[Point3<f64>; 3]) -> Result<Complex64> {
    let (dx, dy, _) = hat_gradients(source).ok_or(FsqcError::DegenerateTriangle)?;
    let mut gx = Vector3::zeros();
    let mut gy = Vector3::zeros();
    for k in 0..3 {
        gx += target[k].coords * dx[k];
        gy += target[k].coords * dy[k];
    }
    let (e, f, g) = (gx.norm_squared(), gx.dot(&gy), gy.norm_squared());
    let jac = gx.cross(&gy).norm();
    if !(jac > 1e-14 * (e + g)) {
        return Err(FsqcError::DegenerateTriangle);
    }
    Ok(Complex64::new(e - g, 2.0 * f) / (e + g + 2.0 * jac))
}

fn face_issue(face: usize, issue: FaceIssue) -> FsqcError {
    match issue {
        FaceIssue::Degenerate => FsqcError::DegenerateFace { face },
        FaceIssue::Derivative => FsqcError::DegenerateDerivative { face },
    }
}

/// Per-face Beltrami coefficient of the piecewise linear map `source -> target`.
pub fn beltrami_coefficient(
    source: &PlanarEmbedding,
    target: &PlanarEmbedding,
) -> Result<BeltramiField> {
    if source.faces() != target.faces() || source.vertex_count() != target.vertex_count() {
        return Err(FsqcError::InvalidInput(
            "source and target embeddings have different connectivity".into(),
        ));
    }
    let values = (0..source.face_count())
        .into_par_iter()
        .map(|f| {
            affine_mu(&source.face_points(f), &target.face_points(f))
                .map_err(|e| face_issue(f, e))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    BeltramiField::new(values)
}

/// `(1 + |mu|) / (1 - |mu|)`.
pub fn dilation_of(mu: Complex64) -> f64 {
    let m = mu.norm();
    (1.0 + m) / (1.0 - m)
}

pub fn dilation_from_mu(field: &BeltramiField) -> Result<DilationField> {
    DilationField::new(field.values().iter().map(|&mu| dilation_of(mu)).collect())
}

/// Real nonnegative `mu = (K - 1) / (K + 1)`, capped at [`MU_CAP`].
pub fn mu_from_dilation(field: &DilationField) -> BeltramiField {
    let values = field
        .values()
        .iter()
        .map(|&k| Complex64::new(((k - 1.0) / (k + 1.0)).min(MU_CAP), 0.0))
        .collect();
    BeltramiField::new(values).expect("capped coefficients lie inside the unit disk")
}

pub fn max_dilation(field: &DilationField) -> Result<f64> {
    field
        .values()
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(FsqcError::EmptyField)
}

/// Per-face dilation of the piecewise linear map between two meshes with
/// the same connectivity, measured through isometric face embeddings.
pub fn dilation_r3(source: &TriangleMesh, target: &TriangleMesh) -> Result<DilationField> {
    if !source.same_connectivity(target) {
        return Err(FsqcError::InvalidInput(
            "source and target meshes have different connectivity".into(),
        ));
    }
    let values = (0..source.face_count())
        .into_par_iter()
        .map(|f| {
            let degenerate = |_| FsqcError::DegenerateFace { face: f };
            let [a, b, c] = source.face_points(f);
            let z = isometric_face_embedding(&a, &b, &c).map_err(degenerate)?;
            let [a, b, c] = target.face_points(f);
            let w = isometric_face_embedding(&a, &b, &c).map_err(degenerate)?;
            let mu = affine_mu(&z, &w).map_err(|e| face_issue(f, e))?;
            Ok(dilation_of(mu))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    DilationField::new(values)
}
