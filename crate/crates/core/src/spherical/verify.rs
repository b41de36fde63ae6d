use std::fmt;

use crate::error::{FsqcError, Result};
use crate::mesh::TriangleMesh;
use crate::qc::{dilation_r3, DilationField, SphericalEmbedding};

pub const HISTOGRAM_BINS: usize = 64;

/// One histogram bin over `[lo, hi)`; the last bin also takes everything
/// above its upper edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Target versus achieved dilation of a spherical parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationReport {
    pub faces: usize,
    pub target_mean: f64,
    pub target_sd: f64,
    pub target_max: f64,
    pub mean: f64,
    pub sd: f64,
    pub max: f64,
    /// `mean - target_mean`.
    pub mean_drift: f64,
    /// `sd - target_sd`.
    pub sd_drift: f64,
    /// Mean of `|K_achieved - K_target|` over faces.
    pub mean_abs_error: f64,
    pub flipped_faces: usize,
    pub histogram: Vec<HistogramBin>,
    /// Per-face achieved dilation.
    pub per_face: Vec<f64>,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<HistogramBin> {
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lo: lo + i as f64 * width,
            hi: if i + 1 == bins { hi } else { lo + (i + 1) as f64 * width },
            count: 0,
        })
        .collect();
    for &v in values {
        let i = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
        out[i].count += 1;
    }
    out
}

/// Measures the per-face dilation of `mesh -> sphere` and compares it with
/// the target field.
pub fn verify_dilation(
    mesh: &TriangleMesh,
    sphere: &SphericalEmbedding,
    target: &DilationField,
) -> Result<DilationReport> {
    if target.len() != mesh.face_count() {
        return Err(FsqcError::SizeMismatch {
            expected: mesh.face_count(),
            found: target.len(),
        });
    }
    if target.is_empty() {
        return Err(FsqcError::EmptyField);
    }
    let achieved = dilation_r3(mesh, &sphere.to_mesh())?;
    let per_face = achieved.values().to_vec();
    let (mean, sd) = mean_sd(&per_face);
    let (target_mean, target_sd) = mean_sd(target.values());
    let target_max = target.values().iter().copied().fold(1.0, f64::max);
    let max = per_face.iter().copied().fold(1.0, f64::max);
    let mean_abs_error = per_face
        .iter()
        .zip(target.values())
        .map(|(a, t)| (a - t).abs())
        .sum::<f64>()
        / per_face.len() as f64;
    let hi = (1.2 * target_max).max(8.0);
    Ok(DilationReport {
        faces: per_face.len(),
        target_mean,
        target_sd,
        target_max,
        mean,
        sd,
        max,
        mean_drift: mean - target_mean,
        sd_drift: sd - target_sd,
        mean_abs_error,
        flipped_faces: sphere.flipped_faces().len(),
        histogram: histogram(&per_face, 1.0, hi, HISTOGRAM_BINS),
        per_face,
    })
}

impl fmt::Display for DilationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "faces            {}", self.faces)?;
        writeln!(f, "target   mean/SD {:.4} / {:.4}", self.target_mean, self.target_sd)?;
        writeln!(f, "achieved mean/SD {:.4} / {:.4}", self.mean, self.sd)?;
        writeln!(f, "mean drift       {:+.4}", self.mean_drift)?;
        writeln!(f, "SD drift         {:+.4}", self.sd_drift)?;
        writeln!(f, "max dilation     {:.4}", self.max)?;
        write!(f, "flipped faces    {}", self.flipped_faces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;
    use nalgebra::Rotation3;

    #[test]
    fn rigid_motion_of_a_sphere_mesh() {
        let mesh = generate::icosphere(2);
        let rot = Rotation3::from_euler_angles(0.4, 1.0, -0.3);
        let sphere = SphericalEmbedding::new(
            mesh.vertices().iter().map(|p| rot * p).collect(),
            mesh.faces().to_vec(),
        )
        .unwrap();
        let target = DilationField::uniform(mesh.face_count(), 1.0).unwrap();
        let r = verify_dilation(&mesh, &sphere, &target).unwrap();
        assert!((r.mean - 1.0).abs() < 1e-12);
        assert!(r.sd < 1e-12);
        assert_eq!(r.flipped_faces, 0);
        assert_eq!(r.histogram.len(), 64);
        assert_eq!(r.histogram[0].count, mesh.face_count());
        assert_eq!(r.histogram[63].hi, 8.0);
    }

    #[test]
    fn histogram_clamps() {
        let h = histogram(&[0.5, 1.0, 2.0, 100.0], 1.0, 3.0, 4);
        assert_eq!(h.iter().map(|b| b.count).collect::<Vec<_>>(), vec![2, 0, 1, 1]);
        assert_eq!(h[1].lo, 1.5);
    }
}
