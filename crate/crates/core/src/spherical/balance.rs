use num_complex::Complex64;

use crate::error::{FsqcError, Result};
use crate::qc::PlanarEmbedding;

/// Radii used by [`balancing_scale`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceRadii {
    /// Mean distance of the outer face's vertices from the origin.
    pub outer: f64,
    /// Mean distance from the origin of the vertices of the innermost face,
    /// the non-outer face whose centroid is nearest the origin.
    pub inner: f64,
    pub innermost_face: usize,
}

fn mean_radius(domain: &PlanarEmbedding, f: usize) -> f64 {
    domain.face_points(f).iter().map(|z| z.norm()).sum::<f64>() / 3.0
}

pub fn balance_radii(domain: &PlanarEmbedding) -> Result<BalanceRadii> {
    let outer_face = domain
        .outer_face()
        .ok_or_else(|| FsqcError::InvalidInput("balancing needs a designated outer face".into()))?;
    let mut best: Option<(usize, f64)> = None;
    for f in 0..domain.face_count() {
        if f == outer_face {
            continue;
        }
        let centroid = domain.face_points(f).iter().sum::<Complex64>() / 3.0;
        let d = centroid.norm();
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((f, d));
        }
    }
    let (innermost_face, _) =
        best.ok_or_else(|| FsqcError::InvalidInput("balancing needs a non-outer face".into()))?;
    Ok(BalanceRadii {
        outer: mean_radius(domain, outer_face),
        inner: mean_radius(domain, innermost_face),
        innermost_face,
    })
}

/// Scales the domain by `1 / sqrt(r_out * r_in)` so the outer and innermost
/// faces sit at reciprocal radii, which the inverse stereographic
/// projection sends to triangles of similar size near the two poles.
/// Returns the scaled domain and the factor used (1 when skipped).
pub fn balancing_scale(domain: &PlanarEmbedding) -> Result<(PlanarEmbedding, f64)> {
    let radii = balance_radii(domain)?;
    let product = radii.outer * radii.inner;
    if !(product > 0.0) || !product.is_finite() {
        log::warn!("balancing skipped: innermost radius {} outer radius {}", radii.inner, radii.outer);
        return Ok((domain.clone(), 1.0));
    }
    let s = 1.0 / product.sqrt();
    Ok((domain.map_affine(Complex64::new(s, 0.0), Complex64::new(0.0, 0.0)), s))
}
