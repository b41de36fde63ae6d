use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use super::balancing_scale;
use crate::elliptic::{assemble_generalized_laplacian, cotangent_laplacian, solve_dirichlet_with, SolverOptions};
use crate::error::{FsqcError, Result, StageExt};
use crate::mesh::{most_regular_face, validate_genus0, FaceSelection, TriangleMesh};
use crate::qc::{
    inverse_stereographic, inverse_stereographic_south, stereographic_south, surface_beltrami,
    BeltramiField, PlanarEmbedding, SphericalEmbedding, MU_CAP,
};

/// Circumradius of the triangle the first face is pinned to.
const BIG_TRIANGLE_RADIUS: f64 = 1e4;

pub(crate) fn ensure_genus0(mesh: &TriangleMesh) -> Result<()> {
    let report = validate_genus0(mesh);
    if report.passed() {
        Ok(())
    } else {
        Err(FsqcError::NotGenusZero(report.to_string()))
    }
}

/// Conformal map of a genus-0 mesh onto the unit sphere.
///
/// The most regular face is pinned to a large equilateral triangle and the
/// rest of the surface is mapped harmonically inside it. After balancing
/// and lifting to the sphere, the cap around the north pole (where the
/// pinned triangle went) carries most of the distortion; it is removed by
/// a quasiconformal correction in the south-pole chart with the southern
/// tenth of the vertices held in place.
pub fn spherical_conformal_init(mesh: &TriangleMesh) -> Result<SphericalEmbedding> {
    spherical_conformal_init_with(mesh, &SolverOptions::default())
}

pub fn spherical_conformal_init_with(mesh: &TriangleMesh, options: &SolverOptions) -> Result<SphericalEmbedding> {
    ensure_genus0(mesh).stage("validate")?;
    let n = mesh.vertex_count();
    let big = most_regular_face(mesh).ok_or(FsqcError::InvalidInput("empty mesh".into()))?;

    let laplacian = cotangent_laplacian(mesh).stage("harmonic map")?;
    let face = mesh.faces()[big];
    let corners: Vec<(usize, Complex64)> = (0..3)
        .map(|k| {
            let angle = std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::TAU / 3.0;
            (face[k], Complex64::from_polar(BIG_TRIANGLE_RADIUS, angle))
        })
        .collect();
    let z = solve_dirichlet_with(&laplacian, &corners, options)
        .stage("harmonic map")?
        .values;

    let planar = PlanarEmbedding::new(z, mesh.faces().to_vec(), Some(big))?;
    let centre = planar.vertex_mean();
    let planar = planar.map_affine(Complex64::new(1.0, 0.0), -centre);
    let (planar, _) = balancing_scale(&planar).stage("balancing")?;
    let mut sphere: Vec<_> = planar.points().iter().map(|&z| inverse_stereographic(z)).collect();
    // A vertex sitting on the south pole has no image in the south chart;
    // tilting the sphere slightly moves it off without changing angles.
    if sphere.iter().any(|p| 1.0 + p.z < 1e-9) {
        let tilt = Rotation3::from_axis_angle(&Vector3::x_axis(), 1e-2);
        for p in sphere.iter_mut() {
            *p = tilt * *p;
        }
    }

    // South-pole correction.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sphere[a].z.total_cmp(&sphere[b].z).then(a.cmp(&b)));
    let fixed_count = ((n as f64 / 10.0).round() as usize).max(3).min(n);
    let w = sphere
        .iter()
        .map(stereographic_south)
        .collect::<Result<Vec<_>>>()
        .stage("south-pole correction")?;
    let mu = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| {
            let src = mesh.faces()[f].map(|v| w[v]);
            surface_beltrami(&src, &mesh.face_points(f))
                .map(|mu| {
                    if mu.norm() > MU_CAP {
                        mu * (MU_CAP / mu.norm())
                    } else {
                        mu
                    }
                })
                .map_err(|_| FsqcError::DegenerateFace { face: f })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .stage("south-pole correction")?;
    let domain = PlanarEmbedding::new(w.clone(), mesh.faces().to_vec(), None)?;
    let op = assemble_generalized_laplacian(&domain, &BeltramiField::new(mu)?, &FaceSelection::empty())
        .stage("south-pole correction")?;
    let constraints: Vec<(usize, Complex64)> = order[..fixed_count].iter().map(|&v| (v, w[v])).collect();
    let corrected = solve_dirichlet_with(&op, &constraints, options)
        .stage("south-pole correction")?
        .values;
    let points: Vec<_> = corrected.into_iter().map(inverse_stereographic_south).collect();

    let result = SphericalEmbedding::new(points, mesh.faces().to_vec())?;
    let flipped = result.flipped_faces().len();
    if flipped > 0 {
        return Err(FsqcError::Flipped { count: flipped }).stage("conformal initialization");
    }
    Ok(result)
}
