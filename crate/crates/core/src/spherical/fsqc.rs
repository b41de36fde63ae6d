use num_complex::Complex64;

use super::{balancing_scale, boundary_map_coefficients, init::ensure_genus0, spherical_conformal_init_with};
use crate::elliptic::{assemble_generalized_laplacian, solve_dirichlet_with, SolverOptions};
use crate::error::{FsqcError, Result, StageExt};
use crate::mesh::{most_regular_face, FaceSelection, TriangleMesh};
use crate::qc::{
    inverse_stereographic, mu_from_dilation, rotation_to_north, stereographic_north, DilationField,
    PlanarEmbedding, SphericalEmbedding,
};

/// Which way the stretch of a real positive Beltrami coefficient is turned
/// relative to the `p1 -> p2` direction in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StretchAxis {
    /// The plane is rotated by `exp(-i theta)`: `p1 -> p2` lands on the
    /// positive real axis, the stretch direction.
    #[default]
    Along,
    /// The plane is rotated by `exp(i (pi/2 - theta))`: `p1 -> p2` lands on
    /// the imaginary axis, across the stretch.
    Across,
}

/// Optional principal direction for the quasiconformal stretch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Direction {
    pub p1: usize,
    pub p2: usize,
    pub axis: StretchAxis,
}

/// Argument of `z(p2) - z(p1)` in `(-pi, pi]`.
pub fn principal_rotation_angle(planar: &PlanarEmbedding, p1: usize, p2: usize) -> Result<f64> {
    let n = planar.vertex_count();
    if p1 >= n || p2 >= n {
        return Err(FsqcError::InvalidInput(format!(
            "direction vertices ({p1}, {p2}) out of range for {n} vertices"
        )));
    }
    let d = planar.points()[p2] - planar.points()[p1];
    if d.norm() == 0.0 {
        return Err(FsqcError::CoincidentPoints);
    }
    // atan2 returns -pi for a negative zero imaginary part.
    let theta = d.im.atan2(d.re);
    Ok(if theta == -std::f64::consts::PI { std::f64::consts::PI } else { theta })
}

/// Output of [`fsqc_parameterize`] with its diagnostics.
#[derive(Debug, Clone)]
pub struct FsqcOutput {
    pub sphere: SphericalEmbedding,
    /// Face sent to the unbounded region of the plane.
    pub outer_face: usize,
    /// Planar domain after translation and balancing.
    pub planar: PlanarEmbedding,
    pub rotation_angle: Option<f64>,
    pub flipped_faces: usize,
    /// Vertices that ended up outside the image of the outer face's
    /// triangle.
    pub outlying_vertices: usize,
    pub solver_residual: f64,
}

fn inside_triangle(p: Complex64, t: &[Complex64; 3]) -> bool {
    let side = |a: Complex64, b: Complex64| ((b - a).conj() * (p - a)).im;
    let s = [side(t[0], t[1]), side(t[1], t[2]), side(t[2], t[0])];
    s.iter().all(|&v| v >= 0.0) || s.iter().all(|&v| v <= 0.0)
}

/// Spherical parameterization of `mesh` whose per-face dilation follows
/// `target`.
pub fn fsqc_parameterize(
    mesh: &TriangleMesh,
    target: &DilationField,
    direction: Option<Direction>,
) -> Result<FsqcOutput> {
    fsqc_parameterize_with(mesh, target, direction, &SolverOptions::default())
}

pub fn fsqc_parameterize_with(
    mesh: &TriangleMesh,
    target: &DilationField,
    direction: Option<Direction>,
    options: &SolverOptions,
) -> Result<FsqcOutput> {
    if target.len() != mesh.face_count() {
        return Err(FsqcError::SizeMismatch {
            expected: mesh.face_count(),
            found: target.len(),
        })
        .stage("validate");
    }
    ensure_genus0(mesh).stage("validate")?;
    if let Some(d) = direction {
        if d.p1 == d.p2 {
            return Err(FsqcError::InvalidInput("p1 and p2 must differ".into())).stage("validate");
        }
    }
    let conformal = spherical_conformal_init_with(mesh, options).stage("conformal initialization")?;
    fsqc_from_sphere(&conformal, target, direction, options)
}

/// The quasiconformal stage on its own, starting from a conformal sphere.
pub fn fsqc_from_sphere(
    conformal: &SphericalEmbedding,
    target: &DilationField,
    direction: Option<Direction>,
    options: &SolverOptions,
) -> Result<FsqcOutput> {
    let sphere_mesh = conformal.to_mesh();
    let faces = sphere_mesh.faces().to_vec();
    let outer = most_regular_face(&sphere_mesh).ok_or(FsqcError::InvalidInput("empty mesh".into()))?;
    let tri = faces[outer];

    let centroid = tri
        .iter()
        .map(|&v| conformal.points()[v].coords)
        .sum::<nalgebra::Vector3<f64>>()
        / 3.0;
    let rot = rotation_to_north(&centroid).stage("projection")?;
    let z = conformal
        .points()
        .iter()
        .map(|p| stereographic_north(&(rot * p)))
        .collect::<Result<Vec<_>>>()
        .stage("projection")?;
    let mut planar = PlanarEmbedding::new(z, faces.clone(), Some(outer))?;

    let mut rotation_angle = None;
    if let Some(d) = direction {
        let theta = principal_rotation_angle(&planar, d.p1, d.p2).stage("direction")?;
        let turn = match d.axis {
            StretchAxis::Along => -theta,
            StretchAxis::Across => std::f64::consts::FRAC_PI_2 - theta,
        };
        planar = planar.map_affine(Complex64::from_polar(1.0, turn), Complex64::new(0.0, 0.0));
        rotation_angle = Some(theta);
    }

    let mu = mu_from_dilation(target);
    let pts = planar.face_points(outer);
    let h = boundary_map_coefficients(pts[0], pts[1], target.values()[outer]).stage("boundary map")?;
    let constraints = [(tri[0], pts[0]), (tri[1], pts[1]), (tri[2], h.apply(pts[2]))];
    let op = assemble_generalized_laplacian(&planar, &mu, &FaceSelection::single(outer))
        .stage("beltrami solve")?;
    let solution = solve_dirichlet_with(&op, &constraints, options).stage("beltrami solve")?;
    let w = solution.values;

    let big = tri.map(|v| w[v]);
    let outlying = (0..w.len())
        .filter(|&v| !tri.contains(&v) && !inside_triangle(w[v], &big))
        .count();
    if outlying > 0 {
        log::warn!("{outlying} vertices lie outside the outer triangle after the Beltrami solve");
    }

    let solved = planar.with_points(w)?;
    let centre = solved.vertex_mean();
    let solved = solved.map_affine(Complex64::new(1.0, 0.0), -centre);
    let (balanced, _) = balancing_scale(&solved).stage("balancing")?;
    let points: Vec<_> = balanced.points().iter().map(|&z| inverse_stereographic(z)).collect();
    let sphere = SphericalEmbedding::new(points, faces).stage("inverse projection")?;

    let flipped = sphere.flipped_faces().len();
    if flipped > 0 {
        log::warn!("{flipped} flipped faces in the spherical parameterization");
    }
    Ok(FsqcOutput {
        sphere,
        outer_face: outer,
        planar: balanced,
        rotation_angle,
        flipped_faces: flipped,
        outlying_vertices: outlying,
        solver_residual: solution.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar(d: Complex64) -> PlanarEmbedding {
        PlanarEmbedding::new(
            vec![Complex64::new(0.3, 0.3), Complex64::new(0.3, 0.3) + d, Complex64::new(5.0, 5.0)],
            vec![[0, 1, 2]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn rotation_angle_examples() {
        use std::f64::consts::{FRAC_PI_2, PI};
        assert_eq!(principal_rotation_angle(&planar(Complex64::new(1.0, 0.0)), 0, 1).unwrap(), 0.0);
        let t = principal_rotation_angle(&planar(Complex64::new(0.0, 1.0)), 0, 1).unwrap();
        assert!((t - FRAC_PI_2).abs() < 1e-15);
        let rotated = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, -t);
        assert!(rotated.im.abs() < 1e-15 && rotated.re > 0.0);
        assert_eq!(principal_rotation_angle(&planar(Complex64::new(-2.0, 0.0)), 0, 1).unwrap(), PI);
        assert_eq!(principal_rotation_angle(&planar(Complex64::new(-2.0, -0.0)), 0, 1).unwrap(), PI);
        assert!(principal_rotation_angle(&planar(Complex64::new(0.0, 0.0)), 0, 1).is_err());
    }

    #[test]
    fn inside_test() {
        let t = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        assert!(inside_triangle(Complex64::new(0.2, 0.2), &t));
        assert!(!inside_triangle(Complex64::new(0.8, 0.8), &t));
        let r = [t[0], t[2], t[1]];
        assert!(inside_triangle(Complex64::new(0.2, 0.2), &r));
    }
}
