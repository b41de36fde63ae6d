use nalgebra::{Matrix3, Point3, SymmetricEigen, Vector3};

use crate::mesh::{corner_angles, triangle_area};

/// Longest edge over twice the inradius; `sqrt(3)` for an equilateral
/// triangle, unbounded as the triangle degenerates.
pub fn aspect_ratio(p: &[Point3<f64>; 3]) -> f64 {
    let e = [(p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[0] - p[2]).norm()];
    let semi = 0.5 * (e[0] + e[1] + e[2]);
    let area = triangle_area(p);
    let inradius = area / semi;
    let longest = e[0].max(e[1]).max(e[2]);
    if inradius > 0.0 {
        longest / (2.0 * inradius)
    } else {
        f64::INFINITY
    }
}

/// Smallest interior angle in degrees.
pub fn min_angle_degrees(p: &[Point3<f64>; 3]) -> f64 {
    corner_angles(p)
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .to_degrees()
}

/// Unit direction along which the triangle's vertices spread the most.
pub fn principal_axis(p: &[Point3<f64>; 3]) -> Vector3<f64> {
    let mean = (p[0].coords + p[1].coords + p[2].coords) / 3.0;
    let mut cov = Matrix3::zeros();
    for q in p {
        let d = q.coords - mean;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imax();
    eig.eigenvectors.column(k).into_owned()
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilateral_and_right_triangles() {
        let h = 3f64.sqrt() / 2.0;
        let eq = [Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.5, h, 0.0)];
        assert!((aspect_ratio(&eq) - 3f64.sqrt()).abs() < 1e-12);
        assert!((min_angle_degrees(&eq) - 60.0).abs() < 1e-9);

        let right = [Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        // Inradius of the unit right triangle is (2 - sqrt 2) / 2.
        let expected = 2f64.sqrt() / (2.0 - 2f64.sqrt());
        assert!((aspect_ratio(&right) - expected).abs() < 1e-12);
        assert!((min_angle_degrees(&right) - 45.0).abs() < 1e-9);
    }

    #[test]
    fn principal_axis_of_a_sliver() {
        let t = [Point3::new(0.0, 0.0, 0.0), Point3::new(0.0, 10.0, 0.0), Point3::new(0.3, 5.0, 0.0)];
        let a = principal_axis(&t);
        assert!(a.y.abs() > 0.99);
    }
}
