use nalgebra::{Matrix3, Point3, Rotation3, Vector3};
use num_complex::Complex64;

use crate::error::{FsqcError, Result};

/// Stereographic projection from the north pole `(0, 0, 1)`.
pub fn stereographic_north(p: &Point3<f64>) -> Result<Complex64> {
    let denom = 1.0 - p.z;
    if denom < 1e-12 {
        return Err(FsqcError::NorthPole);
    }
    Ok(Complex64::new(p.x / denom, p.y / denom))
}

/// Inverse of [`stereographic_north`].
pub fn inverse_stereographic(z: Complex64) -> Point3<f64> {
    let r2 = z.norm_sqr();
    let s = 1.0 / (r2 + 1.0);
    Point3::new(2.0 * z.re * s, 2.0 * z.im * s, (r2 - 1.0) * s)
}

/// Stereographic projection from the south pole `(0, 0, -1)`.
pub(crate) fn stereographic_south(p: &Point3<f64>) -> Result<Complex64> {
    let denom = 1.0 + p.z;
    if denom < 1e-12 {
        return Err(FsqcError::InvalidInput("south pole maps to infinity".into()));
    }
    Ok(Complex64::new(p.x / denom, p.y / denom))
}

pub(crate) fn inverse_stereographic_south(z: Complex64) -> Point3<f64> {
    let r2 = z.norm_sqr();
    let s = 1.0 / (r2 + 1.0);
    Point3::new(2.0 * z.re * s, 2.0 * z.im * s, (1.0 - r2) * s)
}

/// The smallest rotation taking the direction of `c` to `+z`.
///
/// An antipodal `c` (pointing at `-z`) is turned half way round the x-axis.
pub fn rotation_to_north(c: &Vector3<f64>) -> Result<Rotation3<f64>> {
    let len = c.norm();
    if !(len > 0.0) || !len.is_finite() {
        return Err(FsqcError::ZeroVector);
    }
    let u = c / len;
    let north = Vector3::z();
    let axis = u.cross(&north);
    let sin = axis.norm();
    let cos = u.dot(&north);
    if sin < 1e-15 {
        return Ok(if cos > 0.0 {
            Rotation3::identity()
        } else {
            Rotation3::from_matrix_unchecked(Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0)))
        });
    }
    let k = axis / sin;
    let kx = k.cross_matrix();
    let m = Matrix3::identity() + kx * sin + kx * kx * (1.0 - cos);
    Ok(Rotation3::from_matrix_unchecked(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn projection_examples() {
        assert!(close(stereographic_north(&Point3::new(0., 0., -1.)).unwrap(), 0.0.into()));
        assert!(close(stereographic_north(&Point3::new(1., 0., 0.)).unwrap(), 1.0.into()));
        assert!(close(
            stereographic_north(&Point3::new(0., 1., 0.)).unwrap(),
            Complex64::i()
        ));
        assert!(matches!(
            stereographic_north(&Point3::new(0., 0., 1.)),
            Err(FsqcError::NorthPole)
        ));
        assert_eq!(inverse_stereographic(0.0.into()), Point3::new(0., 0., -1.));
        assert_eq!(inverse_stereographic(1.0.into()), Point3::new(1., 0., 0.));
    }

    #[test]
    fn south_projection_round_trip() {
        for z in [Complex64::new(0.3, -2.0), Complex64::new(-40.0, 7.0), Complex64::new(0.0, 0.0)] {
            let p = inverse_stereographic_south(z);
            assert!((p.coords.norm() - 1.0).abs() < 1e-14);
            assert!((stereographic_south(&p).unwrap() - z).norm() <= 1e-12 * z.norm().max(1.0));
        }
    }

    #[test]
    fn rotation_examples() {
        let id = rotation_to_north(&Vector3::z()).unwrap();
        assert_eq!(id, Rotation3::identity());

        let flip = rotation_to_north(&-Vector3::z()).unwrap();
        assert_eq!(flip * -Vector3::z(), Vector3::z());
        assert_eq!(flip * Vector3::x(), Vector3::x());

        let r = rotation_to_north(&Vector3::x()).unwrap();
        assert!((r * Vector3::x() - Vector3::z()).norm() < 1e-15);
        let m = r.matrix();
        assert!((m.transpose() * m - Matrix3::identity()).norm() < 1e-12);
        assert!((m.determinant() - 1.0).abs() < 1e-12);
        // The rotation axis is perpendicular to both directions, so y is fixed.
        assert!((r * Vector3::y() - Vector3::y()).norm() < 1e-15);

        assert!(matches!(rotation_to_north(&Vector3::zeros()), Err(FsqcError::ZeroVector)));
    }

    proptest::proptest! {
        #[test]
        fn stereographic_round_trip(re in -700.0f64..700.0, im in -700.0f64..700.0) {
            let z = Complex64::new(re, im);
            let p = inverse_stereographic(z);
            proptest::prop_assert!((p.coords.norm() - 1.0).abs() <= 1e-12);
            let back = stereographic_north(&p).unwrap();
            // 1 - z cancels near the pole, so precision falls off like |z|^2.
            let tol = 8.0 * f64::EPSILON * (1.0 + z.norm_sqr()) * z.norm().max(1.0);
            proptest::prop_assert!((back - z).norm() <= tol);
        }

        #[test]
        fn rotations_are_orthogonal(x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0) {
            let c = Vector3::new(x, y, z);
            proptest::prop_assume!(c.norm() > 1e-6);
            let r = rotation_to_north(&c).unwrap();
            let m = r.matrix();
            proptest::prop_assert!((m.transpose() * m - Matrix3::identity()).amax() <= 1e-12);
            proptest::prop_assert!((m.determinant() - 1.0).abs() <= 1e-12);
            proptest::prop_assert!((r * c.normalize() - Vector3::z()).amax() <= 1e-12);
        }
    }
}
