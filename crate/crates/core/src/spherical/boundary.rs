use num_complex::Complex64;

use crate::error::{FsqcError, Result};

/// The affine map `(x, y) -> (a x + b y + r, c x + d y + s)` prescribed on
/// the outer face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryMapCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub r: f64,
    pub s: f64,
}

impl BoundaryMapCoefficients {
    pub fn apply(&self, z: Complex64) -> Complex64 {
        Complex64::new(
            self.a * z.re + self.b * z.im + self.r,
            self.c * z.re + self.d * z.im + self.s,
        )
    }

    pub fn jacobian(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.r, self.s]
    }
}

/// Determinant of the 6x6 system fixing `v1`, `v2` and imposing the
/// dilation `k` with a real Beltrami coefficient.
pub fn boundary_system_determinant(v1: Complex64, v2: Complex64, k: f64) -> f64 {
    let d = v2 - v1;
    -k * d.re * d.re - d.im * d.im / k
}

/// Affine map fixing `v1` and `v2` whose Beltrami coefficient is the real
/// number `(k - 1) / (k + 1)`.
pub fn boundary_map_coefficients(v1: Complex64, v2: Complex64, k: f64) -> Result<BoundaryMapCoefficients> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(FsqcError::InvalidDilation { face: 0, value: k });
    }
    let (dx, dy) = ((v2 - v1).re, (v2 - v1).im);
    if dx == 0.0 && dy == 0.0 {
        return Err(FsqcError::CoincidentPoints);
    }
    // Differences of the fixing equations, reduced with d = a / k and
    // c = -k b to a 2x2 system in (a, b).
    let det = boundary_system_determinant(v1, v2, k);
    let a = (-k * dx * dx - dy * dy) / det;
    let b = dx * dy * (1.0 - 1.0 / k) / det;
    let c = -k * b;
    let d = a / k;
    let (x1, y1) = (v1.re, v1.im);
    Ok(BoundaryMapCoefficients {
        a,
        b,
        c,
        d,
        r: x1 - a * x1 - b * y1,
        s: y1 - c * x1 - d * y1,
    })
}
