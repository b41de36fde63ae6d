use num_complex::Complex64;
use rayon::prelude::*;

use super::{EllipticOperator, SparseMatrix};
use crate::error::{FsqcError, Result};
use crate::mesh::{cotangent_weights, FaceSelection, TriangleMesh};
use crate::qc::{hat_gradients, BeltramiField, PlanarEmbedding};

/// Entries of the symmetric coefficient matrix `[[a1, a2], [a2, a3]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaTriple {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

/// Coefficient matrix of the generalized Laplace equation for a given
/// Beltrami coefficient.
pub fn alpha_coefficients(mu: Complex64) -> Result<AlphaTriple> {
    alpha_for_face(mu, 0)
}

fn alpha_for_face(mu: Complex64, face: usize) -> Result<AlphaTriple> {
    let (rho, tau) = (mu.re, mu.im);
    let denom = 1.0 - rho * rho - tau * tau;
    if !(denom > 0.0) {
        return Err(FsqcError::InvalidBeltrami {
            face,
            modulus: mu.norm(),
        });
    }
    Ok(AlphaTriple {
        a1: ((rho - 1.0).powi(2) + tau * tau) / denom,
        a2: -2.0 * tau / denom,
        a3: ((1.0 + rho).powi(2) + tau * tau) / denom,
    })
}

/// Finite-element stiffness matrix of `div(A grad u)` with `A` built from
/// the per-face Beltrami coefficients. Faces in `excluded` contribute
/// nothing.
pub fn assemble_generalized_laplacian(
    domain: &PlanarEmbedding,
    mu: &BeltramiField,
    excluded: &FaceSelection,
) -> Result<EllipticOperator> {
    if mu.len() != domain.face_count() {
        return Err(FsqcError::SizeMismatch {
            expected: domain.face_count(),
            found: mu.len(),
        });
    }
    let skip = excluded.mask(domain.face_count());
    let blocks = (0..domain.face_count())
        .into_par_iter()
        .map(|f| {
            if skip[f] {
                return Ok(None);
            }
            let (dx, dy, area) = hat_gradients(&domain.face_points(f))
                .ok_or(FsqcError::DegenerateFace { face: f })?;
            let a = alpha_for_face(mu.values()[f], f)?;
            let area = area.abs();
            let mut local = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    local[i][j] = area
                        * (a.a1 * dx[i] * dx[j]
                            + a.a2 * (dx[i] * dy[j] + dy[i] * dx[j])
                            + a.a3 * dy[i] * dy[j]);
                }
            }
            Ok(Some(local))
        })
        .collect::<Vec<Result<Option<[[f64; 3]; 3]>>>>();

    let mut triplets = Vec::with_capacity(9 * domain.face_count());
    for (f, block) in blocks.into_iter().enumerate() {
        if let Some(local) = block? {
            let face = domain.faces()[f];
            for i in 0..3 {
                for j in 0..3 {
                    triplets.push((face[i], face[j], local[i][j]));
                }
            }
        }
    }
    Ok(EllipticOperator::new(SparseMatrix::from_triplets(
        domain.vertex_count(),
        triplets,
    )))
}

/// Cotangent Laplacian `L_uv = -k_uv / 2`, `L_uu = sum_v k_uv / 2` from the
/// corner angles of `mesh`, which may be open.
pub fn cotangent_laplacian(mesh: &TriangleMesh) -> Result<EllipticOperator> {
    let weights = cotangent_weights(mesh)?;
    let mut triplets = Vec::with_capacity(4 * weights.len());
    for ([u, v], k) in weights.iter() {
        let h = 0.5 * k;
        triplets.push((u, v, -h));
        triplets.push((v, u, -h));
        triplets.push((u, u, h));
        triplets.push((v, v, h));
    }
    Ok(EllipticOperator::new(SparseMatrix::from_triplets(
        mesh.vertex_count(),
        triplets,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;

    fn close(a: AlphaTriple, b: [f64; 3]) -> bool {
        (a.a1 - b[0]).abs() < 1e-12 && (a.a2 - b[1]).abs() < 1e-12 && (a.a3 - b[2]).abs() < 1e-12
    }

    #[test]
    fn alpha_examples() {
        assert!(close(alpha_coefficients(Complex64::new(0.0, 0.0)).unwrap(), [1.0, 0.0, 1.0]));
        assert!(close(alpha_coefficients(Complex64::new(0.6, 0.0)).unwrap(), [0.25, 0.0, 4.0]));
        assert!(close(
            alpha_coefficients(Complex64::new(0.0, 0.5)).unwrap(),
            [5.0 / 3.0, -4.0 / 3.0, 5.0 / 3.0]
        ));
        assert!(alpha_coefficients(Complex64::new(1.0, 0.0)).is_err());
        assert!(alpha_coefficients(Complex64::new(0.8, 0.8)).is_err());
    }

    proptest::proptest! {
        #[test]
        fn alpha_is_positive_definite(r in 0.0f64..0.999, t in 0.0f64..6.3) {
            let a = alpha_coefficients(Complex64::from_polar(r, t)).unwrap();
            proptest::prop_assert!(a.a1 > 0.0 && a.a3 > 0.0);
            proptest::prop_assert!(a.a1 * a.a3 - a.a2 * a.a2 > 0.0);
            // det A = 1 for every mu.
            proptest::prop_assert!((a.a1 * a.a3 - a.a2 * a.a2 - 1.0).abs() < 1e-6 * a.a3 * a.a3);
        }
    }

    #[test]
    fn equilateral_face_stiffness() {
        let h = 3f64.sqrt() / 2.0;
        let domain = PlanarEmbedding::new(
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, h)],
            vec![[0, 1, 2]],
            None,
        )
        .unwrap();
        let op = assemble_generalized_laplacian(&domain, &BeltramiField::zeros(1), &FaceSelection::empty())
            .unwrap();
        let m = op.matrix();
        let cot60 = 1.0 / 3f64.sqrt();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { cot60 } else { -0.5 * cot60 };
                assert!((m.get(i, j) - expected).abs() < 1e-12);
            }
        }
        assert!(m.row_sums().iter().all(|s| s.abs() < 1e-12));
    }

    #[test]
    fn excluded_faces_contribute_nothing() {
        let disk = generate::hex_disk(2);
        let domain = PlanarEmbedding::from_xy(&disk);
        let mu = BeltramiField::zeros(domain.face_count());
        let all = assemble_generalized_laplacian(&domain, &mu, &FaceSelection::empty()).unwrap();
        let without = assemble_generalized_laplacian(&domain, &mu, &FaceSelection::single(0)).unwrap();
        let [a, b, _] = domain.faces()[0];
        assert!(all.matrix().get(a, b) != without.matrix().get(a, b));
        let mut faces = domain.faces().to_vec();
        faces.remove(0);
        let trimmed = PlanarEmbedding::new(domain.points().to_vec(), faces, None).unwrap();
        let direct = assemble_generalized_laplacian(&trimmed, &BeltramiField::zeros(trimmed.face_count()), &FaceSelection::empty())
            .unwrap();
        for r in 0..domain.vertex_count() {
            for c in 0..domain.vertex_count() {
                assert!((direct.matrix().get(r, c) - without.matrix().get(r, c)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn degenerate_and_bad_mu_are_reported() {
        let domain = PlanarEmbedding::new(
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![[0, 1, 2]],
            None,
        )
        .unwrap();
        assert!(matches!(
            assemble_generalized_laplacian(&domain, &BeltramiField::zeros(1), &FaceSelection::empty()),
            Err(FsqcError::DegenerateFace { face: 0 })
        ));
        assert!(assemble_generalized_laplacian(&domain, &BeltramiField::zeros(1), &FaceSelection::single(0)).is_ok());
    }
}
