use nalgebra::{DMatrix, Matrix2, Matrix2x3, SymmetricEigen};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use fsqc::elliptic::{assemble_generalized_laplacian, solve_dirichlet};
use fsqc::mesh::{boundary_vertices, generate};
use fsqc::qc::beltrami_coefficient;
use fsqc::{BeltramiField, FaceSelection, PlanarEmbedding};

fn jittered_embedding(rings: usize, seed: u64) -> PlanarEmbedding {
    let mesh = generate::hex_disk(rings);
    let boundary = boundary_vertices(mesh.faces());
    let mut rng = StdRng::seed_from_u64(seed);
    let base = PlanarEmbedding::from_xy(&mesh);
    let points = base
        .points()
        .iter()
        .enumerate()
        .map(|(v, &z)| {
            let d = C::new(rng.random_range(-0.25..0.25), rng.random_range(-0.25..0.25));
            if boundary.binary_search(&v).is_ok() {
                z
            } else {
                z + d
            }
        })
        .collect();
    base.with_points(points).unwrap()
}

/// Stiffness matrix from the change of variables: if `g(z) = z + mu conj z`
/// has Jacobian `J`, then harmonic functions of `g` minimise the energy
/// with tensor `|det J| J^-1 J^-T`.
fn dense_oracle(domain: &PlanarEmbedding, mu: &[C]) -> DMatrix<f64> {
    let n = domain.vertex_count();
    let mut m = DMatrix::zeros(n, n);
    for (f, face) in domain.faces().iter().enumerate() {
        let [p1, p2, p3] = domain.face_points(f);
        let edges = Matrix2::new(p2.re - p1.re, p3.re - p1.re, p2.im - p1.im, p3.im - p1.im);
        let area = 0.5 * edges.determinant().abs();
        let inv = edges.try_inverse().unwrap();
        // Rows of inv are the gradients of the second and third hat functions.
        let g2 = inv.row(0);
        let g3 = inv.row(1);
        let grads = Matrix2x3::new(-g2[0] - g3[0], g2[0], g3[0], -g2[1] - g3[1], g2[1], g3[1]);
        let (r, t) = (mu[f].re, mu[f].im);
        let jac = Matrix2::new(1.0 + r, t, t, 1.0 - r);
        let jinv = jac.try_inverse().unwrap();
        let tensor = jac.determinant().abs() * jinv * jinv.transpose();
        let local = area * grads.transpose() * tensor * grads;
        for i in 0..3 {
            for j in 0..3 {
                m[(face[i], face[j])] += local[(i, j)];
            }
        }
    }
    m
}

fn random_mu(faces: usize, seed: u64, bound: f64) -> Vec<C> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..faces)
        .map(|_| C::from_polar(rng.random_range(0.0..bound), rng.random_range(-3.1..3.1)))
        .collect()
}

#[test]
fn assembly_matches_change_of_variables_oracle() {
    let domain = jittered_embedding(5, 11);
    let mu = random_mu(domain.face_count(), 12, 0.9);
    let op = assemble_generalized_laplacian(&domain, &BeltramiField::new(mu.clone()).unwrap(), &FaceSelection::empty())
        .unwrap();
    let oracle = dense_oracle(&domain, &mu);
    let scale = oracle.abs().max();
    let dense = op.matrix().to_dense();
    for r in 0..domain.vertex_count() {
        for c in 0..domain.vertex_count() {
            assert!(
                (dense[r][c] - oracle[(r, c)]).abs() <= 1e-12 * scale,
                "entry ({r}, {c}): {} vs {}",
                dense[r][c],
                oracle[(r, c)]
            );
        }
    }
}

#[test]
fn operator_is_positive_semidefinite_with_constant_kernel() {
    let domain = jittered_embedding(3, 13);
    let mu = random_mu(domain.face_count(), 14, 0.8);
    let op = assemble_generalized_laplacian(&domain, &BeltramiField::new(mu).unwrap(), &FaceSelection::empty())
        .unwrap();
    let rows = op.matrix().to_dense();
    let n = rows.len();
    let dense = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
    let eig = SymmetricEigen::new(dense);
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    let top = values[n - 1];
    assert!(values[0].abs() <= 1e-12 * top, "smallest eigenvalue {}", values[0]);
    assert!(values[1] > 1e-6 * top, "kernel is larger than the constants");
    assert!(op.matrix().row_sums().iter().all(|s| s.abs() <= 1e-12 * top));
}

#[test]
fn measured_field_of_a_piecewise_linear_map_reproduces_it() {
    let domain = jittered_embedding(10, 15);
    let bend = |z: C| z + 0.02 * z * z + C::new(0.03, 0.01) * z.conj() * z.conj() / 10.0;
    let mapped = domain.with_points(domain.points().iter().map(|&z| bend(z)).collect()).unwrap();
    let mu = beltrami_coefficient(&domain, &mapped).unwrap();
    assert!(mu.sup_norm() > 0.05);
    let op = assemble_generalized_laplacian(&domain, &mu, &FaceSelection::empty()).unwrap();
    let boundary = boundary_vertices(domain.faces());
    let constraints: Vec<_> = boundary.iter().map(|&v| (v, mapped.points()[v])).collect();
    let w = solve_dirichlet(&op, &constraints).unwrap();
    for (a, b) in w.iter().zip(mapped.points()) {
        assert!((a - b).norm() < 1e-9, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constant_fields_reproduce_their_affine_maps(r in 0.0f64..0.85, phase in -3.1f64..3.1, seed in 0u64..1000) {
        let domain = jittered_embedding(6, seed);
        let mu = C::from_polar(r, phase);
        let op = assemble_generalized_laplacian(
            &domain,
            &BeltramiField::new(vec![mu; domain.face_count()]).unwrap(),
            &FaceSelection::empty(),
        )
        .unwrap();
        let f = |z: C| z + mu * z.conj();
        let boundary = boundary_vertices(domain.faces());
        let constraints: Vec<_> = boundary.iter().map(|&v| (v, f(domain.points()[v]))).collect();
        let w = solve_dirichlet(&op, &constraints).unwrap();
        for (v, z) in domain.points().iter().enumerate() {
            prop_assert!((w[v] - f(*z)).norm() < 1e-9);
        }
    }
}
