//! Sparse symmetric positive definite systems: the cotangent Laplacian and
//! the generalized Laplacian of the linear Beltrami solver.

mod assemble;
mod solve;
mod sparse;

pub use assemble::{alpha_coefficients, assemble_generalized_laplacian, cotangent_laplacian, AlphaTriple};
pub use solve::{
    solve_dirichlet, solve_dirichlet_detailed, solve_dirichlet_with, DirichletSolution, SolverOptions, DEFAULT_TOLERANCE,
};
pub use sparse::SparseMatrix;

/// Symmetric stiffness matrix over all vertices. Dirichlet constraints are
/// supplied at solve time.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticOperator {
    matrix: SparseMatrix,
}

impl EllipticOperator {
    pub fn new(matrix: SparseMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}
