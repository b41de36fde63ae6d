use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Mat, Side};
use num_complex::Complex64;

use super::{EllipticOperator, SparseMatrix};
use crate::error::{FsqcError, Result};

/// Relative residual a solve must reach unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Largest accepted relative residual.
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Values of the solution at every vertex together with how it was found.
#[derive(Debug, Clone)]
pub struct DirichletSolution {
    pub values: Vec<Complex64>,
    /// Relative residual of the real and imaginary systems taken together.
    pub residual: f64,
    /// True when the direct factorization was not usable and conjugate
    /// gradients produced the answer.
    pub used_fallback: bool,
}

/// Solves `A u = 0` on the free vertices with `u` prescribed on the
/// constrained ones. Real and imaginary parts share the matrix.
pub fn solve_dirichlet(
    op: &EllipticOperator,
    constraints: &[(usize, Complex64)],
) -> Result<Vec<Complex64>> {
    solve_dirichlet_detailed(op, constraints).map(|s| s.values)
}

pub fn solve_dirichlet_detailed(
    op: &EllipticOperator,
    constraints: &[(usize, Complex64)],
) -> Result<DirichletSolution> {
    solve_dirichlet_with(op, constraints, &SolverOptions::default())
}

pub fn solve_dirichlet_with(
    op: &EllipticOperator,
    constraints: &[(usize, Complex64)],
    options: &SolverOptions,
) -> Result<DirichletSolution> {
    let tolerance = options.tolerance;
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(FsqcError::InvalidInput(format!("solver tolerance must be positive, got {tolerance}")));
    }
    let a = op.matrix();
    let n = a.dim();
    if constraints.is_empty() {
        return Err(FsqcError::InvalidInput("at least one Dirichlet constraint is required".into()));
    }
    let mut fixed: Vec<Option<Complex64>> = vec![None; n];
    for &(v, value) in constraints {
        if v >= n {
            return Err(FsqcError::InvalidInput(format!(
                "constraint on vertex {v}, but the operator has {n} unknowns"
            )));
        }
        if !value.is_finite() {
            return Err(FsqcError::InvalidInput(format!("constraint on vertex {v} is not finite")));
        }
        match fixed[v] {
            Some(old) if old != value => {
                return Err(FsqcError::InvalidInput(format!(
                    "conflicting constraints on vertex {v}"
                )))
            }
            _ => fixed[v] = Some(value),
        }
    }

    let mut free_index = vec![usize::MAX; n];
    let mut free = Vec::new();
    for v in 0..n {
        if fixed[v].is_none() {
            free_index[v] = free.len();
            free.push(v);
        }
    }
    let mut values: Vec<Complex64> = fixed.iter().map(|x| x.unwrap_or_default()).collect();
    if free.is_empty() {
        return Ok(DirichletSolution {
            values,
            residual: 0.0,
            used_fallback: false,
        });
    }

    // Reduced system over free vertices, right-hand side from the fixed ones.
    let m = free.len();
    let mut triplets = Vec::with_capacity(a.nnz());
    let mut rhs_re = vec![0.0; m];
    let mut rhs_im = vec![0.0; m];
    for (j, &c) in free.iter().enumerate() {
        for (r, v) in a.column(c) {
            match fixed[r] {
                Some(x) => {
                    rhs_re[j] -= v * x.re;
                    rhs_im[j] -= v * x.im;
                }
                None => triplets.push((free_index[r], j, v)),
            }
        }
    }
    let reduced = SparseMatrix::from_triplets(m, triplets);

    let (mut x, mut residual, mut used_fallback) = match direct_solve(&reduced, [&rhs_re, &rhs_im]) {
        Some((x, res)) => (x, res, false),
        None => ([vec![0.0; m], vec![0.0; m]], f64::INFINITY, true),
    };
    if !(residual <= tolerance) {
        log::warn!("direct solve residual {residual:e} above {tolerance:e}; falling back to conjugate gradients");
        used_fallback = true;
        for (k, rhs) in [&rhs_re, &rhs_im].into_iter().enumerate() {
            let start = if x[k].iter().all(|v| v.is_finite()) {
                x[k].clone()
            } else {
                vec![0.0; m]
            };
            x[k] = conjugate_gradient(&reduced, rhs, start, tolerance).0;
        }
        residual = joint_residual(&reduced, &x, [&rhs_re, &rhs_im]);
        if !(residual <= tolerance) {
            return Err(FsqcError::Solver {
                message: format!("no convergence on {m} unknowns"),
                residual,
            });
        }
    }
    for (j, &v) in free.iter().enumerate() {
        values[v] = Complex64::new(x[0][j], x[1][j]);
    }
    Ok(DirichletSolution {
        values,
        residual,
        used_fallback,
    })
}

/// Squared norms of `b - A x` and of `b`.
fn residual_parts(a: &SparseMatrix, x: &[f64], b: &[f64]) -> (f64, f64) {
    let ax = a.mul_vec(x);
    let r = ax.iter().zip(b).map(|(p, q)| (q - p).powi(2)).sum::<f64>();
    let nb = b.iter().map(|v| v * v).sum::<f64>();
    (r, nb)
}

fn ratio((r, nb): (f64, f64)) -> f64 {
    if nb > 0.0 {
        (r / nb).sqrt()
    } else {
        r.sqrt()
    }
}

fn relative_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    ratio(residual_parts(a, x, b))
}

/// Relative residual of both columns taken together.
fn joint_residual(a: &SparseMatrix, x: &[Vec<f64>; 2], b: [&[f64]; 2]) -> f64 {
    let (p, q) = (residual_parts(a, &x[0], b[0]), residual_parts(a, &x[1], b[1]));
    ratio((p.0 + q.0, p.1 + q.1))
}

/// Sparse Cholesky with up to two steps of iterative refinement. Returns
/// `None` when the factorization fails.
fn direct_solve(a: &SparseMatrix, rhs: [&[f64]; 2]) -> Option<([Vec<f64>; 2], f64)> {
    let m = a.dim();
    // Lower triangle only.
    let mut col_ptr = vec![0usize; m + 1];
    let mut row_idx = Vec::with_capacity(a.nnz() / 2 + m);
    let mut vals = Vec::with_capacity(a.nnz() / 2 + m);
    for c in 0..m {
        for (r, v) in a.column(c) {
            if r >= c {
                row_idx.push(r);
                vals.push(v);
            }
        }
        col_ptr[c + 1] = row_idx.len();
    }
    let symbolic = SymbolicSparseColMatRef::new_checked(m, m, &col_ptr, None, &row_idx);
    let mat = SparseColMatRef::new(symbolic, &vals);
    let llt = match mat.sp_cholesky(Side::Lower) {
        Ok(f) => f,
        Err(e) => {
            log::warn!("sparse Cholesky failed: {e:?}");
            return None;
        }
    };

    let solve = |b: [&[f64]; 2]| -> [Vec<f64>; 2] {
        let mut mat = Mat::<f64>::from_fn(m, 2, |i, j| b[j][i]);
        llt.solve_in_place(mat.as_mut());
        [
            (0..m).map(|i| mat[(i, 0)]).collect(),
            (0..m).map(|i| mat[(i, 1)]).collect(),
        ]
    };
    let mut x = solve(rhs);
    let mut res = joint_residual(a, &x, rhs);
    for _ in 0..2 {
        if !(res > 1e-13) {
            break;
        }
        let r: Vec<Vec<f64>> = (0..2)
            .map(|k| {
                let ax = a.mul_vec(&x[k]);
                rhs[k].iter().zip(&ax).map(|(b, p)| b - p).collect()
            })
            .collect();
        let d = solve([&r[0], &r[1]]);
        let candidate: [Vec<f64>; 2] = [0, 1].map(|k| x[k].iter().zip(&d[k]).map(|(p, q)| p + q).collect());
        let new_res = joint_residual(a, &candidate, rhs);
        if new_res < res {
            x = candidate;
            res = new_res;
        } else {
            break;
        }
    }
    Some((x, res))
}

/// Jacobi-preconditioned conjugate gradients; returns the iterate and its
/// relative residual.
pub(crate) fn conjugate_gradient(a: &SparseMatrix, b: &[f64], mut x: Vec<f64>, tolerance: f64) -> (Vec<f64>, f64) {
    let m = a.dim();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nb == 0.0 {
        return (vec![0.0; m], 0.0);
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let cap = (10.0 * (m as f64).sqrt()) as usize + 1000;
    let ax = a.mul_vec(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, p)| b - p).collect();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    // Stop a little below the target so the true residual passes.
    let tol = 0.1 * tolerance * nb;
    for _ in 0..cap {
        if dot(&r, &r).sqrt() <= tol {
            break;
        }
        let ap = a.mul_vec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..m {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = relative_residual(a, &x, b);
    (x, res)
}
