use super::{FieldSolution, LinearSystem};
use crate::error::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::sparse::SparseColMat;
use faer::Mat;
use num_complex::Complex64 as C64;
use std::time::Instant;

/// Required relative residual `‖Ax − b‖/‖b‖`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 3;

pub fn sparse_matvec(matrix: &SparseColMat<usize, C64>, x: &[C64]) -> Vec<C64> {
    let m = matrix.as_ref();
    let (col_ptr, row_idx, val) = (m.symbolic().col_ptr(), m.symbolic().row_idx(), m.val());
    let mut y = vec![C64::new(0.0, 0.0); m.nrows()];
    for (j, xj) in x.iter().enumerate() {
        for p in col_ptr[j]..col_ptr[j + 1] {
            y[row_idx[p]] += val[p] * xj;
        }
    }
    y
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖Ax − b‖ / ‖b‖` (absolute residual when `b = 0`).
pub fn residual_norm(matrix: &SparseColMat<usize, C64>, x: &[C64], b: &[C64]) -> f64 {
    let ax = sparse_matvec(matrix, x);
    let r: Vec<C64> = ax.iter().zip(b).map(|(a, b)| a - b).collect();
    let nb = norm(b);
    if nb > 0.0 {
        norm(&r) / nb
    } else {
        norm(&r)
    }
}

/// Sparse LU with a few steps of iterative refinement.
pub fn solve(system: LinearSystem) -> Result<FieldSolution> {
    let start = Instant::now();
    let n = system.rhs.len();
    let lu = system
        .matrix
        .sp_lu()
        .map_err(|e| Error::Solver(format!("sparse LU failed: {e:?}")))?;
    let mut x = Mat::<C64>::from_fn(n, 1, |i, _| system.rhs[i]);
    lu.solve_in_place(x.as_mut());
    let mut sol: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();
    if sol.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Solver(
            "singular factorization (wavenumber near a resonance, or a degenerate mesh)".into(),
        ));
    }
    let mut residual = residual_norm(&system.matrix, &sol, &system.rhs);
    for _ in 0..REFINEMENT_STEPS {
        if residual < RESIDUAL_TOLERANCE * 1e-2 {
            break;
        }
        let ax = sparse_matvec(&system.matrix, &sol);
        let mut r = Mat::<C64>::from_fn(n, 1, |i, _| system.rhs[i] - ax[i]);
        lu.solve_in_place(r.as_mut());
        let candidate: Vec<C64> = (0..n).map(|i| sol[i] + r[(i, 0)]).collect();
        let res = residual_norm(&system.matrix, &candidate, &system.rhs);
        if !(res < residual) {
            break;
        }
        sol = candidate;
        residual = res;
    }
    if !(residual < RESIDUAL_TOLERANCE) {
        return Err(Error::Solver(format!(
            "relative residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:e}; the system is nearly singular"
        )));
    }
    let mut metadata = system.metadata;
    metadata.solve_seconds = start.elapsed().as_secs_f64();
    metadata.residual = residual;
    Ok(FieldSolution::from_dofs(system.mesh, &system.layout, &sol, metadata))
}
