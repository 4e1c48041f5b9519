//! Empirical domination constant of the Stokes pressure:
//! `sup_u (|grad p_S|^2 - c |grad u|^2) / |lap u|^2` over no-slip `u`.
//!
//! Writing `g = lap u`, the quotient becomes the Rayleigh quotient of the
//! symmetric matrix `R^T R + c lap^-1` with `R = I - P - Q`, so the supremum
//! is its largest eigenvalue.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{
    apply, assemble_dense, check_cap, remainder, remainder_adjoint, symmetric_eigenvalues, to_faer, DenseOperator,
};
use crate::elliptic::Solver;
use crate::error::{Error, Result};
use crate::fields::{VectorField, WallCondition};

pub const DEFAULT_C_VALUES: [f64; 6] = [0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaMethod {
    /// Dense assembly and a full symmetric eigendecomposition.
    #[default]
    Dense,
    /// Matrix-free Lanczos iteration.
    Lanczos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaEstimate {
    pub grid_size: (usize, usize),
    pub c_values: Vec<f64>,
    /// Largest eigenvalue per `c`.
    pub sup_ratio: Vec<f64>,
    /// Three largest eigenvalues per `c`, descending.
    pub top3: Vec<[f64; 3]>,
    /// `max(0, min_c sup_ratio)`.
    pub beta_emp: f64,
    /// Largest Lanczos iteration count (0 for the dense path).
    pub iterations: usize,
}

impl BetaEstimate {
    /// Smallest `c` in the list whose ratio is at most `beta`.
    pub fn constant_for(&self, beta: f64) -> Option<f64> {
        self.c_values.iter().zip(&self.sup_ratio).find(|(_, r)| **r <= beta).map(|(c, _)| *c)
    }
}

fn finish(solver: &Solver, c_values: &[f64], top3: Vec<[f64; 3]>, iterations: usize) -> BetaEstimate {
    let sup_ratio: Vec<f64> = top3.iter().map(|t| t[0]).collect();
    let min = sup_ratio.iter().cloned().fold(f64::INFINITY, f64::min);
    BetaEstimate {
        grid_size: (solver.grid().nx(), solver.grid().ny()),
        c_values: c_values.to_vec(),
        sup_ratio,
        top3,
        beta_emp: min.max(0.0),
        iterations,
    }
}

pub fn beta_estimate(solver: &Solver, c_values: &[f64], method: BetaMethod) -> Result<BetaEstimate> {
    if c_values.is_empty() || c_values.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::Invalid("penalty constants must be finite and non-negative".into()));
    }
    match method {
        BetaMethod::Dense => beta_dense(solver, c_values),
        BetaMethod::Lanczos => beta_lanczos(solver, c_values),
    }
}

fn beta_dense(solver: &Solver, c_values: &[f64]) -> Result<BetaEstimate> {
    check_cap(solver.grid())?;
    let r = to_faer(&assemble_dense(DenseOperator::Remainder, solver)?);
    let linv = to_faer(&assemble_dense(DenseOperator::DirichletInverse, solver)?);
    let k = r.transpose() * &r;
    let n = k.nrows();
    let mut top3 = Vec::with_capacity(c_values.len());
    for &c in c_values {
        let m = faer::Mat::from_fn(n, n, |i, j| k[(i, j)] + c * linv[(i, j)]);
        let ev = symmetric_eigenvalues(&m)?;
        let t = |i: usize| if i < n { ev[n - 1 - i] } else { f64::NEG_INFINITY };
        top3.push([t(0), t(1), t(2)]);
    }
    Ok(finish(solver, c_values, top3, 0))
}

fn beta_lanczos(solver: &Solver, c_values: &[f64]) -> Result<BetaEstimate> {
    let grid = *solver.grid();
    let n = grid.velocity_dofs();
    let mut top3 = Vec::with_capacity(c_values.len());
    let mut iterations = 0;
    for &c in c_values {
        let op = |x: &DVector<f64>| -> Result<DVector<f64>> {
            let g = VectorField::from_vector(grid, WallCondition::NoSlip, x);
            let rg = remainder(solver, &g)?;
            let mut out = remainder_adjoint(solver, &rg)?;
            out.axpy(c, &apply(DenseOperator::DirichletInverse, solver, &g)?);
            Ok(out.to_vector())
        };
        let res = lanczos_top(op, n, 3, LanczosOptions::default())?;
        iterations = iterations.max(res.iterations);
        let t = |i: usize| res.values.get(i).copied().unwrap_or(f64::NEG_INFINITY);
        top3.push([t(0), t(1), t(2)]);
    }
    Ok(finish(solver, c_values, top3, iterations))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 600, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosResult {
    /// Largest Ritz values, descending.
    pub values: Vec<f64>,
    pub iterations: usize,
}

/// Largest `k` eigenvalues of a symmetric operator on `R^n` by Lanczos with
/// full reorthogonalisation.
pub fn lanczos_top(
    op: impl Fn(&DVector<f64>) -> Result<DVector<f64>>,
    n: usize,
    k: usize,
    opts: LanczosOptions,
) -> Result<LanczosResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    q /= q.norm();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let limit = opts.max_iter.min(n);
    let want = k.min(n);
    for m in 1..=limit {
        let mut w = op(&q)?;
        let a = q.dot(&w);
        w.axpy(-a, &q, 1.0);
        if let (Some(prev), Some(b)) = (basis.last(), beta.last()) {
            w.axpy(-*b, prev, 1.0);
        }
        basis.push(q.clone());
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let d = v.dot(&w);
                w.axpy(-d, v, 1.0);
            }
        }
        let b = w.norm();

        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j || j + 1 == i {
                beta[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
        let converged = m >= want && order[..want].iter().all(|&i| (b * eig.eigenvectors[(m - 1, i)]).abs() <= opts.tol * scale);
        let exhausted = b <= 1e-14 * scale || m == n;
        if converged || exhausted {
            let values = order[..want.min(m)].iter().map(|&i| eig.eigenvalues[i]).collect();
            return Ok(LanczosResult { values, iterations: m });
        }
        beta.push(b);
        q = w / b;
    }
    Err(Error::EigenNonConvergence { iterations: limit })
}
