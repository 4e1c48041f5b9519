//! Dense matrices of the linear operators, assembled column by column from
//! the matrix-free implementations.

use nalgebra::{DMatrix, DVector};

use crate::elliptic::{EllipticKind, Solver};
use crate::error::{Error, Result};
use crate::fields::{VectorField, WallCondition};
use crate::grid::Grid;
use crate::ops::{grad_div, laplacian_vector};
use crate::pressure::{helmholtz_project, q_operator, stokes_pressure};

/// Largest grid (per direction) for dense assembly.
pub const DENSE_CAP: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DenseOperator {
    /// Helmholtz projection `P`.
    Projection,
    /// `Q = grad div lap_D^-1`.
    QOp,
    /// `u -> grad p_S(u)`.
    StokesPressureGrad,
    /// `B u = -lap u + grad p_S(u)`.
    UnconstrainedStokesB,
    /// `I - P - Q`.
    Remainder,
    /// Componentwise no-slip `lap^-1`.
    DirichletInverse,
    /// Componentwise no-slip `lap`.
    VectorLaplacian,
}

pub fn check_cap(grid: &Grid) -> Result<()> {
    if grid.nx() > DENSE_CAP || grid.ny() > DENSE_CAP {
        return Err(Error::GridTooLarge { nx: grid.nx(), ny: grid.ny(), cap: DENSE_CAP });
    }
    Ok(())
}

/// `(I - P - Q) g`.
pub fn remainder(solver: &Solver, g: &VectorField) -> Result<VectorField> {
    let (pg, _) = helmholtz_project(solver, g)?;
    let qg = q_operator(solver, g)?;
    let mut out = g - &pg;
    out.axpy(-1.0, &qg);
    Ok(out)
}

/// Adjoint of [`remainder`]: `(I - P - lap_D^-1 grad div) y`.
pub fn remainder_adjoint(solver: &Solver, y: &VectorField) -> Result<VectorField> {
    let (py, _) = helmholtz_project(solver, y)?;
    let gd = grad_div(y).with_bc(WallCondition::NoSlip);
    let (x, _) = solver.solve_vector(EllipticKind::PoissonDirichlet, &gd)?;
    let mut out = y - &py;
    out.axpy(-1.0, &x);
    Ok(out)
}

/// Matrix-free application of `op`.
pub fn apply(op: DenseOperator, solver: &Solver, w: &VectorField) -> Result<VectorField> {
    Ok(match op {
        DenseOperator::Projection => helmholtz_project(solver, w)?.0,
        DenseOperator::QOp => q_operator(solver, w)?,
        DenseOperator::StokesPressureGrad => stokes_pressure(solver, w)?.1,
        DenseOperator::UnconstrainedStokesB => {
            let mut b = &laplacian_vector(w) * -1.0;
            b.axpy(1.0, &stokes_pressure(solver, w)?.1);
            b
        }
        DenseOperator::Remainder => remainder(solver, w)?,
        DenseOperator::DirichletInverse => solver.solve_vector(EllipticKind::PoissonDirichlet, w)?.0,
        DenseOperator::VectorLaplacian => laplacian_vector(w),
    })
}

/// Dense matrix of `op` acting on flattened no-slip velocity unknowns
/// (`u` then `v`, column-major).
pub fn assemble_dense(op: DenseOperator, solver: &Solver) -> Result<DMatrix<f64>> {
    let grid = *solver.grid();
    check_cap(&grid)?;
    let n = grid.velocity_dofs();
    let mut m = DMatrix::zeros(n, n);
    let mut e = DVector::zeros(n);
    for k in 0..n {
        e[k] = 1.0;
        let w = VectorField::from_vector(grid, WallCondition::NoSlip, &e);
        m.set_column(k, &apply(op, solver, &w)?.to_vector());
        e[k] = 0.0;
    }
    Ok(m)
}

pub(crate) fn to_faer(m: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Ascending eigenvalues of the symmetric part of `m`.
pub(crate) fn symmetric_eigenvalues(m: &faer::Mat<f64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let s = faer::Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let mut ev = s.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|_| Error::EigenNonConvergence { iterations: 0 })?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}
