//! Spectrum of the assembled unconstrained Stokes operator
//! `B u = -lap u + grad p_S(u)`.

use faer::c64;

use super::dense::{assemble_dense, check_cap, symmetric_eigenvalues, to_faer, DenseOperator};
use crate::elliptic::Solver;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub grid_size: (usize, usize),
    /// Eigenvalues of `B`, sorted by real part.
    pub eigenvalues: Vec<c64>,
    /// Nondimensional scaling applied to the summary values (`ly^2`).
    pub scale: f64,
    /// `scale * min Re(lambda)`.
    pub min_real_part: f64,
    /// `scale * min |lambda|`.
    pub min_abs: f64,
    /// `scale * max |Im(lambda)|`.
    pub max_imag_abs: f64,
    /// Smallest eigenvalue of `B` on discretely divergence-free fields.
    pub stokes_min: f64,
    /// Smallest eigenvalue of the no-slip vector `-lap`.
    pub dirichlet_min: f64,
    /// Smallest nonzero eigenvalue of the zero-flux scalar `-lap`.
    pub neumann_min: f64,
}

pub fn spectrum(solver: &Solver) -> Result<SpectrumReport> {
    let grid = *solver.grid();
    check_cap(&grid)?;
    let b = to_faer(&assemble_dense(DenseOperator::UnconstrainedStokesB, solver)?);
    let mut eigenvalues = b.eigenvalues().map_err(|_| Error::EigenNonConvergence { iterations: 0 })?;
    eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    let scale = grid.ly() * grid.ly();
    let min_real_part = scale * eigenvalues.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let min_abs = scale * eigenvalues.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let max_imag_abs = scale * eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);

    // On the range of P, B acts as the symmetric operator P(-lap)P.
    let p = to_faer(&assemble_dense(DenseOperator::Projection, solver)?);
    let l = to_faer(&assemble_dense(DenseOperator::VectorLaplacian, solver)?);
    let a = &p * (&l * &p);
    let ev = symmetric_eigenvalues(&a)?;
    // -lap is positive, so P lap P is nonpositive; its kernel is the gradient
    // space, of dimension (cells - 1)
    let kernel = if grid.periodic_x() && grid.periodic_y() { grid.nx() * grid.ny() + 1 } else { grid.nx() * grid.ny() - 1 };
    let mut neg: Vec<f64> = ev.iter().map(|x| -x).collect();
    neg.sort_by(f64::total_cmp);
    let stokes_min = neg.get(kernel).copied().unwrap_or(f64::NAN);
    let (dirichlet_min, _) = solver.vector_laplacian_bounds();

    Ok(SpectrumReport {
        grid_size: (grid.nx(), grid.ny()),
        eigenvalues,
        scale,
        min_real_part,
        min_abs,
        max_imag_abs,
        stokes_min,
        dirichlet_min,
        neumann_min: solver.neumann_first_eigenvalue(),
    })
}
