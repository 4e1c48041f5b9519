//! Discrete differential operators on the staggered grid.
//!
//! `grad` maps cell scalars to faces and `div` maps faces to cells; with the
//! midpoint-rule inner products they are exact negative adjoints of each other,
//! and `div(grad p)` is the compact 5-point Laplacian with even (zero-flux)
//! reflection at walls.

use nalgebra::DMatrix;

use crate::fields::{Norms, ScalarField, VectorField, WallCondition};
use crate::grid::Grid;
use crate::stencil::{add_second_diff_x, add_second_diff_y, Line, LineKind};

/// Boundary closure for scalar Laplacians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarBc {
    /// Zero value on walls (odd reflection).
    Dirichlet,
    /// Zero normal derivative on walls (even reflection).
    Neumann,
}

pub(crate) fn cell_lines(grid: &Grid, bc: ScalarBc) -> (Line, Line) {
    let wall = match bc {
        ScalarBc::Dirichlet => LineKind::CellOdd,
        ScalarBc::Neumann => LineKind::CellEven,
    };
    let kx = if grid.periodic_x() { LineKind::Periodic } else { wall };
    let ky = if grid.periodic_y() { LineKind::Periodic } else { wall };
    (Line::new(kx, grid.nx(), grid.dx()), Line::new(ky, grid.ny(), grid.dy()))
}

fn tangential(wall: WallCondition) -> LineKind {
    match wall {
        WallCondition::NoSlip => LineKind::CellOdd,
        WallCondition::Free => LineKind::CellEven,
    }
}

pub(crate) fn u_lines(grid: &Grid, wall: WallCondition) -> (Line, Line) {
    let (n, m) = grid.u_shape();
    let kx = if grid.periodic_x() { LineKind::Periodic } else { LineKind::NodeDirichlet };
    let ky = if grid.periodic_y() { LineKind::Periodic } else { tangential(wall) };
    (Line::new(kx, n, grid.dx()), Line::new(ky, m, grid.dy()))
}

pub(crate) fn v_lines(grid: &Grid, wall: WallCondition) -> (Line, Line) {
    let (n, m) = grid.v_shape();
    let kx = if grid.periodic_x() { LineKind::Periodic } else { tangential(wall) };
    let ky = if grid.periodic_y() { LineKind::Periodic } else { LineKind::NodeDirichlet };
    (Line::new(kx, n, grid.dx()), Line::new(ky, m, grid.dy()))
}

/// x-face value at full face index `f` (`0..=nx`), zero on walls.
#[inline]
fn u_face(grid: &Grid, u: &DMatrix<f64>, f: usize, j: usize) -> f64 {
    if grid.periodic_x() {
        u[(f % grid.nx(), j)]
    } else if f == 0 || f == grid.nx() {
        0.0
    } else {
        u[(f - 1, j)]
    }
}

#[inline]
fn v_face(grid: &Grid, v: &DMatrix<f64>, i: usize, f: usize) -> f64 {
    if grid.periodic_y() {
        v[(i, f % grid.ny())]
    } else if f == 0 || f == grid.ny() {
        0.0
    } else {
        v[(i, f - 1)]
    }
}

/// Face gradient of a cell scalar. The result carries `NoSlip` metadata:
/// its wall-normal trace is zero by construction.
pub fn grad(p: &ScalarField) -> VectorField {
    let g = p.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let (dx, dy) = (g.dx(), g.dy());
    let ox = usize::from(!g.periodic_x());
    let oy = usize::from(!g.periodic_y());
    let (a, b) = g.u_shape();
    let (c, d) = g.v_shape();
    let pv = &p.values;
    let u = DMatrix::from_fn(a, b, |i, j| {
        let f = i + ox;
        let left = if f == 0 { nx - 1 } else { f - 1 };
        (pv[(f % nx, j)] - pv[(left, j)]) / dx
    });
    let v = DMatrix::from_fn(c, d, |i, j| {
        let f = j + oy;
        let below = if f == 0 { ny - 1 } else { f - 1 };
        (pv[(i, f % ny)] - pv[(i, below)]) / dy
    });
    VectorField::from_parts(g, u, v, WallCondition::NoSlip)
}

/// Cell divergence of a face field (wall-normal faces are zero).
pub fn div(w: &VectorField) -> ScalarField {
    let g = w.grid;
    let (dx, dy) = (g.dx(), g.dy());
    let values = DMatrix::from_fn(g.nx(), g.ny(), |i, j| {
        (u_face(&g, &w.u, i + 1, j) - u_face(&g, &w.u, i, j)) / dx + (v_face(&g, &w.v, i, j + 1) - v_face(&g, &w.v, i, j)) / dy
    });
    ScalarField::from_values(g, values)
}

/// 5-point Laplacian of a cell scalar with ghost values from `bc`.
pub fn laplacian_scalar(p: &ScalarField, bc: ScalarBc) -> ScalarField {
    let (lx, ly) = cell_lines(&p.grid, bc);
    let mut out = DMatrix::zeros(p.grid.nx(), p.grid.ny());
    add_second_diff_x(&lx, &p.values, 1.0, &mut out);
    add_second_diff_y(&ly, &p.values, 1.0, &mut out);
    ScalarField::from_values(p.grid, out)
}

/// Componentwise 5-point Laplacian; the wall closure comes from `w.bc`.
pub fn laplacian_vector(w: &VectorField) -> VectorField {
    let g = w.grid;
    let (ux, uy) = u_lines(&g, w.bc);
    let (vx, vy) = v_lines(&g, w.bc);
    let mut u = DMatrix::zeros(w.u.nrows(), w.u.ncols());
    let mut v = DMatrix::zeros(w.v.nrows(), w.v.ncols());
    add_second_diff_x(&ux, &w.u, 1.0, &mut u);
    add_second_diff_y(&uy, &w.u, 1.0, &mut u);
    add_second_diff_x(&vx, &w.v, 1.0, &mut v);
    add_second_diff_y(&vy, &w.v, 1.0, &mut v);
    VectorField::from_parts(g, u, v, w.bc)
}

/// `grad(div w)`.
pub fn grad_div(w: &VectorField) -> VectorField {
    grad(&div(w))
}

/// Vorticity `dv/dx - du/dy` at cell corners, shape `(nx + 1, ny + 1)`.
/// Periodic directions repeat the first row/column at the end.
pub fn vorticity(w: &VectorField) -> DMatrix<f64> {
    let g = w.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let (dx, dy) = (g.dx(), g.dy());
    let odd = w.bc == WallCondition::NoSlip;
    // v at cell column i (may be a ghost column -1 or nx), face row f
    let v_at = |i: isize, f: usize| -> f64 {
        if g.periodic_x() {
            v_face(&g, &w.v, i.rem_euclid(nx as isize) as usize, f)
        } else if i < 0 {
            let s = v_face(&g, &w.v, 0, f);
            if odd {
                -s
            } else {
                s
            }
        } else if i >= nx as isize {
            let s = v_face(&g, &w.v, nx - 1, f);
            if odd {
                -s
            } else {
                s
            }
        } else {
            v_face(&g, &w.v, i as usize, f)
        }
    };
    let u_at = |f: usize, j: isize| -> f64 {
        if g.periodic_y() {
            u_face(&g, &w.u, f, j.rem_euclid(ny as isize) as usize)
        } else if j < 0 {
            let s = u_face(&g, &w.u, f, 0);
            if odd {
                -s
            } else {
                s
            }
        } else if j >= ny as isize {
            let s = u_face(&g, &w.u, f, ny - 1);
            if odd {
                -s
            } else {
                s
            }
        } else {
            u_face(&g, &w.u, f, j as usize)
        }
    };
    DMatrix::from_fn(nx + 1, ny + 1, |i, j| {
        let (ii, jj) = (i as isize, j as isize);
        (v_at(ii, j) - v_at(ii - 1, j)) / dx - (u_at(i, jj) - u_at(i, jj - 1)) / dy
    })
}

/// `|grad w|^2 = -<w, lap w>` (summation by parts, exact for these stencils).
pub fn grad_norm_sq(w: &VectorField) -> f64 {
    (-w.inner(&laplacian_vector(w))).max(0.0)
}

pub fn norms(w: &VectorField) -> Norms {
    let lap = laplacian_vector(w);
    Norms { l2: w.norm(), h1_semi: (-w.inner(&lap)).max(0.0).sqrt(), lap_l2: lap.norm() }
}

/// `|grad p|^2` of a cell scalar with zero-flux walls.
pub fn scalar_grad_norm_sq(p: &ScalarField) -> f64 {
    grad(p).norm_sq()
}

/// One-sided traces at the channel/box walls.
#[derive(Debug, Clone, PartialEq)]
pub struct WallTrace {
    /// Bottom wall (`y = 0`), one entry per column of the sampled component.
    pub bottom: Vec<f64>,
    /// Top wall (`y = ly`).
    pub top: Vec<f64>,
}

/// Second-order extrapolation of the tangential velocity `u` onto the
/// horizontal walls from the three nearest interior samples.
pub fn tangential_wall_trace(w: &VectorField) -> Option<WallTrace> {
    if w.grid.periodic_y() || w.u.ncols() < 3 {
        return None;
    }
    let m = w.u.ncols();
    let ext = |a: f64, b: f64, c: f64| (15.0 * a - 10.0 * b + 3.0 * c) / 8.0;
    let bottom = (0..w.u.nrows()).map(|i| ext(w.u[(i, 0)], w.u[(i, 1)], w.u[(i, 2)])).collect();
    let top = (0..w.u.nrows()).map(|i| ext(w.u[(i, m - 1)], w.u[(i, m - 2)], w.u[(i, m - 3)])).collect();
    Some(WallTrace { bottom, top })
}

/// One-sided second-order `dp/dy` at the horizontal walls of a cell scalar,
/// for boundary-data extraction only (never used inside a solve).
pub fn wall_normal_derivative(p: &ScalarField) -> Option<WallTrace> {
    let g = p.grid;
    if g.periodic_y() {
        return None;
    }
    let (nx, ny) = (g.nx(), g.ny());
    let dy = g.dy();
    let pv = &p.values;
    let bottom = (0..nx).map(|i| (-2.0 * pv[(i, 0)] + 3.0 * pv[(i, 1)] - pv[(i, 2)]) / dy).collect();
    let top = (0..nx).map(|i| (2.0 * pv[(i, ny - 1)] - 3.0 * pv[(i, ny - 2)] + pv[(i, ny - 3)]) / dy).collect();
    Some(WallTrace { bottom, top })
}
