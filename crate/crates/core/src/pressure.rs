//! Pressure decomposition: discrete Helmholtz projection, `Q = grad div
//! lap^-1`, the Stokes and Euler pressures, the pressure driven by a
//! prescribed divergence, and the convection term.

use nalgebra::DMatrix;

use crate::elliptic::{EllipticKind, Solver};
use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField, WallCondition};
use crate::grid::Grid;
use crate::ops::{div, grad, grad_div, laplacian_scalar, laplacian_vector, ScalarBc, WallTrace};

/// Pressure components of one state; each is mean-pinned.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureSplit {
    pub p_euler: ScalarField,
    pub p_stokes: ScalarField,
    /// Zero unless a divergence source is prescribed.
    pub p_gh: ScalarField,
}

impl PressureSplit {
    pub fn zeros(grid: Grid) -> Self {
        let z = ScalarField::zeros(grid).pinned();
        Self { p_euler: z.clone(), p_stokes: z.clone(), p_gh: z }
    }

    /// `p_E + nu p_S + p_gh`.
    pub fn total(&self, nu: f64) -> ScalarField {
        let mut p = self.p_euler.clone();
        p.axpy(nu, &self.p_stokes);
        p.axpy(1.0, &self.p_gh);
        p.pinned()
    }
}

/// `P a = a + grad q` with `lap_N q = -div a`. Returns `(P a, q)`.
pub fn helmholtz_project(solver: &Solver, a: &VectorField) -> Result<(VectorField, ScalarField)> {
    let rhs = &div(a) * -1.0;
    let (q, _) = solver.solve(EllipticKind::PoissonNeumann, &rhs)?;
    let mut pa = a.clone();
    pa.axpy(1.0, &grad(&q));
    Ok((pa, q))
}

/// `grad div lap_D^-1 g`, with the Dirichlet inverse taken componentwise.
pub fn q_operator(solver: &Solver, g: &VectorField) -> Result<VectorField> {
    let (x, _) = solver.solve_vector(EllipticKind::PoissonDirichlet, &g.clone().with_bc(WallCondition::NoSlip))?;
    Ok(grad_div(&x).with_bc(g.bc))
}

/// Stokes pressure of a no-slip field: `grad p_S = (I - P)(lap u - grad div u)`.
/// Returns the mean-pinned potential and its gradient.
pub fn stokes_pressure(solver: &Solver, u: &VectorField) -> Result<(ScalarField, VectorField)> {
    let mut a = laplacian_vector(u);
    a.axpy(-1.0, &grad_div(u));
    let (_, q) = helmholtz_project(solver, &a)?;
    let p_s = (&q * -1.0).pinned();
    let g = grad(&p_s);
    Ok((p_s, g))
}

/// Euler pressure: `P(N - f) = N - f + grad p_E` with `N = (u . grad) u`.
pub fn euler_pressure(solver: &Solver, u: &VectorField, f: &VectorField) -> Result<(ScalarField, VectorField)> {
    let a = &advect(u) - f;
    euler_pressure_of(solver, &a)
}

/// Euler pressure for a precomputed `N - f`.
pub fn euler_pressure_of(solver: &Solver, a: &VectorField) -> Result<(ScalarField, VectorField)> {
    let (_, q) = helmholtz_project(solver, a)?;
    let p_e = q.pinned();
    let g = grad(&p_e);
    Ok((p_e, g))
}

/// Relative compatibility limit between wall flux and divergence source.
pub const COMPAT_TOL: f64 = 1e-8;

/// Pressure `p_gh` of a prescribed divergence `h`:
/// `<grad p, grad phi> = -<dt g_n, phi>_walls + <dt h, phi> + nu <grad h, grad phi>`.
///
/// `dt_g_normal` is the time derivative of the outward normal wall velocity on
/// the horizontal walls, one value per cell column (`None` means zero). Side
/// walls of a box carry zero data.
pub fn nonhomogeneous_pressure(
    solver: &Solver,
    dt_g_normal: Option<&WallTrace>,
    h: &ScalarField,
    dt_h: &ScalarField,
    nu: f64,
) -> Result<ScalarField> {
    let g = *solver.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut boundary = DMatrix::zeros(nx, ny);
    let mut flux = 0.0;
    if let Some(data) = dt_g_normal {
        if g.periodic_y() {
            return Err(Error::Invalid("wall data given on a grid without walls".into()));
        }
        if data.bottom.len() != nx || data.top.len() != nx {
            return Err(Error::Invalid(format!("wall data needs {nx} values per wall")));
        }
        for i in 0..nx {
            boundary[(i, 0)] += data.bottom[i] / g.dy();
            boundary[(i, ny - 1)] += data.top[i] / g.dy();
            flux += (data.bottom[i] + data.top[i]) * g.dx();
        }
    }
    let source = dt_h.values.sum() * g.cell_area();
    let scale = flux.abs().max(source.abs()).max(dt_h.values.abs().sum() * g.cell_area());
    if scale > 0.0 {
        let defect = (flux - source).abs() / scale;
        if defect > COMPAT_TOL {
            return Err(Error::IncompatibleData { defect });
        }
    }
    let mut rhs = ScalarField::from_values(g, boundary);
    rhs.axpy(-1.0, dt_h);
    rhs.axpy(nu, &laplacian_scalar(h, ScalarBc::Neumann));
    let (p, _) = solver.solve(EllipticKind::PoissonNeumann, &rhs)?;
    Ok(p)
}

/// Centred advective form `(u . grad) u`, evaluated on each component's faces.
pub fn advect(w: &VectorField) -> VectorField {
    let g = w.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let (dx, dy) = (g.dx(), g.dy());
    let sgn = if w.bc == WallCondition::NoSlip { -1.0 } else { 1.0 };
    let px = g.periodic_x();
    let py = g.periodic_y();

    // x-face value at full face index f (may be out of range) and cell row j
    // (may be a ghost row)
    let uf = |f: isize, j: isize| -> f64 {
        let (f, s) = if px {
            (f.rem_euclid(nx as isize), 1.0)
        } else if f <= 0 || f >= nx as isize {
            return 0.0;
        } else {
            (f, 1.0)
        };
        let (j, s) = if py {
            (j.rem_euclid(ny as isize), s)
        } else if j < 0 {
            (0, sgn * s)
        } else if j >= ny as isize {
            (ny as isize - 1, sgn * s)
        } else {
            (j, s)
        };
        let fi = if px { f } else { f - 1 };
        s * w.u[(fi as usize, j as usize)]
    };
    let vf = |i: isize, f: isize| -> f64 {
        let (f, s) = if py {
            (f.rem_euclid(ny as isize), 1.0)
        } else if f <= 0 || f >= ny as isize {
            return 0.0;
        } else {
            (f, 1.0)
        };
        let (i, s) = if px {
            (i.rem_euclid(nx as isize), s)
        } else if i < 0 {
            (0, sgn * s)
        } else if i >= nx as isize {
            (nx as isize - 1, sgn * s)
        } else {
            (i, s)
        };
        let fj = if py { f } else { f - 1 };
        s * w.v[(i as usize, fj as usize)]
    };

    let ox = isize::from(!px);
    let oy = isize::from(!py);
    let (a, b) = g.u_shape();
    let (c, d) = g.v_shape();
    let u = DMatrix::from_fn(a, b, |i, j| {
        let f = i as isize + ox;
        let j = j as isize;
        let uu = uf(f, j);
        let dudx = (uf(f + 1, j) - uf(f - 1, j)) / (2.0 * dx);
        let dudy = (uf(f, j + 1) - uf(f, j - 1)) / (2.0 * dy);
        let vv = 0.25 * (vf(f - 1, j) + vf(f, j) + vf(f - 1, j + 1) + vf(f, j + 1));
        uu * dudx + vv * dudy
    });
    let v = DMatrix::from_fn(c, d, |i, j| {
        let f = j as isize + oy;
        let i = i as isize;
        let vv = vf(i, f);
        let dvdx = (vf(i + 1, f) - vf(i - 1, f)) / (2.0 * dx);
        let dvdy = (vf(i, f + 1) - vf(i, f - 1)) / (2.0 * dy);
        let uu = 0.25 * (uf(i, f - 1) + uf(i + 1, f - 1) + uf(i, f) + uf(i + 1, f));
        uu * dvdx + vv * dvdy
    });
    VectorField::from_parts(g, u, v, w.bc)
}
