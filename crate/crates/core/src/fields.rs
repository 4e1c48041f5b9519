//! Grid-aligned scalar and vector fields.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::SolveError;
use crate::grid::Grid;

/// `y += alpha x` for same-shape matrices.
pub(crate) fn axpy(y: &mut DMatrix<f64>, alpha: f64, x: &DMatrix<f64>) {
    assert_eq!(y.shape(), x.shape(), "axpy shape");
    y.zip_apply(x, |a, b| *a += alpha * b);
}

/// Wall treatment of a velocity-like field.
///
/// The wall-normal component is zero on walls in both cases (those faces are
/// not stored). `NoSlip` also forces the tangential trace to zero through an
/// odd ghost reflection; `Free` uses an even reflection (zero shear).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WallCondition {
    #[default]
    NoSlip,
    Free,
}

/// Cell-centred scalar samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: DMatrix<f64>,
    pub mean_pinned: bool,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: DMatrix::zeros(grid.nx(), grid.ny()), mean_pinned: false }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = DMatrix::from_fn(grid.nx(), grid.ny(), |i, j| {
            let (x, y) = grid.cell_center(i, j);
            f(x, y)
        });
        Self { grid, values, mean_pinned: false }
    }

    pub fn from_values(grid: Grid, values: DMatrix<f64>) -> Self {
        assert_eq!(values.shape(), grid.cell_shape(), "scalar field shape");
        Self { grid, values, mean_pinned: false }
    }

    /// Uniform samples in `[-1, 1]`.
    pub fn random(grid: Grid, rng: &mut impl Rng) -> Self {
        let values = DMatrix::from_fn(grid.nx(), grid.ny(), |_, _| rng.random_range(-1.0..=1.0));
        Self { grid, values, mean_pinned: false }
    }

    pub fn mean(&self) -> f64 {
        self.values.sum() / self.values.len() as f64
    }

    /// Subtracts the mean and marks the field as pinned.
    pub fn pin_mean(&mut self) {
        let m = self.mean();
        self.values.add_scalar_mut(-m);
        self.mean_pinned = true;
    }

    pub fn pinned(mut self) -> Self {
        self.pin_mean();
        self
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.values.dot(&other.values) * self.grid.cell_area()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }

    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        axpy(&mut self.values, alpha, &x.values);
        self.mean_pinned = false;
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { grid: self.grid, values: &self.values * s, mean_pinned: self.mean_pinned }
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(self.values.as_slice())
    }

    pub fn from_vector(grid: Grid, v: &DVector<f64>) -> Self {
        Self::from_values(grid, DMatrix::from_column_slice(grid.nx(), grid.ny(), v.as_slice()))
    }
}

/// Staggered two-component field: `u` on x-faces, `v` on y-faces.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub bc: WallCondition,
}

impl VectorField {
    pub fn zeros(grid: Grid, bc: WallCondition) -> Self {
        let (a, b) = grid.u_shape();
        let (c, d) = grid.v_shape();
        Self { grid, u: DMatrix::zeros(a, b), v: DMatrix::zeros(c, d), bc }
    }

    pub fn from_parts(grid: Grid, u: DMatrix<f64>, v: DMatrix<f64>, bc: WallCondition) -> Self {
        assert_eq!(u.shape(), grid.u_shape(), "x-face component shape");
        assert_eq!(v.shape(), grid.v_shape(), "y-face component shape");
        Self { grid, u, v, bc }
    }

    /// Samples `(fu, fv)` at the face positions of each component.
    pub fn from_fn(grid: Grid, bc: WallCondition, fu: impl Fn(f64, f64) -> f64, fv: impl Fn(f64, f64) -> f64) -> Self {
        let (a, b) = grid.u_shape();
        let (c, d) = grid.v_shape();
        let u = DMatrix::from_fn(a, b, |i, j| {
            let (x, y) = grid.u_face(i, j);
            fu(x, y)
        });
        let v = DMatrix::from_fn(c, d, |i, j| {
            let (x, y) = grid.v_face(i, j);
            fv(x, y)
        });
        Self { grid, u, v, bc }
    }

    /// Discrete curl of a corner-sampled stream function: `u = d psi/dy`,
    /// `v = -d psi/dx`. The result is exactly divergence-free for the
    /// staggered divergence whenever `psi` is constant along each wall.
    pub fn from_stream_function(grid: Grid, bc: WallCondition, psi: impl Fn(f64, f64) -> f64) -> Self {
        let (dx, dy) = (grid.dx(), grid.dy());
        let node = |i: usize, j: usize| {
            let (x, y) = grid.node(i, j);
            psi(x, y)
        };
        let (a, b) = grid.u_shape();
        let (c, d) = grid.v_shape();
        let ox = usize::from(!grid.periodic_x());
        let oy = usize::from(!grid.periodic_y());
        let u = DMatrix::from_fn(a, b, |i, j| (node(i + ox, j + 1) - node(i + ox, j)) / dy);
        let v = DMatrix::from_fn(c, d, |i, j| -(node(i + 1, j + oy) - node(i, j + oy)) / dx);
        Self { grid, u, v, bc }
    }

    /// Uniform samples in `[-1, 1]` on every stored face.
    pub fn random(grid: Grid, bc: WallCondition, rng: &mut impl Rng) -> Self {
        let mut w = Self::zeros(grid, bc);
        w.u.iter_mut().for_each(|x| *x = rng.random_range(-1.0..=1.0));
        w.v.iter_mut().for_each(|x| *x = rng.random_range(-1.0..=1.0));
        w
    }

    pub fn with_bc(mut self, bc: WallCondition) -> Self {
        self.bc = bc;
        self
    }

    pub fn inner(&self, other: &Self) -> f64 {
        (self.u.dot(&other.u) + self.v.dot(&other.v)) * self.grid.cell_area()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.u.amax().max(self.v.amax())
    }

    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        axpy(&mut self.u, alpha, &x.u);
        axpy(&mut self.v, alpha, &x.v);
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { grid: self.grid, u: &self.u * s, v: &self.v * s, bc: self.bc }
    }

    pub fn dofs(&self) -> usize {
        self.u.len() + self.v.len()
    }

    /// Flattens to `[u (column-major), v (column-major)]`.
    pub fn to_vector(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.dofs());
        let n = self.u.len();
        out.rows_mut(0, n).copy_from_slice(self.u.as_slice());
        out.rows_mut(n, self.v.len()).copy_from_slice(self.v.as_slice());
        out
    }

    pub fn from_vector(grid: Grid, bc: WallCondition, x: &DVector<f64>) -> Self {
        let (a, b) = grid.u_shape();
        let (c, d) = grid.v_shape();
        let n = a * b;
        assert_eq!(x.len(), n + c * d, "flattened vector length");
        let u = DMatrix::from_column_slice(a, b, &x.as_slice()[..n]);
        let v = DMatrix::from_column_slice(c, d, &x.as_slice()[n..]);
        Self { grid, u, v, bc }
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<(), SolveError> {
        if &self.grid == grid {
            Ok(())
        } else {
            Err(SolveError::GridMismatch)
        }
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: Self) -> VectorField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: Self) -> VectorField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &VectorField {
    type Output = VectorField;
    fn mul(self, s: f64) -> VectorField {
        self.scale(s)
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        self.scale(-1.0)
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: Self) -> ScalarField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: Self) -> ScalarField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, s: f64) -> ScalarField {
        self.scale(s)
    }
}

/// `{ |u|, |grad u|, |lap u| }` in the discrete L2 sense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub h1_semi: f64,
    pub lap_l2: f64,
}
