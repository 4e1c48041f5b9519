//! Constant-coefficient elliptic solves: Poisson (Dirichlet or zero-flux
//! walls) and the implicit-viscosity operator `I - alpha * lap`.
//!
//! Every operator here is a Kronecker sum `a0 I - a1 (Lx + Ly)` of two 1-D
//! second differences. The solve is preconditioned conjugate gradients on the
//! 5-point stencil. The default preconditioner diagonalises both 1-D factors
//! (fast diagonalisation), which is exact for these operators, so CG stops
//! after one iteration with a verified residual. Jacobi and unpreconditioned
//! CG are available and give the same answers, only slower.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;

use crate::error::SolveError;
use crate::fields::{axpy, ScalarField, VectorField, WallCondition};
use crate::grid::Grid;
use crate::ops::{cell_lines, u_lines, v_lines, ScalarBc};
use crate::stencil::{add_second_diff_x, add_second_diff_y, Line, LineBasis, LineKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EllipticKind {
    /// `lap x = b`, zero value on walls.
    PoissonDirichlet,
    /// `lap x = b`, zero flux on walls; `b` is mean-projected and `x` is
    /// returned with zero mean.
    PoissonNeumann,
    /// `(I - alpha lap) x = b`, zero value on walls.
    HelmholtzDirichlet { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticProblem {
    pub kind: EllipticKind,
    pub grid: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveReport {
    pub iterations: usize,
    /// Final `|A x - b| / |b|`.
    pub residual: f64,
    /// Relative mean of the right-hand side before projection (Neumann only).
    pub compat_defect: f64,
}

impl SolveReport {
    fn merge(self, other: SolveReport) -> SolveReport {
        SolveReport {
            iterations: self.iterations.max(other.iterations),
            residual: self.residual.max(other.residual),
            compat_defect: self.compat_defect.max(other.compat_defect),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    #[default]
    FastDiagonalization,
    Jacobi,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    /// Defaults to `10 (nx + ny)` when `None`.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
    /// Reject Neumann right-hand sides whose mean exceeds `1e-8` relative
    /// instead of silently projecting it out.
    pub strict: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: None, preconditioner: Preconditioner::FastDiagonalization, strict: false }
    }
}

const COMPAT_LIMIT: f64 = 1e-8;

/// `a0 I - a1 (Lx (+) Ly)`, symmetric positive (semi-)definite for
/// `a0 >= 0, a1 > 0`.
#[derive(Debug, Clone, Copy)]
struct Separable {
    lx: Line,
    ly: Line,
    a0: f64,
    a1: f64,
}

impl Separable {
    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x * self.a0;
        add_second_diff_x(&self.lx, x, -self.a1, &mut out);
        add_second_diff_y(&self.ly, x, -self.a1, &mut out);
        out
    }

    fn diagonal(&self) -> DMatrix<f64> {
        let dx = diag_entries(&self.lx);
        let dy = diag_entries(&self.ly);
        DMatrix::from_fn(self.lx.n, self.ly.n, |i, j| self.a0 - self.a1 * (dx[i] + dy[j]))
    }

    fn singular(&self) -> bool {
        self.a0 == 0.0 && has_constant_kernel(self.lx.kind) && has_constant_kernel(self.ly.kind)
    }
}

fn has_constant_kernel(k: LineKind) -> bool {
    matches!(k, LineKind::Periodic | LineKind::CellEven)
}

fn diag_entries(line: &Line) -> Vec<f64> {
    let w = 1.0 / (line.h * line.h);
    (0..line.n)
        .map(|k| {
            let edge = k == 0 || k + 1 == line.n;
            let mut d = -2.0 * w;
            if edge {
                let ends = if line.n == 1 { 2.0 } else { 1.0 };
                match line.kind {
                    LineKind::Periodic => {}
                    LineKind::CellOdd => d -= ends * w,
                    LineKind::CellEven => d += ends * w,
                    LineKind::NodeDirichlet => {}
                }
            }
            d
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct LineKey(LineKind, usize, u64);

impl From<&Line> for LineKey {
    fn from(l: &Line) -> Self {
        LineKey(l.kind, l.n, l.h.to_bits())
    }
}

/// Elliptic solver bound to one grid. Caches 1-D eigenbases; safe to share
/// between threads.
#[derive(Debug)]
pub struct Solver {
    grid: Grid,
    config: SolverConfig,
    bases: Mutex<HashMap<LineKey, Arc<LineBasis>>>,
}

impl Solver {
    pub fn new(grid: Grid) -> Self {
        Self::with_config(grid, SolverConfig::default())
    }

    pub fn with_config(grid: Grid, config: SolverConfig) -> Self {
        Self { grid, config, bases: Mutex::new(HashMap::new()) }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn max_iter(&self) -> usize {
        self.config.max_iter.unwrap_or(10 * (self.grid.nx() + self.grid.ny()))
    }

    fn basis(&self, line: &Line) -> Arc<LineBasis> {
        let key = LineKey::from(line);
        if let Some(b) = self.bases.lock().unwrap().get(&key) {
            return b.clone();
        }
        let b = Arc::new(line.eigenbasis());
        self.bases.lock().unwrap().entry(key).or_insert(b).clone()
    }

    fn fast_inverse(&self, op: &Separable, b: &DMatrix<f64>) -> DMatrix<f64> {
        let bx = self.basis(&op.lx);
        let by = self.basis(&op.ly);
        let mut hat = bx.vectors.tr_mul(b) * &by.vectors;
        let mut scale = 0.0f64;
        let den = DMatrix::from_fn(op.lx.n, op.ly.n, |i, j| {
            let d = op.a0 - op.a1 * (bx.values[i] + by.values[j]);
            scale = scale.max(d.abs());
            d
        });
        for (h, d) in hat.iter_mut().zip(den.iter()) {
            *h = if d.abs() <= 1e-12 * scale { 0.0 } else { *h / d };
        }
        &bx.vectors * hat * by.vectors.transpose()
    }

    fn pcg(&self, op: &Separable, b: &DMatrix<f64>) -> Result<(DMatrix<f64>, SolveReport), SolveError> {
        let tol = self.config.tol;
        if tol.is_nan() || tol <= 0.0 {
            return Err(SolveError::BadTolerance(tol));
        }
        let singular = op.singular();
        let b = if singular { b.add_scalar(-b.mean()) } else { b.clone() };
        let b = &b;
        let bnorm = b.norm();
        let mut x = DMatrix::zeros(b.nrows(), b.ncols());
        if bnorm == 0.0 {
            return Ok((x, SolveReport::default()));
        }
        let jacobi = match self.config.preconditioner {
            Preconditioner::Jacobi => Some(op.diagonal()),
            _ => None,
        };
        let precondition = |r: &DMatrix<f64>| -> DMatrix<f64> {
            let mut z = match self.config.preconditioner {
                Preconditioner::FastDiagonalization => self.fast_inverse(op, r),
                Preconditioner::Jacobi => r.component_div(jacobi.as_ref().unwrap()),
                Preconditioner::None => r.clone(),
            };
            if singular {
                let m = z.mean();
                z.add_scalar_mut(-m);
            }
            z
        };

        let mut r = b.clone();
        let mut z = precondition(&r);
        let mut p = z.clone();
        let mut rz = r.dot(&z);
        let max_iter = self.max_iter();
        let mut residual = 1.0;
        for it in 1..=max_iter {
            let ap = op.apply(&p);
            let pap = p.dot(&ap);
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            axpy(&mut x, alpha, &p);
            axpy(&mut r, -alpha, &ap);
            if singular {
                let m = r.mean();
                r.add_scalar_mut(-m);
            }
            if r.norm() <= tol * bnorm {
                let true_r = b - op.apply(&x);
                residual = true_r.norm() / bnorm;
                if residual <= tol {
                    return Ok((x, SolveReport { iterations: it, residual, compat_defect: 0.0 }));
                }
                r = true_r;
            }
            z = precondition(&r);
            let rz_new = r.dot(&z);
            let beta = rz_new / rz;
            rz = rz_new;
            p = &z + &p * beta;
        }
        if residual == 1.0 {
            residual = (b - op.apply(&x)).norm() / bnorm;
        }
        Err(SolveError::NonConvergence { iterations: max_iter, residual })
    }

    fn scalar_operator(&self, kind: EllipticKind) -> (Separable, f64) {
        let bc = match kind {
            EllipticKind::PoissonNeumann => ScalarBc::Neumann,
            _ => ScalarBc::Dirichlet,
        };
        let (lx, ly) = cell_lines(&self.grid, bc);
        operator_for(kind, lx, ly)
    }

    /// Solves one scalar problem on the solver grid.
    pub fn solve(&self, kind: EllipticKind, rhs: &ScalarField) -> Result<(ScalarField, SolveReport), SolveError> {
        if rhs.grid != self.grid {
            return Err(SolveError::GridMismatch);
        }
        let (op, sign) = self.scalar_operator(kind);
        let mut b = &rhs.values * sign;
        let mut compat_defect = 0.0;
        if op.singular() {
            let mean = b.mean();
            let rms = (b.norm_squared() / b.len() as f64).sqrt();
            compat_defect = if rms > 0.0 { mean.abs() / rms } else { 0.0 };
            if self.config.strict && compat_defect > COMPAT_LIMIT {
                return Err(SolveError::IncompatibleRhs { defect: compat_defect });
            }
            b.add_scalar_mut(-mean);
        }
        let (x, mut report) = self.pcg(&op, &b)?;
        report.compat_defect = compat_defect;
        let mut out = ScalarField::from_values(self.grid, x);
        if op.singular() {
            out.pin_mean();
        }
        Ok((out, report))
    }

    /// Componentwise solve for a face field with the wall closure of
    /// `rhs.bc` (zero value for `NoSlip`). On the fully periodic grid the
    /// Poisson problem is singular and each component's mean is projected out.
    pub fn solve_vector(&self, kind: EllipticKind, rhs: &VectorField) -> Result<(VectorField, SolveReport), SolveError> {
        rhs.check_grid(&self.grid)?;
        if kind == EllipticKind::PoissonNeumann {
            return Err(SolveError::Unsupported("zero-flux Poisson for a velocity field"));
        }
        let (ux, uy) = u_lines(&self.grid, rhs.bc);
        let (vx, vy) = v_lines(&self.grid, rhs.bc);
        let (uop, s) = operator_for(kind, ux, uy);
        let (vop, _) = operator_for(kind, vx, vy);
        if rhs.bc == WallCondition::Free && (uop.singular() || vop.singular()) {
            return Err(SolveError::Unsupported("singular free-slip Poisson problem"));
        }
        let (u, ru) = self.pcg(&uop, &(&rhs.u * s))?;
        let (v, rv) = self.pcg(&vop, &(&rhs.v * s))?;
        Ok((VectorField::from_parts(self.grid, u, v, rhs.bc), ru.merge(rv)))
    }

    /// Applies the (unsigned) operator of `kind` to a scalar, e.g. `lap x`
    /// for Poisson and `x - alpha lap x` for Helmholtz.
    pub fn apply(&self, kind: EllipticKind, x: &ScalarField) -> ScalarField {
        let (op, sign) = self.scalar_operator(kind);
        ScalarField::from_values(self.grid, op.apply(&x.values) * sign)
    }

    /// Smallest and largest eigenvalue of `-lap` for velocity fields with
    /// no-slip walls.
    pub fn vector_laplacian_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (lx, ly) in [u_lines(&self.grid, WallCondition::NoSlip), v_lines(&self.grid, WallCondition::NoSlip)] {
            let (a, b) = (self.basis(&lx), self.basis(&ly));
            let amax = a.values.max();
            let bmax = b.values.max();
            let amin = a.values.min();
            let bmin = b.values.min();
            lo = lo.min(-(amax + bmax));
            hi = hi.max(-(amin + bmin));
        }
        (lo, hi)
    }

    /// Smallest nonzero eigenvalue of the zero-flux scalar `-lap`.
    pub fn neumann_first_eigenvalue(&self) -> f64 {
        let (lx, ly) = cell_lines(&self.grid, ScalarBc::Neumann);
        let (a, b) = (self.basis(&lx), self.basis(&ly));
        let mut best = f64::INFINITY;
        let scale = a.values.amax() + b.values.amax();
        for x in a.values.iter() {
            for y in b.values.iter() {
                let l = -(x + y);
                if l > 1e-10 * scale {
                    best = best.min(l);
                }
            }
        }
        best
    }
}

fn operator_for(kind: EllipticKind, lx: Line, ly: Line) -> (Separable, f64) {
    match kind {
        EllipticKind::PoissonDirichlet | EllipticKind::PoissonNeumann => (Separable { lx, ly, a0: 0.0, a1: 1.0 }, -1.0),
        EllipticKind::HelmholtzDirichlet { alpha } => (Separable { lx, ly, a0: 1.0, a1: alpha }, 1.0),
    }
}
