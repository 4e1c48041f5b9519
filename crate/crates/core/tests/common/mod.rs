//! Dense reference matrices assembled directly from the stencil formulas,
//! independent of the matrix-free operators under test.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unsflow_core::{Grid, ScalarField, VectorField, WallCondition};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Oracle {
    pub grid: Grid,
    /// cells x faces
    pub d: DMatrix<f64>,
    /// faces x cells, `-d^T`
    pub g: DMatrix<f64>,
    /// no-slip vector Laplacian, faces x faces
    pub l: DMatrix<f64>,
    pub nu: usize,
}

impl Oracle {
    pub fn new(grid: Grid) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        let (dx, dy) = (grid.dx(), grid.dy());
        let (px, py) = (grid.periodic_x(), grid.periodic_y());
        let urows = if px { nx } else { nx - 1 };
        let vcols = if py { ny } else { ny - 1 };
        let nu = urows * ny;
        let nv = nx * vcols;
        let nf = nu + nv;
        let nc = nx * ny;

        // full x-face (f in 0..=nx, row j) -> unknown
        let xf = |f: isize, j: isize| -> Option<usize> {
            let j = if py { j.rem_euclid(ny as isize) } else { j };
            if j < 0 || j >= ny as isize {
                return None;
            }
            let a = if px {
                f.rem_euclid(nx as isize)
            } else if f <= 0 || f >= nx as isize {
                return None;
            } else {
                f - 1
            };
            Some(a as usize + urows * j as usize)
        };
        let yf = |i: isize, f: isize| -> Option<usize> {
            let i = if px { i.rem_euclid(nx as isize) } else { i };
            if i < 0 || i >= nx as isize {
                return None;
            }
            let b = if py {
                f.rem_euclid(ny as isize)
            } else if f <= 0 || f >= ny as isize {
                return None;
            } else {
                f - 1
            };
            Some(nu + i as usize + nx * b as usize)
        };

        let mut d = DMatrix::zeros(nc, nf);
        for j in 0..ny {
            for i in 0..nx {
                let c = i + nx * j;
                let (ii, jj) = (i as isize, j as isize);
                if let Some(k) = xf(ii + 1, jj) {
                    d[(c, k)] += 1.0 / dx;
                }
                if let Some(k) = xf(ii, jj) {
                    d[(c, k)] -= 1.0 / dx;
                }
                if let Some(k) = yf(ii, jj + 1) {
                    d[(c, k)] += 1.0 / dy;
                }
                if let Some(k) = yf(ii, jj) {
                    d[(c, k)] -= 1.0 / dy;
                }
            }
        }
        let g = -d.transpose();

        // no-slip Laplacian: wall-normal neighbours beyond a wall are zero,
        // tangential ghosts are odd reflections
        let mut l = DMatrix::zeros(nf, nf);
        for j in 0..ny {
            for a in 0..urows {
                let f = if px { a } else { a + 1 } as isize;
                let k = xf(f, j as isize).unwrap();
                l[(k, k)] -= 2.0 / (dx * dx) + 2.0 / (dy * dy);
                for s in [-1isize, 1] {
                    if let Some(m) = xf(f + s, j as isize) {
                        l[(k, m)] += 1.0 / (dx * dx);
                    }
                    match xf(f, j as isize + s) {
                        Some(m) => l[(k, m)] += 1.0 / (dy * dy),
                        None => l[(k, k)] -= 1.0 / (dy * dy),
                    }
                }
            }
        }
        for b in 0..vcols {
            for i in 0..nx {
                let f = if py { b } else { b + 1 } as isize;
                let k = yf(i as isize, f).unwrap();
                l[(k, k)] -= 2.0 / (dx * dx) + 2.0 / (dy * dy);
                for s in [-1isize, 1] {
                    if let Some(m) = yf(i as isize, f + s) {
                        l[(k, m)] += 1.0 / (dy * dy);
                    }
                    match yf(i as isize + s, f) {
                        Some(m) => l[(k, m)] += 1.0 / (dx * dx),
                        None => l[(k, k)] -= 1.0 / (dx * dx),
                    }
                }
            }
        }
        Self { grid, d, g, l, nu }
    }

    pub fn faces(&self) -> usize {
        self.l.nrows()
    }

    /// Zero-flux scalar Laplacian `D G`.
    pub fn neumann(&self) -> DMatrix<f64> {
        &self.d * &self.g
    }

    pub fn projection(&self) -> DMatrix<f64> {
        let dg = self.neumann();
        let inv = dg.pseudo_inverse(1e-10).unwrap();
        DMatrix::identity(self.faces(), self.faces()) - &self.g * inv * &self.d
    }

    pub fn l_inverse(&self) -> DMatrix<f64> {
        self.l.clone().pseudo_inverse(1e-10).unwrap()
    }

    pub fn q(&self) -> DMatrix<f64> {
        &self.g * &self.d * self.l_inverse()
    }

    /// `u -> grad p_S = (I - P)(lap - grad div) u`.
    pub fn stokes_grad(&self) -> DMatrix<f64> {
        let n = self.faces();
        (DMatrix::identity(n, n) - self.projection()) * (&self.l - &self.g * &self.d)
    }

    pub fn vec(&self, w: &VectorField) -> DVector<f64> {
        w.to_vector()
    }

    pub fn field(&self, x: &DVector<f64>) -> VectorField {
        VectorField::from_vector(self.grid, WallCondition::NoSlip, x)
    }

    pub fn scalar(&self, p: &ScalarField) -> DVector<f64> {
        p.to_vector()
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        a.abs() / b.abs()
    }
}
