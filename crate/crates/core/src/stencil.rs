//! One-dimensional second-difference operators and their eigenbases.
//!
//! Every Laplacian in the crate is a Kronecker sum of two of these, one per
//! axis, which is what makes the elliptic problems separable.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Boundary closure of a 1-D second difference on `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LineKind {
    /// Wrap-around.
    Periodic,
    /// Cell-centred points, ghost = -interior (zero value on the wall face).
    CellOdd,
    /// Cell-centred points, ghost = +interior (zero flux through the wall face).
    CellEven,
    /// Face points strictly inside two walls that carry a zero value.
    NodeDirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub kind: LineKind,
    pub n: usize,
    pub h: f64,
}

impl Line {
    pub fn new(kind: LineKind, n: usize, h: f64) -> Self {
        Self { kind, n, h }
    }

    /// Value of the neighbour at offset `k + d` (`d = +-1`) of `a`, with the
    /// closure applied.
    #[inline]
    pub fn neighbour(&self, a: impl Fn(usize) -> f64, k: usize, up: bool) -> f64 {
        let n = self.n;
        if up {
            if k + 1 < n {
                return a(k + 1);
            }
            match self.kind {
                LineKind::Periodic => a(0),
                LineKind::CellOdd => -a(k),
                LineKind::CellEven => a(k),
                LineKind::NodeDirichlet => 0.0,
            }
        } else {
            if k > 0 {
                return a(k - 1);
            }
            match self.kind {
                LineKind::Periodic => a(n - 1),
                LineKind::CellOdd => -a(k),
                LineKind::CellEven => a(k),
                LineKind::NodeDirichlet => 0.0,
            }
        }
    }

    /// Dense matrix of the second difference.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let w = 1.0 / (self.h * self.h);
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] -= 2.0 * w;
            for up in [false, true] {
                let at_end = if up { k + 1 == n } else { k == 0 };
                if !at_end {
                    let l = if up { k + 1 } else { k - 1 };
                    m[(k, l)] += w;
                    continue;
                }
                match self.kind {
                    LineKind::Periodic => {
                        let l = if up { 0 } else { n - 1 };
                        m[(k, l)] += w;
                    }
                    LineKind::CellOdd => m[(k, k)] -= w,
                    LineKind::CellEven => m[(k, k)] += w,
                    LineKind::NodeDirichlet => {}
                }
            }
        }
        m
    }

    pub fn eigenbasis(&self) -> LineBasis {
        let eig = SymmetricEigen::new(self.matrix());
        LineBasis { values: eig.eigenvalues, vectors: eig.eigenvectors }
    }
}

/// Orthonormal eigenvectors (columns) and eigenvalues of a [`Line`].
#[derive(Debug, Clone)]
pub struct LineBasis {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

/// Adds `scale * L` applied along axis 0 (rows, the x index) of `a` to `out`.
pub fn add_second_diff_x(line: &Line, a: &DMatrix<f64>, scale: f64, out: &mut DMatrix<f64>) {
    let (nr, nc) = a.shape();
    debug_assert_eq!(nr, line.n);
    let w = scale / (line.h * line.h);
    for j in 0..nc {
        let col = a.column(j);
        for i in 0..nr {
            let lo = line.neighbour(|k| col[k], i, false);
            let hi = line.neighbour(|k| col[k], i, true);
            out[(i, j)] += w * (lo - 2.0 * col[i] + hi);
        }
    }
}

/// Adds `scale * L` applied along axis 1 (columns, the y index) of `a` to `out`.
pub fn add_second_diff_y(line: &Line, a: &DMatrix<f64>, scale: f64, out: &mut DMatrix<f64>) {
    let (nr, nc) = a.shape();
    debug_assert_eq!(nc, line.n);
    let w = scale / (line.h * line.h);
    for j in 0..nc {
        for i in 0..nr {
            let lo = line.neighbour(|k| a[(i, k)], j, false);
            let hi = line.neighbour(|k| a[(i, k)], j, true);
            out[(i, j)] += w * (lo - 2.0 * a[(i, j)] + hi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrices_are_symmetric() {
        for kind in [LineKind::Periodic, LineKind::CellOdd, LineKind::CellEven, LineKind::NodeDirichlet] {
            let m = Line::new(kind, 7, 0.3).matrix();
            assert!((&m - m.transpose()).norm() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn null_spaces() {
        // constants are annihilated by the periodic and even closures only
        let ones = DVector::from_element(6, 1.0);
        for (kind, zero) in
            [(LineKind::Periodic, true), (LineKind::CellEven, true), (LineKind::CellOdd, false), (LineKind::NodeDirichlet, false)]
        {
            let r = Line::new(kind, 6, 1.0).matrix() * &ones;
            assert_eq!(r.norm() < 1e-12, zero, "{kind:?}");
        }
    }

    #[test]
    fn known_smallest_eigenvalues() {
        let n = 16;
        let h = 1.0 / n as f64;
        let pi = std::f64::consts::PI;
        let s = |t: f64| (t / 2.0).sin().powi(2) * 4.0 / (h * h);
        // Dirichlet on cells: sin(pi y), Neumann on cells: cos(pi y), nodes: sin(pi y)
        let odd = Line::new(LineKind::CellOdd, n, h).eigenbasis();
        let even = Line::new(LineKind::CellEven, n, h).eigenbasis();
        let node = Line::new(LineKind::NodeDirichlet, n - 1, h).eigenbasis();
        let top = |b: &LineBasis| b.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((top(&odd) + s(pi * h)).abs() < 1e-9);
        assert!((top(&node) + s(pi * h)).abs() < 1e-9);
        let mut ev: Vec<f64> = even.values.iter().cloned().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!(ev[0].abs() < 1e-9);
        assert!((ev[1] + s(pi * h)).abs() < 1e-9);
    }
}
