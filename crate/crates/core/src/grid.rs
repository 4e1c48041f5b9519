//! Structured 2-D grids with a staggered (MAC) variable layout.
//!
//! Pressure-like scalars live at cell centres. The x-velocity lives on
//! x-faces and the y-velocity on y-faces. Only faces that carry unknowns are
//! stored: wall-normal faces on a wall are identically zero and never appear in
//! the arrays.

use crate::error::GridError;

/// Boundary topology of the rectangle `[0, lx] x [0, ly]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Periodic in x, no-slip walls at `y = 0` and `y = ly`.
    PeriodicChannel,
    /// Walls on all four sides.
    ClosedBox,
    /// Periodic in both directions; no boundary at all. Only used as a
    /// harness for the boundary-free identities.
    FullyPeriodic,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::PeriodicChannel => "channel",
            Topology::ClosedBox => "box",
            Topology::FullyPeriodic => "periodic",
        }
    }
}

impl std::str::FromStr for Topology {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "channel" | "periodic_channel" => Ok(Topology::PeriodicChannel),
            "box" | "closed_box" => Ok(Topology::ClosedBox),
            "periodic" | "fully_periodic" => Ok(Topology::FullyPeriodic),
            other => Err(GridError::UnknownTopology(other.to_string())),
        }
    }
}

/// Uniform rectangular grid with `nx * ny` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    topology: Topology,
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

/// Smallest admissible cell count per direction.
pub const MIN_CELLS: usize = 4;

impl Grid {
    pub fn new(topology: Topology, nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        if nx < MIN_CELLS || ny < MIN_CELLS {
            return Err(GridError::TooFewCells { nx, ny });
        }
        if !(lx > 0.0 && lx.is_finite() && ly > 0.0 && ly.is_finite()) {
            return Err(GridError::BadLength { lx, ly });
        }
        Ok(Self { topology, nx, ny, lx, ly })
    }

    pub fn channel(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        Self::new(Topology::PeriodicChannel, nx, ny, lx, ly)
    }

    pub fn closed_box(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        Self::new(Topology::ClosedBox, nx, ny, lx, ly)
    }

    pub fn periodic(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        Self::new(Topology::FullyPeriodic, nx, ny, lx, ly)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn periodic_x(&self) -> bool {
        matches!(self.topology, Topology::PeriodicChannel | Topology::FullyPeriodic)
    }

    pub fn periodic_y(&self) -> bool {
        self.topology == Topology::FullyPeriodic
    }

    /// True when the domain has corners, which breaks the smooth-boundary
    /// setting the estimates are stated for.
    pub fn has_corners(&self) -> bool {
        self.topology == Topology::ClosedBox
    }

    pub fn cell_shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Stored x-face unknowns.
    pub fn u_shape(&self) -> (usize, usize) {
        let n = if self.periodic_x() { self.nx } else { self.nx - 1 };
        (n, self.ny)
    }

    /// Stored y-face unknowns.
    pub fn v_shape(&self) -> (usize, usize) {
        let n = if self.periodic_y() { self.ny } else { self.ny - 1 };
        (self.nx, n)
    }

    /// Number of velocity unknowns (both components).
    pub fn velocity_dofs(&self) -> usize {
        let (a, b) = self.u_shape();
        let (c, d) = self.v_shape();
        a * b + c * d
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.dx(), (j as f64 + 0.5) * self.dy())
    }

    /// Position of stored x-face `(i, j)`.
    pub fn u_face(&self, i: usize, j: usize) -> (f64, f64) {
        let fi = if self.periodic_x() { i } else { i + 1 };
        (fi as f64 * self.dx(), (j as f64 + 0.5) * self.dy())
    }

    /// Position of stored y-face `(i, j)`.
    pub fn v_face(&self, i: usize, j: usize) -> (f64, f64) {
        let fj = if self.periodic_y() { j } else { j + 1 };
        ((i as f64 + 0.5) * self.dx(), fj as f64 * self.dy())
    }

    /// Cell corner `(i, j)`, `0 <= i <= nx`, `0 <= j <= ny`.
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.dx(), j as f64 * self.dy())
    }
}
