//! Manufactured solution built from the stream function
//! `psi = A sin(k x) y^2 (L - y)^2 tau(t)` with `k = 2 pi / lx`, and the
//! convergence studies that use it.

use std::f64::consts::PI;

use crate::error::Result;
use crate::fields::{VectorField, WallCondition};
use crate::grid::Grid;
use crate::ops::grad_norm_sq;
use crate::timestepper::{ForcingSpec, RunConfig, Stepper};

use super::fit::log_log_slope;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub amplitude: f64,
    pub nu: f64,
    pub lx: f64,
    pub ly: f64,
    /// `tau = 1` instead of `cos t`.
    pub steady: bool,
}

impl Manufactured {
    pub fn new(amplitude: f64, nu: f64, lx: f64, ly: f64) -> Self {
        Self { amplitude, nu, lx, ly, steady: false }
    }

    pub fn steady(mut self) -> Self {
        self.steady = true;
        self
    }

    fn tau(&self, t: f64) -> (f64, f64) {
        if self.steady {
            (1.0, 0.0)
        } else {
            (t.cos(), -t.sin())
        }
    }

    fn k(&self) -> f64 {
        2.0 * PI / self.lx
    }

    // y^2 (L - y)^2 and its first three derivatives
    fn profile(&self, y: f64) -> [f64; 4] {
        let l = self.ly;
        let a = y * (l - y);
        let b = l - 2.0 * y;
        [a * a, 2.0 * a * b, 2.0 * b * b - 4.0 * a, -12.0 * b]
    }

    pub fn psi(&self, x: f64, y: f64, t: f64) -> f64 {
        self.amplitude * (self.k() * x).sin() * self.profile(y)[0] * self.tau(t).0
    }

    pub fn u(&self, x: f64, y: f64, t: f64) -> f64 {
        self.amplitude * (self.k() * x).sin() * self.profile(y)[1] * self.tau(t).0
    }

    pub fn v(&self, x: f64, y: f64, t: f64) -> f64 {
        -self.amplitude * self.k() * (self.k() * x).cos() * self.profile(y)[0] * self.tau(t).0
    }

    /// `du/dt + (u . grad) u - nu lap u` (the exact pressure is zero).
    pub fn forcing_at(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let (a, k, nu) = (self.amplitude, self.k(), self.nu);
        let [g, g1, g2, g3] = self.profile(y);
        let (tau, dtau) = self.tau(t);
        let (s, c) = ((k * x).sin(), (k * x).cos());
        let fu = a * s * g1 * dtau + a * a * tau * tau * k * s * c * (g1 * g1 - g * g2) - nu * a * s * (g3 - k * k * g1) * tau;
        let fv = -a * k * c * g * dtau + a * a * tau * tau * k * k * g * g1 + nu * a * k * c * (g2 - k * k * g) * tau;
        (fu, fv)
    }

    /// Exact velocity sampled at the face positions.
    pub fn velocity(&self, grid: Grid, t: f64) -> VectorField {
        VectorField::from_fn(grid, WallCondition::NoSlip, |x, y| self.u(x, y, t), |x, y| self.v(x, y, t))
    }

    /// Discrete curl of the stream function at time `t` (exactly
    /// divergence-free on the grid).
    pub fn solenoidal_velocity(&self, grid: Grid, t: f64) -> VectorField {
        VectorField::from_stream_function(grid, WallCondition::NoSlip, |x, y| self.psi(x, y, t))
    }

    pub fn forcing(&self, grid: Grid) -> ForcingSpec {
        let m = *self;
        ForcingSpec::new(move |t| {
            VectorField::from_fn(grid, WallCondition::NoSlip, |x, y| m.forcing_at(x, y, t).0, |x, y| m.forcing_at(x, y, t).1)
        })
    }

    /// Copy with the amplitude chosen so that the discrete `|grad u(0)| = target`.
    pub fn with_grad_norm(self, grid: Grid, target: f64) -> Self {
        let unit = Self { amplitude: 1.0, ..self };
        let g = grad_norm_sq(&unit.solenoidal_velocity(grid, 0.0)).sqrt();
        Self { amplitude: target / g, ..self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsStudy {
    pub solution: Manufactured,
    /// Cells per direction for the spatial study.
    pub resolutions: Vec<usize>,
    /// Step size and horizon of the steady spatial study.
    pub spatial_dt: f64,
    pub spatial_t_end: f64,
    /// Fixed resolution of the temporal study.
    pub temporal_n: usize,
    /// Step sizes of the temporal study, each half the previous.
    pub dts: Vec<f64>,
    pub temporal_t_end: f64,
}

impl MmsStudy {
    pub fn default_for(nu: f64) -> Self {
        Self {
            solution: Manufactured::new(1.0, nu, 1.0, 1.0),
            resolutions: vec![16, 32, 64],
            spatial_dt: 0.05,
            spatial_t_end: 20.0,
            temporal_n: 32,
            dts: vec![0.04, 0.02, 0.01, 0.005],
            temporal_t_end: 0.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dt: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    /// Steady-state error against the exact field per resolution.
    pub spatial: Vec<ConvergenceRow>,
    /// `|u_dt - u_{dt/2}|` at the final time, keyed by the coarser `dt`.
    pub temporal: Vec<ConvergenceRow>,
    pub spatial_order: f64,
    pub temporal_order: f64,
}

fn run_to(solution: &Manufactured, n: usize, dt: f64, t_end: f64) -> Result<VectorField> {
    let grid = Grid::channel(n, n, solution.lx, solution.ly)?;
    let mut cfg = RunConfig::new(grid, solution.nu, dt, t_end, solution.solenoidal_velocity(grid, 0.0));
    cfg.forcing = solution.forcing(grid);
    Ok(Stepper::new(cfg)?.run()?.final_state.u)
}

pub fn mms_convergence(study: &MmsStudy) -> Result<ConvergenceTable> {
    let steady = study.solution.steady();
    let mut spatial = Vec::new();
    for &n in &study.resolutions {
        let u = run_to(&steady, n, study.spatial_dt, study.spatial_t_end)?;
        let exact = steady.velocity(u.grid, study.spatial_t_end);
        spatial.push(ConvergenceRow { n, dt: study.spatial_dt, error: (&u - &exact).norm() });
    }
    let finals = study
        .dts
        .iter()
        .map(|&dt| run_to(&study.solution, study.temporal_n, dt, study.temporal_t_end))
        .collect::<Result<Vec<_>>>()?;
    let temporal: Vec<ConvergenceRow> = finals
        .windows(2)
        .zip(&study.dts)
        .map(|(w, &dt)| ConvergenceRow { n: study.temporal_n, dt, error: (&w[0] - &w[1]).norm() })
        .collect();

    let h: Vec<f64> = spatial.iter().map(|r| 1.0 / r.n as f64).collect();
    let e: Vec<f64> = spatial.iter().map(|r| r.error).collect();
    let dts: Vec<f64> = temporal.iter().map(|r| r.dt).collect();
    let d: Vec<f64> = temporal.iter().map(|r| r.error).collect();
    Ok(ConvergenceTable { spatial_order: log_log_slope(&h, &e), temporal_order: log_log_slope(&dts, &d), spatial, temporal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::div;

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let m = Manufactured::new(0.7, 0.3, 1.3, 0.9);
        let (x, y, t) = (0.41, 0.27, 0.6);
        let e = 1e-5;
        let d = |f: &dyn Fn(f64, f64, f64) -> f64, dx: f64, dy: f64, dt: f64| {
            (f(x + dx, y + dy, t + dt) - f(x - dx, y - dy, t - dt)) / (2.0 * e)
        };
        let lap = |f: &dyn Fn(f64, f64, f64) -> f64| {
            (f(x + e, y, t) + f(x - e, y, t) + f(x, y + e, t) + f(x, y - e, t) - 4.0 * f(x, y, t)) / (e * e)
        };
        let u = |x, y, t| m.u(x, y, t);
        let v = |x, y, t| m.v(x, y, t);
        let psi = |x, y, t| m.psi(x, y, t);
        assert!((d(&psi, 0.0, e, 0.0) - m.u(x, y, t)).abs() < 1e-8);
        assert!((d(&psi, e, 0.0, 0.0) + m.v(x, y, t)).abs() < 1e-8);
        let (uu, vv) = (m.u(x, y, t), m.v(x, y, t));
        let fu = d(&u, 0.0, 0.0, e) + uu * d(&u, e, 0.0, 0.0) + vv * d(&u, 0.0, e, 0.0) - m.nu * lap(&u);
        let fv = d(&v, 0.0, 0.0, e) + uu * d(&v, e, 0.0, 0.0) + vv * d(&v, 0.0, e, 0.0) - m.nu * lap(&v);
        let (gu, gv) = m.forcing_at(x, y, t);
        assert!((fu - gu).abs() < 1e-4, "{fu} {gu}");
        assert!((fv - gv).abs() < 1e-4, "{fv} {gv}");
    }

    #[test]
    fn solenoidal_no_slip_initial_data() {
        let g = Grid::channel(16, 16, 1.0, 1.0).unwrap();
        let m = Manufactured::new(1.0, 0.1, 1.0, 1.0).with_grad_norm(g, 1.0);
        let u = m.solenoidal_velocity(g, 0.0);
        assert!(div(&u).max_abs() < 1e-12 * u.max_abs() / g.dx());
        assert!((grad_norm_sq(&u) - 1.0).abs() < 1e-12);
    }
}
