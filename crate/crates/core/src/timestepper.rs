//! First-order time stepping with explicit pressure and convection and
//! implicit viscosity:
//!
//! `(u' - u)/dt - nu lap u' = f - (u . grad) u - grad p_E - nu grad p_S - grad p_gh`
//!
//! followed by per-step diagnostics and run-level stability aggregates.

use std::fmt;
use std::sync::Arc;

use crate::elliptic::{EllipticKind, Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField, WallCondition};
use crate::grid::Grid;
use crate::ops::{div, grad, norms, scalar_grad_norm_sq, WallTrace};
use crate::pressure::{advect, euler_pressure_of, nonhomogeneous_pressure, stokes_pressure, PressureSplit};

/// `|grad u|` above which a run is declared unstable.
pub const BLOWUP_GRAD_NORM: f64 = 1e12;

pub type VectorFn = Arc<dyn Fn(f64) -> VectorField + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> ScalarField + Send + Sync>;
pub type WallFn = Arc<dyn Fn(f64) -> WallTrace + Send + Sync>;

/// How the step average of the forcing is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForcingQuadrature {
    /// Sample at the step midpoint.
    #[default]
    Midpoint,
    /// Three-point Gauss-Legendre over the step.
    Gauss3,
}

#[derive(Clone, Default)]
pub struct ForcingSpec {
    /// `None` means zero forcing.
    pub field: Option<VectorFn>,
    pub quadrature: ForcingQuadrature,
}

impl ForcingSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(f: impl Fn(f64) -> VectorField + Send + Sync + 'static) -> Self {
        Self { field: Some(Arc::new(f)), quadrature: ForcingQuadrature::Midpoint }
    }

    pub fn with_quadrature(mut self, q: ForcingQuadrature) -> Self {
        self.quadrature = q;
        self
    }
}

impl fmt::Debug for ForcingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ForcingSpec")
            .field("field", &self.field.as_ref().map(|_| "<fn>"))
            .field("quadrature", &self.quadrature)
            .finish()
    }
}

/// Prescribed divergence `h(t)` with its time derivative, and optional wall
/// data `d/dt (n . g)` on the horizontal walls.
#[derive(Clone)]
pub struct Nonhomogeneous {
    pub h: ScalarFn,
    pub dt_h: ScalarFn,
    pub dt_g_normal: Option<WallFn>,
}

impl Nonhomogeneous {
    /// Time-independent `h` with no wall data.
    pub fn fixed(h: ScalarField) -> Self {
        let zero = ScalarField::zeros(h.grid);
        Self { h: Arc::new(move |_| h.clone()), dt_h: Arc::new(move |_| zero.clone()), dt_g_normal: None }
    }
}

impl fmt::Debug for Nonhomogeneous {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonhomogeneous").field("dt_g_normal", &self.dt_g_normal.is_some()).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid: Grid,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub forcing: ForcingSpec,
    pub u0: VectorField,
    /// Replace `u0` by `(I - dt lap)^-1 u0` before the first step.
    pub smooth_init: bool,
    pub nonhomogeneous: Option<Nonhomogeneous>,
    /// Include the convection term; `false` gives the linear (Stokes-type) scheme.
    pub advection: bool,
    pub solver: SolverConfig,
}

impl RunConfig {
    pub fn new(grid: Grid, nu: f64, dt: f64, t_end: f64, u0: VectorField) -> Self {
        Self {
            grid,
            nu,
            dt,
            t_end,
            forcing: ForcingSpec::zero(),
            u0,
            smooth_init: false,
            nonhomogeneous: None,
            advection: true,
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(m.to_string()));
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad("nu must be positive");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !(self.t_end.is_finite() && self.dt <= self.t_end * (1.0 + 1e-12)) {
            return bad("dt must not exceed t_end");
        }
        if self.u0.grid != self.grid {
            return bad("initial field is not on the run grid");
        }
        if self.u0.bc != WallCondition::NoSlip {
            return bad("initial field must carry no-slip walls");
        }
        Ok(())
    }

    /// Number of steps to reach `t_end`.
    pub fn steps(&self) -> usize {
        let n = self.t_end / self.dt;
        let r = n.round();
        if (n - r).abs() <= 1e-9 * n.max(1.0) {
            r as usize
        } else {
            n.ceil() as usize
        }
    }
}

/// Norms and identity residuals of one state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub t: f64,
    /// `|u|^2 / 2`.
    pub energy: f64,
    pub grad_norm_sq: f64,
    pub lap_norm_sq: f64,
    /// `|div u - h|^2` (`h = 0` for homogeneous runs).
    pub div_norm_sq: f64,
    pub stokes_grad_sq: f64,
    /// `(|w'|^2 - |w|^2) / (2 dt) + nu |grad w'|^2` for `w = div u - h`.
    pub dissipation_residual: f64,
}

#[derive(Debug, Clone)]
pub struct StepState {
    pub n: usize,
    pub t: f64,
    pub u: VectorField,
    /// Pressures of `u` at time `t`.
    pub split: PressureSplit,
    pub grad_p_stokes: VectorField,
    pub diagnostics: DiagnosticsRecord,
}

/// Run-level bounds: `sup |grad u|^2`, `sum |lap u|^2 dt`,
/// `sum |(u' - u)/dt|^2 dt`, `sum |(u . grad) u|^2 dt`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StabilityAggregates {
    pub sup_grad_sq: f64,
    pub sum_lap_sq_dt: f64,
    pub sum_dudt_sq_dt: f64,
    pub sum_convection_sq_dt: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: StepState,
    pub aggregates: StabilityAggregates,
}

/// Step average of the forcing over `[n dt, (n + 1) dt]`.
pub fn forcing_average(spec: &ForcingSpec, grid: &Grid, n: usize, dt: f64) -> VectorField {
    let Some(f) = &spec.field else {
        return VectorField::zeros(*grid, WallCondition::NoSlip);
    };
    let t0 = n as f64 * dt;
    match spec.quadrature {
        ForcingQuadrature::Midpoint => f(t0 + 0.5 * dt),
        ForcingQuadrature::Gauss3 => {
            let s = (0.6f64).sqrt() / 2.0;
            let mut out = f(t0 + 0.5 * dt).scale(8.0 / 18.0);
            out.axpy(5.0 / 18.0, &f(t0 + (0.5 - s) * dt));
            out.axpy(5.0 / 18.0, &f(t0 + (0.5 + s) * dt));
            out
        }
    }
}

/// `(I - dt lap)^-1 u_in` with no-slip walls.
pub fn smooth_initial(solver: &Solver, u_in: &VectorField, dt: f64) -> Result<VectorField> {
    let (u, _) = solver.solve_vector(EllipticKind::HelmholtzDirichlet { alpha: dt }, u_in)?;
    Ok(u)
}

/// Time stepper bound to one configuration.
#[derive(Debug)]
pub struct Stepper {
    cfg: RunConfig,
    solver: Solver,
}

impl Stepper {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let solver = Solver::with_config(cfg.grid, cfg.solver);
        Ok(Self { cfg, solver })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    fn convection(&self, u: &VectorField) -> VectorField {
        if self.cfg.advection {
            advect(u)
        } else {
            VectorField::zeros(u.grid, WallCondition::NoSlip)
        }
    }

    /// Divergence defect `div u - h(t)`.
    pub fn divergence_defect(&self, u: &VectorField, t: f64) -> ScalarField {
        let mut d = div(u);
        if let Some(nh) = &self.cfg.nonhomogeneous {
            d.axpy(-1.0, &(nh.h)(t));
        }
        d
    }

    /// Pressures of `u` at step `n`, with the forcing average of step `n`.
    fn pressures(&self, u: &VectorField, n: usize) -> Result<(PressureSplit, VectorField)> {
        let cfg = &self.cfg;
        let f = forcing_average(&cfg.forcing, &cfg.grid, n, cfg.dt);
        let mut a = self.convection(u);
        a.axpy(-1.0, &f);
        let (p_euler, _) = euler_pressure_of(&self.solver, &a)?;
        let (p_stokes, grad_ps) = stokes_pressure(&self.solver, u)?;
        let p_gh = match &cfg.nonhomogeneous {
            Some(nh) => {
                let t = n as f64 * cfg.dt;
                let wall = nh.dt_g_normal.as_ref().map(|g| g(t));
                nonhomogeneous_pressure(&self.solver, wall.as_ref(), &(nh.h)(t), &(nh.dt_h)(t), cfg.nu)?
            }
            None => ScalarField::zeros(cfg.grid).pinned(),
        };
        Ok((PressureSplit { p_euler, p_stokes, p_gh }, grad_ps))
    }

    fn record(&self, n: usize, u: &VectorField, grad_ps: &VectorField, prev_w: Option<f64>) -> (DiagnosticsRecord, f64) {
        let t = n as f64 * self.cfg.dt;
        let nm = norms(u);
        let w = self.divergence_defect(u, t);
        let w_sq = w.norm_sq();
        let dissipation_residual = match prev_w {
            Some(prev) => (w_sq - prev) / (2.0 * self.cfg.dt) + self.cfg.nu * scalar_grad_norm_sq(&w),
            None => 0.0,
        };
        let rec = DiagnosticsRecord {
            step: n,
            t,
            energy: 0.5 * nm.l2 * nm.l2,
            grad_norm_sq: nm.h1_semi * nm.h1_semi,
            lap_norm_sq: nm.lap_l2 * nm.lap_l2,
            div_norm_sq: w_sq,
            stokes_grad_sq: grad_ps.norm_sq(),
            dissipation_residual,
        };
        (rec, w_sq)
    }

    /// State at step 0 (after optional smoothing).
    pub fn initial_state(&self) -> Result<StepState> {
        let u = if self.cfg.smooth_init { smooth_initial(&self.solver, &self.cfg.u0, self.cfg.dt)? } else { self.cfg.u0.clone() };
        let (split, grad_ps) = self.pressures(&u, 0)?;
        let (diagnostics, _) = self.record(0, &u, &grad_ps, None);
        Ok(StepState { n: 0, t: 0.0, u, split, grad_p_stokes: grad_ps, diagnostics })
    }

    /// Advances one step.
    pub fn step(&self, state: &StepState) -> Result<StepState> {
        let cfg = &self.cfg;
        let dt = cfg.dt;
        let n = state.n;
        let f = forcing_average(&cfg.forcing, &cfg.grid, n, dt);
        let mut rhs = state.u.clone();
        let mut explicit = f;
        explicit.axpy(-1.0, &self.convection(&state.u));
        explicit.axpy(-1.0, &grad(&state.split.p_euler));
        explicit.axpy(-cfg.nu, &state.grad_p_stokes);
        explicit.axpy(-1.0, &grad(&state.split.p_gh));
        rhs.axpy(dt, &explicit);
        let (u, _) = self.solver.solve_vector(EllipticKind::HelmholtzDirichlet { alpha: cfg.nu * dt }, &rhs)?;

        let (split, grad_ps) = self.pressures(&u, n + 1)?;
        let prev_w = state.diagnostics.div_norm_sq;
        let (diagnostics, _) = self.record(n + 1, &u, &grad_ps, Some(prev_w));
        let grad_norm = diagnostics.grad_norm_sq.sqrt();
        if !grad_norm.is_finite() || grad_norm > BLOWUP_GRAD_NORM {
            return Err(Error::Blowup { step: n + 1, grad_norm });
        }
        Ok(StepState { n: n + 1, t: (n + 1) as f64 * dt, u, split, grad_p_stokes: grad_ps, diagnostics })
    }

    /// Runs to `t_end`, calling `observe(previous, next)` after every step.
    pub fn run_with(&self, mut observe: impl FnMut(&StepState, &StepState) -> Result<()>) -> Result<RunReport> {
        let dt = self.cfg.dt;
        let mut state = self.initial_state()?;
        let mut records = vec![state.diagnostics];
        let mut agg = StabilityAggregates { sup_grad_sq: state.diagnostics.grad_norm_sq, ..Default::default() };
        for _ in 0..self.cfg.steps() {
            let next = self.step(&state)?;
            observe(&state, &next)?;
            let d = &next.diagnostics;
            agg.sup_grad_sq = agg.sup_grad_sq.max(d.grad_norm_sq);
            agg.sum_lap_sq_dt += d.lap_norm_sq * dt;
            agg.sum_dudt_sq_dt += (&next.u - &state.u).norm_sq() / dt;
            agg.sum_convection_sq_dt += self.convection(&state.u).norm_sq() * dt;
            records.push(*d);
            state = next;
        }
        Ok(RunReport { records, final_state: state, aggregates: agg })
    }

    pub fn run(&self) -> Result<RunReport> {
        self.run_with(|_, _| Ok(()))
    }
}

/// Convenience wrapper: validate, build a stepper and run to `t_end`.
pub fn run(cfg: RunConfig) -> Result<RunReport> {
    Stepper::new(cfg)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn channel() -> Grid {
        Grid::channel(8, 16, 1.0, 1.0).unwrap()
    }

    #[test]
    fn forcing_averages() {
        let g = channel();
        let z = forcing_average(&ForcingSpec::zero(), &g, 3, 0.1);
        assert_eq!(z.max_abs(), 0.0);

        let base = VectorField::from_fn(g, WallCondition::NoSlip, |x, y| x + y, |x, y| x * y);
        let b = base.clone();
        let constant = ForcingSpec::new(move |_| b.clone());
        assert_eq!(forcing_average(&constant, &g, 7, 0.01), base);

        let b = base.clone();
        let linear = ForcingSpec::new(move |t| &b * t);
        let dt = 0.2;
        let expect = &base * (dt / 2.0);
        for spec in [linear.clone(), linear.with_quadrature(ForcingQuadrature::Gauss3)] {
            assert!((&forcing_average(&spec, &g, 0, dt) - &expect).max_abs() < 1e-15);
        }
    }

    #[test]
    fn gauss_average_is_exact_for_quintic_time_dependence() {
        let g = channel();
        let base = VectorField::from_fn(g, WallCondition::NoSlip, |_, _| 1.0, |_, _| 1.0);
        let spec = ForcingSpec::new(move |t| &base * t.powi(5)).with_quadrature(ForcingQuadrature::Gauss3);
        let dt = 0.5;
        let avg = forcing_average(&spec, &g, 1, dt);
        let exact = (1.0f64.powi(6) - 0.5f64.powi(6)) / 6.0 / dt;
        assert!((avg.u[(0, 0)] - exact).abs() < 1e-14);
    }

    #[test]
    fn smoothing() {
        let g = channel();
        let s = Solver::new(g);
        let zero = VectorField::zeros(g, WallCondition::NoSlip);
        assert_eq!(smooth_initial(&s, &zero, 0.1).unwrap().max_abs(), 0.0);

        let dt = 0.05;
        let w = VectorField::from_fn(g, WallCondition::NoSlip, |_, y| (PI * y).sin(), |_, _| 0.0);
        let out = smooth_initial(&s, &w, dt).unwrap();
        let expect = &w * (1.0 / (1.0 + dt * PI * PI));
        assert!((&out - &expect).max_abs() < 5e-3);
        assert!(norms(&out).h1_semi <= norms(&w).h1_semi + 1e-12);
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = channel();
        let cfg = RunConfig::new(g, 0.1, 0.01, 0.05, VectorField::zeros(g, WallCondition::NoSlip));
        let rep = run(cfg).unwrap();
        assert_eq!(rep.records.len(), 6);
        assert_eq!(rep.final_state.u.max_abs(), 0.0);
        assert_eq!(rep.aggregates, StabilityAggregates::default());
    }

    #[test]
    fn validation() {
        let g = channel();
        let u0 = VectorField::zeros(g, WallCondition::NoSlip);
        let mut cfg = RunConfig::new(g, 0.1, -1.0, 1.0, u0.clone());
        assert!(matches!(cfg.validate(), Err(Error::Invalid(m)) if m.contains("dt must be positive")));
        cfg.dt = 2.0;
        assert!(cfg.validate().is_err());
        cfg.dt = 0.1;
        cfg.nu = 0.0;
        assert!(cfg.validate().is_err());
        cfg.nu = 0.1;
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.steps(), 10);
    }
}
