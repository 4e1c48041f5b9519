//! Parameterised experiments shared by the command-line drivers and the
//! acceptance suite.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField, WallCondition};
use crate::grid::Grid;
use crate::ops::{grad, laplacian_vector};
use crate::timestepper::{DiagnosticsRecord, Nonhomogeneous, RunConfig, StabilityAggregates, StepState, Stepper};

use super::fit::{decay_fit, Quantity};
use super::mms::Manufactured;

/// `u0 = (0, ly/pi sin(pi y/ly))`, whose divergence is `cos(pi y/ly)`.
pub fn cosine_divergence_field(grid: Grid) -> VectorField {
    let ly = grid.ly();
    VectorField::from_fn(grid, WallCondition::NoSlip, |_, _| 0.0, |_, y| ly / PI * (PI * y / ly).sin())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayResult {
    pub records: Vec<DiagnosticsRecord>,
    pub rate: f64,
    /// `nu pi^2 / ly^2`.
    pub expected: f64,
}

impl DecayResult {
    pub fn relative_error(&self) -> f64 {
        (self.rate - self.expected).abs() / self.expected
    }
}

/// Decay of `|div u|` from `div u0 = cos(pi y/ly)` with zero forcing.
pub fn divergence_decay(grid: Grid, nu: f64, dt: f64, t_end: f64) -> Result<DecayResult> {
    let cfg = RunConfig::new(grid, nu, dt, t_end, cosine_divergence_field(grid));
    let report = Stepper::new(cfg)?.run()?;
    let rate = decay_fit(&report.records, Quantity::Divergence)?;
    Ok(DecayResult { records: report.records, rate, expected: nu * PI * PI / (grid.ly() * grid.ly()) })
}

/// Initial field and static divergence source of the nonhomogeneous decay
/// experiment: `div u0 - h = cos(pi y/ly)` with `h = a cos(2 pi x/lx)`.
pub fn nonhomogeneous_setup(grid: Grid, a: f64) -> (VectorField, ScalarField) {
    let (lx, ly) = (grid.lx(), grid.ly());
    let kx = 2.0 * PI / lx;
    let ky = 2.0 * PI / ly;
    let u0 = VectorField::from_fn(
        grid,
        WallCondition::NoSlip,
        |x, y| a / kx * (kx * x).sin() * (1.0 - (ky * y).cos()),
        |x, y| a / ky * (kx * x).cos() * (ky * y).sin() + ly / PI * (PI * y / ly).sin(),
    );
    let h = ScalarField::from_fn(grid, |x, _| a * (kx * x).cos());
    (u0, h)
}

/// Decay of `|div u - h|` for a static divergence source.
pub fn nonhomogeneous_decay(grid: Grid, nu: f64, dt: f64, t_end: f64, a: f64) -> Result<DecayResult> {
    let (u0, h) = nonhomogeneous_setup(grid, a);
    let mut cfg = RunConfig::new(grid, nu, dt, t_end, u0);
    cfg.nonhomogeneous = Some(Nonhomogeneous::fixed(h));
    let report = Stepper::new(cfg)?.run()?;
    let rate = decay_fit(&report.records, Quantity::Divergence)?;
    Ok(DecayResult { records: report.records, rate, expected: nu * PI * PI / (grid.ly() * grid.ly()) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub dt: f64,
    pub steps: usize,
    /// `None` if the run completed.
    pub blowup_step: Option<usize>,
    pub aggregates: StabilityAggregates,
    pub final_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySweep {
    pub rows: Vec<SweepRow>,
    /// `max / min` of `sup |grad u|^2` over completed runs.
    pub sup_spread: f64,
}

/// Unforced runs from the manufactured stream function scaled to
/// `|grad u0| = grad_norm`, one per step size.
pub fn stability_sweep(grid: Grid, nu: f64, t_end: f64, dts: &[f64], grad_norm: f64) -> Result<StabilitySweep> {
    let m = Manufactured::new(1.0, nu, grid.lx(), grid.ly()).with_grad_norm(grid, grad_norm);
    let u0 = m.solenoidal_velocity(grid, 0.0);
    let mut rows = Vec::new();
    for &dt in dts {
        let cfg = RunConfig::new(grid, nu, dt, t_end, u0.clone());
        let steps = cfg.steps();
        let row = match Stepper::new(cfg)?.run() {
            Ok(rep) => SweepRow {
                dt,
                steps,
                blowup_step: None,
                aggregates: rep.aggregates,
                final_energy: rep.records.last().map_or(0.0, |r| r.energy),
            },
            Err(Error::Blowup { step, .. }) => SweepRow {
                dt,
                steps,
                blowup_step: Some(step),
                aggregates: StabilityAggregates::default(),
                final_energy: f64::INFINITY,
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    let sups: Vec<f64> = rows.iter().filter(|r| r.blowup_step.is_none()).map(|r| r.aggregates.sup_grad_sq).collect();
    let max = sups.iter().cloned().fold(0.0, f64::max);
    let min = sups.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(StabilitySweep { rows, sup_spread: if sups.is_empty() { f64::INFINITY } else { max / min } })
}

/// Residual of the weak divergence identity for one step against each test
/// potential `phi`, relative to `|grad phi| |u'|`:
///
/// `<u' - u, grad phi> - dt <nu (lap u' - grad p_S) - grad p_gh, grad phi>`.
pub fn weak_identity_residuals(prev: &StepState, next: &StepState, nu: f64, dt: f64, phis: &[ScalarField]) -> Vec<f64> {
    let du = &next.u - &prev.u;
    let mut flux = laplacian_vector(&next.u);
    flux.axpy(-1.0, &prev.grad_p_stokes);
    let mut drive = flux.scale(nu);
    drive.axpy(-1.0, &grad(&prev.split.p_gh));
    let u_scale = next.u.norm().max(prev.u.norm());
    phis.iter()
        .map(|phi| {
            let g = grad(phi);
            let r = du.inner(&g) - dt * drive.inner(&g);
            let scale = g.norm() * u_scale;
            if scale > 0.0 {
                r.abs() / scale
            } else {
                r.abs()
            }
        })
        .collect()
}

/// Seeded random test potentials, mean-pinned.
pub fn random_potentials(grid: Grid, count: usize, seed: u64) -> Vec<ScalarField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| ScalarField::random(grid, &mut rng).pinned()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakIdentityReport {
    /// Largest relative residual over the test potentials, per step.
    pub per_step: Vec<f64>,
    pub max: f64,
}

/// Runs `cfg` and evaluates the weak divergence identity after every step.
pub fn weak_identity_run(cfg: RunConfig, count: usize, seed: u64) -> Result<WeakIdentityReport> {
    let phis = random_potentials(cfg.grid, count, seed);
    let (nu, dt) = (cfg.nu, cfg.dt);
    let mut per_step = Vec::new();
    Stepper::new(cfg)?.run_with(|prev, next| {
        let r = weak_identity_residuals(prev, next, nu, dt, &phis);
        per_step.push(r.into_iter().fold(0.0, f64::max));
        Ok(())
    })?;
    let max = per_step.iter().cloned().fold(0.0, f64::max);
    Ok(WeakIdentityReport { per_step, max })
}
