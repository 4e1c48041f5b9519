//! TOML run configuration with `[grid]`, `[physics]`, `[time]`, `[forcing]`
//! and `[experiment]` sections.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use unsflow_core::analysis::experiments::{cosine_divergence_field, nonhomogeneous_setup};
use unsflow_core::analysis::{BetaMethod, Manufactured, MmsStudy, DEFAULT_C_VALUES};
use unsflow_core::timestepper::{ForcingQuadrature, Nonhomogeneous};
use unsflow_core::{ForcingSpec, Grid, Preconditioner, RunConfig, Solver, SolverConfig, Topology, VectorField, WallCondition};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub grid: GridSection,
    #[serde(default)]
    pub physics: PhysicsSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub forcing: ForcingSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_topology")]
    pub topology: String,
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "one")]
    pub lx: f64,
    #[serde(default = "one")]
    pub ly: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default = "yes")]
    pub advection: bool,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        Self { nu: None, advection: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub smooth_init: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingKind {
    #[default]
    None,
    Manufactured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    #[default]
    Midpoint,
    Gauss3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    #[serde(default)]
    pub kind: ForcingKind,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub quadrature: Quadrature,
}

impl Default for ForcingSection {
    fn default() -> Self {
        Self { kind: ForcingKind::None, amplitude: 1.0, quadrature: Quadrature::Midpoint }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Zero,
    #[default]
    Manufactured,
    Random,
    CosineDivergence,
    Nonhomogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    #[default]
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreconditionerKind {
    #[default]
    FastDiagonalization,
    Jacobi,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default)]
    pub initial: InitialKind,
    /// Amplitude of the manufactured initial stream function.
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Rescales the manufactured initial data to this `|grad u0|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad_norm: Option<f64>,
    /// Amplitude of the prescribed divergence for nonhomogeneous runs.
    #[serde(default = "h_amplitude")]
    pub h_amplitude: f64,
    #[serde(default)]
    pub seed: u64,
    /// Random fields for `project`, test potentials for the weak identity.
    #[serde(default = "samples")]
    pub samples: usize,
    #[serde(default = "c_values")]
    pub c_values: Vec<f64>,
    #[serde(default)]
    pub method: EigenMethod,
    #[serde(default = "resolutions")]
    pub resolutions: Vec<usize>,
    #[serde(default = "spatial_dt")]
    pub spatial_dt: f64,
    #[serde(default = "spatial_t_end")]
    pub spatial_t_end: f64,
    #[serde(default = "temporal_n")]
    pub temporal_n: usize,
    #[serde(default = "dts")]
    pub dts: Vec<f64>,
    #[serde(default = "temporal_t_end")]
    pub temporal_t_end: f64,
    #[serde(default = "tol")]
    pub solver_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_max_iter: Option<usize>,
    #[serde(default)]
    pub preconditioner: PreconditionerKind,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            initial: InitialKind::Manufactured,
            amplitude: 1.0,
            grad_norm: None,
            h_amplitude: h_amplitude(),
            seed: 0,
            samples: samples(),
            c_values: c_values(),
            method: EigenMethod::Dense,
            resolutions: resolutions(),
            spatial_dt: spatial_dt(),
            spatial_t_end: spatial_t_end(),
            temporal_n: temporal_n(),
            dts: dts(),
            temporal_t_end: temporal_t_end(),
            solver_tol: tol(),
            solver_max_iter: None,
            preconditioner: PreconditionerKind::FastDiagonalization,
        }
    }
}

fn default_topology() -> String {
    "channel".into()
}
fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn h_amplitude() -> f64 {
    0.1
}
fn samples() -> usize {
    20
}
fn c_values() -> Vec<f64> {
    DEFAULT_C_VALUES.to_vec()
}
fn resolutions() -> Vec<usize> {
    vec![16, 32, 64]
}
fn spatial_dt() -> f64 {
    0.05
}
fn spatial_t_end() -> f64 {
    20.0
}
fn temporal_n() -> usize {
    32
}
fn dts() -> Vec<f64> {
    vec![0.04, 0.02, 0.01, 0.005]
}
fn temporal_t_end() -> f64 {
    0.4
}
fn tol() -> f64 {
    1e-10
}

/// Parses `text` and applies `section.key=value` overrides on top.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<Config> {
    if overrides.is_empty() {
        // keeps source spans, so errors carry line numbers
        return toml::from_str(text).map_err(|e: toml::de::Error| CliError::Parse(e.to_string()));
    }
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    Config::deserialize(table).map_err(|e| CliError::Parse(e.to_string()))
}

fn apply_override(table: &mut Table, item: &str) -> Result<()> {
    let (path, raw) =
        item.split_once('=').ok_or_else(|| CliError::Parse(format!("override `{item}` is not of the form section.key=value")))?;
    let (section, key) =
        path.trim().split_once('.').ok_or_else(|| CliError::Parse(format!("override key `{path}` must be section.key")))?;
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let entry = table.entry(section.to_string()).or_insert_with(|| Value::Table(Table::new()));
    match entry {
        Value::Table(t) => {
            t.insert(key.to_string(), value);
            Ok(())
        }
        _ => Err(CliError::Parse(format!("`{section}` is not a section"))),
    }
}

pub fn to_toml(cfg: &Config) -> Result<String> {
    toml::to_string(cfg).map_err(|e| CliError::Parse(e.to_string()))
}

/// What a command needs from the configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Requirements {
    pub nu: bool,
    pub time: bool,
}

impl Config {
    pub fn grid(&self) -> Result<Grid> {
        let g = &self.grid;
        let topology: Topology = g.topology.parse().map_err(|e| CliError::Validation(format!("grid.topology: {e}")))?;
        Grid::new(topology, g.nx, g.ny, g.lx, g.ly).map_err(|e| CliError::Validation(format!("grid: {e}")))
    }

    pub fn solver_config(&self) -> SolverConfig {
        let e = &self.experiment;
        SolverConfig {
            tol: e.solver_tol,
            max_iter: e.solver_max_iter,
            preconditioner: match e.preconditioner {
                PreconditionerKind::FastDiagonalization => Preconditioner::FastDiagonalization,
                PreconditionerKind::Jacobi => Preconditioner::Jacobi,
                PreconditionerKind::None => Preconditioner::None,
            },
            strict: false,
        }
    }

    pub fn solver(&self) -> Result<Solver> {
        Ok(Solver::with_config(self.grid()?, self.solver_config()))
    }

    pub fn beta_method(&self) -> BetaMethod {
        match self.experiment.method {
            EigenMethod::Dense => BetaMethod::Dense,
            EigenMethod::Lanczos => BetaMethod::Lanczos,
        }
    }

    pub fn nu(&self) -> Result<f64> {
        self.physics.nu.ok_or_else(|| CliError::Validation("physics.nu is required".into()))
    }

    pub fn validate(&self, req: Requirements) -> Result<()> {
        self.grid()?;
        let e = &self.experiment;
        if !(e.solver_tol > 0.0 && e.solver_tol.is_finite()) {
            return Err(CliError::Validation("experiment.solver_tol must be positive".into()));
        }
        if req.nu {
            let nu = self.nu()?;
            if nu.is_nan() || nu <= 0.0 {
                return Err(CliError::Validation("nu must be positive".into()));
            }
        }
        if req.time {
            self.run_config()?;
        }
        Ok(())
    }

    pub fn manufactured(&self, amplitude: f64) -> Result<Manufactured> {
        Ok(Manufactured::new(amplitude, self.nu()?, self.grid.lx, self.grid.ly))
    }

    fn initial(&self, grid: Grid) -> Result<(VectorField, Option<Nonhomogeneous>)> {
        let e = &self.experiment;
        Ok(match e.initial {
            InitialKind::Zero => (VectorField::zeros(grid, WallCondition::NoSlip), None),
            InitialKind::Manufactured => {
                let mut m = self.manufactured(e.amplitude)?;
                if let Some(target) = e.grad_norm {
                    m = m.with_grad_norm(grid, target);
                }
                (m.solenoidal_velocity(grid, 0.0), None)
            }
            InitialKind::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(e.seed);
                (VectorField::random(grid, WallCondition::NoSlip, &mut rng).scale(e.amplitude), None)
            }
            InitialKind::CosineDivergence => (cosine_divergence_field(grid), None),
            InitialKind::Nonhomogeneous => {
                let (u0, h) = nonhomogeneous_setup(grid, e.h_amplitude);
                (u0, Some(Nonhomogeneous::fixed(h)))
            }
        })
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let grid = self.grid()?;
        let nu = self.nu()?;
        let dt = self.time.dt.ok_or_else(|| CliError::Validation("time.dt is required".into()))?;
        let t_end = self.time.t_end.ok_or_else(|| CliError::Validation("time.t_end is required".into()))?;
        let (u0, nonhomogeneous) = self.initial(grid)?;
        let mut cfg = RunConfig::new(grid, nu, dt, t_end, u0);
        cfg.smooth_init = self.time.smooth_init;
        cfg.advection = self.physics.advection;
        cfg.nonhomogeneous = nonhomogeneous;
        cfg.solver = self.solver_config();
        cfg.forcing = match self.forcing.kind {
            ForcingKind::None => ForcingSpec::zero(),
            ForcingKind::Manufactured => self.manufactured(self.forcing.amplitude)?.forcing(grid),
        }
        .with_quadrature(match self.forcing.quadrature {
            Quadrature::Midpoint => ForcingQuadrature::Midpoint,
            Quadrature::Gauss3 => ForcingQuadrature::Gauss3,
        });
        cfg.validate().map_err(|e| match e {
            unsflow_core::Error::Invalid(m) => CliError::Validation(m),
            other => CliError::Core(other),
        })?;
        Ok(cfg)
    }

    pub fn mms_study(&self) -> Result<MmsStudy> {
        let e = &self.experiment;
        if e.resolutions.len() < 2 || e.dts.len() < 3 {
            return Err(CliError::Validation("mms needs at least two resolutions and three step sizes".into()));
        }
        Ok(MmsStudy {
            solution: self.manufactured(self.forcing.amplitude)?,
            resolutions: e.resolutions.clone(),
            spatial_dt: e.spatial_dt,
            spatial_t_end: e.spatial_t_end,
            temporal_n: e.temporal_n,
            dts: e.dts.clone(),
            temporal_t_end: e.temporal_t_end,
        })
    }
}
