//! Incompressible flow on walled rectangles with an explicit, unconstrained
//! pressure: operators, elliptic solves, pressure splits, time stepping and
//! verification diagnostics.

pub mod analysis;
pub mod elliptic;
pub mod error;
pub mod fields;
pub mod grid;
pub mod ops;
pub mod pressure;
pub mod stencil;
pub mod timestepper;

pub use elliptic::{EllipticKind, EllipticProblem, Preconditioner, SolveReport, Solver, SolverConfig};
pub use error::{Error, GridError, Result, SolveError};
pub use fields::{Norms, ScalarField, VectorField, WallCondition};
pub use grid::{Grid, Topology};
pub use ops::ScalarBc;
pub use pressure::PressureSplit;
pub use timestepper::{DiagnosticsRecord, ForcingSpec, RunConfig, RunReport, StepState, Stepper};
