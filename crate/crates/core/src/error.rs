use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least 4 cells per direction, got {nx} x {ny}")]
    TooFewCells { nx: usize, ny: usize },
    #[error("domain lengths must be positive and finite, got lx = {lx}, ly = {ly}")]
    BadLength { lx: f64, ly: f64 },
    #[error("unknown topology `{0}` (expected channel, box or periodic)")]
    UnknownTopology(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("solver did not converge: {iterations} iterations, relative residual {residual:e}")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("Neumann right-hand side is not mean-zero (relative defect {defect:e})")]
    IncompatibleRhs { defect: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("field does not live on the solver grid")]
    GridMismatch,
    #[error("unsupported problem: {0}")]
    Unsupported(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("boundary flux and divergence source are incompatible (relative defect {defect:e})")]
    IncompatibleData { defect: f64 },
    #[error("blow-up at step {step}: |grad u| = {grad_norm:e}")]
    Blowup { step: usize, grad_norm: f64 },
    #[error("grid {nx} x {ny} exceeds the dense assembly cap of {cap} x {cap}")]
    GridTooLarge { nx: usize, ny: usize, cap: usize },
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    EigenNonConvergence { iterations: usize },
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl Error {
    /// Failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Solve(SolveError::NonConvergence { .. })
                | Error::Blowup { .. }
                | Error::EigenNonConvergence { .. }
                | Error::DegenerateSeries(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
