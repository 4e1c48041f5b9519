//! Verification studies: dense operator assembly, the empirical domination
//! constant, the operator spectrum, decay fits, manufactured solutions and
//! the experiment drivers built on them.

pub mod beta;
pub mod dense;
pub mod experiments;
pub mod fit;
pub mod mms;
pub mod spectrum;

pub use beta::{beta_estimate, BetaEstimate, BetaMethod, DEFAULT_C_VALUES};
pub use dense::{assemble_dense, DenseOperator, DENSE_CAP};
pub use fit::{decay_fit, Quantity};
pub use mms::{mms_convergence, ConvergenceTable, Manufactured, MmsStudy};
pub use spectrum::{spectrum, SpectrumReport};
