//! Inexact fixed point iterations with Krylov inner solvers.
//!
//! The crate is layered bottom-up:
//!
//! * [`linalg`]: vectors, dense and sparse matrices, direct solvers.
//! * [`krylov`]: CG and GMRES stopping on exactly one inner criterion.
//! * [`fixedpoint`]: plain, perturbed and nested outer iterations, error
//!   bounds, and Lipschitz estimates.
//! * [`problems`]: scalar, 2×2, Picard and transmission test problems.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fixedpoint;
pub mod krylov;
pub mod linalg;
pub mod problems;

pub use fixedpoint::{FixedPointTrace, IterationOptions, PerturbationSchedule, Termination};
pub use krylov::{CriterionKind, SolveReport, TerminationCriterion};
pub use linalg::{CsrMatrix, DenseMatrix, LinalgError, LinearOperator};
