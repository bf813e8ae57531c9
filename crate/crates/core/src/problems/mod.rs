//! Concrete model problems for the inexact fixed point drivers.
//!
//! * [`scalar`]: `x = e^{γx}/4` and the nested scalar pair `S`, `F`.
//! * [`linear`]: the 2×2 affine nested problem `(I − AB) x = b`.
//! * [`picard`]: a 1D convection–diffusion problem solved by Picard iteration
//!   with GMRES inner solves.
//! * [`transmission`]: the two-subdomain Poisson transmission problem and its
//!   Dirichlet–Neumann iteration with CG inner solves.

use thiserror::Error;

use crate::fixedpoint::FixedPointError;
use crate::krylov::KrylovError;
use crate::linalg::LinalgError;

pub mod linear;
pub mod picard;
pub mod scalar;
pub mod transmission;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Krylov(#[from] KrylovError),
    #[error(transparent)]
    FixedPoint(#[from] FixedPointError),
}
