//! Picard iteration `A(x^k) x^{k+1} = b` for 1D steady convection–diffusion.
//!
//! `A(x) = ν tridiag(−1, 2, −1)/h² + U(x)` where `U(x)` is first-order upwind
//! convection with the lagged velocity `x`. The forcing is manufactured from
//! `u*(s) = s(1 − s)`, so the continuous problem `−ν u'' + u u' = f` has a known
//! solution and `A(x)` is nonsymmetric, which calls for GMRES.

use super::ProblemError;
use crate::fixedpoint::{
    iterate_inexact, FixedPointTrace, InexactStep, IterationOptions, OuterCriterion,
};
use crate::krylov::{gmres_solve, TerminationCriterion};
use crate::linalg::{norm2, residual, CsrMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forcing {
    /// `f(s) = 2ν + s(1 − s)(1 − 2s)`, the full nonlinear problem.
    ConvectionDiffusion,
    /// `f(s) = 2ν`, whose solution with zero velocity is `s(1 − s)`.
    DiffusionOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardProblemSpec {
    n: usize,
    viscosity: f64,
    forcing: Forcing,
}

impl Default for PicardProblemSpec {
    fn default() -> Self {
        Self {
            n: 64,
            viscosity: 1e-2,
            forcing: Forcing::ConvectionDiffusion,
        }
    }
}

impl PicardProblemSpec {
    pub fn new(n: usize, viscosity: f64, forcing: Forcing) -> Result<Self, ProblemError> {
        if n == 0 {
            return Err(ProblemError::InvalidParameter("n must be positive".into()));
        }
        if !(viscosity > 0.0 && viscosity.is_finite()) {
            return Err(ProblemError::InvalidParameter(format!(
                "viscosity must be positive, got {viscosity}"
            )));
        }
        Ok(Self {
            n,
            viscosity,
            forcing,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn viscosity(&self) -> f64 {
        self.viscosity
    }

    /// `1 / (n + 1)`
    pub fn h(&self) -> f64 {
        1.0 / (self.n + 1) as f64
    }

    /// Interior node coordinates `s_i = i h`.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.h();
        (1..=self.n).map(|i| i as f64 * h).collect()
    }

    /// `u*(s) = s(1 − s)` sampled at the nodes.
    pub fn manufactured_solution(&self) -> Vec<f64> {
        self.nodes().iter().map(|s| s * (1.0 - s)).collect()
    }

    pub fn rhs(&self) -> Vec<f64> {
        let nu = self.viscosity;
        self.nodes()
            .iter()
            .map(|&s| match self.forcing {
                Forcing::ConvectionDiffusion => 2.0 * nu + s * (1.0 - s) * (1.0 - 2.0 * s),
                Forcing::DiffusionOnly => 2.0 * nu,
            })
            .collect()
    }
}

/// Assembles `A(x)` and `b`.
pub fn picard_assemble(
    spec: &PicardProblemSpec,
    x: &[f64],
) -> Result<(CsrMatrix, Vec<f64>), ProblemError> {
    let n = spec.n;
    if x.len() != n {
        return Err(ProblemError::InvalidParameter(format!(
            "velocity has length {}, expected {n}",
            x.len()
        )));
    }
    let h = spec.h();
    let diffusion = spec.viscosity / (h * h);
    let mut triplets = Vec::with_capacity(5 * n);
    for (i, &v) in x.iter().enumerate() {
        triplets.push((i, i, 2.0 * diffusion + v.abs() / h));
        if i > 0 {
            triplets.push((i, i - 1, -diffusion));
        }
        if i + 1 < n {
            triplets.push((i, i + 1, -diffusion));
        }
        // upwind: backward difference for v ≥ 0, forward otherwise
        if v >= 0.0 && i > 0 {
            triplets.push((i, i - 1, -v / h));
        } else if v < 0.0 && i + 1 < n {
            triplets.push((i, i + 1, v / h));
        }
    }
    Ok((CsrMatrix::from_triplets(n, triplets)?, spec.rhs()))
}

/// `‖A(x) x − b‖₂`
pub fn nonlinear_residual(spec: &PicardProblemSpec, x: &[f64]) -> Result<f64, ProblemError> {
    let (a, b) = picard_assemble(spec, x)?;
    Ok(norm2(&residual(&a, x, &b)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardOptions {
    /// Starting velocity; zero when `None`.
    pub x0: Option<Vec<f64>>,
    pub inner_max_iter: usize,
    pub restart: Option<usize>,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            x0: None,
            inner_max_iter: 1000,
            restart: None,
        }
    }
}

/// Picard iteration with GMRES started from the current iterate.
///
/// Stops when `‖A(x^{k+1}) x^{k+1} − b‖ ≤ TOL`, or when GMRES does no work and
/// the iterate does not move.
pub fn picard_iterate(
    spec: &PicardProblemSpec,
    criterion: TerminationCriterion,
    outer: &IterationOptions,
    opts: &PicardOptions,
) -> Result<FixedPointTrace, ProblemError> {
    let x0 = opts.x0.clone().unwrap_or_else(|| vec![0.0; spec.n]);
    let (mut matrix, b) = picard_assemble(spec, &x0)?;
    iterate_inexact(
        |_, x: &[f64]| -> Result<InexactStep, ProblemError> {
            let report = gmres_solve(&matrix, &b, x, criterion, opts.inner_max_iter, opts.restart)?;
            let next = report.solution.clone();
            let (updated, _) = picard_assemble(spec, &next)?;
            let res = norm2(&residual(&updated, &next, &b));
            matrix = updated;
            Ok(InexactStep {
                next,
                reports: vec![report],
                residual: Some(res),
            })
        },
        x0,
        OuterCriterion::Residual,
        outer,
    )
}

/// The exact discrete solution, by Picard iteration with tight direct-accuracy
/// inner solves.
pub fn picard_reference(spec: &PicardProblemSpec) -> Result<Vec<f64>, ProblemError> {
    let trace = picard_iterate(
        spec,
        TerminationCriterion::relative(1e-14),
        &IterationOptions::with_tol(1e-13).max_iter(1000),
        &PicardOptions::default(),
    )?;
    Ok(trace.final_iterate().to_vec())
}
