//! Outer fixed point drivers, perturbation schedules, error bounds, and
//! numerical Lipschitz estimates.
//!
//! All drivers share [`iterate_inexact`], which takes one step function and
//! records iterates, increments and any inner solve reports. Scalar problems
//! are handled as length-1 vectors.

use thiserror::Error;

use crate::krylov::SolveReport;
use crate::linalg::{dist2, norm2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixedPointError {
    #[error("outer tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("map changed dimension: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a contraction: Lipschitz constant {0} is not below 1")]
    NotAContraction(f64),
    #[error("Lipschitz constants must be positive, got {0}")]
    InvalidLipschitz(f64),
    #[error("perturbation direction must be non-zero and finite")]
    ZeroDirection,
    #[error("adaptive rate must lie in (0, 1), got {0}")]
    InvalidRate(f64),
    #[error("need at least {needed} increments to estimate a Lipschitz constant, have {have}")]
    TooFewIncrements { needed: usize, have: usize },
    #[error("stagnated, ratio undefined")]
    Stagnated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    /// `‖x^{k+1} − x^k‖ ≤ TOL`
    IncrementBelowTol,
    /// A problem-supplied residual fell below `TOL`.
    ResidualBelowTol,
    /// The inner solvers did no work and the iterate did not move.
    InnerStagnation,
    MaxIter,
    /// Non-finite iterate or an increment above the divergence threshold.
    Diverged,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::IncrementBelowTol => "increment",
            Termination::ResidualBelowTol => "residual",
            Termination::InnerStagnation => "stagnation",
            Termination::MaxIter => "max-iter",
            Termination::Diverged => "diverged",
        })
    }
}

/// Record of one outer run.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointTrace {
    pub iterates: Vec<Vec<f64>>,
    pub increments: Vec<f64>,
    /// Outer residuals, one per step, when the step function supplies them.
    pub residuals: Vec<f64>,
    /// Inner solve reports of each outer step (empty for explicit maps).
    pub inner_reports: Vec<Vec<SolveReport>>,
    pub terminated_by: Termination,
    pub outer_tol: f64,
}

impl FixedPointTrace {
    pub fn final_iterate(&self) -> &[f64] {
        self.iterates.last().expect("trace holds at least x0")
    }

    pub fn outer_iterations(&self) -> usize {
        self.increments.len()
    }

    /// Inner iterations summed over every outer step and every inner solve.
    pub fn inner_iterations(&self) -> usize {
        self.inner_reports
            .iter()
            .flatten()
            .map(|r| r.iterations)
            .sum()
    }

    /// `‖x_final − x*‖₂`
    pub fn error_to(&self, x_star: &[f64]) -> f64 {
        dist2(self.final_iterate(), x_star)
    }
}

/// Outer stopping parameters and safeguards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub divergence_threshold: f64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iter: 100_000,
            divergence_threshold: 1e12,
        }
    }
}

impl IterationOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

/// Which quantity the outer loop compares against `TOL`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterCriterion {
    Increment,
    /// Uses [`InexactStep::residual`]; steps must supply it.
    Residual,
}

/// Output of one outer step.
#[derive(Debug, Clone, PartialEq)]
pub struct InexactStep {
    pub next: Vec<f64>,
    pub reports: Vec<SolveReport>,
    pub residual: Option<f64>,
}

impl InexactStep {
    pub fn explicit(next: Vec<f64>) -> Self {
        Self {
            next,
            reports: Vec::new(),
            residual: None,
        }
    }
}

/// Runs `x^{k+1} = step(k, x^k)` until the outer criterion, stagnation,
/// divergence, or `max_iter`.
///
/// Stagnation (every inner solve took zero iterations and the iterate is
/// unchanged) is checked before the outer criterion.
pub fn iterate_inexact<S, E>(
    mut step: S,
    x0: Vec<f64>,
    criterion: OuterCriterion,
    opts: &IterationOptions,
) -> Result<FixedPointTrace, E>
where
    S: FnMut(usize, &[f64]) -> Result<InexactStep, E>,
    E: From<FixedPointError>,
{
    if !(opts.tol > 0.0) {
        return Err(FixedPointError::InvalidTolerance(opts.tol).into());
    }
    let dim = x0.len();
    let mut trace = FixedPointTrace {
        iterates: vec![x0],
        increments: Vec::new(),
        residuals: Vec::new(),
        inner_reports: Vec::new(),
        terminated_by: Termination::MaxIter,
        outer_tol: opts.tol,
    };
    for k in 0..opts.max_iter {
        let current = trace.iterates.last().expect("non-empty");
        let InexactStep {
            next,
            reports,
            residual,
        } = step(k, current)?;
        if next.len() != dim {
            return Err(FixedPointError::DimensionMismatch {
                expected: dim,
                found: next.len(),
            }
            .into());
        }
        let increment = dist2(&next, current);
        let stagnated =
            !reports.is_empty() && reports.iter().all(|r| r.iterations == 0) && increment == 0.0;
        let finite = increment.is_finite() && next.iter().all(|v| v.is_finite());
        trace.increments.push(increment);
        trace.iterates.push(next);
        trace.inner_reports.push(reports);
        if let Some(res) = residual {
            trace.residuals.push(res);
        }

        if !finite || increment > opts.divergence_threshold {
            trace.terminated_by = Termination::Diverged;
            return Ok(trace);
        }
        if stagnated {
            trace.terminated_by = Termination::InnerStagnation;
            return Ok(trace);
        }
        let done = match criterion {
            OuterCriterion::Increment => increment <= opts.tol,
            OuterCriterion::Residual => residual.is_some_and(|r| r <= opts.tol),
        };
        if done {
            trace.terminated_by = match criterion {
                OuterCriterion::Increment => Termination::IncrementBelowTol,
                OuterCriterion::Residual => Termination::ResidualBelowTol,
            };
            return Ok(trace);
        }
    }
    Ok(trace)
}

/// Additive perturbation `ε_k · d` with unit direction `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSchedule {
    magnitude: ScheduleMagnitude,
    /// `None` means the normalized all-ones vector of whatever length is asked for.
    direction: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ScheduleMagnitude {
    None,
    Constant(f64),
    Adaptive { c: f64, rate: f64, divisor: f64 },
}

impl PerturbationSchedule {
    pub fn none() -> Self {
        Self {
            magnitude: ScheduleMagnitude::None,
            direction: None,
        }
    }

    /// Constant magnitude along the normalized all-ones direction.
    pub fn constant(magnitude: f64) -> Self {
        Self {
            magnitude: ScheduleMagnitude::Constant(magnitude),
            direction: None,
        }
    }

    /// `ε_k = c · rate^k` along the normalized all-ones direction.
    pub fn adaptive(c: f64, rate: f64) -> Result<Self, FixedPointError> {
        if !(rate > 0.0 && rate < 1.0) {
            return Err(FixedPointError::InvalidRate(rate));
        }
        Ok(Self {
            magnitude: ScheduleMagnitude::Adaptive {
                c,
                rate,
                divisor: 1.0,
            },
            direction: None,
        })
    }

    /// Replaces the direction; it is normalized to unit length.
    pub fn along(mut self, direction: &[f64]) -> Result<Self, FixedPointError> {
        let n = norm2(direction);
        if !(n > 0.0 && n.is_finite()) {
            return Err(FixedPointError::ZeroDirection);
        }
        self.direction = Some(direction.iter().map(|v| v / n).collect());
        Ok(self)
    }

    /// `ε_k` at step `k`.
    pub fn magnitude(&self, k: usize) -> f64 {
        match self.magnitude {
            ScheduleMagnitude::None => 0.0,
            ScheduleMagnitude::Constant(m) => m,
            ScheduleMagnitude::Adaptive { c, rate, divisor } => {
                c * rate.powi(k.min(i32::MAX as usize) as i32) / divisor
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self.magnitude, ScheduleMagnitude::None)
    }

    /// Unit direction of length `dim`.
    pub fn direction(&self, dim: usize) -> Result<Vec<f64>, FixedPointError> {
        match &self.direction {
            Some(d) if d.len() != dim => Err(FixedPointError::DimensionMismatch {
                expected: dim,
                found: d.len(),
            }),
            Some(d) => Ok(d.clone()),
            None => Ok(vec![1.0 / (dim.max(1) as f64).sqrt(); dim]),
        }
    }

    /// Adds `ε_k · d` to `x` in place.
    pub fn perturb(&self, k: usize, x: &mut [f64]) -> Result<(), FixedPointError> {
        if self.is_none() {
            return Ok(());
        }
        let m = self.magnitude(k);
        let d = self.direction(x.len())?;
        x.iter_mut().zip(d).for_each(|(xi, di)| *xi += m * di);
        Ok(())
    }
}

/// `ε_k = δ_k / L_S` with the direction of `delta`.
pub fn derived_schedule_from_ls(
    delta: &PerturbationSchedule,
    l_s: f64,
) -> Result<PerturbationSchedule, FixedPointError> {
    if !(l_s > 0.0) {
        return Err(FixedPointError::InvalidLipschitz(l_s));
    }
    let magnitude = match delta.magnitude {
        ScheduleMagnitude::None => ScheduleMagnitude::None,
        ScheduleMagnitude::Constant(m) => ScheduleMagnitude::Constant(m / l_s),
        ScheduleMagnitude::Adaptive { c, rate, divisor } => ScheduleMagnitude::Adaptive {
            c,
            rate,
            divisor: divisor * l_s,
        },
    };
    Ok(PerturbationSchedule {
        magnitude,
        direction: delta.direction.clone(),
    })
}

/// `x^{k+1} = f(x^k)`
pub fn iterate_plain<F>(
    mut f: F,
    x0: Vec<f64>,
    opts: &IterationOptions,
) -> Result<FixedPointTrace, FixedPointError>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    iterate_inexact(
        |_, x| Ok(InexactStep::explicit(f(x))),
        x0,
        OuterCriterion::Increment,
        opts,
    )
}

/// `x^{k+1} = f(x^k) + ε_k d`
pub fn iterate_perturbed<F>(
    mut f: F,
    schedule: &PerturbationSchedule,
    x0: Vec<f64>,
    opts: &IterationOptions,
) -> Result<FixedPointTrace, FixedPointError>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    iterate_inexact(
        |k, x| {
            let mut next = f(x);
            schedule.perturb(k, &mut next)?;
            Ok(InexactStep::explicit(next))
        },
        x0,
        OuterCriterion::Increment,
        opts,
    )
}

/// `x^{k+1} = S(F(x^k) + ε_k) + δ_k`
pub fn iterate_nested<S, F>(
    mut s: S,
    mut f: F,
    eps: &PerturbationSchedule,
    delta: &PerturbationSchedule,
    x0: Vec<f64>,
    opts: &IterationOptions,
) -> Result<FixedPointTrace, FixedPointError>
where
    S: FnMut(&[f64]) -> Vec<f64>,
    F: FnMut(&[f64]) -> Vec<f64>,
{
    iterate_inexact(
        |k, x| {
            let mut inner = f(x);
            eps.perturb(k, &mut inner)?;
            let mut next = s(&inner);
            delta.perturb(k, &mut next)?;
            Ok(InexactStep::explicit(next))
        },
        x0,
        OuterCriterion::Increment,
        opts,
    )
}

/// `ε / (1 − L)`, the limit error of a constant perturbation.
pub fn bound_direct(eps: f64, lipschitz: f64) -> Result<f64, FixedPointError> {
    if !(lipschitz > 0.0) {
        return Err(FixedPointError::InvalidLipschitz(lipschitz));
    }
    if lipschitz >= 1.0 {
        return Err(FixedPointError::NotAContraction(lipschitz));
    }
    Ok(eps / (1.0 - lipschitz))
}

/// `(ε L_S + δ) / (1 − L_S L_F)`, the limit error of the nested iteration.
pub fn bound_nested(eps: f64, delta: f64, l_s: f64, l_f: f64) -> Result<f64, FixedPointError> {
    for l in [l_s, l_f] {
        if !(l > 0.0) {
            return Err(FixedPointError::InvalidLipschitz(l));
        }
    }
    let product = l_s * l_f;
    if product >= 1.0 {
        return Err(FixedPointError::NotAContraction(product));
    }
    Ok((eps * l_s + delta) / (1.0 - product))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzSource {
    Analytic,
    Measured,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzData {
    pub constant: f64,
    pub local: Option<f64>,
    pub source: LipschitzSource,
}

impl LipschitzData {
    pub fn analytic(constant: f64) -> Self {
        Self {
            constant,
            local: None,
            source: LipschitzSource::Analytic,
        }
    }

    pub fn is_contraction(&self) -> bool {
        self.constant < 1.0
    }
}

/// Minimum number of increments [`estimate_lipschitz`] accepts.
pub const MIN_INCREMENTS: usize = 4;
const MAX_RATIOS: usize = 5;

/// Geometric mean of the last few increment ratios `‖Δx^{k+1}‖ / ‖Δx^k‖`.
pub fn estimate_lipschitz(trace: &FixedPointTrace) -> Result<LipschitzData, FixedPointError> {
    estimate_lipschitz_from(&trace.increments)
}

/// [`estimate_lipschitz`] on a bare increment sequence.
pub fn estimate_lipschitz_from(increments: &[f64]) -> Result<LipschitzData, FixedPointError> {
    let have = increments.len();
    if have < MIN_INCREMENTS {
        return Err(FixedPointError::TooFewIncrements {
            needed: MIN_INCREMENTS,
            have,
        });
    }
    let used = &increments[have - (MAX_RATIOS + 1).min(have)..];
    if used.iter().any(|&d| !(d > 0.0)) {
        return Err(FixedPointError::Stagnated);
    }
    let ratios = used.len() - 1;
    let log_sum: f64 = used.windows(2).map(|w| (w[1] / w[0]).ln()).sum();
    let constant = (log_sum / ratios as f64).exp().max(f64::MIN_POSITIVE);
    Ok(LipschitzData {
        constant,
        local: None,
        source: LipschitzSource::Measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn scalar(f: impl Fn(f64) -> f64) -> impl FnMut(&[f64]) -> Vec<f64> {
        move |x| vec![f(x[0])]
    }

    fn scalar_fixed_point(gamma: f64) -> f64 {
        let mut x = 0.0f64;
        for _ in 0..400 {
            x = (gamma * x).exp() / 4.0;
        }
        x
    }

    #[test]
    fn halving_map() {
        let t =
            iterate_plain(scalar(|x| x / 2.0), vec![1.0], &IterationOptions::default()).unwrap();
        assert_eq!(t.terminated_by, Termination::IncrementBelowTol);
        assert!(t.final_iterate()[0].abs() <= 1e-13);
        for w in t.increments.windows(2) {
            assert_eq!(w[1], w[0] / 2.0);
        }
        assert_eq!(t.increments.len() + 1, t.iterates.len());
        assert!(*t.increments.last().unwrap() <= t.outer_tol);
    }

    #[test]
    fn exponential_map_fixed_point() {
        let t = iterate_plain(
            scalar(|x| (0.3 * x).exp() / 4.0),
            vec![0.5],
            &IterationOptions::default(),
        )
        .unwrap();
        let oracle = scalar_fixed_point(0.3);
        assert!((t.final_iterate()[0] - oracle).abs() <= 1e-13);
        assert!((t.final_iterate()[0] - 0.27118948).abs() <= 1e-7);
    }

    #[test]
    fn none_schedule_matches_plain() {
        let opts = IterationOptions::default();
        let a = iterate_plain(scalar(|x| x / 2.0), vec![1.0], &opts).unwrap();
        let b = iterate_perturbed(
            scalar(|x| x / 2.0),
            &PerturbationSchedule::none(),
            vec![1.0],
            &opts,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_perturbation_limit() {
        let gamma = 0.3;
        let x_star = scalar_fixed_point(gamma);
        let t = iterate_perturbed(
            scalar(move |x| (gamma * x).exp() / 4.0),
            &PerturbationSchedule::constant(1e-2),
            vec![0.0],
            &IterationOptions::default(),
        )
        .unwrap();
        let err = (t.final_iterate()[0] - x_star).abs();
        assert_relative_eq!(err, 1.089e-2, max_relative = 0.01);
        let l = gamma * gamma.exp() / 4.0;
        assert!(err <= bound_direct(1e-2, l).unwrap() + 1e-10);
    }

    #[test]
    fn adaptive_perturbation_reaches_fixed_point() {
        let gamma = 0.3;
        let x_star = scalar_fixed_point(gamma);
        let t = iterate_perturbed(
            scalar(move |x| (gamma * x).exp() / 4.0),
            &PerturbationSchedule::adaptive(1e-2, 0.101239).unwrap(),
            vec![0.0],
            &IterationOptions::default(),
        )
        .unwrap();
        assert!((t.final_iterate()[0] - x_star).abs() <= 1e-12);
    }

    #[test]
    fn identity_nested_stays_put() {
        let id = |x: &[f64]| x.to_vec();
        let none = PerturbationSchedule::none();
        let t = iterate_nested(
            id,
            id,
            &none,
            &none,
            vec![0.7, -1.0],
            &IterationOptions::default(),
        )
        .unwrap();
        assert_eq!(t.outer_iterations(), 1);
        assert_eq!(t.increments[0], 0.0);
        assert_eq!(t.final_iterate(), &[0.7, -1.0]);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bound_direct(0.0, 0.5).unwrap(), 0.0);
        assert_relative_eq!(bound_direct(1e-2, 0.9).unwrap(), 0.1, max_relative = 1e-14);
        assert_relative_eq!(
            bound_direct(0.1, 0.101239).unwrap(),
            0.1 / 0.898761,
            max_relative = 1e-14
        );
        assert!(matches!(
            bound_direct(0.1, 1.0),
            Err(FixedPointError::NotAContraction(_))
        ));

        assert_relative_eq!(
            bound_nested(0.1, 0.1, 0.1, 0.1).unwrap(),
            0.11 / 0.99,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bound_nested(0.1, 0.1, 0.99, 0.99).unwrap(),
            0.199 / 0.0199,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            bound_nested(0.1, 0.1, 0.9, 0.9).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert!(bound_nested(0.1, 0.1, 2.0, 0.5).is_err());
    }

    #[test]
    fn derived_schedule_examples() {
        let d = derived_schedule_from_ls(&PerturbationSchedule::constant(1e-3), 0.5).unwrap();
        assert_relative_eq!(d.magnitude(7), 2e-3, max_relative = 1e-15);

        let adaptive = PerturbationSchedule::adaptive(0.3, 0.8).unwrap();
        let same = derived_schedule_from_ls(&adaptive, 1.0).unwrap();
        for k in 0..10 {
            assert_eq!(same.magnitude(k), adaptive.magnitude(k));
        }

        let zero = derived_schedule_from_ls(&PerturbationSchedule::constant(0.0), 0.5).unwrap();
        assert_eq!(zero.magnitude(3), 0.0);
        assert!(derived_schedule_from_ls(&adaptive, 0.0).is_err());
    }

    #[test]
    fn schedule_directions() {
        let s = PerturbationSchedule::constant(2.0);
        assert_relative_eq!(norm2(&s.direction(7).unwrap()), 1.0, epsilon = 1e-12);
        let s = s.along(&[3.0, 4.0]).unwrap();
        assert_eq!(s.direction(2).unwrap(), vec![0.6, 0.8]);
        assert!(s.direction(3).is_err());
        assert!(PerturbationSchedule::constant(1.0)
            .along(&[0.0, 0.0])
            .is_err());
        assert!(PerturbationSchedule::adaptive(1.0, 1.0).is_err());
    }

    #[test]
    fn lipschitz_of_halving_map() {
        let t = iterate_plain(
            scalar(|x| x / 2.0),
            vec![1.0],
            &IterationOptions::with_tol(1e-6),
        )
        .unwrap();
        let l = estimate_lipschitz(&t).unwrap();
        assert!((l.constant - 0.5).abs() <= 1e-10);
        assert_eq!(l.source, LipschitzSource::Measured);
        assert!(l.is_contraction());
    }

    #[test]
    fn lipschitz_of_exponential_map() {
        let x_star = scalar_fixed_point(0.3);
        let slope = 0.3 * (0.3 * x_star).exp() / 4.0;
        let t = iterate_plain(
            scalar(|x| (0.3 * x).exp() / 4.0),
            vec![0.5],
            &IterationOptions::with_tol(1e-10),
        )
        .unwrap();
        let l = estimate_lipschitz(&t).unwrap();
        assert_relative_eq!(l.constant, slope, max_relative = 0.1);
    }

    #[test]
    fn lipschitz_errors() {
        assert!(matches!(
            estimate_lipschitz_from(&[1.0, 0.5, 0.25]),
            Err(FixedPointError::TooFewIncrements { .. })
        ));
        assert_eq!(
            estimate_lipschitz_from(&[1.0, 0.5, 0.0, 0.0]),
            Err(FixedPointError::Stagnated)
        );
    }

    #[test]
    fn divergence_is_reported() {
        let t = iterate_plain(
            scalar(|x| 3.0 * x + 1.0),
            vec![1.0],
            &IterationOptions::default(),
        )
        .unwrap();
        assert_eq!(t.terminated_by, Termination::Diverged);
        let t = iterate_plain(
            scalar(|_| f64::NAN),
            vec![1.0],
            &IterationOptions::default(),
        )
        .unwrap();
        assert_eq!(t.terminated_by, Termination::Diverged);
    }

    #[test]
    fn max_iter_and_bad_tol() {
        let t = iterate_plain(
            scalar(|x| x / 2.0),
            vec![1.0],
            &IterationOptions::default().max_iter(3),
        )
        .unwrap();
        assert_eq!(t.terminated_by, Termination::MaxIter);
        assert_eq!(t.outer_iterations(), 3);
        assert!(iterate_plain(scalar(|x| x), vec![1.0], &IterationOptions::with_tol(0.0)).is_err());
    }

    #[test]
    fn dimension_change_is_an_error() {
        let r = iterate_plain(
            |x: &[f64]| vec![x[0]; 2],
            vec![1.0],
            &IterationOptions::default(),
        );
        assert!(matches!(r, Err(FixedPointError::DimensionMismatch { .. })));
    }

    proptest! {
        #[test]
        fn constant_perturbation_within_direct_bound(gamma in 0.01f64..1.2, eps in 0.0f64..0.1) {
            let x_star = scalar_fixed_point(gamma);
            let l = gamma * gamma.exp() / 4.0;
            let t = iterate_perturbed(
                scalar(move |x| (gamma * x).exp() / 4.0),
                &PerturbationSchedule::constant(eps),
                vec![0.0],
                &IterationOptions::default(),
            ).unwrap();
            let err = (t.final_iterate()[0] - x_star).abs();
            prop_assert!(err <= bound_direct(eps, l).unwrap() + 1e-10);
        }

        #[test]
        fn plain_increments_contract(factor in -0.95f64..0.95, x0 in -10.0f64..10.0) {
            prop_assume!(factor.abs() > 1e-3 && x0.abs() > 1e-3);
            let t = iterate_plain(scalar(move |x| factor * x + 0.25), vec![x0], &IterationOptions::with_tol(1e-12)).unwrap();
            for w in t.increments.windows(2) {
                // increments near machine precision are dominated by rounding of the iterate
            prop_assert!(w[1] <= factor.abs() * w[0] * (1.0 + 1e-8) + 16.0 * f64::EPSILON * (x0.abs() + 5.0));
            }
        }

        #[test]
        fn adaptive_schedule_is_geometric(c in 1e-6f64..1.0, rate in 0.01f64..0.99, k in 0usize..50) {
            let s = PerturbationSchedule::adaptive(c, rate).unwrap();
            prop_assert!((s.magnitude(k + 1) - rate * s.magnitude(k)).abs() <= 1e-14 * c);
        }
    }
}
