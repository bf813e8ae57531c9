//! Parameter sweeps behind each experiment id.

use std::time::Instant;

use inexact_core::fixedpoint::{
    bound_direct, bound_nested, iterate_nested, iterate_perturbed, iterate_plain, FixedPointError,
    IterationOptions, PerturbationSchedule, Termination,
};
use inexact_core::krylov::{CriterionKind, TerminationCriterion};
use inexact_core::linalg::dist2;
use inexact_core::problems::linear::linear_nested;
use inexact_core::problems::picard::{
    picard_iterate, picard_reference, PicardOptions, PicardProblemSpec,
};
use inexact_core::problems::scalar::{
    nested_fixed_point, nested_scalar, scalar_map, NestedScalarSpec, ScalarMapSpec,
};
use inexact_core::problems::transmission::{
    dn_iterate, transmission_assemble, DnOptions, DnOrdering, InnerGuess, TransmissionSystem,
};
use inexact_core::problems::ProblemError;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{criterion_name, ExperimentConfig, ExperimentId};
use crate::reference;
use crate::report::{Layout, TableReport, Value};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    FixedPoint(#[from] FixedPointError),
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

/// Deliberate misconfiguration used to check that the acceptance suite
/// notices a wrong tolerance interpretation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Runs the absolute criterion whenever the initial-residual criterion is
    /// requested and vice versa.
    SwapRelativeAbsolute,
}

impl Fault {
    pub fn apply(self, kind: CriterionKind) -> CriterionKind {
        match (self, kind) {
            (Fault::SwapRelativeAbsolute, CriterionKind::RelativeToInitialResidual) => {
                CriterionKind::Absolute
            }
            (Fault::SwapRelativeAbsolute, CriterionKind::Absolute) => {
                CriterionKind::RelativeToInitialResidual
            }
            (_, k) => k,
        }
    }
}

/// Outer cap for Dirichlet–Neumann sweeps; the finest mesh needs ~800 steps.
pub const DN_MAX_ITER: usize = 5_000;

const PICARD_TOL: f64 = 1e-12;
const ADAPTIVE_TOL: f64 = 1e-15;

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<TableReport, RunError> {
    run_experiment_with(cfg, Fault::None)
}

pub fn run_experiment_with(cfg: &ExperimentConfig, fault: Fault) -> Result<TableReport, RunError> {
    let mut report = match cfg.experiment {
        ExperimentId::ScalarDirect => scalar_direct(cfg)?,
        ExperimentId::ScalarAdaptive => scalar_adaptive(cfg)?,
        ExperimentId::LinearNested => linear_nested_sweep(cfg)?,
        ExperimentId::ScalarNested => scalar_nested_sweep(cfg)?,
        ExperimentId::Picard => picard_sweep(cfg, fault)?,
        ExperimentId::TransmissionError => transmission_error(cfg, fault)?,
        ExperimentId::TransmissionIters => transmission_iters(cfg, fault)?,
        ExperimentId::TransmissionEfficiency => transmission_efficiency(cfg, fault)?,
    };
    report.provenance.extend(cfg.echo());
    Ok(report)
}

fn list_or(values: &Option<Vec<f64>>, default: &[f64]) -> Vec<f64> {
    values.clone().unwrap_or_else(|| default.to_vec())
}

fn single_tol(cfg: &ExperimentConfig, default: f64) -> f64 {
    cfg.tol
        .as_ref()
        .and_then(|t| t.first().copied())
        .unwrap_or(default)
}

fn outer_options(cfg: &ExperimentConfig, tol: f64, default_max: usize) -> IterationOptions {
    IterationOptions::with_tol(tol).max_iter(cfg.max_iter.unwrap_or(default_max))
}

fn criterion(kind: CriterionKind, tau: f64) -> Result<TerminationCriterion, RunError> {
    TerminationCriterion::new(kind, tau).map_err(|e| RunError::Invalid(e.to_string()))
}

/// Renders `dx` as `1/N`.
pub fn dx_label(dx: f64) -> String {
    format!("1/{}", (1.0 / dx).round() as u64)
}

fn status(t: Termination) -> Value {
    Value::Text(t.to_string())
}

fn timed<T>(timing: bool, f: impl FnOnce() -> T) -> (T, Option<f64>) {
    let start = Instant::now();
    let out = f();
    (out, timing.then(|| start.elapsed().as_secs_f64()))
}

fn with_timing(mut row: Vec<Value>, wall: Option<f64>) -> Vec<Value> {
    if let Some(w) = wall {
        row.push(Value::Float(w));
    }
    row
}

fn new_report(cfg: &ExperimentConfig, title: &str, columns: &[&str]) -> TableReport {
    let mut cols = columns.to_vec();
    if cfg.timing {
        cols.push("wall_s");
    }
    TableReport::new(cfg.experiment, title, &cols)
}

fn scalar_direct(cfg: &ExperimentConfig) -> Result<TableReport, RunError> {
    let gammas = list_or(&cfg.gamma, &reference::SCALAR_GAMMAS);
    let eps_list = list_or(&cfg.eps, &reference::PERTURBATIONS);
    let opts = outer_options(cfg, single_tol(cfg, 1e-14), 100_000);
    let mut report = new_report(
        cfg,
        "Scalar map with constant perturbation",
        &[
            "gamma",
            "lipschitz",
            "eps",
            "error",
            "bound",
            "outer_iters",
            "status",
        ],
    );
    let grid: Vec<(f64, f64)> = gammas
        .iter()
        .flat_map(|&g| eps_list.iter().map(move |&e| (g, e)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(gamma, eps)| -> Result<Vec<Value>, RunError> {
            let (map, lip) = scalar_map(ScalarMapSpec::new(gamma)?);
            let x_star = iterate_plain(map, vec![0.0], &opts)?;
            let (trace, wall) = timed(cfg.timing, || {
                iterate_perturbed(map, &PerturbationSchedule::constant(eps), vec![0.0], &opts)
            });
            let trace = trace?;
            let bound = bound_direct(eps, lip.constant).map_or(Value::Missing, Value::Float);
            Ok(with_timing(
                vec![
                    gamma.into(),
                    lip.constant.into(),
                    eps.into(),
                    trace.error_to(x_star.final_iterate()).into(),
                    bound,
                    trace.outer_iterations().into(),
                    status(trace.terminated_by),
                ],
                wall,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    report.rows = rows;
    report.layout = Layout::Pivot {
        row_keys: vec!["lipschitz"],
        col_key: "eps",
        lines: vec!["error"],
    };
    Ok(report)
}

fn scalar_adaptive(cfg: &ExperimentConfig) -> Result<TableReport, RunError> {
    let gammas = list_or(&cfg.gamma, &reference::SCALAR_GAMMAS);
    let cs = list_or(&cfg.eps, &reference::PERTURBATIONS);
    let l_s_list = list_or(&cfg.alpha, &reference::NESTED_LS);
    let l_f_list = list_or(&cfg.beta, &reference::NESTED_LF);
    let opts = outer_options(cfg, single_tol(cfg, ADAPTIVE_TOL), 100_000);
    let mut report = new_report(
        cfg,
        "Adaptive perturbation schedules",
        &[
            "problem",
            "gamma",
            "ls",
            "lf",
            "c",
            "rate",
            "error",
            "outer_iters",
            "status",
        ],
    );

    enum Job {
        Scalar(f64, f64),
        Nested(f64, f64, f64),
    }
    let mut jobs = Vec::new();
    for &g in &gammas {
        for &c in &cs {
            jobs.push(Job::Scalar(g, c));
        }
    }
    for &ls in &l_s_list {
        for &lf in &l_f_list {
            for &c in &cs {
                jobs.push(Job::Nested(ls, lf, c));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|job| -> Result<Vec<Value>, RunError> {
            match *job {
                Job::Scalar(gamma, c) => {
                    let (map, lip) = scalar_map(ScalarMapSpec::new(gamma)?);
                    let x_star = iterate_plain(map, vec![0.0], &opts)?;
                    let schedule = PerturbationSchedule::adaptive(c, lip.constant)?;
                    let (trace, wall) = timed(cfg.timing, || {
                        iterate_perturbed(map, &schedule, vec![0.0], &opts)
                    });
                    let trace = trace?;
                    Ok(with_timing(
                        vec![
                            "scalar".into(),
                            gamma.into(),
                            Value::Missing,
                            Value::Missing,
                            c.into(),
                            lip.constant.into(),
                            trace.error_to(x_star.final_iterate()).into(),
                            trace.outer_iterations().into(),
                            status(trace.terminated_by),
                        ],
                        wall,
                    ))
                }
                Job::Nested(ls, lf, c) => {
                    let spec = NestedScalarSpec::from_lipschitz(ls, lf)?;
                    let p = nested_scalar(spec);
                    let x_star = nested_fixed_point(spec);
                    let rate = ls * lf;
                    let delta = PerturbationSchedule::adaptive(c, rate)?;
                    let eps = PerturbationSchedule::adaptive(c, rate)?;
                    let (trace, wall) = timed(cfg.timing, || {
                        iterate_nested(&p.s, &p.f, &eps, &delta, vec![0.0], &opts)
                    });
                    let trace = trace?;
                    Ok(with_timing(
                        vec![
                            "nested".into(),
                            Value::Missing,
                            ls.into(),
                            lf.into(),
                            c.into(),
                            rate.into(),
                            (trace.final_iterate()[0] - x_star).abs().into(),
                            trace.outer_iterations().into(),
                            status(trace.terminated_by),
                        ],
                        wall,
                    ))
                }
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    report.rows = rows;
    Ok(report)
}

fn linear_nested_sweep(cfg: &ExperimentConfig) -> Result<TableReport, RunError> {
    let eps_list = list_or(&cfg.eps, &reference::PERTURBATIONS);
    let alphas = list_or(&cfg.alpha, &reference::LINEAR_COEFFICIENTS);
    let betas = list_or(&cfg.beta, &reference::LINEAR_COEFFICIENTS);
    let opts = outer_options(cfg, single_tol(cfg, 1e-14), 100_000);
    let mut report = new_report(
        cfg,
        "2x2 nested linear problem",
        &[
            "eps",
            "alpha",
            "beta",
            "estimate",
            "error",
            "outer_iters",
            "status",
        ],
    );
    let grid: Vec<(f64, f64, f64)> = eps_list
        .iter()
        .flat_map(|&e| {
            let betas = &betas;
            alphas
                .iter()
                .flat_map(move |&a| betas.iter().map(move |&b| (e, a, b)))
        })
        .collect();
    report.rows = grid
        .par_iter()
        .map(|&(eps, alpha, beta)| -> Result<Vec<Value>, RunError> {
            let p = linear_nested(alpha, beta)?;
            let schedule = PerturbationSchedule::constant(eps);
            let (trace, wall) = timed(cfg.timing, || {
                iterate_nested(
                    |x| p.s(x),
                    |x| p.f(x),
                    &schedule,
                    &schedule,
                    vec![0.0, 0.0],
                    &opts,
                )
            });
            let trace = trace?;
            let estimate = if alpha > 0.0 && beta > 0.0 {
                bound_nested(eps, eps, alpha, beta).map_or(Value::Missing, Value::Float)
            } else {
                Value::Missing
            };
            Ok(with_timing(
                vec![
                    eps.into(),
                    alpha.into(),
                    beta.into(),
                    estimate,
                    trace.error_to(&p.x_star).into(),
                    trace.outer_iterations().into(),
                    status(trace.terminated_by),
                ],
                wall,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    report.layout = Layout::Pivot {
        row_keys: vec!["eps", "alpha"],
        col_key: "beta",
        lines: vec!["estimate", "error"],
    };
    Ok(report)
}

fn scalar_nested_sweep(cfg: &ExperimentConfig) -> Result<TableReport, RunError> {
    let eps_list = list_or(&cfg.eps, &reference::PERTURBATIONS);
    let l_s_list = list_or(&cfg.alpha, &reference::NESTED_LS);
    let l_f_list = list_or(&cfg.beta, &reference::NESTED_LF);
    let opts = outer_options(cfg, single_tol(cfg, 1e-14), 100_000);
    let mut report = new_report(
        cfg,
        "Nested scalar problem",
        &[
            "eps",
            "ls",
            "lf",
            "estimate",
            "error",
            "outer_iters",
            "status",
        ],
    );
    let grid: Vec<(f64, f64, f64)> = eps_list
        .iter()
        .flat_map(|&e| {
            let l_f_list = &l_f_list;
            l_s_list
                .iter()
                .flat_map(move |&a| l_f_list.iter().map(move |&b| (e, a, b)))
        })
        .collect();
    report.rows = grid
        .par_iter()
        .map(|&(eps, ls, lf)| -> Result<Vec<Value>, RunError> {
            let spec = NestedScalarSpec::from_lipschitz(ls, lf)?;
            let p = nested_scalar(spec);
            let x_star = nested_fixed_point(spec);
            let schedule = PerturbationSchedule::constant(eps);
            let (trace, wall) = timed(cfg.timing, || {
                iterate_nested(&p.s, &p.f, &schedule, &schedule, vec![0.0], &opts)
            });
            let trace = trace?;
            let estimate =
                bound_nested(eps, eps, p.l_s, p.l_f).map_or(Value::Missing, Value::Float);
            Ok(with_timing(
                vec![
                    eps.into(),
                    ls.into(),
                    lf.into(),
                    estimate,
                    (trace.final_iterate()[0] - x_star).abs().into(),
                    trace.outer_iterations().into(),
                    status(trace.terminated_by),
                ],
                wall,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    report.layout = Layout::Pivot {
        row_keys: vec!["eps", "ls"],
        col_key: "lf",
        lines: vec!["estimate", "error"],
    };
    Ok(report)
}

/// Default inner tolerances of the Picard sweep per criterion.
pub fn picard_default_taus(kind: CriterionKind) -> Vec<f64> {
    match kind {
        CriterionKind::Absolute => vec![1e-2, 1e-3, 1e-4, 1e-5],
        _ => vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7],
    }
}

fn picard_sweep(cfg: &ExperimentConfig, fault: Fault) -> Result<TableReport, RunError> {
    let kinds = match cfg.criterion {
        Some(k) => vec![k],
        None => vec![
            CriterionKind::RelativeToInitialResidual,
            CriterionKind::Absolute,
        ],
    };
    let tols = list_or(&cfg.tol, &[PICARD_TOL]);
    let spec = PicardProblemSpec::default();
    let reference = picard_reference(&spec)?;
    let mut grid = Vec::new();
    for &kind in &kinds {
        let taus = cfg.tau.clone().unwrap_or_else(|| picard_default_taus(kind));
        for &tol in &tols {
            for &tau in &taus {
                grid.push((kind, tol, tau));
            }
        }
    }
    let mut report = new_report(
        cfg,
        "Picard iteration on 1D convection-diffusion",
        &[
            "criterion",
            "tol",
            "tau",
            "outer_iters",
            "inner_iters",
            "residual",
            "error",
            "status",
        ],
    );
    report.qualitative = true;
    report.rows = grid
        .par_iter()
        .map(|&(kind, tol, tau)| -> Result<Vec<Value>, RunError> {
            let c = criterion(fault.apply(kind), tau)?;
            let opts = outer_options(cfg, tol, 1_000);
            let (trace, wall) = timed(cfg.timing, || {
                picard_iterate(&spec, c, &opts, &PicardOptions::default())
            });
            let trace = trace?;
            let residual = trace
                .residuals
                .last()
                .copied()
                .map_or(Value::Missing, Value::Float);
            Ok(with_timing(
                vec![
                    criterion_name(kind).into(),
                    tol.into(),
                    tau.into(),
                    trace.outer_iterations().into(),
                    trace.inner_iterations().into(),
                    residual,
                    trace.error_to(&reference).into(),
                    status(trace.terminated_by),
                ],
                wall,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(report)
}

/// Assembled system with its monolithic solution.
pub struct PreparedSystem {
    pub dx: f64,
    pub system: TransmissionSystem,
    pub monolithic: Vec<f64>,
}

impl PreparedSystem {
    pub fn new(dx: f64) -> Result<Self, RunError> {
        let system = transmission_assemble(dx)?;
        let monolithic = system.monolithic_solve()?;
        Ok(Self {
            dx,
            system,
            monolithic,
        })
    }

    pub fn monolithic_trace(&self) -> &[f64] {
        let (_, u2) = self.system.split(&self.monolithic);
        self.system.trace(u2)
    }
}

/// Summary of one Dirichlet–Neumann run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DnSummary {
    pub outer_iters: usize,
    pub inner_iters: usize,
    /// `‖(u₁, u₂) − u_monolithic‖₂`
    pub error: f64,
    /// `‖u_Γ − u_Γ,monolithic‖₂`
    pub interface_error: f64,
    pub terminated_by: Termination,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DnSettings {
    pub inner_guess: InnerGuess,
    pub ordering: DnOrdering,
    pub max_iter: usize,
    pub fault: Fault,
}

impl Default for DnSettings {
    fn default() -> Self {
        Self {
            inner_guess: InnerGuess::Previous,
            ordering: DnOrdering::Lagged,
            max_iter: DN_MAX_ITER,
            fault: Fault::None,
        }
    }
}

impl DnSettings {
    fn from_config(cfg: &ExperimentConfig, fault: Fault) -> Self {
        Self {
            inner_guess: cfg.inner_guess,
            ordering: cfg.ordering,
            max_iter: cfg.max_iter.unwrap_or(DN_MAX_ITER),
            fault,
        }
    }
}

pub fn run_dn(
    prepared: &PreparedSystem,
    kind: CriterionKind,
    tau: f64,
    tol: f64,
    settings: &DnSettings,
) -> Result<DnSummary, RunError> {
    let c = criterion(settings.fault.apply(kind), tau)?;
    let opts = DnOptions {
        ordering: settings.ordering,
        inner_guess: settings.inner_guess,
        ..DnOptions::default()
    };
    let outer = IterationOptions::with_tol(tol).max_iter(settings.max_iter);
    let run = dn_iterate(&prepared.system, c, &outer, &opts)?;
    let full = run.full_solution(&prepared.system);
    Ok(DnSummary {
        outer_iters: run.trace.outer_iterations(),
        inner_iters: run.trace.inner_iterations(),
        error: dist2(&full, &prepared.monolithic),
        interface_error: dist2(run.trace.final_iterate(), prepared.monolithic_trace()),
        terminated_by: run.trace.terminated_by,
    })
}

fn prepare_all(dxs: &[f64]) -> Result<Vec<PreparedSystem>, RunError> {
    dxs.par_iter().map(|&dx| PreparedSystem::new(dx)).collect()
}

fn transmission_error(cfg: &ExperimentConfig, fault: Fault) -> Result<TableReport, RunError> {
    let kinds = match cfg.criterion {
        Some(k) => vec![k],
        None => vec![CriterionKind::RelativeToRhs, CriterionKind::Absolute],
    };
    let taus = list_or(&cfg.tau, &reference::TRANSMISSION_TAUS);
    let dxs = list_or(&cfg.dx, &reference::TRANSMISSION_DXS);
    let tol = single_tol(cfg, 1e-14);
    let settings = DnSettings::from_config(cfg, fault);
    let systems = prepare_all(&dxs)?;
    let mut grid = Vec::new();
    for &kind in &kinds {
        for &tau in &taus {
            for s in &systems {
                grid.push((kind, tau, s));
            }
        }
    }
    let mut report = new_report(
        cfg,
        "Transmission problem: error of the converged DN iteration",
        &[
            "criterion",
            "tau",
            "dx",
            "error",
            "interface_error",
            "outer_iters",
            "inner_iters",
            "status",
        ],
    );
    report.rows = grid
        .par_iter()
        .map(|&(kind, tau, s)| -> Result<Vec<Value>, RunError> {
            let (run, wall) = timed(cfg.timing, || run_dn(s, kind, tau, tol, &settings));
            let run = run?;
            Ok(with_timing(
                vec![
                    criterion_name(kind).into(),
                    tau.into(),
                    dx_label(s.dx).into(),
                    run.error.into(),
                    run.interface_error.into(),
                    run.outer_iters.into(),
                    run.inner_iters.into(),
                    status(run.terminated_by),
                ],
                wall,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    report.layout = Layout::Pivot {
        row_keys: vec!["criterion", "tau"],
        col_key: "dx",
        lines: vec!["error"],
    };
    Ok(report)
}

fn transmission_iters(cfg: &ExperimentConfig, fault: Fault) -> Result<TableReport, RunError> {
    let kind = cfg
        .criterion
        .unwrap_or(CriterionKind::RelativeToInitialResidual);
    let taus = list_or(&cfg.tau, &reference::TRANSMISSION_TAUS);
    let dxs = list_or(&cfg.dx, &reference::TRANSMISSION_DXS);
    let tol = single_tol(cfg, 1e-14);
    let settings = DnSettings::from_config(cfg, fault);
    let systems = prepare_all(&dxs)?;
    let grid: Vec<_> = taus
        .iter()
        .flat_map(|&tau| systems.iter().map(move |s| (tau, s)))
        .collect();
    let mut report = new_report(
        cfg,
        "Transmission problem: outer and cumulative CG iterations",
        &[
            "criterion",
            "tau",
            "dx",
            "outer_iters",
            "inner_iters",
            "error",
            "interface_error",
            "status",
        ],
    );
    report.rows = grid
        .par_iter()
        .map(|&(tau, s)| -> Result<Vec<Value>, RunError> {
            let (run, wall) = timed(cfg.timing, || run_dn(s, kind, tau, tol, &settings));
            let run = run?;
            Ok(with_timing(
                vec![
                    criterion_name(kind).into(),
                    tau.into(),
                    dx_label(s.dx).into(),
                    run.outer_iters.into(),
                    run.inner_iters.into(),
                    run.error.into(),
                    run.interface_error.into(),
                    status(run.terminated_by),
                ],
                wall,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    report.layout = Layout::Pivot {
        row_keys: vec!["tau"],
        col_key: "dx",
        lines: vec!["outer_iters", "inner_iters"],
    };
    Ok(report)
}

/// Inner tolerance each scheme uses for outer tolerance `tol`.
pub fn efficiency_tau(kind: CriterionKind, tol: f64) -> f64 {
    match kind {
        CriterionKind::RelativeToInitialResidual => 1e-1,
        CriterionKind::RelativeToRhs | CriterionKind::Absolute => tol,
    }
}

fn transmission_efficiency(cfg: &ExperimentConfig, fault: Fault) -> Result<TableReport, RunError> {
    let kinds = match cfg.criterion {
        Some(k) => vec![k],
        None => vec![
            CriterionKind::RelativeToInitialResidual,
            CriterionKind::RelativeToRhs,
            CriterionKind::Absolute,
        ],
    };
    let tols = list_or(&cfg.tol, &[1e-1, 1e-2, 1e-3, 1e-4]);
    let dxs = list_or(&cfg.dx, &[0.0125]);
    let settings = DnSettings::from_config(cfg, fault);
    let systems = prepare_all(&dxs)?;
    let mut grid = Vec::new();
    for s in &systems {
        for &kind in &kinds {
            for &tol in &tols {
                grid.push((s, kind, tol));
            }
        }
    }
    let mut report = new_report(
        cfg,
        "Transmission problem: cost per outer tolerance",
        &[
            "dx",
            "criterion",
            "tol",
            "tau",
            "outer_iters",
            "inner_iters",
            "error",
            "status",
        ],
    );
    report.rows = grid
        .par_iter()
        .map(|&(s, kind, tol)| -> Result<Vec<Value>, RunError> {
            let tau = efficiency_tau(kind, tol);
            let (run, wall) = timed(cfg.timing, || run_dn(s, kind, tau, tol, &settings));
            let run = run?;
            Ok(with_timing(
                vec![
                    dx_label(s.dx).into(),
                    criterion_name(kind).into(),
                    tol.into(),
                    tau.into(),
                    run.outer_iters.into(),
                    run.inner_iters.into(),
                    run.error.into(),
                    status(run.terminated_by),
                ],
                wall,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(report)
}

/// Cheap parameter sets for smoke tests of every experiment id.
pub fn quick_config(id: ExperimentId) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(id);
    match id {
        ExperimentId::ScalarDirect | ExperimentId::ScalarAdaptive => {
            cfg.gamma = Some(vec![0.3]);
            cfg.eps = Some(vec![1e-2]);
            cfg.alpha = Some(vec![0.9]);
            cfg.beta = Some(vec![0.1]);
        }
        ExperimentId::LinearNested | ExperimentId::ScalarNested => {
            cfg.eps = Some(vec![1e-2]);
            cfg.alpha = Some(vec![0.1]);
            cfg.beta = Some(vec![0.1]);
        }
        ExperimentId::Picard => {
            cfg.tau = Some(vec![1e-1]);
        }
        ExperimentId::TransmissionError
        | ExperimentId::TransmissionIters
        | ExperimentId::TransmissionEfficiency => {
            cfg.dx = Some(vec![0.1]);
            cfg.tau = Some(vec![1e-2]);
            cfg.tol = Some(vec![1e-3]);
        }
    }
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_swaps_only_relative_and_absolute() {
        let f = Fault::SwapRelativeAbsolute;
        assert_eq!(
            f.apply(CriterionKind::Absolute),
            CriterionKind::RelativeToInitialResidual
        );
        assert_eq!(
            f.apply(CriterionKind::RelativeToInitialResidual),
            CriterionKind::Absolute
        );
        assert_eq!(
            f.apply(CriterionKind::RelativeToRhs),
            CriterionKind::RelativeToRhs
        );
        assert_eq!(
            Fault::None.apply(CriterionKind::Absolute),
            CriterionKind::Absolute
        );
    }

    #[test]
    fn dx_labels() {
        assert_eq!(dx_label(0.1), "1/10");
        assert_eq!(dx_label(0.0125), "1/80");
    }

    #[test]
    fn unperturbed_linear_problem_is_exact() {
        let mut cfg = ExperimentConfig::new(ExperimentId::LinearNested);
        cfg.eps = Some(vec![0.0]);
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 9);
        for r in 0..report.rows.len() {
            assert!(report.get(r, "error").unwrap().as_f64().unwrap() <= 1e-12);
        }
    }

    #[test]
    fn every_experiment_runs_on_a_small_grid() {
        for id in ExperimentId::ALL {
            let report = run_experiment(&quick_config(id)).unwrap();
            assert!(!report.rows.is_empty(), "{id}");
            assert!(report.rows.iter().all(|r| r.len() == report.columns.len()));
        }
    }

    #[test]
    fn efficiency_taus() {
        assert_eq!(
            efficiency_tau(CriterionKind::RelativeToInitialResidual, 1e-3),
            1e-1
        );
        assert_eq!(efficiency_tau(CriterionKind::Absolute, 1e-3), 1e-3);
        assert_eq!(efficiency_tau(CriterionKind::RelativeToRhs, 1e-3), 1e-3);
    }
}
