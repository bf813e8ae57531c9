//! Acceptance criteria A1–A11, each checked against reference values or a
//! structural property of the reproduced tables.

use std::fmt;

use inexact_core::fixedpoint::{
    bound_direct, bound_nested, iterate_nested, iterate_perturbed, iterate_plain,
};
use inexact_core::fixedpoint::{IterationOptions, PerturbationSchedule, Termination};
use inexact_core::krylov::{
    cg_solve, gmres_solve, CriterionKind, TerminationCriterion, DRIFT_FACTOR,
};
use inexact_core::linalg::{condition_estimate_dense, dist2, norm2, residual, solve_direct};
use inexact_core::problems::linear::linear_nested;
use inexact_core::problems::picard::{picard_assemble, PicardProblemSpec};
use inexact_core::problems::scalar::{scalar_map, ScalarMapSpec};
use inexact_core::problems::transmission::{dn_iterate, transmission_assemble, DnOptions};

use crate::config::{ExperimentConfig, ExperimentId};
use crate::reference;
use crate::report::{TableReport, Value};
use crate::runner::{dx_label, run_dn, run_experiment_with, DnSettings, Fault, PreparedSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
}

impl Criterion {
    pub const ALL: [Criterion; 11] = [
        Criterion::A1,
        Criterion::A2,
        Criterion::A3,
        Criterion::A4,
        Criterion::A5,
        Criterion::A6,
        Criterion::A7,
        Criterion::A8,
        Criterion::A9,
        Criterion::A10,
        Criterion::A11,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Criterion::A1 => "A1 scalar direct perturbation",
            Criterion::A2 => "A2 adaptive schedules",
            Criterion::A3 => "A3 nested bound values",
            Criterion::A4 => "A4 nested measured errors",
            Criterion::A5 => "A5 nested scalar problem",
            Criterion::A6 => "A6 Picard criterion dichotomy",
            Criterion::A7 => "A7 DN exactness, relative criterion",
            Criterion::A8 => "A8 DN plateau, absolute criterion",
            Criterion::A9 => "A9 DN blow-up, rhs-relative criterion",
            Criterion::A10 => "A10 DN efficiency structure",
            Criterion::A11 => "A11 property checks",
        }
    }

    pub fn check(self, fault: Fault) -> CriterionResult {
        let outcome = match self {
            Criterion::A1 => check_a1(),
            Criterion::A2 => check_a2(),
            Criterion::A3 => check_a3(),
            Criterion::A4 => check_a4(),
            Criterion::A5 => check_a5(),
            Criterion::A6 => check_a6(fault),
            Criterion::A7 => check_a7(fault),
            Criterion::A8 => check_a8(fault),
            Criterion::A9 => check_a9(fault),
            Criterion::A10 => check_a10(fault),
            Criterion::A11 => check_a11(),
        };
        let (passed, detail) = match outcome {
            Ok(o) => (o.failures.is_empty(), o.describe()),
            Err(e) => (false, format!("error: {e}")),
        };
        CriterionResult {
            criterion: self,
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub criterion: Criterion,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.criterion.label(), self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct AcceptanceOptions {
    pub fault: Fault,
    /// Subset to run; all criteria when `None`.
    pub only: Option<Vec<Criterion>>,
}

#[derive(Debug, Clone)]
pub struct AcceptanceSummary {
    pub results: Vec<CriterionResult>,
}

impl AcceptanceSummary {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, c: Criterion) -> Option<&CriterionResult> {
        self.results.iter().find(|r| r.criterion == c)
    }
}

impl fmt::Display for AcceptanceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        let passed = self.results.iter().filter(|r| r.passed).count();
        writeln!(f, "{passed}/{} criteria passed", self.results.len())
    }
}

pub fn run_acceptance(opts: &AcceptanceOptions) -> AcceptanceSummary {
    let list = opts.only.clone().unwrap_or_else(|| Criterion::ALL.to_vec());
    AcceptanceSummary {
        results: list.into_iter().map(|c| c.check(opts.fault)).collect(),
    }
}

type CheckResult = Result<Outcome, Box<dyn std::error::Error>>;

/// Measured-vs-expected comparisons collected by one check.
#[derive(Debug, Default)]
struct Outcome {
    checked: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn within_rel(&mut self, what: &str, measured: f64, expected: f64, rel: f64) {
        let dev = (measured - expected).abs() / expected.abs();
        self.require(dev <= rel, || {
            format!(
                "{what}: measured {measured:.4e}, expected {expected:.4e} ±{:.0}%",
                rel * 100.0
            )
        });
    }

    fn within_factor(&mut self, what: &str, measured: f64, expected: f64, lo: f64, hi: f64) {
        let ratio = measured / expected;
        self.require((lo..=hi).contains(&ratio), || {
            format!("{what}: measured {measured:.4e}, expected {expected:.4e}, ratio {ratio:.3} outside [{lo}, {hi}]")
        });
    }

    fn at_most(&mut self, what: &str, measured: f64, limit: f64) {
        self.require(measured <= limit, || {
            format!("{what}: {measured:.4e} > {limit:.4e}")
        });
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn describe(&self) -> String {
        let mut s = format!(
            "{}/{} checks",
            self.checked - self.failures.len(),
            self.checked
        );
        for n in &self.notes {
            s.push_str("; ");
            s.push_str(n);
        }
        if let Some(first) = self.failures.first() {
            s.push_str(&format!("; first failure: {first}"));
            if self.failures.len() > 1 {
                s.push_str(&format!(" (+{} more)", self.failures.len() - 1));
            }
        }
        s
    }
}

fn row(report: &TableReport, filters: &[(&str, Value)]) -> Result<usize, String> {
    report
        .rows_where(filters)
        .next()
        .ok_or_else(|| format!("no row matching {filters:?}"))
}

fn num(report: &TableReport, r: usize, col: &str) -> Result<f64, String> {
    report
        .get(r, col)
        .and_then(Value::as_f64)
        .ok_or_else(|| format!("row {r}: column {col} is not numeric"))
}

fn text<'a>(report: &'a TableReport, r: usize, col: &str) -> Result<&'a str, String> {
    report
        .get(r, col)
        .and_then(Value::as_str)
        .ok_or_else(|| format!("row {r}: column {col} is not text"))
}

fn check_a1() -> CheckResult {
    let report = run_experiment_with(
        &ExperimentConfig::new(ExperimentId::ScalarDirect),
        Fault::None,
    )?;
    let mut o = Outcome::default();
    for (gi, &gamma) in reference::SCALAR_GAMMAS.iter().enumerate() {
        for (ei, &eps) in reference::PERTURBATIONS.iter().enumerate() {
            let r = row(&report, &[("gamma", gamma.into()), ("eps", eps.into())])?;
            let err = num(&report, r, "error")?;
            let what = format!("gamma={gamma}, eps={eps:e}");
            o.within_rel(&what, err, reference::SCALAR_DIRECT_ERRORS[gi][ei], 0.01);
            o.at_most(&format!("{what} bound"), err, num(&report, r, "bound")?);
        }
    }
    Ok(o)
}

fn check_a2() -> CheckResult {
    let report = run_experiment_with(
        &ExperimentConfig::new(ExperimentId::ScalarAdaptive),
        Fault::None,
    )?;
    let mut o = Outcome::default();
    let mut worst: f64 = 0.0;
    for r in 0..report.rows.len() {
        let err = num(&report, r, "error")?;
        worst = worst.max(err);
        o.at_most(
            &format!("row {r} ({})", text(&report, r, "problem")?),
            err,
            1e-12,
        );
    }
    o.note(format!("largest error {worst:.3e}, limit 1e-12"));
    Ok(o)
}

fn linear_report() -> Result<TableReport, Box<dyn std::error::Error>> {
    Ok(run_experiment_with(
        &ExperimentConfig::new(ExperimentId::LinearNested),
        Fault::None,
    )?)
}

fn for_each_linear_cell(
    mut f: impl FnMut(usize, usize, usize, f64, f64, f64) -> Result<(), String>,
) -> Result<(), String> {
    for (ei, &eps) in reference::PERTURBATIONS.iter().enumerate() {
        for (ai, &alpha) in reference::LINEAR_COEFFICIENTS.iter().enumerate() {
            for (bi, &beta) in reference::LINEAR_COEFFICIENTS.iter().enumerate() {
                f(ei, ai, bi, eps, alpha, beta)?;
            }
        }
    }
    Ok(())
}

fn check_a3() -> CheckResult {
    let mut o = Outcome::default();
    for_each_linear_cell(|ei, ai, bi, eps, alpha, beta| {
        let estimate = bound_nested(eps, eps, alpha, beta).map_err(|e| e.to_string())?;
        o.within_rel(
            &format!("eps={eps:e}, alpha={alpha}, beta={beta}"),
            estimate,
            reference::LINEAR_ESTIMATES[ei][ai][bi],
            0.01,
        );
        Ok(())
    })?;
    Ok(o)
}

fn check_a4() -> CheckResult {
    let report = linear_report()?;
    let mut o = Outcome::default();
    for_each_linear_cell(|ei, ai, bi, eps, alpha, beta| {
        let r = row(
            &report,
            &[
                ("eps", eps.into()),
                ("alpha", alpha.into()),
                ("beta", beta.into()),
            ],
        )?;
        let err = num(&report, r, "error")?;
        let what = format!("eps={eps:e}, alpha={alpha}, beta={beta}");
        o.within_factor(&what, err, reference::LINEAR_MEASURED[ei][ai][bi], 0.7, 1.3);
        o.at_most(&format!("{what} bound"), err, num(&report, r, "estimate")?);
        Ok(())
    })?;
    Ok(o)
}

fn check_a5() -> CheckResult {
    let report = run_experiment_with(
        &ExperimentConfig::new(ExperimentId::ScalarNested),
        Fault::None,
    )?;
    let mut o = Outcome::default();
    for (ei, &eps) in reference::PERTURBATIONS.iter().enumerate() {
        for (si, &ls) in reference::NESTED_LS.iter().enumerate() {
            for (fi, &lf) in reference::NESTED_LF.iter().enumerate() {
                let r = row(
                    &report,
                    &[("eps", eps.into()), ("ls", ls.into()), ("lf", lf.into())],
                )?;
                let what = format!("eps={eps:e}, ls={ls}, lf={lf}");
                let estimate = num(&report, r, "estimate")?;
                let err = num(&report, r, "error")?;
                o.within_rel(
                    &format!("{what} estimate"),
                    estimate,
                    reference::NESTED_ESTIMATES[ei][si][fi],
                    0.01,
                );
                o.within_rel(
                    &format!("{what} error"),
                    err,
                    reference::NESTED_MEASURED[ei][si][fi],
                    0.05,
                );
                o.at_most(&format!("{what} bound"), err, estimate);
            }
        }
    }
    Ok(o)
}

fn check_a6(fault: Fault) -> CheckResult {
    let report = run_experiment_with(&ExperimentConfig::new(ExperimentId::Picard), fault)?;
    let mut o = Outcome::default();
    let rel: Vec<usize> = report.rows_where(&[("criterion", "rel".into())]).collect();
    let abs: Vec<usize> = report.rows_where(&[("criterion", "abs".into())]).collect();
    o.require(rel.len() == 7 && abs.len() == 4, || {
        format!(
            "expected 7 relative and 4 absolute runs, got {} and {}",
            rel.len(),
            abs.len()
        )
    });

    let mut inner = Vec::new();
    for &r in &rel {
        let tau = num(&report, r, "tau")?;
        o.at_most(
            &format!("rel tau={tau:e} residual"),
            num(&report, r, "residual")?,
            1e-12,
        );
        inner.push((tau, num(&report, r, "inner_iters")?));
    }
    if let Some(&(_, first)) = inner.iter().find(|(t, _)| *t == 1e-1) {
        let fewest = inner.iter().map(|&(_, n)| n).fold(f64::INFINITY, f64::min);
        o.require(first <= 1.1 * fewest, || {
            format!("rel tau=1e-1 used {first} GMRES iterations, fewest was {fewest}")
        });
        o.note(format!(
            "rel tau=1e-1 GMRES iterations {first}, fewest {fewest}"
        ));
    }

    let plateau: Vec<f64> = abs
        .iter()
        .map(|&r| num(&report, r, "residual"))
        .collect::<Result<_, _>>()?;
    for (i, w) in plateau.windows(2).enumerate() {
        let ratio = w[0] / w[1];
        o.require((3.0..=30.0).contains(&ratio), || {
            format!(
                "abs residual ratio {ratio:.3} between decades {i} and {} outside [3, 30]",
                i + 1
            )
        });
    }
    o.note(format!(
        "abs plateau residuals [{}]",
        plateau
            .iter()
            .map(|v| format!("{v:.2e}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    Ok(o)
}

fn transmission_config(id: ExperimentId, kind: CriterionKind, dxs: &[f64]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(id);
    cfg.criterion = Some(kind);
    cfg.dx = Some(dxs.to_vec());
    cfg
}

fn check_a7(fault: Fault) -> CheckResult {
    let cfg = transmission_config(
        ExperimentId::TransmissionIters,
        CriterionKind::RelativeToInitialResidual,
        &[0.1, 0.05, 0.025],
    );
    let report = run_experiment_with(&cfg, fault)?;
    let mut o = Outcome::default();
    let mut worst: f64 = 0.0;
    for r in 0..report.rows.len() {
        let err = num(&report, r, "interface_error")?;
        worst = worst.max(err);
        let what = format!(
            "tau={:e}, dx={}",
            num(&report, r, "tau")?,
            text(&report, r, "dx")?
        );
        o.at_most(&what, err, 1e-9);
    }
    o.require(report.rows.len() == 12, || {
        format!("expected 12 runs, got {}", report.rows.len())
    });
    o.note(format!("largest interface error {worst:.3e}, limit 1e-9"));
    Ok(o)
}

fn check_a8(fault: Fault) -> CheckResult {
    let dxs = [0.1, 0.05];
    let cfg = transmission_config(
        ExperimentId::TransmissionError,
        CriterionKind::Absolute,
        &dxs,
    );
    let report = run_experiment_with(&cfg, fault)?;
    let mut o = Outcome::default();
    for (di, &dx) in dxs.iter().enumerate() {
        let mut errors = Vec::new();
        for (ti, &tau) in reference::TRANSMISSION_TAUS.iter().enumerate() {
            let r = row(&report, &[("tau", tau.into()), ("dx", dx_label(dx).into())])?;
            let err = num(&report, r, "error")?;
            o.within_factor(
                &format!("tau={tau:e}, dx={}", dx_label(dx)),
                err,
                reference::ABSOLUTE_ERRORS[ti][di],
                1.0 / 3.0,
                3.0,
            );
            errors.push(err);
        }
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            o.require((5.0..=20.0).contains(&ratio), || {
                format!(
                    "dx={}: decade ratio {ratio:.3} outside [5, 20]",
                    dx_label(dx)
                )
            });
        }
    }
    Ok(o)
}

fn check_a9(fault: Fault) -> CheckResult {
    let mut o = Outcome::default();
    let settings = DnSettings {
        fault,
        ..DnSettings::default()
    };

    let fine = PreparedSystem::new(0.025)?;
    let run = run_dn(&fine, CriterionKind::RelativeToRhs, 1e-1, 1e-14, &settings)?;
    let blew_up =
        run.terminated_by == Termination::Diverged || run.error > 1e2 || !run.error.is_finite();
    o.require(blew_up, || {
        format!(
            "dx=1/40, tau=1e-1: error {:.4e} after {} outer iterations ({}), expected Diverged or error > 1e2",
            run.error, run.outer_iters, run.terminated_by
        )
    });
    o.note(format!(
        "dx=1/40 tau=1e-1 error {:.3e} ({}, {} outer iterations)",
        run.error, run.terminated_by, run.outer_iters
    ));

    let coarse = PreparedSystem::new(0.1)?;
    for (ti, &tau) in reference::TRANSMISSION_TAUS.iter().enumerate() {
        let run = run_dn(&coarse, CriterionKind::RelativeToRhs, tau, 1e-14, &settings)?;
        o.within_factor(
            &format!("dx=1/10, tau={tau:e}"),
            run.error,
            reference::RHS_RELATIVE_ERRORS[ti][0],
            0.2,
            5.0,
        );
    }
    Ok(o)
}

fn check_a10(fault: Fault) -> CheckResult {
    let mut o = Outcome::default();
    let cfg = transmission_config(
        ExperimentId::TransmissionIters,
        CriterionKind::RelativeToInitialResidual,
        &[0.1],
    );
    let report = run_experiment_with(&cfg, fault)?;
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    for &tau in &reference::TRANSMISSION_TAUS {
        let r = row(&report, &[("tau", tau.into())])?;
        let n = num(&report, r, "outer_iters")?;
        o.within_rel(&format!("outer iterations tau={tau:e}"), n, 105.0, 0.2);
        outer.push(n);
        inner.push(num(&report, r, "inner_iters")?);
    }
    let tight = &outer[1..];
    let spread = tight.iter().cloned().fold(f64::MIN, f64::max)
        - tight.iter().cloned().fold(f64::MAX, f64::min);
    o.require(spread < 5.0, || {
        format!("outer spread {spread} over tau in 1e-2..1e-4")
    });
    for w in inner.windows(2) {
        o.require(w[1] > w[0], || {
            format!("cumulative CG not increasing: {inner:?}")
        });
    }
    o.note(format!("dx=1/10 outer {outer:?}, CG {inner:?}"));

    let mut eff = ExperimentConfig::new(ExperimentId::TransmissionEfficiency);
    eff.dx = Some(vec![0.05]);
    eff.tol = Some(vec![1e-2, 1e-3, 1e-4]);
    let report = run_experiment_with(&eff, fault)?;
    let mut ratios = Vec::new();
    for tol in [1e-2, 1e-3, 1e-4] {
        let rel = row(&report, &[("criterion", "rel".into()), ("tol", tol.into())])?;
        let abs = row(&report, &[("criterion", "abs".into()), ("tol", tol.into())])?;
        let ratio = num(&report, abs, "inner_iters")? / num(&report, rel, "inner_iters")?;
        o.require(ratio > 1.5, || {
            format!("TOL={tol:e}: abs/rel CG ratio {ratio:.3} not above 1.5")
        });
        ratios.push(format!("{ratio:.2}"));
    }
    o.note(format!("dx=1/20 abs/rel CG ratios [{}]", ratios.join(", ")));
    Ok(o)
}

fn check_a11() -> CheckResult {
    let mut o = Outcome::default();
    // final iterates sit within the outer tolerance of the limit
    let slack = 1e-12;

    for gamma in [0.2, 0.7, 1.1] {
        let (map, lip) = scalar_map(ScalarMapSpec::new(gamma)?);
        let opts = IterationOptions::default();
        let x_star = iterate_plain(map, vec![0.0], &opts)?;
        for eps in [1e-2, 1e-5] {
            let trace =
                iterate_perturbed(map, &PerturbationSchedule::constant(eps), vec![0.0], &opts)?;
            o.at_most(
                &format!("direct bound gamma={gamma}, eps={eps:e}"),
                trace.error_to(x_star.final_iterate()),
                bound_direct(eps, lip.constant)? + slack,
            );
        }
    }

    for (alpha, beta) in [(0.5, 0.5), (0.9, 0.3), (0.2, 0.95)] {
        let p = linear_nested(alpha, beta)?;
        let ls = condition_estimate_dense(&p.a)?.sigma_max;
        let lf = condition_estimate_dense(&p.b_mat)?.sigma_max;
        let sched = PerturbationSchedule::constant(1e-3);
        let trace = iterate_nested(
            |x| p.s(x),
            |x| p.f(x),
            &sched,
            &sched,
            vec![0.0, 0.0],
            &IterationOptions::default(),
        )?;
        o.at_most(
            &format!("nested bound alpha={alpha}, beta={beta}"),
            trace.error_to(&p.x_star),
            bound_nested(1e-3, 1e-3, ls, lf)? + slack,
        );
    }

    let spec = PicardProblemSpec::default();
    let velocity: Vec<f64> = spec.nodes().iter().map(|x| (3.0 * x).sin()).collect();
    let (conv, rhs) = picard_assemble(&spec, &velocity)?;
    let n = rhs.len();
    let gm = gmres_solve(
        &conv,
        &rhs,
        &vec![0.0; n],
        TerminationCriterion::relative(1e-10),
        10 * n,
        None,
    )?;
    let monotone = gm
        .residual_history
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    o.require(monotone, || "GMRES residual history increased".into());
    let direct = solve_direct(&conv.to_dense(), &rhs)?;
    o.at_most(
        "GMRES vs direct",
        dist2(&gm.solution, &direct),
        1e-7 * norm2(&direct),
    );

    let sys = transmission_assemble(0.05)?;
    let b = sys.b1(&vec![0.0; sys.gamma_len()]);
    let m = sys.omega1_len();
    for kind in [
        CriterionKind::RelativeToInitialResidual,
        CriterionKind::RelativeToRhs,
        CriterionKind::Absolute,
    ] {
        let c = TerminationCriterion::new(kind, 1e-6)?;
        let rep = cg_solve(&sys.a, &b, &vec![0.0; m], c, 10 * m)?;
        let true_res = norm2(&residual(&sys.a, &rep.solution, &b));
        let thr = c.threshold(rep.initial_residual_norm, rep.rhs_norm);
        o.require(rep.converged, || {
            format!("CG with {kind:?} did not converge")
        });
        o.at_most(
            &format!("CG soundness {kind:?}"),
            true_res,
            DRIFT_FACTOR * thr,
        );
    }
    let cg = cg_solve(
        &sys.a,
        &b,
        &vec![0.0; m],
        TerminationCriterion::relative(1e-12),
        10 * m,
    )?;
    let direct = solve_direct(&sys.a.to_dense(), &b)?;
    o.at_most(
        "CG vs direct",
        dist2(&cg.solution, &direct),
        1e-8 * norm2(&direct),
    );

    let coarse = transmission_assemble(0.1)?;
    let mono = coarse.monolithic_solve()?;
    let run = dn_iterate(
        &coarse,
        TerminationCriterion::absolute(1e-13),
        &IterationOptions::with_tol(1e-12),
        &DnOptions::default(),
    )?;
    o.at_most(
        "DN vs monolithic",
        dist2(&run.full_solution(&coarse), &mono),
        1e-9,
    );

    let max_err = |dx: f64| -> Result<f64, Box<dyn std::error::Error>> {
        let s = transmission_assemble(dx)?;
        let u = s.monolithic_solve()?;
        Ok(u.iter()
            .zip(s.exact_on_grid())
            .map(|(a, e)| (a - e).abs())
            .fold(0.0, f64::max))
    };
    let (e1, e2, e3) = (max_err(0.1)?, max_err(0.05)?, max_err(0.025)?);
    for (name, ratio) in [("1/10:1/20", e1 / e2), ("1/20:1/40", e2 / e3)] {
        o.require((3.5..=4.5).contains(&ratio), || {
            format!("convergence factor {name} = {ratio:.3} outside [3.5, 4.5]")
        });
    }
    o.note(format!(
        "convergence factors {:.3}, {:.3}",
        e1 / e2,
        e2 / e3
    ));
    Ok(o)
}
