//! Conjugate gradient and GMRES with a pluggable stopping rule.
//!
//! Both solvers stop on exactly one [`TerminationCriterion`]: relative to the
//! initial residual, relative to `‖b‖`, or absolute. The recurrence residual is
//! tested every iteration; the true residual `‖b − A x‖₂` is recomputed once at
//! exit and iteration resumes if it misses the threshold by more than a factor
//! of [`DRIFT_FACTOR`]. A resumed run that fails to halve the true residual
//! stops with [`Breakdown::Stagnation`].

use thiserror::Error;

use crate::linalg::{axpy, dot, norm2, residual, LinearOperator};

/// Tolerated ratio between true and recurrence residual at exit.
pub const DRIFT_FACTOR: f64 = 10.0;

/// `‖b‖₂` below this makes the `‖b‖`-relative rule degenerate.
pub const DEGENERATE_RHS_NORM: f64 = 1e-300;

/// Absolute tolerance used in place of a degenerate `‖b‖`-relative rule.
pub const DEGENERATE_RHS_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KrylovError {
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("operator is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: operator has {expected} rows, {what} has length {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("max_iter must be at least 1")]
    ZeroMaxIter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionKind {
    /// `‖r‖ ≤ τ ‖r₀‖`
    RelativeToInitialResidual,
    /// `‖r‖ ≤ τ ‖b‖`
    RelativeToRhs,
    /// `‖r‖ ≤ τ`
    Absolute,
}

/// One inner stopping rule with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminationCriterion {
    kind: CriterionKind,
    tolerance: f64,
}

impl TerminationCriterion {
    pub fn new(kind: CriterionKind, tolerance: f64) -> Result<Self, KrylovError> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(KrylovError::InvalidTolerance(tolerance));
        }
        Ok(Self { kind, tolerance })
    }

    /// Panics on a non-positive tolerance; intended for literals.
    pub fn relative(tolerance: f64) -> Self {
        Self::new(CriterionKind::RelativeToInitialResidual, tolerance).expect("positive tolerance")
    }

    /// Panics on a non-positive tolerance; intended for literals.
    pub fn relative_to_rhs(tolerance: f64) -> Self {
        Self::new(CriterionKind::RelativeToRhs, tolerance).expect("positive tolerance")
    }

    /// Panics on a non-positive tolerance; intended for literals.
    pub fn absolute(tolerance: f64) -> Self {
        Self::new(CriterionKind::Absolute, tolerance).expect("positive tolerance")
    }

    pub fn kind(&self) -> CriterionKind {
        self.kind
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Right-hand side of the criterion's inequality.
    pub fn threshold(&self, initial_residual_norm: f64, rhs_norm: f64) -> f64 {
        match self.kind {
            CriterionKind::RelativeToInitialResidual => self.tolerance * initial_residual_norm,
            CriterionKind::RelativeToRhs => self.tolerance * rhs_norm,
            CriterionKind::Absolute => self.tolerance,
        }
    }

    /// The rule the solvers actually apply: identical to `self` except that a
    /// `‖b‖`-relative rule with vanishing `‖b‖` becomes absolute `1e-14`.
    fn effective(&self, rhs_norm: f64) -> (Self, bool) {
        if self.kind == CriterionKind::RelativeToRhs && rhs_norm < DEGENERATE_RHS_NORM {
            (Self::absolute(DEGENERATE_RHS_TOL), true)
        } else {
            (*self, false)
        }
    }
}

/// Inclusive test of a residual norm against `c`.
pub fn evaluate_criterion(
    c: &TerminationCriterion,
    current_residual_norm: f64,
    initial_residual_norm: f64,
    rhs_norm: f64,
) -> bool {
    current_residual_norm <= c.threshold(initial_residual_norm, rhs_norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Breakdown {
    /// CG met a non-positive curvature `pᵀAp` or a non-finite value.
    IndefiniteOrNonFinite,
    /// GMRES produced a non-finite value.
    NonFinite,
    /// The recurrence met the threshold but restarting from the true residual
    /// did not halve it; the residual sits at rounding level.
    Stagnation,
}

impl std::fmt::Display for Breakdown {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Breakdown::IndefiniteOrNonFinite => f.write_str("indefinite or non-finite"),
            Breakdown::NonFinite => f.write_str("non-finite"),
            Breakdown::Stagnation => f.write_str("stagnation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub initial_residual_norm: f64,
    /// True residual `‖b − A x‖₂` of `solution`.
    pub final_residual_norm: f64,
    pub rhs_norm: f64,
    pub criterion: TerminationCriterion,
    pub converged: bool,
    pub breakdown: Option<Breakdown>,
    /// Set when a `‖b‖`-relative rule was replaced by absolute `1e-14`.
    pub degenerate_rhs: bool,
    /// Initial residual followed by the recurrence residual after each iteration.
    pub residual_history: Vec<f64>,
}

fn check_dims<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    x0: &[f64],
    max_iter: usize,
) -> Result<(), KrylovError> {
    let (rows, cols) = (op.nrows(), op.ncols());
    if rows != cols {
        return Err(KrylovError::NotSquare { rows, cols });
    }
    if b.len() != rows {
        return Err(KrylovError::DimensionMismatch {
            what: "b",
            expected: rows,
            found: b.len(),
        });
    }
    if x0.len() != rows {
        return Err(KrylovError::DimensionMismatch {
            what: "x0",
            expected: rows,
            found: x0.len(),
        });
    }
    if max_iter == 0 {
        return Err(KrylovError::ZeroMaxIter);
    }
    Ok(())
}

struct Setup {
    x: Vec<f64>,
    r: Vec<f64>,
    r0: f64,
    rhs_norm: f64,
    threshold: f64,
    degenerate: bool,
}

fn setup<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    x0: &[f64],
    c: &TerminationCriterion,
) -> Setup {
    let x = x0.to_vec();
    let r = residual(op, &x, b);
    let r0 = norm2(&r);
    let rhs_norm = norm2(b);
    let (eff, degenerate) = c.effective(rhs_norm);
    Setup {
        x,
        r,
        r0,
        rhs_norm,
        threshold: eff.threshold(r0, rhs_norm),
        degenerate,
    }
}

/// Conjugate gradient for symmetric positive definite `op`.
pub fn cg_solve<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    x0: &[f64],
    criterion: TerminationCriterion,
    max_iter: usize,
) -> Result<SolveReport, KrylovError> {
    check_dims(op, b, x0, max_iter)?;
    let Setup {
        mut x,
        mut r,
        r0,
        rhs_norm,
        threshold,
        degenerate,
    } = setup(op, b, x0, &criterion);
    let mut report = SolveReport {
        solution: Vec::new(),
        iterations: 0,
        initial_residual_norm: r0,
        final_residual_norm: r0,
        rhs_norm,
        criterion,
        converged: false,
        breakdown: None,
        degenerate_rhs: degenerate,
        residual_history: vec![r0],
    };
    if r0 <= threshold {
        report.solution = x;
        report.converged = true;
        return Ok(report);
    }

    let n = b.len();
    let mut best = (r0, x.clone());
    let mut q = vec![0.0; n];
    let mut last_restart = f64::INFINITY;
    'restart: loop {
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        while report.iterations < max_iter {
            op.apply(&p, &mut q);
            let curvature = dot(&p, &q);
            if !(curvature > 0.0) || !curvature.is_finite() {
                report.breakdown = Some(Breakdown::IndefiniteOrNonFinite);
                break 'restart;
            }
            let alpha = rr / curvature;
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &q, &mut r);
            report.iterations += 1;
            let rr_new = dot(&r, &r);
            let rn = rr_new.sqrt();
            report.residual_history.push(rn);
            if !rn.is_finite() {
                report.breakdown = Some(Breakdown::IndefiniteOrNonFinite);
                break 'restart;
            }
            if rn < best.0 {
                best.0 = rn;
                best.1.copy_from_slice(&x);
            }
            if rn <= threshold {
                r = residual(op, &x, b);
                let true_norm = norm2(&r);
                if true_norm <= DRIFT_FACTOR * threshold {
                    report.final_residual_norm = true_norm;
                    report.solution = x;
                    report.converged = true;
                    return Ok(report);
                }
                if true_norm > 0.5 * last_restart {
                    report.breakdown = Some(Breakdown::Stagnation);
                    report.final_residual_norm = true_norm;
                    report.solution = x;
                    return Ok(report);
                }
                last_restart = true_norm;
                continue 'restart;
            }
            let beta = rr_new / rr;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + beta * *pi;
            }
            rr = rr_new;
        }
        break;
    }
    report.final_residual_norm = norm2(&residual(op, &best.1, b));
    report.solution = best.1;
    Ok(report)
}

/// Givens rotation zeroing `b` in `(a, b)`.
fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else {
        let h = a.hypot(b);
        (a / h, b / h)
    }
}

/// GMRES with modified Gram–Schmidt Arnoldi; `restart = None` is full GMRES.
pub fn gmres_solve<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    x0: &[f64],
    criterion: TerminationCriterion,
    max_iter: usize,
    restart: Option<usize>,
) -> Result<SolveReport, KrylovError> {
    check_dims(op, b, x0, max_iter)?;
    let Setup {
        mut x,
        mut r,
        r0,
        rhs_norm,
        threshold,
        degenerate,
    } = setup(op, b, x0, &criterion);
    let mut report = SolveReport {
        solution: Vec::new(),
        iterations: 0,
        initial_residual_norm: r0,
        final_residual_norm: r0,
        rhs_norm,
        criterion,
        converged: false,
        breakdown: None,
        degenerate_rhs: degenerate,
        residual_history: vec![r0],
    };
    if r0 <= threshold {
        report.solution = x;
        report.converged = true;
        return Ok(report);
    }

    let n = b.len();
    let happy_tol = 1e-14 * r0;
    let mut beta = r0;
    loop {
        let remaining = max_iter - report.iterations;
        let m = restart
            .map_or(remaining, |k| k.max(1).min(remaining))
            .min(n.max(1));
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        // columns of the rotated Hessenberg matrix, upper triangular part only
        let mut rmat: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut rotations: Vec<(f64, f64)> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut hit = false;
        let mut happy = false;
        let mut w = vec![0.0; n];
        for j in 0..m {
            op.apply(&basis[j], &mut w);
            let mut h = vec![0.0; j + 2];
            for (i, v) in basis.iter().enumerate() {
                h[i] = dot(&w, v);
                axpy(-h[i], v, &mut w);
            }
            let sub = norm2(&w);
            h[j + 1] = sub;
            for (i, &(c, s)) in rotations.iter().enumerate() {
                let (a, bb) = (h[i], h[i + 1]);
                h[i] = c * a + s * bb;
                h[i + 1] = -s * a + c * bb;
            }
            let (c, s) = givens(h[j], h[j + 1]);
            h[j] = c * h[j] + s * h[j + 1];
            h.truncate(j + 1);
            rotations.push((c, s));
            g[j + 1] = -s * g[j];
            g[j] *= c;
            rmat.push(h);
            report.iterations += 1;
            let est = g[j + 1].abs();
            report.residual_history.push(est);
            if !est.is_finite() || !sub.is_finite() {
                report.breakdown = Some(Breakdown::NonFinite);
                report.final_residual_norm = norm2(&residual(op, &x, b));
                report.solution = x;
                return Ok(report);
            }
            happy = sub < happy_tol;
            if est <= threshold || happy {
                hit = true;
                break;
            }
            if j + 1 < m {
                basis.push(w.iter().map(|v| v / sub).collect());
            }
        }

        // back substitution on the k×k triangular system
        let k = rmat.len();
        let mut y = g[..k].to_vec();
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| rmat[j][i] * y[j]).sum();
            y[i] = (y[i] - s) / rmat[i][i];
        }
        for (yi, v) in y.iter().zip(&basis) {
            axpy(*yi, v, &mut x);
        }
        r = residual(op, &x, b);
        let true_norm = norm2(&r);
        if !true_norm.is_finite() {
            report.breakdown = Some(Breakdown::NonFinite);
            report.final_residual_norm = true_norm;
            report.solution = x;
            return Ok(report);
        }
        if true_norm <= threshold || (hit && (happy || true_norm <= DRIFT_FACTOR * threshold)) {
            report.final_residual_norm = true_norm;
            report.solution = x;
            report.converged = true;
            return Ok(report);
        }
        if report.iterations >= max_iter || (hit && true_norm > 0.5 * beta) {
            if report.iterations < max_iter {
                report.breakdown = Some(Breakdown::Stagnation);
            }
            report.final_residual_norm = true_norm;
            report.solution = x;
            return Ok(report);
        }
        beta = true_norm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{solve_direct, CsrMatrix, DenseMatrix};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn criterion_examples() {
        let rel = TerminationCriterion::relative(0.1);
        assert!(evaluate_criterion(&rel, 0.05, 1.0, 7.0));
        let relb = TerminationCriterion::relative_to_rhs(0.1);
        assert!(!evaluate_criterion(&relb, 0.05, 0.01, 0.2));
        let abs = TerminationCriterion::absolute(1e-3);
        assert!(evaluate_criterion(&abs, 1e-3, 5.0, 5.0));
    }

    #[test]
    fn criterion_rejects_bad_tolerance() {
        for tol in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(TerminationCriterion::new(CriterionKind::Absolute, tol).is_err());
        }
    }

    #[test]
    fn cg_identity_one_step() {
        let op = DenseMatrix::identity(4);
        let b = [1.0, 2.0, 3.0, 4.0];
        for c in [
            TerminationCriterion::relative(0.5),
            TerminationCriterion::relative_to_rhs(1e-3),
            TerminationCriterion::absolute(1e-12),
        ] {
            let rep = cg_solve(&op, &b, &[0.0; 4], c, 10).unwrap();
            assert_eq!(rep.iterations, 1);
            assert!(rep.converged);
            assert_eq!(rep.solution, b.to_vec());
        }
    }

    #[test]
    fn cg_laplacian_matches_direct() {
        let op = CsrMatrix::laplacian_1d(10);
        let b = vec![1.0; 10];
        let rep = cg_solve(
            &op,
            &b,
            &[0.0; 10],
            TerminationCriterion::absolute(1e-12),
            100,
        )
        .unwrap();
        let direct = solve_direct(&op.to_dense(), &b).unwrap();
        assert!(rep.converged);
        assert!(rep.iterations <= 10);
        for (a, d) in rep.solution.iter().zip(&direct) {
            assert!((a - d).abs() <= 1e-9);
        }
    }

    #[test]
    fn cg_exact_guess_needs_no_iterations() {
        let op = CsrMatrix::laplacian_1d(6);
        let x = vec![1.0, -2.0, 0.5, 3.0, 1.5, 0.0];
        let b = crate::linalg::matvec(&op, &x).unwrap();
        let rep = cg_solve(&op, &b, &x, TerminationCriterion::relative_to_rhs(0.1), 10).unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(rep.converged);
    }

    #[test]
    fn cg_reports_indefinite() {
        let op = DenseMatrix::from_diagonal(&[1.0, -1.0]);
        let rep = cg_solve(
            &op,
            &[1.0, 1.0],
            &[0.0, 0.0],
            TerminationCriterion::absolute(1e-12),
            10,
        )
        .unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.breakdown, Some(Breakdown::IndefiniteOrNonFinite));
        assert_eq!(
            Breakdown::IndefiniteOrNonFinite.to_string(),
            "indefinite or non-finite"
        );
    }

    #[test]
    fn unreachable_threshold_stops_as_stagnation() {
        // a warm start at rounding level leaves τ·r0 below the attainable residual
        let op = CsrMatrix::laplacian_1d(40);
        let b: Vec<f64> = (0..40).map(|i| 1e3 * (i as f64 + 1.0)).collect();
        let x0 = solve_direct(&op.to_dense(), &b).unwrap();
        let c = TerminationCriterion::relative(1e-6);
        let cg = cg_solve(&op, &b, &x0, c, 100_000).unwrap();
        assert_eq!(cg.breakdown, Some(Breakdown::Stagnation));
        assert!(!cg.converged);
        assert!(cg.iterations < 1000, "{} iterations", cg.iterations);
        let gm = gmres_solve(&op, &b, &x0, c, 100_000, None).unwrap();
        assert_eq!(gm.breakdown, Some(Breakdown::Stagnation));
        assert!(gm.iterations < 1000, "{} iterations", gm.iterations);
        assert_eq!(Breakdown::Stagnation.to_string(), "stagnation");
    }

    #[test]
    fn cg_max_iter_returns_best() {
        let op = CsrMatrix::laplacian_1d(50);
        let b = vec![1.0; 50];
        let rep = cg_solve(
            &op,
            &b,
            &[0.0; 50],
            TerminationCriterion::absolute(1e-14),
            3,
        )
        .unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
        let best = rep
            .residual_history
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(rep.final_residual_norm, best, max_relative = 1e-8);
    }

    #[test]
    fn zero_rhs_relative_to_rhs_degenerates_to_absolute() {
        let op = CsrMatrix::laplacian_1d(5);
        let x0 = vec![1.0; 5];
        let rep = cg_solve(
            &op,
            &[0.0; 5],
            &x0,
            TerminationCriterion::relative_to_rhs(0.1),
            100,
        )
        .unwrap();
        assert!(rep.degenerate_rhs);
        assert!(rep.converged);
        assert!(rep.final_residual_norm <= DRIFT_FACTOR * DEGENERATE_RHS_TOL);
    }

    #[test]
    fn gmres_identity() {
        let op = DenseMatrix::identity(3);
        let b = [5.0, 6.0, 7.0];
        let rep = gmres_solve(
            &op,
            &b,
            &[0.0; 3],
            TerminationCriterion::absolute(1e-12),
            10,
            None,
        )
        .unwrap();
        assert!(rep.iterations <= 1);
        for (a, e) in rep.solution.iter().zip(&b) {
            assert_relative_eq!(a, e, max_relative = 1e-14);
        }
    }

    #[test]
    fn gmres_upper_triangular() {
        let op = DenseMatrix::from_rows(&[&[2.0, 1.0], &[0.0, 3.0]]).unwrap();
        let rep = gmres_solve(
            &op,
            &[3.0, 3.0],
            &[0.0; 2],
            TerminationCriterion::absolute(1e-12),
            10,
            None,
        )
        .unwrap();
        assert!(rep.converged);
        assert!((rep.solution[0] - 1.0).abs() <= 1e-10);
        assert!((rep.solution[1] - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn gmres_satisfied_guess_needs_no_iterations() {
        let op = DenseMatrix::from_rows(&[&[2.0, 1.0], &[0.0, 3.0]]).unwrap();
        let rep = gmres_solve(
            &op,
            &[3.0, 3.0],
            &[1.0, 1.0],
            TerminationCriterion::relative(0.5),
            10,
            None,
        )
        .unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(rep.converged);
    }

    #[test]
    fn gmres_restarted_converges() {
        let n = 30;
        let t: Vec<_> = (0..n)
            .flat_map(|i| {
                let mut v = vec![(i, i, 4.0)];
                if i > 0 {
                    v.push((i, i - 1, -1.5));
                }
                if i + 1 < n {
                    v.push((i, i + 1, -0.5));
                }
                v
            })
            .collect();
        let op = CsrMatrix::from_triplets(n, t).unwrap();
        let b = vec![1.0; n];
        let rep = gmres_solve(
            &op,
            &b,
            &vec![0.0; n],
            TerminationCriterion::absolute(1e-12),
            500,
            Some(5),
        )
        .unwrap();
        assert!(rep.converged);
        assert!(rep.final_residual_norm <= 1e-11);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let op = DenseMatrix::identity(3);
        let c = TerminationCriterion::absolute(1e-8);
        assert!(cg_solve(&op, &[1.0; 2], &[0.0; 3], c, 5).is_err());
        assert!(gmres_solve(&op, &[1.0; 3], &[0.0; 2], c, 5, None).is_err());
        assert_eq!(
            cg_solve(&op, &[1.0; 3], &[0.0; 3], c, 0).unwrap_err(),
            KrylovError::ZeroMaxIter
        );
    }

    fn spd_system(n: usize, seed: &[f64]) -> (DenseMatrix, Vec<f64>) {
        // M = GᵀG + n I with G filled from the seed values
        let g = DenseMatrix::new(n, n, (0..n * n).map(|k| seed[k % seed.len()]).collect()).unwrap();
        let mut m = g.transpose().matmul(&g).unwrap();
        for i in 0..n {
            m.set(i, i, m.get(i, i) + n as f64);
        }
        let b = (0..n)
            .map(|i| seed[(3 * i + 1) % seed.len()] + 0.5)
            .collect();
        (m, b)
    }

    fn dominant_system(n: usize, seed: &[f64]) -> (DenseMatrix, Vec<f64>) {
        let mut m =
            DenseMatrix::new(n, n, (0..n * n).map(|k| seed[k % seed.len()]).collect()).unwrap();
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| m.get(i, j).abs()).sum();
            m.set(i, i, off + 1.0);
        }
        let b = (0..n)
            .map(|i| seed[(5 * i + 2) % seed.len()] - 0.25)
            .collect();
        (m, b)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn cg_matches_direct(n in 1usize..=50, seed in prop::collection::vec(-1.0f64..1.0, 7..40)) {
            let (m, b) = spd_system(n, &seed);
            let rep = cg_solve(&m, &b, &vec![0.0; n], TerminationCriterion::absolute(1e-12), 10 * n).unwrap();
            prop_assert!(rep.converged);
            let direct = solve_direct(&m, &b).unwrap();
            let scale = crate::linalg::norm2(&direct);
            prop_assert!(crate::linalg::dist2(&rep.solution, &direct) <= 1e-8 * scale);
        }

        #[test]
        fn gmres_matches_direct(n in 1usize..=50, seed in prop::collection::vec(-1.0f64..1.0, 7..40)) {
            let (m, b) = dominant_system(n, &seed);
            let rep = gmres_solve(&m, &b, &vec![0.0; n], TerminationCriterion::absolute(1e-12), 10 * n, None).unwrap();
            prop_assert!(rep.converged);
            let direct = solve_direct(&m, &b).unwrap();
            let scale = crate::linalg::norm2(&direct);
            prop_assert!(crate::linalg::dist2(&rep.solution, &direct) <= 1e-8 * scale);
        }

        #[test]
        fn full_gmres_residuals_never_increase(n in 2usize..=40, seed in prop::collection::vec(-1.0f64..1.0, 7..40), tol in 1e-12f64..1e-2) {
            let (m, b) = dominant_system(n, &seed);
            let rep = gmres_solve(&m, &b, &vec![0.0; n], TerminationCriterion::relative(tol), 10 * n, None).unwrap();
            for w in rep.residual_history.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }

        #[test]
        fn converged_reports_satisfy_criterion(
            n in 1usize..=40,
            seed in prop::collection::vec(-1.0f64..1.0, 7..40),
            tol in 1e-10f64..0.5,
            kind in 0usize..3,
            use_cg in any::<bool>(),
        ) {
            let kind = [CriterionKind::RelativeToInitialResidual, CriterionKind::RelativeToRhs, CriterionKind::Absolute][kind];
            let c = TerminationCriterion::new(kind, tol).unwrap();
            let rep = if use_cg {
                let (m, b) = spd_system(n, &seed);
                cg_solve(&m, &b, &vec![0.0; n], c, 10 * n).unwrap()
            } else {
                let (m, b) = dominant_system(n, &seed);
                gmres_solve(&m, &b, &vec![0.0; n], c, 10 * n, None).unwrap()
            };
            prop_assert!(rep.converged);
            let thr = c.threshold(rep.initial_residual_norm, rep.rhs_norm);
            prop_assert!(rep.final_residual_norm <= DRIFT_FACTOR * thr);
        }

        #[test]
        fn relative_no_slower_than_equivalent_absolute(
            n in 2usize..=40,
            seed in prop::collection::vec(-1.0f64..1.0, 7..40),
            tol in 1e-10f64..0.5,
        ) {
            let (m, b) = spd_system(n, &seed);
            let x0 = vec![0.0; n];
            let rel = cg_solve(&m, &b, &x0, TerminationCriterion::relative(tol), 10 * n).unwrap();
            let abs = cg_solve(&m, &b, &x0, TerminationCriterion::absolute(tol * rel.initial_residual_norm), 10 * n).unwrap();
            prop_assert!(rel.iterations <= abs.iterations);
        }
    }
}
