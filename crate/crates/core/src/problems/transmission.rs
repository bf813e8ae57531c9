//! Poisson transmission problem on `Ω₁ = [0,1]²`, `Ω₂ = [1,2]×[0,1]` and its
//! Dirichlet–Neumann iteration.
//!
//! The 5-point discretization of `−Δu = −f` with homogeneous Dirichlet data
//! uses mesh width `h = 1/N` in both directions. Unknowns are numbered column by
//! column (`x = jh`, `j = 1..2N−1`), bottom to top within a column. The first
//! `N−1` columns are `Ω₁`, column `N` is the interface `Γ`, the rest is `Ω₂`.
//! Block `A` is `Ω₁`; block `B` is `Γ ∪ Ω₂` with `Γ` first. Coupling between
//! the blocks goes through sparse data maps built from the off-diagonal blocks
//! of the monolithic matrix, so the coupled fixed point coincides with the
//! monolithic solution.

use std::f64::consts::PI;
use std::io::{self, Write};

use super::ProblemError;
use crate::fixedpoint::{
    iterate_inexact, FixedPointTrace, InexactStep, IterationOptions, OuterCriterion,
};
use crate::krylov::{cg_solve, SolveReport, TerminationCriterion};
use crate::linalg::{BandedLu, CsrMatrix};

/// `u(x, y) = sin(πy²) sin(πx²/2)`
pub fn exact_solution(x: f64, y: f64) -> f64 {
    (PI * y * y).sin() * (0.5 * PI * x * x).sin()
}

/// `Δu` for [`exact_solution`].
pub fn source_term(x: f64, y: f64) -> f64 {
    let (sx, cx) = (0.5 * PI * x * x).sin_cos();
    let (sy, cy) = (PI * y * y).sin_cos();
    sy * (PI * cx - PI * PI * x * x * sx) + sx * (2.0 * PI * cy - 4.0 * PI * PI * y * y * sy)
}

/// Sparse map `out[target] += weight · input[source]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMap {
    entries: Vec<(usize, usize, f64)>,
}

impl CouplingMap {
    pub fn apply_add(&self, input: &[f64], out: &mut [f64]) {
        for &(t, s, w) in &self.entries {
            out[t] += w * input[s];
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct TransmissionSystem {
    intervals: usize,
    h: f64,
    /// Dirichlet block on `Ω₁`.
    pub a: CsrMatrix,
    /// Block on `Γ ∪ Ω₂`, interface rows first.
    pub b: CsrMatrix,
    pub monolithic: CsrMatrix,
    pub monolithic_rhs: Vec<f64>,
    gamma_to_omega1: CouplingMap,
    omega1_to_gamma: CouplingMap,
}

impl TransmissionSystem {
    /// Number of mesh intervals per unit length, `N = 1/h`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Interior nodes per column, also the number of interface unknowns.
    pub fn column_len(&self) -> usize {
        self.intervals - 1
    }

    pub fn gamma_len(&self) -> usize {
        self.column_len()
    }

    pub fn omega1_len(&self) -> usize {
        self.column_len() * self.column_len()
    }

    pub fn omega2_len(&self) -> usize {
        self.b.dim()
    }

    /// Right-hand side of the `Ω₁` solve with `u_Γ` as Dirichlet data.
    pub fn b1(&self, u_gamma: &[f64]) -> Vec<f64> {
        let mut rhs = self.monolithic_rhs[..self.omega1_len()].to_vec();
        self.gamma_to_omega1.apply_add(u_gamma, &mut rhs);
        rhs
    }

    /// Right-hand side of the `Γ ∪ Ω₂` solve, taking the flux contribution
    /// from the `Ω₁` column next to the interface.
    pub fn b2(&self, u1: &[f64]) -> Vec<f64> {
        let mut rhs = self.monolithic_rhs[self.omega1_len()..].to_vec();
        self.omega1_to_gamma.apply_add(u1, &mut rhs);
        rhs
    }

    /// Interface values of a `Γ ∪ Ω₂` vector.
    pub fn trace<'a>(&self, u2: &'a [f64]) -> &'a [f64] {
        &u2[..self.gamma_len()]
    }

    /// Concatenates subdomain vectors into monolithic ordering.
    pub fn full_solution(&self, u1: &[f64], u2: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(u1.len() + u2.len());
        v.extend_from_slice(u1);
        v.extend_from_slice(u2);
        v
    }

    /// Monolithic vector split into `(u₁, u₂)`.
    pub fn split<'a>(&self, full: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        full.split_at(self.omega1_len())
    }

    /// `(x, y)` of every unknown in monolithic ordering.
    pub fn coordinates(&self) -> Vec<(f64, f64)> {
        let ny = self.column_len();
        (1..2 * self.intervals)
            .flat_map(|j| (1..=ny).map(move |i| (j as f64, i as f64)))
            .map(|(j, i)| (j * self.h, i * self.h))
            .collect()
    }

    /// [`exact_solution`] at every unknown.
    pub fn exact_on_grid(&self) -> Vec<f64> {
        self.coordinates()
            .into_iter()
            .map(|(x, y)| exact_solution(x, y))
            .collect()
    }

    /// Direct solve of the monolithic system.
    pub fn monolithic_solve(&self) -> Result<Vec<f64>, ProblemError> {
        Ok(BandedLu::factor(&self.monolithic)?.solve(&self.monolithic_rhs)?)
    }

    /// Writes `x,y,value` rows for all nodes of `[0,2]×[0,1]`, boundary
    /// included, with `values` in monolithic ordering.
    pub fn write_grid_csv<W: Write>(&self, values: &[f64], mut out: W) -> io::Result<()> {
        let n = self.intervals;
        let ny = self.column_len();
        writeln!(out, "x,y,value")?;
        for j in 0..=2 * n {
            for i in 0..=n {
                let interior = (1..2 * n).contains(&j) && (1..n).contains(&i);
                let v = if interior {
                    values[(j - 1) * ny + (i - 1)]
                } else {
                    0.0
                };
                writeln!(out, "{},{},{:e}", j as f64 * self.h, i as f64 * self.h, v)?;
            }
        }
        Ok(())
    }
}

/// Builds the subdomain blocks, coupling maps and monolithic system for mesh
/// width `dx`; `1/dx` must be an integer of at least 2.
pub fn transmission_assemble(dx: f64) -> Result<TransmissionSystem, ProblemError> {
    let inv = 1.0 / dx;
    let intervals = inv.round();
    if !(dx > 0.0) || !inv.is_finite() || (inv - intervals).abs() > 1e-9 * inv || intervals < 2.0 {
        return Err(ProblemError::InvalidParameter(format!(
            "1/dx must be an integer of at least 2, got dx = {dx}"
        )));
    }
    let intervals = intervals as usize;
    let h = 1.0 / intervals as f64;
    let ny = intervals - 1;
    let columns = 2 * intervals - 1;
    let n = columns * ny;
    let idx = |j: usize, i: usize| (j - 1) * ny + (i - 1);
    let diag = 4.0 / (h * h);
    let off = -1.0 / (h * h);

    let mut triplets = Vec::with_capacity(5 * n);
    let mut rhs = vec![0.0; n];
    for j in 1..=columns {
        for i in 1..=ny {
            let k = idx(j, i);
            triplets.push((k, k, diag));
            if j > 1 {
                triplets.push((k, idx(j - 1, i), off));
            }
            if j < columns {
                triplets.push((k, idx(j + 1, i), off));
            }
            if i > 1 {
                triplets.push((k, idx(j, i - 1), off));
            }
            if i < ny {
                triplets.push((k, idx(j, i + 1), off));
            }
            rhs[k] = -source_term(j as f64 * h, i as f64 * h);
        }
    }
    let monolithic = CsrMatrix::from_triplets(n, triplets)?;

    let n1 = ny * ny;
    let a = monolithic.block(0..n1, 0..n1)?;
    let b = monolithic.block(n1..n, n1..n)?;
    // off-diagonal blocks move to the right-hand side with flipped sign
    let mut to_omega1 = Vec::new();
    for r in 0..n1 {
        for (c, v) in monolithic.row(r) {
            if c >= n1 {
                to_omega1.push((r, c - n1, -v));
            }
        }
    }
    let mut to_gamma = Vec::new();
    for r in n1..n {
        for (c, v) in monolithic.row(r) {
            if c < n1 {
                to_gamma.push((r - n1, c, -v));
            }
        }
    }

    Ok(TransmissionSystem {
        intervals,
        h,
        a,
        b,
        monolithic,
        monolithic_rhs: rhs,
        gamma_to_omega1: CouplingMap { entries: to_omega1 },
        omega1_to_gamma: CouplingMap { entries: to_gamma },
    })
}

/// Which `Ω₁` solution feeds the interface flux of the `Ω₂` solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DnOrdering {
    /// The `Ω₁` solution from the same step (Gauss–Seidel).
    Sequential,
    /// The `Ω₁` solution from the previous step (Jacobi-like), so both
    /// subdomain solves of a step use data from the previous step only.
    Lagged,
}

/// Initial guess for the inner CG solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerGuess {
    /// Previous outer step's subdomain solution.
    Previous,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DnOptions {
    pub ordering: DnOrdering,
    pub inner_guess: InnerGuess,
    pub inner_max_iter: usize,
}

impl Default for DnOptions {
    fn default() -> Self {
        Self {
            ordering: DnOrdering::Lagged,
            inner_guess: InnerGuess::Previous,
            inner_max_iter: 20_000,
        }
    }
}

/// Interface values and the latest subdomain solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct DnState {
    pub u_gamma: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl DnState {
    pub fn zero(sys: &TransmissionSystem) -> Self {
        Self {
            u_gamma: vec![0.0; sys.gamma_len()],
            u1: vec![0.0; sys.omega1_len()],
            u2: vec![0.0; sys.omega2_len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DnStep {
    pub state: DnState,
    pub dirichlet: SolveReport,
    pub neumann: SolveReport,
}

/// One Dirichlet–Neumann step: CG on `A` with `u_Γ` as data, CG on `B` with the
/// flux data from `Ω₁`, then the interface trace of the `Ω₂` solution.
pub fn dn_step(
    sys: &TransmissionSystem,
    state: &DnState,
    criterion: TerminationCriterion,
    opts: &DnOptions,
) -> Result<DnStep, ProblemError> {
    if state.u_gamma.len() != sys.gamma_len() {
        return Err(ProblemError::InvalidParameter(format!(
            "interface vector has length {}, expected {}",
            state.u_gamma.len(),
            sys.gamma_len()
        )));
    }
    let guess = |prev: &[f64]| match opts.inner_guess {
        InnerGuess::Previous => prev.to_vec(),
        InnerGuess::Zero => vec![0.0; prev.len()],
    };
    let b1 = sys.b1(&state.u_gamma);
    let dirichlet = cg_solve(
        &sys.a,
        &b1,
        &guess(&state.u1),
        criterion,
        opts.inner_max_iter,
    )?;
    let flux_source = match opts.ordering {
        DnOrdering::Sequential => &dirichlet.solution,
        DnOrdering::Lagged => &state.u1,
    };
    let b2 = sys.b2(flux_source);
    let neumann = cg_solve(
        &sys.b,
        &b2,
        &guess(&state.u2),
        criterion,
        opts.inner_max_iter,
    )?;
    let state = DnState {
        u_gamma: sys.trace(&neumann.solution).to_vec(),
        u1: dirichlet.solution.clone(),
        u2: neumann.solution.clone(),
    };
    Ok(DnStep {
        state,
        dirichlet,
        neumann,
    })
}

/// Outcome of [`dn_iterate`]: the interface trace plus the final subdomain
/// solutions.
#[derive(Debug, Clone)]
pub struct DnRun {
    pub trace: FixedPointTrace,
    pub state: DnState,
}

impl DnRun {
    /// Final `(u₁, u₂)` in monolithic ordering.
    pub fn full_solution(&self, sys: &TransmissionSystem) -> Vec<f64> {
        sys.full_solution(&self.state.u1, &self.state.u2)
    }
}

/// Repeats [`dn_step`] from all-zero data until the interface increment is at
/// most `outer.tol`.
pub fn dn_iterate(
    sys: &TransmissionSystem,
    criterion: TerminationCriterion,
    outer: &IterationOptions,
    opts: &DnOptions,
) -> Result<DnRun, ProblemError> {
    let mut state = DnState::zero(sys);
    let trace = iterate_inexact(
        |_, _: &[f64]| -> Result<InexactStep, ProblemError> {
            let step = dn_step(sys, &state, criterion, opts)?;
            state = step.state;
            Ok(InexactStep {
                next: state.u_gamma.clone(),
                reports: vec![step.dirichlet, step.neumann],
                residual: None,
            })
        },
        vec![0.0; sys.gamma_len()],
        OuterCriterion::Increment,
        outer,
    )?;
    Ok(DnRun { trace, state })
}
