use inexact_core::fixedpoint::{IterationOptions, Termination};
use inexact_core::krylov::{cg_solve, TerminationCriterion};
use inexact_core::linalg::{dist2, norm2};
use inexact_core::problems::transmission::{
    dn_iterate, transmission_assemble, DnOptions, DnOrdering, InnerGuess, TransmissionSystem,
};

fn max_error(sys: &TransmissionSystem) -> f64 {
    let u = sys.monolithic_solve().unwrap();
    u.iter()
        .zip(sys.exact_on_grid())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn second_order_convergence() {
    let errors: Vec<f64> = [0.1, 0.05, 0.025, 0.0125]
        .iter()
        .map(|&dx| max_error(&transmission_assemble(dx).unwrap()))
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!(
            (3.5..=4.5).contains(&ratio),
            "ratio {ratio} from {errors:?}"
        );
    }
}

#[test]
fn coarse_mesh_max_error() {
    // second-order sanity band at dx = 1/10; the measured value is 2.2387e-2
    let err = max_error(&transmission_assemble(0.1).unwrap());
    assert!((err - 2.2387e-2).abs() <= 1e-5, "max error {err}");
}

#[test]
fn blocks_pass_positive_definiteness_spot_check() {
    let sys = transmission_assemble(0.05).unwrap();
    for m in [&sys.a, &sys.b, &sys.monolithic] {
        assert!(m.is_symmetric());
        let n = m.dim();
        let b: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let rep = cg_solve(
            m,
            &b,
            &vec![0.0; n],
            TerminationCriterion::relative(1e-10),
            10 * n,
        )
        .unwrap();
        assert!(rep.converged);
        assert!(rep.breakdown.is_none());
    }
}

#[test]
fn dn_matches_monolithic_trace() {
    for dx in [0.1, 0.05] {
        let sys = transmission_assemble(dx).unwrap();
        let mono = sys.monolithic_solve().unwrap();
        let (_, u2) = sys.split(&mono);
        let run = dn_iterate(
            &sys,
            TerminationCriterion::absolute(1e-13),
            &IterationOptions::with_tol(1e-12),
            &DnOptions::default(),
        )
        .unwrap();
        assert_eq!(run.trace.terminated_by, Termination::IncrementBelowTol);
        assert!(
            dist2(run.trace.final_iterate(), sys.trace(u2)) <= 1e-9,
            "dx {dx}"
        );
    }
}

#[test]
fn sequential_ordering_also_reaches_monolithic_trace() {
    let sys = transmission_assemble(0.1).unwrap();
    let mono = sys.monolithic_solve().unwrap();
    let opts = DnOptions {
        ordering: DnOrdering::Sequential,
        inner_guess: InnerGuess::Zero,
        ..DnOptions::default()
    };
    let run = dn_iterate(
        &sys,
        TerminationCriterion::absolute(1e-13),
        &IterationOptions::with_tol(1e-12),
        &opts,
    )
    .unwrap();
    assert!(dist2(&run.full_solution(&sys), &mono) <= 1e-9);
}

#[test]
fn relative_criterion_converges_for_every_tolerance() {
    let sys = transmission_assemble(0.1).unwrap();
    let mono = sys.monolithic_solve().unwrap();
    for tau in [1e-1, 1e-2, 1e-3, 1e-4] {
        let run = dn_iterate(
            &sys,
            TerminationCriterion::relative(tau),
            &IterationOptions::default(),
            &DnOptions::default(),
        )
        .unwrap();
        let err = dist2(&run.full_solution(&sys), &mono);
        assert!(err <= 1e-10, "tau {tau}: error {err}");
    }
}

#[test]
fn absolute_criterion_error_scales_with_tolerance() {
    let sys = transmission_assemble(0.1).unwrap();
    let mono = sys.monolithic_solve().unwrap();
    let errors: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&tau| {
            let run = dn_iterate(
                &sys,
                TerminationCriterion::absolute(tau),
                &IterationOptions::default(),
                &DnOptions::default(),
            )
            .unwrap();
            dist2(&run.full_solution(&sys), &mono)
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!(
            (5.0..=20.0).contains(&ratio),
            "ratio {ratio} from {errors:?}"
        );
    }
    assert!(norm2(&errors) > 0.0);
}
