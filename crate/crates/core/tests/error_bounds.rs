use inexact_core::fixedpoint::{
    bound_direct, bound_nested, derived_schedule_from_ls, estimate_lipschitz, iterate_nested,
    iterate_perturbed, iterate_plain, IterationOptions, PerturbationSchedule, Termination,
};
use inexact_core::linalg::{dist2, solve_direct, DenseMatrix};
use inexact_core::problems::linear::linear_nested;
use inexact_core::problems::scalar::{
    nested_fixed_point, nested_scalar, scalar_map, NestedScalarSpec, ScalarMapSpec,
};
use proptest::prelude::*;

/// Largest singular value of a 2×2 matrix from the eigenvalues of `MᵀM`.
fn two_norm_2x2(m: &DenseMatrix) -> f64 {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let p = a * a + c * c;
    let q = a * b + c * d;
    let r = b * b + d * d;
    (0.5 * (p + r) + (0.25 * (p - r) * (p - r) + q * q).sqrt()).sqrt()
}

#[test]
fn affine_fixed_point_matches_direct_solve() {
    let p = linear_nested(0.1, 0.1).unwrap();
    let ab = p.ab();
    let map = |x: &[f64]| {
        let mut y = inexact_core::linalg::matvec(&ab, x).unwrap();
        y.iter_mut().zip(&p.rhs).for_each(|(a, b)| *a += b);
        y
    };
    let trace = iterate_plain(map, vec![0.0, 0.0], &IterationOptions::default()).unwrap();
    let system = DenseMatrix::identity(2).sub(&ab).unwrap();
    let direct = solve_direct(&system, &p.rhs).unwrap();
    assert!(dist2(trace.final_iterate(), &direct) <= 1e-12);
}

#[test]
fn nested_scalar_constant_perturbation() {
    let spec = NestedScalarSpec::from_lipschitz(0.9, 0.99).unwrap();
    let x_star = nested_fixed_point(spec);
    let p = nested_scalar(spec);
    let eps = PerturbationSchedule::constant(0.1);
    let trace = iterate_nested(
        &p.s,
        &p.f,
        &eps,
        &eps,
        vec![0.0],
        &IterationOptions::default(),
    )
    .unwrap();
    let err = (trace.final_iterate()[0] - x_star).abs();
    assert!((err - 1.658e-1).abs() <= 0.01 * 1.658e-1, "error {err}");
    assert!(err <= bound_nested(0.1, 0.1, p.l_s, p.l_f).unwrap() + 1e-10);
}

#[test]
fn nested_linear_measured_error() {
    let p = linear_nested(0.1, 0.1).unwrap();
    let (s, f) = (|x: &[f64]| p.s(x), |x: &[f64]| p.f(x));
    let eps = PerturbationSchedule::constant(0.1);
    let trace = iterate_nested(
        s,
        f,
        &eps,
        &eps,
        vec![0.0, 0.0],
        &IterationOptions::default(),
    )
    .unwrap();
    let err = trace.error_to(&p.x_star);
    assert!(
        (0.9 * 1.058e-1..=1.25 * 1.058e-1).contains(&err),
        "error {err}"
    );
}

#[test]
fn lipschitz_estimate_of_affine_map() {
    let p = linear_nested(0.9, 0.9).unwrap();
    let ab = p.ab();
    // power iteration oracle for the dominant eigenvalue magnitude
    let mut v = vec![1.0, 0.3];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w = inexact_core::linalg::matvec(&ab, &v).unwrap();
        lambda = inexact_core::linalg::norm2(&w) / inexact_core::linalg::norm2(&v);
        v = w;
    }
    let map = |x: &[f64]| {
        let mut y = inexact_core::linalg::matvec(&ab, x).unwrap();
        y.iter_mut().zip(&p.rhs).for_each(|(a, b)| *a += b);
        y
    };
    let trace = iterate_plain(map, vec![0.0, 0.0], &IterationOptions::with_tol(1e-10)).unwrap();
    let l = estimate_lipschitz(&trace).unwrap();
    assert!(
        (l.constant - lambda).abs() <= 0.05 * lambda,
        "{} vs {lambda}",
        l.constant
    );
}

#[test]
fn adaptive_schedules_reach_fixed_point() {
    let opts = IterationOptions::with_tol(1e-15);
    for gamma in [0.3, 1.145, 1.2] {
        let spec = ScalarMapSpec::new(gamma).unwrap();
        let (map, l) = scalar_map(spec);
        let oracle = iterate_plain(map, vec![0.0], &opts).unwrap();
        let adaptive = PerturbationSchedule::adaptive(1e-2, l.constant).unwrap();
        let trace = iterate_perturbed(map, &adaptive, vec![0.0], &opts).unwrap();
        assert!(
            trace.error_to(oracle.final_iterate()) <= 100.0 * 1e-12,
            "gamma {gamma}"
        );
    }
    for (alpha, beta) in [(0.1, 0.1), (0.9, 0.9), (0.99, 0.9)] {
        let p = linear_nested(alpha, beta).unwrap();
        let (s, f) = (|x: &[f64]| p.s(x), |x: &[f64]| p.f(x));
        let rate = two_norm_2x2(&p.a) * two_norm_2x2(&p.b_mat);
        let delta = PerturbationSchedule::adaptive(1e-1, rate).unwrap();
        let eps = derived_schedule_from_ls(&delta, two_norm_2x2(&p.a)).unwrap();
        let trace = iterate_nested(s, f, &eps, &delta, vec![0.0, 0.0], &opts).unwrap();
        assert_eq!(trace.terminated_by, Termination::IncrementBelowTol);
        assert!(
            trace.error_to(&p.x_star) <= 100.0 * 1e-12,
            "alpha {alpha} beta {beta}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nested_error_within_bound(alpha in 0.05f64..0.99, beta in 0.05f64..0.99, eps in 0.0f64..0.2, delta in 0.0f64..0.2) {
        let p = linear_nested(alpha, beta).unwrap();
        let (s, f) = (|x: &[f64]| p.s(x), |x: &[f64]| p.f(x));
        let l_s = two_norm_2x2(&p.a);
        let l_f = two_norm_2x2(&p.b_mat);
        let trace = iterate_nested(
            s, f,
            &PerturbationSchedule::constant(eps),
            &PerturbationSchedule::constant(delta),
            vec![0.0, 0.0],
            &IterationOptions::default(),
        ).unwrap();
        prop_assert!(trace.error_to(&p.x_star) <= bound_nested(eps, delta, l_s, l_f).unwrap() + 1e-10);
    }

    #[test]
    fn per_step_error_within_accumulated_series(alpha in 0.05f64..0.99, beta in 0.05f64..0.99, eps in 0.0f64..0.2, delta in 0.0f64..0.2, decay in 0.0f64..1.0) {
        let p = linear_nested(alpha, beta).unwrap();
        let (s, f) = (|x: &[f64]| p.s(x), |x: &[f64]| p.f(x));
        let l_s = two_norm_2x2(&p.a);
        let l_f = two_norm_2x2(&p.b_mat);
        let eps_schedule = if decay > 0.5 {
            PerturbationSchedule::adaptive(eps.max(1e-6), decay).unwrap()
        } else {
            PerturbationSchedule::constant(eps)
        };
        let delta_schedule = PerturbationSchedule::constant(delta);
        let opts = IterationOptions::default().max_iter(200);
        let trace = iterate_nested(s, f, &eps_schedule, &delta_schedule, vec![0.0, 0.0], &opts).unwrap();
        let q = l_s * l_f;
        let e0 = dist2(&trace.iterates[0], &p.x_star);
        for k in 0..trace.outer_iterations() {
            let mut bound = q.powi(k as i32 + 1) * e0;
            for j in 0..=k {
                bound += q.powi(j as i32) * (l_s * eps_schedule.magnitude(k - j) + delta_schedule.magnitude(k - j));
            }
            let err = dist2(&trace.iterates[k + 1], &p.x_star);
            prop_assert!(err <= bound * (1.0 + 1e-12) + 1e-13, "step {k}: {err} > {bound}");
        }
    }

    #[test]
    fn scalar_constant_perturbation_within_bound(gamma in 0.05f64..1.2, eps in 0.0f64..0.05) {
        let spec = ScalarMapSpec::new(gamma).unwrap();
        let (map, l) = scalar_map(spec);
        let x_star = iterate_plain(map, vec![0.0], &IterationOptions::default()).unwrap();
        let trace = iterate_perturbed(map, &PerturbationSchedule::constant(eps), vec![0.0], &IterationOptions::default()).unwrap();
        prop_assume!(trace.final_iterate()[0] <= 1.0);
        prop_assert!(trace.error_to(x_star.final_iterate()) <= bound_direct(eps, l.constant).unwrap() + 1e-10);
    }
}
