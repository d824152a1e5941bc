mod common;

use std::f64::consts::{E, PI};

use approx::assert_relative_eq;
use common::frozen;
use proptest::prelude::*;
use sardquad::analysis::*;
use sardquad::kernel::{basis_integral, exactness_basis, green_double_integral, ProblemConfig};
use sardquad::real::Real;
use sardquad::{compute_rule, Error, Method, QuadratureRule};

fn cfg(m: u32, n: usize) -> ProblemConfig {
    ProblemConfig::new(m, n).unwrap()
}

fn optimal(m: u32, n: usize) -> QuadratureRule {
    compute_rule(&cfg(m, n), Method::Dense).unwrap()
}

#[test]
fn norms_match_frozen_oracle() {
    for (m, n, want) in [(1, 1, frozen::NORM_SQ_M1_N1[0]), (3, 5, frozen::NORM_SQ_M3_N5[0]), (5, 10, frozen::NORM_SQ_M5_N10[0])] {
        let r = error_norm_squared(&cfg(m, n), &optimal(m, n)).unwrap();
        assert_relative_eq!(r.norm_sq, want, max_relative = 1e-12);
        assert_relative_eq!(r.norm_sq, r.term_linear - r.term_quadratic - r.term_constant, max_relative = 1e-9);
    }
}

/// Direct evaluation of the squared error norm for `m = 1, N = 1` from
/// quadrature of `G_1`, independent of the library's closed forms.
#[test]
fn m1_single_interval_brute_force() {
    let c = cfg(1, 1);
    let rule = optimal(1, 1);
    assert!(rule.max_constraint_residual() <= 1e-12);
    let w = rule.weights();
    let constant = common::double_integral_oracle(1);
    let linear = 2.0 * (w[0] * common::f_oracle(1, 0.0) + w[1] * common::f_oracle(1, 1.0));
    let quadratic = 2.0 * w[0] * w[1] * common::green(1, 1.0);
    let brute = linear - quadratic - constant;
    let r = error_norm_squared(&c, &rule).unwrap();
    assert!(r.norm_sq > 0.0);
    assert!((r.norm_sq - brute).abs() <= 1e-10, "{} vs {brute}", r.norm_sq);
}

#[test]
fn double_integral_constant_matches_quadrature() {
    for m in [1, 3, 5] {
        assert!((green_double_integral(m) - common::double_integral_oracle(m)).abs() <= 1e-10);
    }
}

#[test]
fn off_manifold_is_rejected() {
    for m in [1, 3] {
        let c = cfg(m, 10);
        let r = optimal(m, 10);
        let scaled: Vec<Real> = r.weights_real().iter().map(|x| x * (1.0 + 1e-4)).collect();
        let bad = QuadratureRule::new(c, Method::Dense, scaled).unwrap();
        assert!(matches!(error_norm_squared(&c, &bad), Err(Error::Precondition { .. })));
        assert!(matches!(minimality_probe(&c, &bad, 3, 1e-3, 1), Err(Error::Precondition { .. })));
    }
}

#[test]
fn refinement_lowers_the_norm() {
    let a = error_norm_squared(&cfg(1, 10), &optimal(1, 10)).unwrap().norm_sq;
    let b = error_norm_squared(&cfg(1, 20), &optimal(1, 20)).unwrap().norm_sq;
    assert!(b < a);
}

#[test]
fn apply_examples() {
    for (m, n) in [(1, 4), (3, 10), (5, 17)] {
        let r = optimal(m, n);
        assert!((apply(&r, |x| (-x).exp()) - (1.0 - 1.0 / E)).abs() <= 1e-10);
    }
    let r = optimal(3, 12);
    let s3 = 3f64.sqrt();
    let t = 2.0 * PI / 3.0;
    let want = t.sin() - (PI / 3.0).cos().exp() * ((PI / 3.0).sin() + t).sin();
    assert!((apply(&r, |x| (x / 2.0).exp() * (s3 * x / 2.0).sin()) - want).abs() <= 1e-10);
}

#[test]
fn not_exact_on_constants() {
    let mut prev = f64::INFINITY;
    for n in [10, 20, 40] {
        let d = (apply(&optimal(1, n), |_| 1.0) - 1.0).abs();
        assert!(d > 1e-13, "N={n}: {d:e}");
        assert!(d < prev);
        prev = d;
    }
}

#[test]
fn exactness_suite_all_routes() {
    for m in [1u32, 3, 5] {
        for n in [m as usize, 10, 50] {
            let c = cfg(m, n);
            let mut methods = vec![Method::Dense, Method::Sobolev];
            match m {
                1 => methods.push(Method::ClosedFormM1),
                3 => methods.push(Method::ClosedFormM3),
                _ => {}
            }
            for method in methods {
                let r = compute_rule(&c, method).unwrap();
                for b in exactness_basis(m) {
                    let exact = basis_integral(&b);
                    let got = apply(&r, |x| b.eval(x));
                    assert!((got - exact).abs() <= 1e-10 * (1.0 + exact.abs()), "{method} m={m} N={n} {}", b.name());
                }
            }
        }
    }
}

#[test]
fn probes_increase_the_norm() {
    for m in [1, 3] {
        let c = cfg(m, 10);
        let rep = minimality_probe(&c, &optimal(m, 10), 100, 1e-3, DEFAULT_SEED).unwrap();
        assert_eq!(rep.trials, 100);
        assert!(rep.violations.is_empty());
        assert!(rep.min_increase > 0.0, "m={m}: {:e}", rep.min_increase);
        assert!(rep.check().is_ok());
    }
}

#[test]
fn zero_magnitude_probe_changes_nothing() {
    let c = cfg(3, 10);
    let rep = minimality_probe(&c, &optimal(3, 10), 10, 0.0, DEFAULT_SEED).unwrap();
    assert_eq!(rep.min_increase, 0.0);
    assert_eq!(rep.max_increase, 0.0);
}

#[test]
fn probes_are_reproducible() {
    let c = cfg(3, 10);
    let r = optimal(3, 10);
    let a = minimality_probe(&c, &r, 20, 1e-3, 7).unwrap();
    let b = minimality_probe(&c, &r, 20, 1e-3, 7).unwrap();
    assert_eq!(a.min_increase, b.min_increase);
    assert_eq!(a.max_increase, b.max_increase);
}

#[test]
fn non_optimal_rule_is_caught() {
    let c = cfg(3, 10);
    let trap = projected_trapezoid(&c).unwrap();
    let rep = minimality_probe(&c, &trap, 50, 1e-3, DEFAULT_SEED).unwrap();
    assert!(!rep.violations.is_empty());
    assert!(matches!(rep.check(), Err(Error::OptimalityViolation { .. })));
}

#[test]
fn stationarity_at_optimum() {
    for m in [1, 3, 5] {
        let c = cfg(m, 10);
        let s = stationarity(&c, &optimal(m, 10), 20, 1e-6, DEFAULT_SEED).unwrap();
        assert!(s <= 1e-8, "m={m}: {s:e}");
    }
}

#[test]
fn no_feasible_directions_when_fully_determined() {
    let c = cfg(3, 2);
    let r = optimal(3, 2);
    assert!(matches!(minimality_probe(&c, &r, 5, 1e-3, 1), Err(Error::NoFeasibleDirections { m: 3, n: 2 })));
}

#[test]
fn convergence_study_m1() {
    let ns: Vec<usize> = (1..=8).map(|k| 1 << k).collect();
    let rows = convergence_study(1, &ns, &TestFunction::ALL, Method::Sobolev).unwrap();
    assert_eq!(rows.len(), ns.len());
    assert!(rows[0].slope.is_none());
    for w in rows.windows(2) {
        assert!(w[1].norm_sq < w[0].norm_sq);
        assert!(w[1].slope.unwrap().is_finite());
    }
    for r in &rows {
        assert!(r.norm_sq > 0.0);
        assert!(r.norm_sq <= r.trapezoid_norm_sq);
        assert_eq!(r.errors.len(), TestFunction::ALL.len());
        let exp = r.errors.iter().find(|e| e.name == TestFunction::Exp.name()).unwrap();
        assert!(exp.optimal.abs() <= 1e-12);
    }
}

#[test]
fn convergence_study_rejects_bad_input() {
    assert!(matches!(convergence_study(1, &[], &TestFunction::ALL, Method::Dense), Err(Error::EmptyInput(_))));
    assert!(convergence_study(5, &[2], &TestFunction::ALL, Method::Dense).is_err());
}

#[test]
fn test_function_integrals() {
    for f in TestFunction::ALL {
        let q = common::integrate(&|x| f.value(x), 0.0, 1.0, 1e-13);
        assert!((q - f.integral()).abs() <= 1e-9, "{}", f.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn norm_is_nonnegative_and_minimal(seed in any::<u64>(), magnitude in 1e-6f64..1e-1, mi in 0usize..2) {
        let m = [1u32, 3][mi];
        let c = cfg(m, 8);
        let rep = minimality_probe(&c, &optimal(m, 8), 4, magnitude, seed).unwrap();
        prop_assert!(rep.base_norm_sq >= -1e-12);
        prop_assert!(rep.base_norm_sq + rep.min_increase >= -1e-12);
        prop_assert!(rep.violations.is_empty());
    }
}
