mod common;

use approx::assert_relative_eq;
use common::frozen;
use sardquad::dense::{assemble, solve, solve_config, solve_with, SolveOptions};
use sardquad::kernel::{exactness_basis, f_value, green_value, ProblemConfig};
use sardquad::Error;

fn cfg(m: u32, n: usize) -> ProblemConfig {
    ProblemConfig::new(m, n).unwrap()
}

#[test]
fn system_shapes_and_entries() {
    let s = assemble(&cfg(1, 1)).unwrap();
    assert_eq!(s.dim(), 3);
    assert_eq!(s.entry(0, 0), 0.0);
    assert_eq!(s.entry(1, 1), 0.0);

    let s = assemble(&cfg(1, 2)).unwrap();
    assert_eq!(s.dim(), 4);
    assert_relative_eq!(s.entry(0, 1), 0.5f64.sinh() / 2.0, max_relative = 1e-15);
    assert_relative_eq!(s.rhs()[1], f_value(1, 0.5), max_relative = 1e-15);
    assert_relative_eq!(s.rhs()[3], 1.0 - (-1.0f64).exp(), max_relative = 1e-15);

    let s = assemble(&cfg(3, 2)).unwrap();
    assert_eq!(s.dim(), 6);
    let s3 = 3f64.sqrt();
    for (beta, x) in [0.0f64, 0.5, 1.0].into_iter().enumerate() {
        let want = [(-x).exp(), (x / 2.0).exp() * (s3 * x / 2.0).cos(), (x / 2.0).exp() * (s3 * x / 2.0).sin()];
        for (r, w) in want.into_iter().enumerate() {
            assert!((s.entry(3 + r, beta) - w).abs() <= 1e-15, "row {r} col {beta}");
            assert_eq!(s.entry(3 + r, beta), s.entry(beta, 3 + r));
        }
    }
    for i in 3..6 {
        for j in 3..6 {
            assert_eq!(s.entry(i, j), 0.0);
        }
    }
}

#[test]
fn green_block_is_symmetric() {
    let s = assemble(&cfg(5, 9)).unwrap();
    for i in 0..10 {
        for j in 0..10 {
            assert_eq!(s.entry(i, j), s.entry(j, i));
        }
        assert!((s.entry(i, 0) - green_value(5, i as f64 / 9.0)).abs() <= 1e-15);
    }
}

#[test]
fn too_few_nodes_is_rejected() {
    assert!(matches!(ProblemConfig::new(5, 3), Err(Error::TooFewNodes { .. })));
}

#[test]
fn m1_single_interval() {
    let sol = solve_config(&cfg(1, 1)).unwrap();
    let e = std::f64::consts::E;
    let want = (e - 1.0) / (e + 1.0);
    for w in sol.rule.weights() {
        assert_relative_eq!(w, want, max_relative = 1e-15);
    }
}

#[test]
fn m1_ten_intervals() {
    let sol = solve_config(&cfg(1, 10)).unwrap();
    let eh = 0.1f64.exp();
    let interior = 2.0 * (eh - 1.0) / (eh + 1.0);
    let w = sol.rule.weights();
    for c in &w[1..10] {
        assert_relative_eq!(*c, interior, max_relative = 1e-14);
    }
    assert_relative_eq!(w[0], interior / 2.0, max_relative = 1e-14);
    assert_relative_eq!(w[10], interior / 2.0, max_relative = 1e-14);
}

#[test]
fn constraints_and_residual() {
    for (m, n) in [(1, 7), (3, 5), (3, 40), (5, 12), (7, 20)] {
        let sol = solve_config(&cfg(m, n)).unwrap();
        assert!(sol.residual <= 1e-10, "residual {}", sol.residual);
        assert!(sol.warnings.is_empty());
        assert!(sol.condition_estimate.is_finite() && sol.condition_estimate > 1.0);
        assert!(sol.rule.max_constraint_residual() <= 1e-12);
        assert_eq!(sol.multipliers.len(), m as usize);
    }
}

#[test]
fn m3_n5_constraints_by_hand() {
    let sol = solve_config(&cfg(3, 5)).unwrap();
    let w = sol.rule.weights();
    for b in exactness_basis(3) {
        let q: f64 = w.iter().enumerate().map(|(i, c)| c * b.eval(i as f64 / 5.0)).sum();
        let exact = common::integrate(&|x| b.eval(x), 0.0, 1.0, 1e-15);
        assert!((q - exact).abs() <= 1e-12, "{}", b.name());
    }
}

#[test]
fn matches_frozen_oracle() {
    let cases: [(u32, usize, &[f64], &[f64]); 5] = [
        (1, 5, &frozen::WEIGHTS_M1_N5, &frozen::MULTIPLIERS_M1_N5),
        (3, 5, &frozen::WEIGHTS_M3_N5, &frozen::MULTIPLIERS_M3_N5),
        (3, 10, &frozen::WEIGHTS_M3_N10, &frozen::MULTIPLIERS_M3_N10),
        (5, 10, &frozen::WEIGHTS_M5_N10, &frozen::MULTIPLIERS_M5_N10),
        (7, 8, &frozen::WEIGHTS_M7_N8, &frozen::MULTIPLIERS_M7_N8),
    ];
    for (m, n, weights, mult) in cases {
        let sol = solve_config(&cfg(m, n)).unwrap();
        assert!(common::max_abs_diff(&sol.rule.weights(), weights) <= 1e-14, "m={m} N={n}");
        let d = sol.multipliers.to_vec();
        for (a, b) in d.iter().zip(mult) {
            let tol = if b.abs() > 1e-30 { 1e-9 * b.abs() } else { 1e-30 };
            assert!((a - b).abs() <= tol, "m={m} N={n}: {a:e} vs {b:e}");
        }
    }
}

#[test]
fn m1_multiplier_vanishes() {
    let sol = solve_config(&cfg(1, 5)).unwrap();
    assert!(sol.multipliers.d0.abs() <= 1e-30);
}

#[test]
fn equilibration_gives_same_weights() {
    let sys = assemble(&cfg(5, 30)).unwrap();
    let a = solve(&sys).unwrap();
    let b = solve_with(&sys, SolveOptions { equilibrate: true }).unwrap();
    assert!(a.rule.max_difference(&b.rule) <= 1e-25);
}

#[test]
fn symmetry_for_m1() {
    for n in [1, 4, 9, 30] {
        let sol = solve_config(&cfg(1, n)).unwrap();
        assert!(sol.rule.symmetry_defect() <= 1e-14);
    }
}

/// For `m >= 3` the exactness basis is not invariant under `x -> 1 - x`, so the
/// weights are not palindromic; the defect is a property of the problem and is
/// reproduced by the independent oracle.
#[test]
fn asymmetry_for_higher_orders_matches_oracle() {
    let sol = solve_config(&cfg(3, 5)).unwrap();
    let w = frozen::WEIGHTS_M3_N5;
    let oracle_defect = (0..6).map(|i| (w[i] - w[5 - i]).abs()).fold(0.0, f64::max);
    assert!(oracle_defect > 1e-6);
    assert_relative_eq!(sol.rule.symmetry_defect(), oracle_defect, max_relative = 1e-9);
}
