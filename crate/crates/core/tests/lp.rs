/*
Copyright 2026 The uvdose Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uvdose::lp::text::{from_text, to_text};
use uvdose::lp::{solve, vertex_oracle, LinearProgram, LpStatus};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

#[test]
fn random_programs_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let lp = common::random_lp(&mut rng, 40_000);
        let ipm = solve(&lp);
        let exact = vertex_oracle(&lp).unwrap();
        assert_eq!(ipm.status, LpStatus::Optimal, "trial {trial}");
        assert!(rel(ipm.objective, exact.objective) <= 1e-5, "trial {trial}: {} vs {}", ipm.objective, exact.objective);
        assert!(ipm.kkt_residuals.max() <= 1e-6);
        assert!(lp.certifies(&ipm.t));
    }
}

#[test]
fn small_random_three_by_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..200 {
        let a = DMatrix::from_fn(3, 4, |_, _| rng.random_range(0.0..1.0));
        let b = (0..3).map(|_| rng.random_range(1.0..10.0)).collect();
        let lp = LinearProgram::min_total(a, b, vec![0.1; 4]).unwrap();
        let (ipm, exact) = (solve(&lp), vertex_oracle(&lp).unwrap());
        assert!(rel(ipm.objective, exact.objective) <= 1e-5);
    }
}

#[test]
fn dual_bound_holds_at_every_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let lp = common::random_lp(&mut rng, u128::MAX);
        let sol = solve(&lp);
        assert!(!sol.trace.is_empty());
        for it in &sol.trace {
            assert!(
                it.dual_objective <= it.primal_objective + 1e-9 * it.primal_objective.abs().max(1.0),
                "{it:?}"
            );
        }
    }
}

#[test]
fn homogeneous_in_b_with_zero_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..30 {
        let base = common::random_lp(&mut rng, 40_000);
        let lb = vec![0.0; base.cols()];
        let b: Vec<f64> = base.b.iter().copied().collect();
        let lp = LinearProgram::min_total(base.a.clone(), b.clone(), lb.clone()).unwrap();
        let lambda = rng.random_range(0.2..5.0);
        let scaled = LinearProgram::min_total(base.a.clone(), b.iter().map(|v| v * lambda).collect(), lb).unwrap();
        let (s1, s2) = (solve(&lp), solve(&scaled));
        assert!(rel(s2.objective, lambda * s1.objective) < 1e-6);
        // λ·t is optimal for the scaled problem.
        let t: Vec<f64> = s1.t.iter().map(|v| v * lambda).collect();
        assert!(scaled.max_row_violation(&t) <= 1e-6 * lambda * 10.0);
        assert!(rel(scaled.objective(&t), s2.objective) < 1e-6);
    }
}

#[test]
fn duplicated_rows_do_not_change_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..30 {
        let lp = common::random_lp(&mut rng, 20_000);
        let m = lp.rows();
        let a = DMatrix::from_fn(m + 1, lp.cols(), |i, j| lp.a[(i.min(m - 1), j)]);
        let mut b: Vec<f64> = lp.b.iter().copied().collect();
        b.push(b[m - 1]);
        let dup = LinearProgram::min_total(a, b, lp.lb.iter().copied().collect()).unwrap();
        assert!(rel(solve(&dup).objective, solve(&lp).objective) < 1e-6);
    }
}

#[test]
fn listed_programs() {
    let one = |b: f64| LinearProgram::min_total(DMatrix::from_element(1, 1, 1.0), vec![b], vec![0.1]).unwrap();
    let s = solve(&one(22.0));
    assert!((s.t[0] - 22.0).abs() < 1e-6 && (s.objective - 22.0).abs() < 1e-6);
    let s = solve(&one(0.05));
    assert!((s.t[0] - 0.1).abs() < 1e-6);
    let lp = LinearProgram::min_total(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]), vec![22.0; 2], vec![0.1; 2])
        .unwrap();
    let s = solve(&lp);
    assert!((s.t[0] - 22.0 / 3.0).abs() < 1e-6 && (s.t[1] - 22.0 / 3.0).abs() < 1e-6);
    let zero_row = LinearProgram::min_total(DMatrix::from_row_slice(2, 1, &[1.0, 0.0]), vec![5.0, 5.0], vec![0.1]).unwrap();
    assert_eq!(solve(&zero_row).status, LpStatus::Infeasible);
}

#[test]
fn text_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let lp = common::random_lp(&mut rng, u128::MAX);
        assert_eq!(from_text(&to_text(&lp)).unwrap(), lp);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn raising_a_target_never_lowers_the_optimum(seed in any::<u64>(), bump in 0.0..5.0f64, row in 0usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lp = common::random_lp(&mut rng, u128::MAX);
        let row = row % lp.rows();
        let mut b: Vec<f64> = lp.b.iter().copied().collect();
        b[row] += bump;
        let harder = LinearProgram::min_total(lp.a.clone(), b, lp.lb.iter().copied().collect()).unwrap();
        let (s0, s1) = (solve(&lp), solve(&harder));
        prop_assert!(s1.objective >= s0.objective - 1e-6 * s0.objective);
    }

    #[test]
    fn optimal_solutions_are_certified(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lp = common::random_lp(&mut rng, u128::MAX);
        let s = solve(&lp);
        prop_assert_eq!(s.status, LpStatus::Optimal);
        let binf = lp.b.amax();
        prop_assert!(lp.max_row_violation(&s.t) <= 1e-6 * binf);
        prop_assert!(lp.max_bound_violation(&s.t) <= 1e-9);
    }
}
