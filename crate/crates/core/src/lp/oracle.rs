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
//! Exact reference solver by vertex enumeration, for small problems only.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use super::{KktResiduals, LinearProgram, LpError, LpSolution, LpStatus};

pub const ORACLE_MAX_COLS: usize = 12;
pub const ORACLE_MAX_ROWS: usize = 20;

/// Enumerates every choice of `n` active constraints among the `m` rows and
/// `n` bounds, keeps the feasible intersection points and returns the one
/// with the lowest objective. The polyhedron contains no lines (all
/// variables are bounded below), so an optimal vertex exists whenever the
/// problem is feasible.
pub fn vertex_oracle(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let (m, n) = (lp.rows(), lp.cols());
    if n > ORACLE_MAX_COLS || m > ORACLE_MAX_ROWS {
        return Err(LpError::TooLarge { rows: m, cols: n });
    }
    // Stacked constraint system G·t ≥ h with G = [A; I], h = [b; lb].
    let g = DMatrix::from_fn(m + n, n, |i, j| {
        if i < m {
            lp.a[(i, j)]
        } else if i - m == j {
            1.0
        } else {
            0.0
        }
    });
    let h = DVector::from_fn(m + n, |i, _| if i < m { lp.b[i] } else { lp.lb[i - m] });
    let feas_tol = 1e-9 * (1.0 + h.amax());

    let mut best: Option<(f64, Vec<f64>)> = None;
    for active in (0..m + n).combinations(n) {
        let sub = g.select_rows(active.iter());
        let rhs = DVector::from_iterator(n, active.iter().map(|&i| h[i]));
        let lu = sub.lu();
        if lu.determinant().abs() < 1e-12 {
            continue;
        }
        let Some(t) = lu.solve(&rhs) else { continue };
        let lhs = &g * &t;
        if (0..m + n).any(|i| lhs[i] < h[i] - feas_tol) {
            continue;
        }
        let obj = lp.c.dot(&t);
        if best.as_ref().is_none_or(|(b, _)| obj < *b - 1e-12) {
            best = Some((obj, t.iter().copied().collect()));
        }
    }
    Ok(match best {
        Some((objective, t)) => LpSolution {
            t,
            objective,
            status: LpStatus::Optimal,
            kkt_residuals: KktResiduals::default(),
            iterations: 0,
            trace: Vec::new(),
        },
        None => LpSolution {
            t: lp.lb.iter().copied().collect(),
            objective: f64::NAN,
            status: LpStatus::Infeasible,
            kkt_residuals: KktResiduals::default(),
            iterations: 0,
            trace: Vec::new(),
        },
    })
}
