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
//! Primal-dual path-following with Mehrotra's predictor-corrector.
//!
//! Bounds are absorbed by shifting `x = t − lb`, giving
//!
//! ```text
//! min cᵀx   s.t.  A·x − s = b′,  x ≥ 0,  s ≥ 0,   b′ = b − A·lb
//! max b′ᵀy  s.t.  Aᵀy + z = c,   y ≥ 0,  z ≥ 0
//! ```
//!
//! Each Newton step eliminates `s`, `y` and `z` and solves the `n × n`
//! system `(Aᵀ·Y·S⁻¹·A + Z·X⁻¹)·dx = r` by Cholesky. Rows with `b′ ≤ 0` are
//! implied by `x ≥ 0` (since `A ≥ 0`) and are dropped before iterating.

use nalgebra::{DMatrix, DVector};

use super::{IterationRecord, KktResiduals, LinearProgram, LpSolution, LpStatus};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Target for all three relative KKT residuals.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Step-to-boundary fraction.
    pub eta: f64,
    /// Dual objective magnitude treated as divergence.
    pub divergence: f64,
    /// Iterations without primal-residual progress before giving up.
    pub stagnation_window: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iter: 200,
            eta: 0.99,
            divergence: 1e12,
            stagnation_window: 30,
        }
    }
}

pub fn solve(lp: &LinearProgram) -> LpSolution {
    solve_with(lp, &SolverOptions::default())
}

struct Reduced {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
}

pub fn solve_with(lp: &LinearProgram, opts: &SolverOptions) -> LpSolution {
    let n = lp.cols();
    let shifted_b = &lp.b - &lp.a * &lp.lb;
    let c_lb = lp.c.dot(&lp.lb);

    // A zero row with a positive requirement can never be met.
    for (i, row) in lp.a.row_iter().enumerate() {
        if shifted_b[i] > 0.0 && row.iter().all(|v| *v == 0.0) {
            return finish(lp, DVector::zeros(n), LpStatus::Infeasible, KktResiduals::default(), 0, Vec::new());
        }
    }
    let keep: Vec<usize> = (0..lp.rows()).filter(|&i| shifted_b[i] > 0.0).collect();
    if keep.is_empty() {
        // t = lb is optimal for c ≥ 0.
        return finish(lp, DVector::zeros(n), LpStatus::Optimal, KktResiduals::default(), 0, Vec::new());
    }
    let red = Reduced {
        a: lp.a.select_rows(keep.iter()),
        b: DVector::from_iterator(keep.len(), keep.iter().map(|&i| shifted_b[i])),
        c: lp.c.clone(),
    };
    let m = red.a.nrows();
    let a = &red.a;
    let b = &red.b;
    let c = &red.c;

    let (mut x, mut s, mut y, mut z) = starting_point(&red);
    let b_norm = 1.0 + b.amax();
    let c_norm = 1.0 + c.amax();
    let dim = (n + m) as f64;

    let mut trace = Vec::new();
    let mut best_primal = f64::INFINITY;
    let mut stalled = 0usize;
    let mut residuals = KktResiduals::default();

    for iter in 0..opts.max_iter {
        let rp = b - a * &x + &s;
        let rd = c - a.tr_mul(&y) - &z;
        let gap = x.dot(&z) + s.dot(&y);
        let mu = gap / dim;
        let primal_obj = c.dot(&x);
        let dual_obj = b.dot(&y);
        trace.push(IterationRecord {
            primal_objective: primal_obj + c_lb,
            dual_objective: dual_obj + c_lb,
            mu,
        });
        residuals = KktResiduals {
            primal: rp.amax() / b_norm,
            dual: rd.amax() / c_norm,
            complementarity: gap / (1.0 + primal_obj.abs()),
        };
        if residuals.max() <= opts.tolerance {
            return finish(lp, x, LpStatus::Optimal, residuals, iter, trace);
        }
        if dual_obj.abs() > opts.divergence || !dual_obj.is_finite() {
            return finish(lp, x, LpStatus::Infeasible, residuals, iter, trace);
        }
        if residuals.primal < 0.999 * best_primal {
            best_primal = residuals.primal;
            stalled = 0;
        } else if residuals.primal > opts.tolerance {
            stalled += 1;
            if stalled >= opts.stagnation_window {
                return finish(lp, x, LpStatus::Infeasible, residuals, iter, trace);
            }
        }

        // Normal matrix Aᵀ·diag(y/s)·A + diag(z/x).
        let w = DVector::from_iterator(m, y.iter().zip(s.iter()).map(|(y, s)| (y / s).sqrt()));
        let wa = DMatrix::from_fn(m, n, |i, j| w[i] * a[(i, j)]);
        let mut normal = wa.tr_mul(&wa);
        for j in 0..n {
            normal[(j, j)] += z[j] / x[j];
        }
        let Some(chol) = factor(normal) else {
            return finish(lp, x, LpStatus::IterationLimit, residuals, iter, trace);
        };

        let direction = |rxz: &DVector<f64>, rsy: &DVector<f64>| {
            let u = DVector::from_iterator(
                m,
                (0..m).map(|i| (rsy[i] + y[i] * rp[i]) / s[i]),
            );
            let mut rhs = a.tr_mul(&u) - &rd;
            for j in 0..n {
                rhs[j] += rxz[j] / x[j];
            }
            let dx = chol.solve(&rhs);
            let ds = a * &dx - &rp;
            let dy = DVector::from_iterator(m, (0..m).map(|i| (rsy[i] - y[i] * ds[i]) / s[i]));
            let dz = DVector::from_iterator(n, (0..n).map(|j| (rxz[j] - z[j] * dx[j]) / x[j]));
            (dx, ds, dy, dz)
        };

        // Predictor.
        let rxz_aff = -x.component_mul(&z);
        let rsy_aff = -s.component_mul(&y);
        let (dx_a, ds_a, dy_a, dz_a) = direction(&rxz_aff, &rsy_aff);
        let ap = max_step(&x, &dx_a).min(max_step(&s, &ds_a)).min(1.0);
        let ad = max_step(&y, &dy_a).min(max_step(&z, &dz_a)).min(1.0);
        let mu_aff = ((&x + &dx_a * ap).dot(&(&z + &dz_a * ad))
            + (&s + &ds_a * ap).dot(&(&y + &dy_a * ad)))
            / dim;
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

        // Corrector.
        let rxz = DVector::from_iterator(
            n,
            (0..n).map(|j| sigma * mu - x[j] * z[j] - dx_a[j] * dz_a[j]),
        );
        let rsy = DVector::from_iterator(
            m,
            (0..m).map(|i| sigma * mu - s[i] * y[i] - ds_a[i] * dy_a[i]),
        );
        let (dx, ds, dy, dz) = direction(&rxz, &rsy);
        let ap = (opts.eta * max_step(&x, &dx).min(max_step(&s, &ds))).min(1.0);
        let ad = (opts.eta * max_step(&y, &dy).min(max_step(&z, &dz))).min(1.0);
        x += &dx * ap;
        s += &ds * ap;
        y += &dy * ad;
        z += &dz * ad;
    }
    finish(lp, x, LpStatus::IterationLimit, residuals, opts.max_iter, trace)
}

/// Strictly feasible start for both problems: `x = λ·1` large enough that
/// every slack is at least `b′`, and `y = γ·1` small enough that
/// `z = c − Aᵀy ≥ c/2`. Falls back to `y = 1`, `z = 1` when some `c_j = 0`.
fn starting_point(p: &Reduced) -> (DVector<f64>, DVector<f64>, DVector<f64>, DVector<f64>) {
    let (m, n) = p.a.shape();
    let mut lambda: f64 = 1.0;
    for i in 0..m {
        let row_sum: f64 = p.a.row(i).sum();
        lambda = lambda.max(2.0 * p.b[i] / row_sum);
    }
    let x = DVector::from_element(n, lambda);
    let s = &p.a * &x - &p.b;

    let c_min = p.c.min();
    if c_min > 0.0 {
        let max_col = (0..n).map(|j| p.a.column(j).sum()).fold(0.0, f64::max);
        let gamma = if max_col > 0.0 { 0.5 * c_min / max_col } else { 1.0 };
        let y = DVector::from_element(m, gamma);
        let z = &p.c - p.a.tr_mul(&y);
        (x, s, y, z)
    } else {
        (x, s, DVector::from_element(m, 1.0), DVector::from_element(n, 1.0))
    }
}

fn factor(mut normal: DMatrix<f64>) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let n = normal.nrows();
    let scale = (0..n).map(|j| normal[(j, j)]).fold(0.0, f64::max).max(1e-300);
    for k in 0..6 {
        if let Some(ch) = normal.clone().cholesky() {
            return Some(ch);
        }
        let reg = scale * 10f64.powi(-14 + 2 * k);
        for j in 0..n {
            normal[(j, j)] += reg;
        }
    }
    None
}

/// Largest `α` with `v + α·dv ≥ 0`.
fn max_step(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    v.iter()
        .zip(dv.iter())
        .filter(|(_, d)| **d < 0.0)
        .map(|(v, d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

fn finish(
    lp: &LinearProgram,
    x: DVector<f64>,
    status: LpStatus,
    kkt_residuals: KktResiduals,
    iterations: usize,
    trace: Vec<IterationRecord>,
) -> LpSolution {
    let t: Vec<f64> = x
        .iter()
        .zip(lp.lb.iter())
        .map(|(x, lb)| lb + x.max(0.0))
        .collect();
    let objective = lp.objective(&t);
    LpSolution {
        t,
        objective,
        status,
        kkt_residuals,
        iterations,
        trace,
    }
}
