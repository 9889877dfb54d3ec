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
//! Linear programs of the form
//!
//! ```text
//! minimize   cᵀt
//! subject to A·t ≥ b,  t ≥ lb
//! ```
//!
//! with `A ≥ 0`, `b > 0`, `lb ≥ 0` and `c ≥ 0`. Rows are surface points,
//! columns are trajectory segments, `b` holds minimum doses and `lb` the
//! per-segment dwell floors.

mod ipm;
mod oracle;
pub mod text;

pub use ipm::{solve, solve_with, SolverOptions};
pub use oracle::{vertex_oracle, ORACLE_MAX_COLS, ORACLE_MAX_ROWS};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("problem too large for vertex enumeration ({rows} rows x {cols} cols)")]
    TooLarge { rows: usize, cols: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub c: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub lb: DVector<f64>,
}

impl LinearProgram {
    /// Minimum total time: `c = 1`.
    pub fn min_total(a: DMatrix<f64>, b: Vec<f64>, lb: Vec<f64>) -> Result<Self, LpError> {
        let c = vec![1.0; a.ncols()];
        Self::new(c, a, b, lb)
    }

    pub fn new(c: Vec<f64>, a: DMatrix<f64>, b: Vec<f64>, lb: Vec<f64>) -> Result<Self, LpError> {
        let (m, n) = a.shape();
        if c.len() != n {
            return Err(LpError::DimensionMismatch(format!("c has {} entries, A has {n} columns", c.len())));
        }
        if b.len() != m {
            return Err(LpError::DimensionMismatch(format!("b has {} entries, A has {m} rows", b.len())));
        }
        if lb.len() != n {
            return Err(LpError::DimensionMismatch(format!("lb has {} entries, A has {n} columns", lb.len())));
        }
        if n == 0 {
            return Err(LpError::DimensionMismatch("no variables".into()));
        }
        if let Some(v) = a.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(LpError::InvalidProblem(format!("A entry {v} is not finite and non-negative")));
        }
        if let Some(v) = b.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(LpError::InvalidProblem(format!("b entry {v} is not finite and positive")));
        }
        if let Some(v) = lb.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(LpError::InvalidProblem(format!("lb entry {v} is not finite and non-negative")));
        }
        if let Some(v) = c.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(LpError::InvalidProblem(format!("c entry {v} is not finite and non-negative")));
        }
        Ok(Self {
            c: DVector::from_vec(c),
            a,
            b: DVector::from_vec(b),
            lb: DVector::from_vec(lb),
        })
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    pub fn objective(&self, t: &[f64]) -> f64 {
        self.c.iter().zip(t).map(|(c, t)| c * t).sum()
    }

    /// Largest violation of `A·t ≥ b` (0 when feasible).
    pub fn max_row_violation(&self, t: &[f64]) -> f64 {
        let t = DVector::from_column_slice(t);
        let at = &self.a * t;
        at.iter()
            .zip(self.b.iter())
            .map(|(lhs, rhs)| (rhs - lhs).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Largest violation of `t ≥ lb` (0 when feasible).
    pub fn max_bound_violation(&self, t: &[f64]) -> f64 {
        t.iter()
            .zip(self.lb.iter())
            .map(|(t, lb)| (lb - t).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Post-hoc feasibility certificate independent of the solver.
    pub fn certifies(&self, t: &[f64]) -> bool {
        let b_inf = self.b.amax();
        self.max_row_violation(t) <= 1e-6 * b_inf && self.max_bound_violation(t) <= 1e-9
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

/// Relative residuals of the KKT conditions at the returned iterate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct KktResiduals {
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.complementarity)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSolution {
    pub t: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
    pub kkt_residuals: KktResiduals,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}
