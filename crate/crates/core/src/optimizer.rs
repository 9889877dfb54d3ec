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
//! Dwell-time optimization along a scan trajectory.
//!
//! Every segment of the sweep is a pose where the lamp assembly dwells for
//! `Δtᵢ` seconds. Point `n` receives `Σᵢ Eᵢₙ·Δtᵢ`, where `Eᵢₙ` is the
//! assembly irradiance from segment `i` in mW/cm² (= mJ/cm² per second).
//! The total dwell time is minimized subject to each point reaching the
//! target of its risk class and every `Δtᵢ` respecting both the 0.1 s floor
//! and the arm speed limit.

use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Pose, RiskClass, SurfacePoint};
use crate::irradiance::{irradiance_assembly, IrradianceError, LampAssembly};
use crate::lp::{self, LinearProgram, LpError, LpStatus};
use crate::mapping::ScanTrajectory;

/// Minimum dwell per segment, seconds.
pub const DWELL_FLOOR_S: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("segment {segment}, point {point}: {source}")]
    Degenerate {
        segment: usize,
        point: usize,
        source: IrradianceError,
    },
    #[error("surface point {0} is not illuminated by any segment")]
    UnreachablePoint(usize),
    #[error("invalid dose targets: {0}")]
    InvalidTargets(String),
    #[error("LP: {0}")]
    Lp(#[from] LpError),
    #[error("LP solver finished with status {0:?}")]
    Solver(LpStatus),
}

/// Irradiance of each segment's pose on each point, mW/cm².
#[derive(Clone, Debug, PartialEq)]
pub struct DoseMatrix {
    n_segments: usize,
    n_points: usize,
    /// Segment-major.
    entries: Vec<f64>,
    pub arc_lengths: Vec<f64>,
}

impl DoseMatrix {
    /// `rows[i][n]` is segment `i` on point `n`, in mW/cm².
    pub fn from_rows(rows: &[Vec<f64>], arc_lengths: Vec<f64>) -> Result<Self, OptimizeError> {
        let n_segments = rows.len();
        if n_segments == 0 {
            return Err(OptimizeError::Empty("segments"));
        }
        let n_points = rows[0].len();
        if rows.iter().any(|r| r.len() != n_points) || arc_lengths.len() != n_segments {
            return Err(OptimizeError::DimensionMismatch("ragged dose matrix".into()));
        }
        if rows.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(OptimizeError::DimensionMismatch(
                "dose matrix entries must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            n_segments,
            n_points,
            entries: rows.concat(),
            arc_lengths,
        })
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn get(&self, segment: usize, point: usize) -> f64 {
        self.entries[segment * self.n_points + point]
    }

    pub fn segment_row(&self, segment: usize) -> &[f64] {
        &self.entries[segment * self.n_points..(segment + 1) * self.n_points]
    }

    /// Dose delivered to each point for the given dwell times, mJ/cm².
    pub fn delivered(&self, dwell: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_points];
        for (i, dt) in dwell.iter().enumerate() {
            for (o, e) in out.iter_mut().zip(self.segment_row(i)) {
                *o += e * dt;
            }
        }
        out
    }

    fn point_is_lit(&self, point: usize) -> bool {
        (0..self.n_segments).any(|i| self.get(i, point) > 0.0)
    }
}

pub type Visibility<'a> = &'a (dyn Fn(usize, &Pose, &SurfacePoint) -> bool + Sync);

/// Evaluates the assembly at every segment pose on every point. Entries are
/// zero where `visibility` rejects the pair.
pub fn build_dose_matrix(
    traj: &ScanTrajectory,
    points: &[SurfacePoint],
    assembly: &LampAssembly,
    visibility: Option<Visibility<'_>>,
) -> Result<DoseMatrix, OptimizeError> {
    if traj.is_empty() {
        return Err(OptimizeError::Empty("trajectory"));
    }
    if points.is_empty() {
        return Err(OptimizeError::Empty("points"));
    }
    let rows: Vec<Vec<f64>> = traj
        .segments
        .par_iter()
        .enumerate()
        .map(|(i, seg)| {
            let lamp = assembly.at(seg.pose);
            points
                .iter()
                .enumerate()
                .map(|(n, sp)| {
                    if let Some(vis) = visibility {
                        if !vis(i, &seg.pose, sp) {
                            return Ok(0.0);
                        }
                    }
                    irradiance_assembly(&lamp, sp)
                        .map(|e| e.mw_per_cm2())
                        .map_err(|source| OptimizeError::Degenerate {
                            segment: i,
                            point: n,
                            source,
                        })
                })
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<_, _>>()?;
    DoseMatrix::from_rows(&rows, traj.arc_lengths())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DoseTargets {
    /// mJ/cm²
    pub hotspot_min: f64,
    /// mJ/cm²
    pub nonhotspot_min: f64,
}

impl Default for DoseTargets {
    fn default() -> Self {
        Self {
            hotspot_min: 22.0,
            nonhotspot_min: 5.0,
        }
    }
}

impl DoseTargets {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        if !(self.nonhotspot_min > 0.0 && self.hotspot_min >= self.nonhotspot_min) {
            return Err(OptimizeError::InvalidTargets(format!(
                "need hotspot_min >= nonhotspot_min > 0, got {} / {}",
                self.hotspot_min, self.nonhotspot_min
            )));
        }
        Ok(())
    }

    pub fn for_risk(&self, risk: RiskClass) -> f64 {
        match risk {
            RiskClass::Hotspot => self.hotspot_min,
            RiskClass::NonHotspot => self.nonhotspot_min,
        }
    }

    /// Every class held to the hotspot standard.
    pub fn uniform_high(&self) -> Self {
        Self {
            hotspot_min: self.hotspot_min,
            nonhotspot_min: self.hotspot_min,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DwellParams {
    /// Minimum dwell per segment, s.
    pub floor: f64,
    /// Maximum end-effector speed, m/s.
    pub v_max: f64,
    /// Constraint rows solved directly before falling back to subsampling.
    pub constraint_cap: usize,
    /// Re-solve rounds that add violated points back in.
    pub max_rounds: usize,
    /// Seeds the first farthest-point sample.
    pub seed: u64,
}

impl Default for DwellParams {
    fn default() -> Self {
        Self {
            floor: DWELL_FLOOR_S,
            v_max: 0.25,
            constraint_cap: 2000,
            max_rounds: 5,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpeed {
    pub arc_length: f64,
    pub dwell: f64,
    pub speed: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile {
    pub segments: Vec<SegmentSpeed>,
    pub total_time: f64,
}

impl SpeedProfile {
    pub fn dwell_times(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.dwell).collect()
    }

    /// Converts dwell times into speeds along the trajectory.
    pub fn from_dwell(arc_lengths: &[f64], dwell: &[f64]) -> Self {
        let segments: Vec<SegmentSpeed> = arc_lengths
            .iter()
            .zip(dwell)
            .map(|(&arc_length, &dwell)| SegmentSpeed {
                arc_length,
                dwell,
                speed: if dwell > 0.0 { arc_length / dwell } else { 0.0 },
            })
            .collect();
        let total_time = dwell.iter().sum();
        Self {
            segments,
            total_time,
        }
    }
}

/// Solves for dwell times that bring every point to its target.
pub fn optimize_dwell(
    dm: &DoseMatrix,
    points: &[SurfacePoint],
    targets: &DoseTargets,
    params: &DwellParams,
) -> Result<SpeedProfile, OptimizeError> {
    targets.validate()?;
    if points.len() != dm.n_points() {
        return Err(OptimizeError::DimensionMismatch(format!(
            "{} points vs {} dose-matrix columns",
            points.len(),
            dm.n_points()
        )));
    }
    if !(params.floor >= 0.0 && params.v_max > 0.0) {
        return Err(OptimizeError::DimensionMismatch(format!(
            "floor {} / v_max {}",
            params.floor, params.v_max
        )));
    }
    if let Some(n) = (0..dm.n_points()).find(|&n| !dm.point_is_lit(n)) {
        return Err(OptimizeError::UnreachablePoint(n));
    }
    let b_full: Vec<f64> = points.iter().map(|p| targets.for_risk(p.risk)).collect();
    let lb: Vec<f64> = dm
        .arc_lengths
        .iter()
        .map(|a| params.floor.max(a / params.v_max))
        .collect();

    let mut rows: Vec<usize> = if points.len() <= params.constraint_cap {
        (0..points.len()).collect()
    } else {
        farthest_point_sample(points, params.constraint_cap, params.seed)
    };
    let mut dwell = Vec::new();
    for round in 0..=params.max_rounds {
        dwell = solve_rows(dm, &b_full, &lb, &rows)?;
        if rows.len() == points.len() {
            break;
        }
        let delivered = dm.delivered(&dwell);
        let mut in_set = vec![false; points.len()];
        for &r in &rows {
            in_set[r] = true;
        }
        let violated: Vec<usize> = (0..points.len())
            .filter(|&n| !in_set[n] && delivered[n] < b_full[n] * (1.0 - 1e-6))
            .collect();
        if violated.is_empty() {
            break;
        }
        rows.extend(violated);
        rows.sort_unstable();
        if round + 1 == params.max_rounds {
            rows = (0..points.len()).collect();
        }
        log::debug!("dwell round {round}: {} constraint rows", rows.len());
    }

    // Lift the solution onto the exact feasible side of every constraint.
    let delivered = dm.delivered(&dwell);
    let factor = delivered
        .iter()
        .zip(&b_full)
        .map(|(d, b)| b / d)
        .fold(1.0, f64::max);
    let dwell: Vec<f64> = dwell
        .iter()
        .zip(&lb)
        .map(|(t, l)| (t * factor).max(*l))
        .collect();
    Ok(SpeedProfile::from_dwell(&dm.arc_lengths, &dwell))
}

fn solve_rows(
    dm: &DoseMatrix,
    b_full: &[f64],
    lb: &[f64],
    rows: &[usize],
) -> Result<Vec<f64>, OptimizeError> {
    let a = DMatrix::from_fn(rows.len(), dm.n_segments(), |r, i| dm.get(i, rows[r]));
    let b = rows.iter().map(|&n| b_full[n]).collect();
    let program = LinearProgram::min_total(a, b, lb.to_vec())?;
    let sol = lp::solve(&program);
    if sol.status != LpStatus::Optimal {
        return Err(OptimizeError::Solver(sol.status));
    }
    Ok(sol.t)
}

/// Greedy farthest-point subsample of point indices, returned sorted.
pub fn farthest_point_sample(points: &[SurfacePoint], count: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    if count >= n {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::with_capacity(count);
    let mut min_d2 = vec![f64::INFINITY; n];
    let mut next = rng.random_range(0..n);
    for _ in 0..count {
        chosen.push(next);
        let p = points[next].position;
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (j, q) in points.iter().enumerate() {
            let d2 = (q.position - p).norm_squared();
            if d2 < min_d2[j] {
                min_d2[j] = d2;
            }
            if min_d2[j] > best.0 {
                best = (min_d2[j], j);
            }
        }
        next = best.1;
    }
    chosen.sort_unstable();
    chosen.dedup();
    chosen
}

/// Total dwell when every point is held to the hotspot standard versus
/// per-class targets.
pub fn compare_uniform_vs_differentiated(
    dm: &DoseMatrix,
    points: &[SurfacePoint],
    targets: &DoseTargets,
    params: &DwellParams,
) -> Result<(f64, f64), OptimizeError> {
    let uniform = optimize_dwell(dm, points, &targets.uniform_high(), params)?;
    let differentiated = optimize_dwell(dm, points, targets, params)?;
    Ok((uniform.total_time, differentiated.total_time))
}

pub fn write_speed_csv<W: Write>(mut w: W, profile: &SpeedProfile) -> std::io::Result<()> {
    writeln!(w, "segment_index,arc_length_m,dwell_s,speed_m_per_s")?;
    for (i, s) in profile.segments.iter().enumerate() {
        writeln!(w, "{i},{},{},{}", s.arc_length, s.dwell, s.speed)?;
    }
    Ok(())
}

pub fn write_dose_report_csv<W: Write>(
    mut w: W,
    points: &[SurfacePoint],
    targets: &DoseTargets,
) -> std::io::Result<()> {
    writeln!(w, "point_index,x,y,z,risk,dose_mJ_cm2,target_mJ_cm2,margin")?;
    for (i, p) in points.iter().enumerate() {
        let target = targets.for_risk(p.risk);
        writeln!(
            w,
            "{i},{},{},{},{},{},{},{}",
            p.position.x,
            p.position.y,
            p.position.z,
            p.risk.as_scalar(),
            p.dose(),
            target,
            p.dose() - target
        )?;
    }
    Ok(())
}
