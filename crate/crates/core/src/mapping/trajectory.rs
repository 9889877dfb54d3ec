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
//! Standoff sweeps over surface clouds.

use serde::{Deserialize, Serialize};

use super::cloud::{principal_axes, SurfaceCloud};
use super::kdtree::KdTree;
use super::MappingError;
use crate::geometry::{any_perpendicular, Point3, Pose, Vec3};

/// Allowed deviation of a waypoint's clearance from the requested standoff.
pub const STANDOFF_TOLERANCE: f64 = 0.01;

/// One dwell location of the lamp assembly. `arc_length` is the distance
/// travelled from the previous segment's pose (0 for the first).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSegment {
    pub pose: Pose,
    pub arc_length: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanTrajectory {
    pub segments: Vec<ScanSegment>,
    pub standoff: f64,
}

impl ScanTrajectory {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn arc_lengths(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.arc_length).collect()
    }

    /// Appends another trajectory; the first appended segment's arc length
    /// becomes the jump from this trajectory's last pose.
    pub fn extend(&mut self, other: ScanTrajectory) {
        let mut iter = other.segments.into_iter();
        if let Some(mut first) = iter.next() {
            if let Some(last) = self.segments.last() {
                first.arc_length = (first.pose.translation() - last.pose.translation()).norm();
            }
            self.segments.push(first);
        }
        self.segments.extend(iter);
    }
}

/// Axis-aligned box of reachable end-effector positions around a base.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachBox {
    pub center: Point3,
    pub half_extents: Vec3,
}

impl ReachBox {
    pub fn contains(&self, pose: &Pose) -> bool {
        let d = pose.translation() - self.center;
        (0..3).all(|i| d[i].abs() <= self.half_extents[i])
    }
}

/// Serpentine sweep over the dominant plane of `cloud`.
///
/// Rows run along the cloud's major axis and are at most `spacing` apart.
/// Each grid node snaps to the nearest cloud point in plane coordinates and
/// becomes a waypoint at `point + standoff·n̂`, lifted further along `n̂`
/// where another part of the surface would be closer than `standoff`. The
/// assembly `z` axis faces `−n̂` and its lamp axis runs across the rows.
/// Waypoints rejected by `reachable` are dropped.
pub fn generate_scan_trajectory(
    cloud: &SurfaceCloud,
    standoff: f64,
    spacing: f64,
    reachable: &dyn Fn(&Pose) -> bool,
) -> Result<ScanTrajectory, MappingError> {
    if cloud.is_empty() {
        return Err(MappingError::TooFewPoints { needed: 1, got: 0 });
    }
    if !(standoff > 0.0 && spacing > 0.0) {
        return Err(MappingError::InvalidParameter(format!(
            "standoff {standoff}, spacing {spacing}"
        )));
    }
    let positions: Vec<Point3> = cloud.points.iter().map(|p| p.position).collect();
    let centroid = cloud.centroid();
    let mean_normal = cloud
        .points
        .iter()
        .fold(Vec3::zeros(), |a, p| a + p.normal)
        .try_normalize(1e-12)
        .unwrap_or_else(Vec3::z);
    let (e1, e2, _) = plane_basis(&positions, &mean_normal);

    let uv: Vec<[f64; 2]> = positions
        .iter()
        .map(|p| {
            let d = p - centroid;
            [d.dot(&e1), d.dot(&e2)]
        })
        .collect();
    let (mut umin, mut umax, mut vmin, mut vmax) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for [u, v] in &uv {
        umin = umin.min(*u);
        umax = umax.max(*u);
        vmin = vmin.min(*v);
        vmax = vmax.max(*v);
    }
    let (us, du) = grid_lines(umin, umax, spacing);
    let (vs, dv) = grid_lines(vmin, vmax, spacing);
    let capture = 0.5 * (du * du + dv * dv).sqrt() + 1e-9;

    let plane_tree = KdTree::build(uv);
    let surface_tree = cloud.kdtree();

    let mut used = vec![false; cloud.len()];
    let mut segments: Vec<ScanSegment> = Vec::new();
    for (row, v) in vs.iter().enumerate() {
        let cols: Vec<f64> = if row % 2 == 0 {
            us.clone()
        } else {
            us.iter().rev().copied().collect()
        };
        for u in cols {
            let Some(nn) = plane_tree.nearest_one(&[u, *v]) else {
                continue;
            };
            if nn.dist2.sqrt() > capture || used[nn.index] {
                continue;
            }
            used[nn.index] = true;
            let sp = &cloud.points[nn.index];
            let Some(position) = offset_with_clearance(&surface_tree, &sp.position, &sp.normal, standoff)
            else {
                continue;
            };
            let pose = Pose::looking_along(position, &-sp.normal, &e2);
            if !reachable(&pose) {
                continue;
            }
            let arc_length = segments
                .last()
                .map(|s| (position - s.pose.translation()).norm())
                .unwrap_or(0.0);
            segments.push(ScanSegment { pose, arc_length });
        }
    }
    if segments.is_empty() {
        return Err(MappingError::NoReachablePoses);
    }
    Ok(ScanTrajectory { segments, standoff })
}

/// In-plane axes (major, minor) and plane normal, the normal oriented along
/// `mean_normal`. Falls back to `mean_normal` when the points are not spread
/// over a plane.
fn plane_basis(points: &[Point3], mean_normal: &Vec3) -> (Vec3, Vec3, Vec3) {
    let normal = if points.len() >= 3 {
        let (vals, vecs) = principal_axes(points);
        if vals[1] > 1e-12 {
            let n = vecs[2];
            if n.dot(mean_normal) < 0.0 {
                -n
            } else {
                n
            }
        } else {
            *mean_normal
        }
    } else {
        *mean_normal
    };
    let major = if points.len() >= 2 {
        let (_, vecs) = principal_axes(points);
        let m = vecs[0] - normal * vecs[0].dot(&normal);
        m.try_normalize(1e-9).unwrap_or_else(|| any_perpendicular(&normal))
    } else {
        any_perpendicular(&normal)
    };
    let minor = normal.cross(&major);
    (major, minor, normal)
}

/// Evenly spaced sample lines over `[lo, hi]`, at most `spacing` apart and
/// centred in their cells. Returns the lines and the actual step.
fn grid_lines(lo: f64, hi: f64, spacing: f64) -> (Vec<f64>, f64) {
    let extent = hi - lo;
    if extent <= 1e-12 {
        return (vec![lo], 0.0);
    }
    let n = (extent / spacing).ceil().max(1.0) as usize;
    let step = extent / n as f64;
    ((0..n).map(|i| lo + (i as f64 + 0.5) * step).collect(), step)
}

fn clearance(tree: &KdTree<3>, p: &Point3) -> f64 {
    tree.nearest_one(&[p.x, p.y, p.z])
        .map(|n| n.dist2.sqrt())
        .unwrap_or(f64::INFINITY)
}

/// `origin + s·n` with the smallest `s ≥ standoff` whose clearance to the
/// cloud reaches `standoff`. `None` if no such `s ≤ 3·standoff` exists.
fn offset_with_clearance(tree: &KdTree<3>, origin: &Point3, n: &Vec3, standoff: f64) -> Option<Point3> {
    let at = |s: f64| origin + n * s;
    let target = standoff - 1e-9;
    if clearance(tree, &at(standoff)) >= target {
        return Some(at(standoff));
    }
    let (mut lo, mut hi) = (standoff, 3.0 * standoff);
    if clearance(tree, &at(hi)) < target {
        return None;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if clearance(tree, &at(mid)) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    Some(at(hi))
}
