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
//! Surface point clouds: extraction from the octree, outlier filtering and
//! normal estimation.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::kdtree::KdTree;
use super::octree::OccupancyOctree;
use super::MappingError;
use crate::geometry::{Aabb, Point3, RiskClass, SurfacePoint, Vec3};

/// Reference used to give estimated normals a consistent sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Viewpoint {
    /// Normals face the sensor: `n̂ · (viewpoint − position) ≥ 0`.
    Sensor(Point3),
    /// Normals face away from a point inside a closed convex object.
    Interior(Point3),
}

impl Viewpoint {
    /// Flips `n` into the preferred hemisphere. Exact ties resolve toward
    /// `+z` (then `+y`, `+x`).
    pub fn orient(&self, position: &Point3, n: Vec3) -> Vec3 {
        let reference = match self {
            Viewpoint::Sensor(v) => v - position,
            Viewpoint::Interior(c) => position - c,
        };
        let d = n.dot(&reference);
        let flip = if d != 0.0 {
            d < 0.0
        } else if n.z != 0.0 {
            n.z < 0.0
        } else if n.y != 0.0 {
            n.y < 0.0
        } else {
            n.x < 0.0
        };
        if flip {
            -n
        } else {
            n
        }
    }

    pub fn point(&self) -> Point3 {
        match self {
            Viewpoint::Sensor(p) | Viewpoint::Interior(p) => *p,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurfaceCloud {
    pub points: Vec<SurfacePoint>,
    pub source_label: String,
    pub viewpoint: Viewpoint,
}

impl SurfaceCloud {
    pub fn new(points: Vec<SurfacePoint>, source_label: impl Into<String>, viewpoint: Viewpoint) -> Self {
        Self {
            points,
            source_label: source_label.into(),
            viewpoint,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<[f64; 3]> {
        self.points
            .iter()
            .map(|p| [p.position.x, p.position.y, p.position.z])
            .collect()
    }

    pub fn kdtree(&self) -> KdTree<3> {
        KdTree::build(self.positions())
    }

    pub fn centroid(&self) -> Point3 {
        let sum = self
            .points
            .iter()
            .fold(Vec3::zeros(), |acc, p| acc + p.position.coords);
        Point3::from(sum / self.points.len().max(1) as f64)
    }
}

/// Parameters for [`extract_surface_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurfaceParams {
    /// Neighbours used by the statistical outlier filter.
    pub k_filter: usize,
    /// Points whose mean neighbour distance exceeds `mean + alpha·stddev`
    /// are removed.
    pub alpha: f64,
    /// Points with mean neighbour distance at or below this many leaf sizes
    /// are always kept.
    pub keep_within_leaves: f64,
}

impl Default for SurfaceParams {
    fn default() -> Self {
        Self {
            k_filter: 8,
            alpha: 1.0,
            keep_within_leaves: 2.5,
        }
    }
}

/// Occupied leaf centers inside `region` as a filtered surface cloud.
pub fn extract_surface(
    tree: &OccupancyOctree,
    region: &Aabb,
    viewpoint: Viewpoint,
    risk: RiskClass,
) -> Result<SurfaceCloud, MappingError> {
    extract_surface_with(tree, region, viewpoint, risk, &SurfaceParams::default())
}

pub fn extract_surface_with(
    tree: &OccupancyOctree,
    region: &Aabb,
    viewpoint: Viewpoint,
    risk: RiskClass,
    params: &SurfaceParams,
) -> Result<SurfaceCloud, MappingError> {
    let centers: Vec<Point3> = tree
        .occupied_in(region)
        .into_iter()
        .map(|k| tree.leaf_center(k))
        .collect();
    if centers.is_empty() {
        return Err(MappingError::EmptyRegion);
    }
    let centers = voxel_downsample(&centers, tree.resolution());
    let keep_floor = params.keep_within_leaves * tree.resolution();
    let kept = statistical_outlier_filter(&centers, params.k_filter, params.alpha, keep_floor);
    let points = kept
        .into_iter()
        .map(|p| SurfacePoint::new(p, viewpoint.orient(&p, Vec3::z()), risk))
        .collect();
    Ok(SurfaceCloud::new(points, String::new(), viewpoint))
}

/// One point per voxel of side `voxel`: the first point that falls into each
/// voxel, in voxel-index order.
pub fn voxel_downsample(points: &[Point3], voxel: f64) -> Vec<Point3> {
    let mut cells: BTreeMap<[i64; 3], Point3> = BTreeMap::new();
    for p in points {
        let key = voxel_index(p, voxel);
        cells.entry(key).or_insert(*p);
    }
    cells.into_values().collect()
}

pub fn voxel_index(p: &Point3, voxel: f64) -> [i64; 3] {
    [
        (p.x / voxel).floor() as i64,
        (p.y / voxel).floor() as i64,
        (p.z / voxel).floor() as i64,
    ]
}

/// Mean distance from each point to its `k` nearest other points.
pub fn mean_neighbor_distances(points: &[Point3], k: usize) -> Vec<f64> {
    let tree = KdTree::build(points.iter().map(|p| [p.x, p.y, p.z]).collect());
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let nn = tree.nearest(&[p.x, p.y, p.z], k + 1);
            let others: Vec<f64> = nn
                .iter()
                .filter(|n| n.index != i)
                .take(k)
                .map(|n| n.dist2.sqrt())
                .collect();
            if others.is_empty() {
                0.0
            } else {
                others.iter().sum::<f64>() / others.len() as f64
            }
        })
        .collect()
}

/// Removes points whose mean `k`-NN distance exceeds `mean + alpha·stddev`
/// of the population, unless that distance is at most `keep_floor`.
pub fn statistical_outlier_filter(
    points: &[Point3],
    k: usize,
    alpha: f64,
    keep_floor: f64,
) -> Vec<Point3> {
    if points.len() <= k || k == 0 {
        return points.to_vec();
    }
    let d = mean_neighbor_distances(points, k);
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let limit = mean + alpha * var.sqrt();
    points
        .iter()
        .zip(&d)
        .filter(|(_, &di)| di <= limit || di <= keep_floor)
        .map(|(p, _)| *p)
        .collect()
}

/// Unit normal of the best-fit plane through `pts` (eigenvector of the
/// smallest covariance eigenvalue), unoriented.
pub fn plane_normal(pts: &[Point3]) -> Vec3 {
    let (_, basis) = principal_axes(pts);
    basis[2]
}

/// Covariance eigenvalues and eigenvectors sorted by decreasing eigenvalue.
pub fn principal_axes(pts: &[Point3]) -> ([f64; 3], [Vec3; 3]) {
    let weighted: Vec<(Point3, f64)> = pts.iter().map(|p| (*p, 1.0)).collect();
    weighted_axes(&weighted)
}

/// [`principal_axes`] of a weighted point set.
pub fn weighted_axes(pts: &[(Point3, f64)]) -> ([f64; 3], [Vec3; 3]) {
    let total: f64 = pts.iter().map(|(_, w)| w).sum();
    let total = if total > 0.0 { total } else { 1.0 };
    let mean = pts.iter().fold(Vec3::zeros(), |a, (p, w)| a + p.coords * *w) / total;
    let mut cov = Matrix3::zeros();
    for (p, w) in pts {
        let d = p.coords - mean;
        cov += d * d.transpose() * *w;
    }
    cov /= total;
    let eig = SymmetricEigen::new(cov);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = idx.map(|i| eig.eigenvalues[i]);
    let vecs = idx.map(|i| eig.eigenvectors.column(i).into_owned().normalize());
    (vals, vecs)
}

/// Per-point PCA normals from each point and its `k` nearest neighbours,
/// oriented by the cloud's viewpoint.
///
/// Neighbours are weighted by `exp(−(d/σ)²)` with `σ` half the distance to
/// the farthest one, which keeps a lopsided neighbourhood from tilting the
/// fit on curved surfaces. Planar neighbourhoods are unaffected.
pub fn estimate_normals(cloud: &SurfaceCloud, k: usize) -> Result<SurfaceCloud, MappingError> {
    if k < 2 || cloud.len() < k + 1 {
        return Err(MappingError::TooFewPoints {
            needed: k.max(2) + 1,
            got: cloud.len(),
        });
    }
    let tree = cloud.kdtree();
    let points = cloud
        .points
        .iter()
        .map(|sp| {
            let q = [sp.position.x, sp.position.y, sp.position.z];
            let nbrs = tree.nearest(&q, k + 1);
            let sigma = 0.5 * nbrs.iter().map(|n| n.dist2).fold(0.0, f64::max).sqrt();
            let weighted: Vec<(Point3, f64)> = nbrs
                .iter()
                .map(|n| {
                    let w = if sigma > 0.0 { (-n.dist2 / (sigma * sigma)).exp() } else { 1.0 };
                    (cloud.points[n.index].position, w)
                })
                .collect();
            let n = cloud.viewpoint.orient(&sp.position, weighted_axes(&weighted).1[2]);
            SurfacePoint::new(sp.position, n, sp.risk).with_dose(sp.dose())
        })
        .collect();
    Ok(SurfaceCloud {
        points,
        source_label: cloud.source_label.clone(),
        viewpoint: cloud.viewpoint,
    })
}

/// Splits a cloud by the dominant axis direction of each normal (±x, ±y,
/// ±z), giving roughly planar facets for box-like objects. Empty groups are
/// dropped; order is +x, −x, +y, −y, +z, −z.
pub fn split_by_axis(cloud: &SurfaceCloud) -> Vec<SurfaceCloud> {
    let mut groups: [Vec<SurfacePoint>; 6] = Default::default();
    for p in &cloud.points {
        let n = p.normal;
        let axis = (0..3)
            .max_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()).then(b.cmp(&a)))
            .unwrap();
        let slot = axis * 2 + usize::from(n[axis] < 0.0);
        groups[slot].push(p.clone());
    }
    groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|g| SurfaceCloud::new(g, cloud.source_label.clone(), cloud.viewpoint))
        .collect()
}
