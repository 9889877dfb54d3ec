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
//! Probabilistic occupancy octree with clamped log-odds updates.
//!
//! The tree covers a cube of side `resolution · 2^max_depth` anchored at its
//! minimum corner. Leaves live at `max_depth`; inner nodes carry the maximum
//! log-odds of their known children so region queries can prune early.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::MappingError;
use crate::geometry::{Aabb, Point3, Vec3};

const MAX_DEPTH: u8 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogOddsParams {
    pub hit: f64,
    pub miss: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for LogOddsParams {
    fn default() -> Self {
        Self {
            hit: 0.85,
            miss: -0.4,
            min: -2.0,
            max: 3.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafKey(pub [u32; 3]);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occupancy {
    Unknown,
    Free,
    Occupied,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    /// Index of the first of eight contiguous children, 0 when none.
    children: u32,
    log_odds: f64,
    known: bool,
}

impl Node {
    const EMPTY: Node = Node {
        children: 0,
        log_odds: 0.0,
        known: false,
    };
}

#[derive(Clone, Debug)]
pub struct OccupancyOctree {
    origin: Point3,
    resolution: f64,
    max_depth: u8,
    params: LogOddsParams,
    nodes: Vec<Node>,
}

/// Log-odds to probability.
pub fn probability(log_odds: f64) -> f64 {
    1.0 - 1.0 / (1.0 + log_odds.exp())
}

impl OccupancyOctree {
    /// A tree whose cube, anchored at `origin`, spans at least `extent` meters
    /// per axis with leaves of side `resolution`.
    pub fn new(origin: Point3, extent: f64, resolution: f64) -> Result<Self, MappingError> {
        Self::with_params(origin, extent, resolution, LogOddsParams::default())
    }

    pub fn with_params(
        origin: Point3,
        extent: f64,
        resolution: f64,
        params: LogOddsParams,
    ) -> Result<Self, MappingError> {
        if !(resolution > 0.0 && extent > 0.0) {
            return Err(MappingError::InvalidParameter(format!(
                "resolution {resolution}, extent {extent}"
            )));
        }
        let mut depth = 0u8;
        while resolution * f64::from(1u32 << depth) < extent {
            depth += 1;
            if depth > MAX_DEPTH {
                return Err(MappingError::InvalidParameter(format!(
                    "extent {extent} needs more than {MAX_DEPTH} levels at {resolution} m"
                )));
            }
        }
        Ok(Self {
            origin,
            resolution,
            max_depth: depth,
            params,
            nodes: vec![Node::EMPTY],
        })
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn max_depth(&self) -> u8 {
        self.max_depth
    }

    pub fn params(&self) -> &LogOddsParams {
        &self.params
    }

    pub fn side(&self) -> f64 {
        self.resolution * f64::from(self.cells_per_axis())
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::new(self.origin, self.origin + Vec3::repeat(self.side()))
    }

    fn cells_per_axis(&self) -> u32 {
        1u32 << self.max_depth
    }

    pub fn key_of(&self, p: &Point3) -> Result<LeafKey, MappingError> {
        let n = self.cells_per_axis();
        let mut k = [0u32; 3];
        for i in 0..3 {
            let g = ((p[i] - self.origin[i]) / self.resolution).floor();
            if !(g >= 0.0 && g < f64::from(n)) {
                return Err(MappingError::OutOfBounds(*p));
            }
            k[i] = g as u32;
        }
        Ok(LeafKey(k))
    }

    pub fn leaf_center(&self, key: LeafKey) -> Point3 {
        Point3::new(
            self.origin.x + (f64::from(key.0[0]) + 0.5) * self.resolution,
            self.origin.y + (f64::from(key.0[1]) + 0.5) * self.resolution,
            self.origin.z + (f64::from(key.0[2]) + 0.5) * self.resolution,
        )
    }

    pub fn leaf_bounds(&self, key: LeafKey) -> Aabb {
        let c = self.leaf_center(key);
        Aabb::new(c, c).expanded(0.5 * self.resolution)
    }

    fn child_slot(&self, key: LeafKey, level: u8) -> usize {
        let bit = self.max_depth - 1 - level;
        let [x, y, z] = key.0;
        (((x >> bit) & 1) | (((y >> bit) & 1) << 1) | (((z >> bit) & 1) << 2)) as usize
    }

    /// Log-odds of the leaf at `key`, `None` when never observed.
    pub fn log_odds(&self, key: LeafKey) -> Option<f64> {
        let mut node = 0usize;
        for level in 0..self.max_depth {
            let first = self.nodes[node].children;
            if first == 0 {
                return None;
            }
            node = first as usize + self.child_slot(key, level);
        }
        let n = &self.nodes[node];
        n.known.then_some(n.log_odds)
    }

    pub fn log_odds_at(&self, p: &Point3) -> Result<Option<f64>, MappingError> {
        Ok(self.log_odds(self.key_of(p)?))
    }

    pub fn occupancy(&self, p: &Point3) -> Result<Occupancy, MappingError> {
        Ok(match self.log_odds_at(p)? {
            None => Occupancy::Unknown,
            Some(l) if l > 0.0 => Occupancy::Occupied,
            Some(_) => Occupancy::Free,
        })
    }

    /// Adds `delta` to a leaf, clamping to the configured range.
    pub fn update_leaf(&mut self, key: LeafKey, delta: f64) {
        let mut path = Vec::with_capacity(self.max_depth as usize + 1);
        let mut node = 0usize;
        path.push(node);
        for level in 0..self.max_depth {
            if self.nodes[node].children == 0 {
                let first = self.nodes.len() as u32;
                self.nodes.extend_from_slice(&[Node::EMPTY; 8]);
                self.nodes[node].children = first;
            }
            node = self.nodes[node].children as usize + self.child_slot(key, level);
            path.push(node);
        }
        let leaf = &mut self.nodes[node];
        let base = if leaf.known { leaf.log_odds } else { 0.0 };
        leaf.log_odds = (base + delta).clamp(self.params.min, self.params.max);
        leaf.known = true;
        for &inner in path.iter().rev().skip(1) {
            let first = self.nodes[inner].children as usize;
            let max = self.nodes[first..first + 8]
                .iter()
                .filter(|c| c.known)
                .map(|c| c.log_odds)
                .fold(f64::NEG_INFINITY, f64::max);
            self.nodes[inner].log_odds = max;
            self.nodes[inner].known = true;
        }
    }

    /// Leaves visited by the segment `from → to`, in order, both ends
    /// included. Both points must be inside the map.
    pub fn traverse(&self, from: &Point3, to: &Point3) -> Result<Vec<LeafKey>, MappingError> {
        let start = self.key_of(from)?;
        let end = self.key_of(to)?;
        let mut cur = start.0.map(i64::from);
        let target = end.0.map(i64::from);
        let d = to - from;
        let mut step = [0i64; 3];
        let mut t_max = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        for i in 0..3 {
            if d[i] > 0.0 {
                step[i] = 1;
                let boundary = self.origin[i] + (cur[i] + 1) as f64 * self.resolution;
                t_max[i] = (boundary - from[i]) / d[i];
                t_delta[i] = self.resolution / d[i];
            } else if d[i] < 0.0 {
                step[i] = -1;
                let boundary = self.origin[i] + cur[i] as f64 * self.resolution;
                t_max[i] = (boundary - from[i]) / d[i];
                t_delta[i] = -self.resolution / d[i];
            }
        }
        let limit: i64 = (0..3).map(|i| (target[i] - cur[i]).abs()).sum::<i64>() + 1;
        let mut out = vec![start];
        let n = i64::from(self.cells_per_axis());
        for _ in 0..limit {
            if cur == target {
                break;
            }
            let axis = (0..3)
                .min_by(|&a, &b| t_max[a].total_cmp(&t_max[b]))
                .unwrap();
            if t_max[axis] > 1.0 {
                break;
            }
            cur[axis] += step[axis];
            if cur[axis] < 0 || cur[axis] >= n {
                break;
            }
            t_max[axis] += t_delta[axis];
            out.push(LeafKey([cur[0] as u32, cur[1] as u32, cur[2] as u32]));
        }
        Ok(out)
    }

    /// Integrates one sensor scan. Leaves that end a ray gain `hit`; leaves
    /// crossed by any ray lose `|miss|`, except those that are also hit in
    /// this scan. Each leaf is updated at most once per scan.
    pub fn integrate_scan(&mut self, origin: &Point3, hits: &[Point3]) -> Result<(), MappingError> {
        self.key_of(origin)?;
        let rays: Vec<(Point3, Point3)> = hits.iter().map(|h| (*origin, *h)).collect();
        self.integrate_rays(&rays)
    }

    /// Like [`integrate_scan`](Self::integrate_scan) for a batch of rays that
    /// need not share an origin, e.g. several registered sensor poses.
    pub fn integrate_rays(&mut self, rays: &[(Point3, Point3)]) -> Result<(), MappingError> {
        for (o, h) in rays {
            self.key_of(o)?;
            self.key_of(h)?;
        }
        let mut occupied = BTreeSet::new();
        let mut free = BTreeSet::new();
        for (origin, h) in rays {
            let keys = self.traverse(origin, h)?;
            let hit_key = self.key_of(h)?;
            occupied.insert(hit_key);
            for k in keys {
                if k != hit_key {
                    free.insert(k);
                }
            }
        }
        let (miss, hit) = (self.params.miss, self.params.hit);
        for k in free.difference(&occupied).copied().collect::<Vec<_>>() {
            self.update_leaf(k, miss);
        }
        for k in occupied {
            self.update_leaf(k, hit);
        }
        Ok(())
    }

    /// All observed leaves with their log-odds, in key order.
    pub fn leaves(&self) -> Vec<(LeafKey, f64)> {
        let mut out = Vec::new();
        self.collect(0, 0, [0; 3], None, false, &mut out);
        out.sort_by_key(|(k, _)| *k);
        out
    }

    /// Occupied leaves (probability > 0.5) whose centers fall inside `region`,
    /// in key order.
    pub fn occupied_in(&self, region: &Aabb) -> Vec<LeafKey> {
        let mut out = Vec::new();
        self.collect(0, 0, [0; 3], Some(region), true, &mut out);
        let mut keys: Vec<LeafKey> = out
            .into_iter()
            .map(|(k, _)| k)
            .filter(|k| region.contains(&self.leaf_center(*k)))
            .collect();
        keys.sort();
        keys
    }

    pub fn occupied_leaves(&self) -> Vec<LeafKey> {
        self.leaves()
            .into_iter()
            .filter(|(_, l)| *l > 0.0)
            .map(|(k, _)| k)
            .collect()
    }

    fn collect(
        &self,
        node: usize,
        level: u8,
        base: [u32; 3],
        region: Option<&Aabb>,
        occupied_only: bool,
        out: &mut Vec<(LeafKey, f64)>,
    ) {
        let n = &self.nodes[node];
        if !n.known || (occupied_only && n.log_odds <= 0.0) {
            return;
        }
        let span = 1u32 << (self.max_depth - level);
        if let Some(r) = region {
            let lo = self.origin + Vec3::new(base[0] as f64, base[1] as f64, base[2] as f64) * self.resolution;
            let hi = lo + Vec3::repeat(f64::from(span) * self.resolution);
            if !Aabb::new(lo, hi).intersects(r) {
                return;
            }
        }
        if level == self.max_depth {
            out.push((LeafKey(base), n.log_odds));
            return;
        }
        let half = span / 2;
        let first = n.children as usize;
        for slot in 0..8u32 {
            let child_base = [
                base[0] + (slot & 1) * half,
                base[1] + ((slot >> 1) & 1) * half,
                base[2] + ((slot >> 2) & 1) * half,
            ];
            self.collect(first + slot as usize, level + 1, child_base, region, occupied_only, out);
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.nodes[0].known
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree() -> OccupancyOctree {
        OccupancyOctree::new(Point3::origin(), 1.0, 0.1).unwrap()
    }

    #[test]
    fn depth_covers_extent() {
        let t = tree();
        assert_eq!(t.max_depth(), 4);
        assert!(t.side() >= 1.0);
    }

    #[test]
    fn single_hit_marks_one_leaf() {
        let mut t = tree();
        let hit = Point3::new(0.55, 0.55, 0.55);
        t.integrate_scan(&hit, &[hit]).unwrap();
        let leaves = t.leaves();
        assert_eq!(leaves.len(), 1);
        assert!((leaves[0].1 - 0.85).abs() < 1e-12);
        assert_eq!(t.occupancy(&hit).unwrap(), Occupancy::Occupied);
        assert_eq!(
            t.occupancy(&Point3::new(0.05, 0.05, 0.05)).unwrap(),
            Occupancy::Unknown
        );
    }

    #[test]
    fn repeated_hits_clamp() {
        for k in 1..8 {
            let mut t = tree();
            let hit = Point3::new(0.21, 0.33, 0.72);
            for _ in 0..k {
                t.integrate_scan(&hit, &[hit]).unwrap();
            }
            let l = t.log_odds_at(&hit).unwrap().unwrap();
            assert!((l - (k as f64 * 0.85).min(3.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_bounds_rejected() {
        let mut t = tree();
        let err = t.integrate_scan(&Point3::origin(), &[Point3::new(5.0, 0.0, 0.0)]);
        assert!(matches!(err, Err(MappingError::OutOfBounds(_))));
        assert!(t.is_empty());
    }

    #[test]
    fn child_extent_halves() {
        let t = tree();
        let k = t.key_of(&Point3::new(0.95, 0.05, 0.35)).unwrap();
        assert_eq!(k, LeafKey([9, 0, 3]));
        let b = t.leaf_bounds(k);
        assert!((b.size() - Vec3::repeat(0.1)).norm() < 1e-12);
    }
}
