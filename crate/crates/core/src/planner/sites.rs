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
//! Objects on the grid map and the chassis stop points that serve them.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::grid::{Cell, GridMap};
use super::registry::RiskRegistry;
use super::PlannerError;
use crate::geometry::{Aabb, RiskClass};

/// A labelled object with its world-frame bounding box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub id: String,
    pub label: String,
    pub footprint: Aabb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HotspotSite {
    pub object_id: String,
    pub label: String,
    pub risk: RiskClass,
    pub footprint: Vec<Cell>,
    pub stop_point: Cell,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopPointParams {
    /// Initial ring radius around the footprint centroid, m.
    pub ring_radius: f64,
    pub bearings: usize,
    /// The ring grows one grid cell at a time up to this radius, m.
    pub max_radius: f64,
}

impl Default for StopPointParams {
    fn default() -> Self {
        Self {
            ring_radius: 0.6,
            bearings: 16,
            max_radius: 3.0,
        }
    }
}

/// Sites for every hotspot-classified detection.
pub fn mark_hotspots(
    grid: &GridMap,
    registry: &RiskRegistry,
    detections: &[Detection],
    params: &StopPointParams,
) -> Result<Vec<HotspotSite>, PlannerError> {
    detections
        .iter()
        .filter(|d| registry.classify(&d.label) == RiskClass::Hotspot)
        .map(|d| site_for(grid, d, RiskClass::Hotspot, params))
        .collect()
}

/// Sites for all detections regardless of class.
pub fn mark_all(
    grid: &GridMap,
    registry: &RiskRegistry,
    detections: &[Detection],
    params: &StopPointParams,
) -> Result<Vec<HotspotSite>, PlannerError> {
    detections
        .iter()
        .map(|d| site_for(grid, d, registry.classify(&d.label), params))
        .collect()
}

fn site_for(
    grid: &GridMap,
    det: &Detection,
    risk: RiskClass,
    params: &StopPointParams,
) -> Result<HotspotSite, PlannerError> {
    let footprint = grid.cells_in(&det.footprint);
    if footprint.is_empty() {
        return Err(PlannerError::OutsideGrid(det.id.clone()));
    }
    let stop_point = stop_point(grid, &det.footprint, &footprint, params)
        .ok_or_else(|| PlannerError::NoFreeStopPoint(det.id.clone()))?;
    Ok(HotspotSite {
        object_id: det.id.clone(),
        label: det.label.clone(),
        risk,
        footprint,
        stop_point,
    })
}

/// Free cell on the smallest ring around the footprint centroid that has
/// one; among a ring's candidates the one closest to the footprint wins,
/// then the smallest bearing index.
pub fn stop_point(grid: &GridMap, region: &Aabb, footprint: &[Cell], params: &StopPointParams) -> Option<Cell> {
    let c = region.center();
    let flat = Aabb::new(
        crate::geometry::Point3::new(region.min.x, region.min.y, 0.0),
        crate::geometry::Point3::new(region.max.x, region.max.y, 0.0),
    );
    let n = params.bearings.max(1);
    let mut r = params.ring_radius;
    while r <= params.max_radius + 1e-12 {
        let mut best: Option<(f64, usize, Cell)> = None;
        for k in 0..n {
            let theta = TAU * k as f64 / n as f64;
            let Some(cell) = grid.cell_of(c.x + r * theta.cos(), c.y + r * theta.sin()) else {
                continue;
            };
            if !grid.is_free(cell) || footprint.contains(&cell) {
                continue;
            }
            let mut centre = grid.cell_center(cell);
            centre.z = 0.0;
            let d = flat.distance_to(&centre);
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, k, cell));
            }
        }
        if let Some((_, _, cell)) = best {
            return Some(cell);
        }
        r += grid.resolution();
    }
    None
}
