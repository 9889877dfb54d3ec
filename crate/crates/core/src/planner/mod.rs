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
//! Mission planning: risk classes for labelled objects, stop points on the
//! chassis grid, visit order and A* chassis paths.

pub mod astar;
pub mod grid;
pub mod registry;
pub mod sites;
pub mod tour;

pub use astar::{astar, octile, GridPath, StepCount};
pub use grid::{Cell, CellState, GridMap, MapMetadata};
pub use registry::{normalize_label, RiskRegistry, DEFAULT_HOTSPOT_LABELS};
pub use sites::{mark_all, mark_hotspots, Detection, HotspotSite, StopPointParams};
pub use tour::{order_sites, path_length};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mapping::ScanTrajectory;
use crate::optimizer::SpeedProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlannerError {
    #[error("no path from {from:?} to {to:?}")]
    NoPath { from: Cell, to: Cell },
    #[error("cell {0:?} is not free")]
    BlockedCell(Cell),
    #[error("cell {0:?} is outside the grid")]
    OutOfGrid(Cell),
    #[error("object {0} lies outside the grid")]
    OutsideGrid(String),
    #[error("no free stop point for object {0}")]
    NoFreeStopPoint(String),
    #[error("site {0} cannot be reached by the chassis")]
    UnreachableSite(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("risk registry: {0}")]
    Registry(String),
    #[error("{0}")]
    Io(String),
}

/// One stop of a mission: how the chassis gets there and what the arm does.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteVisit {
    pub site: HotspotSite,
    /// From the previous stop point (or the start).
    pub approach: GridPath,
    pub trajectory: ScanTrajectory,
    pub profile: SpeedProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionPlan {
    pub start: Cell,
    pub visits: Vec<SiteVisit>,
}

impl MissionPlan {
    pub fn travel_m(&self, grid: &GridMap) -> f64 {
        self.visits.iter().map(|v| v.approach.length_m(grid)).sum()
    }

    pub fn dwell_s(&self) -> f64 {
        self.visits.iter().map(|v| v.profile.total_time).sum()
    }
}
