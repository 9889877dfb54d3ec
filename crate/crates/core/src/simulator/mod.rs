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
//! Scene description, virtual scanning and mission simulation.
//!
//! Scenes are rooms of axis-aligned primitives. A mission scans the room,
//! builds surface clouds, plans the chassis tour and arm sweeps, and then
//! accumulates dose under one of three policies.

mod mission;
mod raycast;
mod report;
mod scan;
mod scene;
mod shape;

use thiserror::Error;

use crate::geometry::Point3;
use crate::irradiance::IrradianceError;
use crate::mapping::MappingError;
use crate::optimizer::OptimizeError;
use crate::planner::PlannerError;

pub use mission::{run_mission, MissionContext, MissionOutcome, ObjectSurface, PlannedSite, Policy};
pub use raycast::{first_hit, in_free_space, ray_occluded};
pub use report::{
    evaluate_probes, format_mmss, format_table, read_probes, savings_pct, Comparison, Coverage, DoseSummary,
    MissionReport, ProbeReading, SiteSummary,
};
pub use scan::synthesize_scan;
pub use scene::{
    ArmConfig, ChassisConfig, MappingConfig, Obstacle, Probe, Scene, SceneObject, StationConfig, Thresholds,
    PROBE_SURFACE_TOLERANCE,
};
pub use shape::{Facing, Shape};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scene: {0}")]
    Scene(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("mapping object {object}: {source}")]
    Mapping { object: String, source: MappingError },
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error("object {object}: surface point {point_index} at {position:?} cannot reach its dose target")]
    UnreachablePoint {
        object: String,
        point_index: usize,
        position: Point3,
    },
    #[error("dwell optimisation for {object}: {source}")]
    Optimize { object: String, source: OptimizeError },
    #[error("probe {0} is not on its object's surface")]
    OrphanProbe(String),
    #[error("start position is not a free chassis cell")]
    StartBlocked,
    #[error("station {0} is not a free chassis cell")]
    StationBlocked(usize),
    #[error(transparent)]
    Irradiance(#[from] IrradianceError),
}
