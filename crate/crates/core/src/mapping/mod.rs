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
//! Surface reconstruction: occupancy octree, point-cloud extraction,
//! normal estimation and standoff trajectory generation.

pub mod cloud;
pub mod kdtree;
pub mod octree;
pub mod ply;
pub mod trajectory;

use thiserror::Error;

use crate::geometry::Point3;

pub use cloud::{
    estimate_normals, extract_surface, extract_surface_with, split_by_axis, SurfaceCloud,
    SurfaceParams, Viewpoint,
};
pub use octree::{LogOddsParams, Occupancy, OccupancyOctree};
pub use trajectory::{generate_scan_trajectory, ReachBox, ScanSegment, ScanTrajectory};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MappingError {
    #[error("point {0} lies outside the map")]
    OutOfBounds(Point3),
    #[error("no occupied leaves in the requested region")]
    EmptyRegion,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("reachability predicate rejected every waypoint")]
    NoReachablePoses,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("PLY: {0}")]
    Ply(String),
}
