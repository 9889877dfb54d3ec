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
//! UV-C dose planning for mobile manipulators.
//!
//! The crate models the irradiance of a three-tube UV-C lamp assembly,
//! optimizes how long the arm dwells at each pose of a standoff sweep so
//! that every surface point reaches its dose target in minimum time, and
//! simulates whole-room missions that compare risk-differentiated dosing
//! against uniform dosing and a stationary tower.
//!
//! Modules follow the pipeline order:
//!
//! - [`geometry`]: frames, poses and surface points
//! - [`irradiance`]: line-source irradiance and dose accumulation
//! - [`mapping`]: occupancy octree, surface clouds, normals, sweeps
//! - [`lp`]: interior-point LP solver and a vertex-enumeration oracle
//! - [`optimizer`]: dose matrices and dwell-time optimization
//! - [`planner`]: risk labels, grid maps, A*, visit ordering
//! - [`simulator`]: scenes, missions and coverage metrics
//! - [`cli`]: the `uvdose` command-line front end

pub mod geometry;
pub mod irradiance;
pub mod mapping;
pub mod lp;
pub mod optimizer;
pub mod planner;
pub mod simulator;
pub mod cli;
