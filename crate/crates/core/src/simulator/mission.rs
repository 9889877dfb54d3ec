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
//! End-to-end missions.
//!
//! [`MissionContext::build`] runs everything that does not depend on the
//! dose policy: the virtual scan, per-object surface clouds, stop points,
//! visit order, chassis paths, sweeps and dose matrices. Each policy then
//! only solves dwell times (or places the tower) and accumulates dose.

use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::raycast::{in_free_space, ray_occluded};
use super::report::{read_probes, evaluate_probes, DoseSummary, MissionReport, SiteSummary, Comparison};
use super::scan::synthesize_scan;
use super::scene::{Scene, PROBE_SURFACE_TOLERANCE};
use super::SimError;
use crate::geometry::{Point3, Pose, RiskClass, SurfacePoint, Vec3};
use crate::irradiance::{accumulate_dose, LampAssembly};
use crate::mapping::{
    estimate_normals, extract_surface, generate_scan_trajectory, split_by_axis, MappingError, OccupancyOctree,
    ReachBox, ScanTrajectory, SurfaceCloud,
};
use crate::optimizer::{build_dose_matrix, optimize_dwell, DoseMatrix, DoseTargets, DwellParams, OptimizeError, SpeedProfile};
use crate::planner::{
    astar, mark_all, order_sites, Cell, CellState, Detection, GridMap, GridPath, HotspotSite, MissionPlan,
    PlannerError, SiteVisit,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Policy {
    /// Per-class dose targets.
    #[serde(rename = "diff")]
    Differentiated,
    /// Every point held to the hotspot target.
    #[serde(rename = "uniform")]
    UniformHigh,
    /// Stationary tower lamp with occlusion.
    #[serde(rename = "station")]
    FixedStation,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Differentiated, Policy::UniformHigh, Policy::FixedStation];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Differentiated => "diff",
            Policy::UniformHigh => "uniform",
            Policy::FixedStation => "station",
        }
    }
}

impl FromStr for Policy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown policy {s:?} (expected diff, uniform or station)"))
    }
}

/// Surface points of one object: `points[range]` of the context.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectSurface {
    pub object_id: String,
    pub label: String,
    pub risk: RiskClass,
    pub range: Range<usize>,
}

#[derive(Clone, Debug)]
pub struct PlannedSite {
    pub site: HotspotSite,
    /// Index into [`MissionContext::objects`].
    pub object: usize,
    pub approach: GridPath,
    pub trajectory: ScanTrajectory,
    pub dose: DoseMatrix,
}

#[derive(Clone, Debug)]
pub struct MissionContext {
    pub scene: Scene,
    pub occupied_leaves: usize,
    /// All objects' surface points, dose zero.
    pub points: Vec<SurfacePoint>,
    pub objects: Vec<ObjectSurface>,
    /// Inflated chassis grid.
    pub grid: GridMap,
    pub start: Cell,
    /// In visit order.
    pub visits: Vec<PlannedSite>,
    pub assembly: LampAssembly,
}

/// A simulated mission: metrics, the plan (arm policies) and final doses.
#[derive(Clone, Debug)]
pub struct MissionOutcome {
    pub report: MissionReport,
    pub plan: Option<MissionPlan>,
    pub points: Vec<SurfacePoint>,
}

impl MissionContext {
    pub fn build(scene: &Scene) -> Result<Self, SimError> {
        scene.validate()?;
        let tree = synthesize_scan(scene)?;
        let occupied_leaves = tree.occupied_leaves().len();
        let clouds = object_clouds(scene, &tree)?;

        let mut points = Vec::new();
        let mut objects = Vec::new();
        for (obj, cloud) in scene.objects.iter().zip(&clouds) {
            let start = points.len();
            points.extend(cloud.points.iter().cloned());
            objects.push(ObjectSurface {
                object_id: obj.id.clone(),
                label: obj.label.clone(),
                risk: scene.registry().classify(&obj.label),
                range: start..points.len(),
            });
        }

        let grid = chassis_grid(scene)?;
        let start = grid
            .cell_of(scene.start[0], scene.start[1])
            .filter(|c| grid.is_free(*c))
            .ok_or(SimError::StartBlocked)?;

        let detections: Vec<Detection> = scene
            .objects
            .iter()
            .map(|o| Detection {
                id: o.id.clone(),
                label: o.label.clone(),
                footprint: o.shape.aabb(),
            })
            .collect();
        let sites = mark_all(&grid, &scene.registry(), &detections, &scene.stop_points)?;
        let order = order_sites(&grid, &sites, start)?;

        let assembly = LampAssembly::new(&scene.assembly, Pose::identity())
            .map_err(|e| SimError::Scene(format!("assembly: {e}")))?;

        let mut approaches = Vec::with_capacity(order.len());
        let mut prev = start;
        for &i in &order {
            let path = astar(&grid, prev, sites[i].stop_point).map_err(|e| match e {
                PlannerError::NoPath { .. } => PlannerError::UnreachableSite(sites[i].object_id.clone()),
                other => other,
            })?;
            prev = sites[i].stop_point;
            approaches.push(path);
        }

        let visits: Vec<PlannedSite> = order
            .par_iter()
            .zip(approaches)
            .map(|(&i, approach)| {
                let site = sites[i].clone();
                let object = i;
                let surface = &objects[object];
                let trajectory = sweep(scene, &grid, &site, &clouds[object], surface)?;
                let dose = build_dose_matrix(&trajectory, &points[surface.range.clone()], &assembly, None)
                    .map_err(|source| SimError::Optimize {
                        object: surface.object_id.clone(),
                        source,
                    })?;
                Ok(PlannedSite {
                    site,
                    object,
                    approach,
                    trajectory,
                    dose,
                })
            })
            .collect::<Result<_, SimError>>()?;

        Ok(Self {
            scene: scene.clone(),
            occupied_leaves,
            points,
            objects,
            grid,
            start,
            visits,
            assembly,
        })
    }

    pub fn hotspot_fraction(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        let hot = self.points.iter().filter(|p| p.risk == RiskClass::Hotspot).count();
        hot as f64 / self.points.len() as f64
    }

    pub fn run(&self, policy: Policy) -> Result<MissionOutcome, SimError> {
        match policy {
            Policy::Differentiated => self.run_arm(policy, self.scene.targets),
            Policy::UniformHigh => self.run_arm(policy, self.scene.targets.uniform_high()),
            Policy::FixedStation => self.run_station(),
        }
    }

    /// Runs the given policies on the shared context.
    pub fn compare(&self, policies: &[Policy]) -> Result<(Comparison, Vec<MissionOutcome>), SimError> {
        let outcomes: Vec<MissionOutcome> = policies.iter().map(|p| self.run(*p)).collect::<Result<_, _>>()?;
        let comparison = Comparison::new(outcomes.iter().map(|o| o.report.clone()).collect());
        Ok((comparison, outcomes))
    }

    /// Dwell times for every visit under `targets`.
    pub fn solve_dwell(&self, targets: &DoseTargets) -> Result<Vec<SpeedProfile>, SimError> {
        let params = DwellParams {
            seed: self.scene.seed,
            ..self.scene.dwell
        };
        self.visits
            .par_iter()
            .map(|v| {
                let surface = &self.objects[v.object];
                optimize_dwell(&v.dose, &self.points[surface.range.clone()], targets, &params).map_err(|e| match e {
                    OptimizeError::UnreachablePoint(n) => {
                        let index = surface.range.start + n;
                        SimError::UnreachablePoint {
                            object: surface.object_id.clone(),
                            point_index: index,
                            position: self.points[index].position,
                        }
                    }
                    source => SimError::Optimize {
                        object: surface.object_id.clone(),
                        source,
                    },
                })
            })
            .collect()
    }

    /// Every segment pose with its dwell time, in visit order.
    pub fn exposures(&self, profiles: &[SpeedProfile]) -> Vec<(Pose, f64)> {
        self.visits
            .iter()
            .zip(profiles)
            .flat_map(|(v, p)| v.trajectory.segments.iter().zip(&p.segments).map(|(s, sp)| (s.pose, sp.dwell)))
            .collect()
    }

    fn run_arm(&self, policy: Policy, targets: DoseTargets) -> Result<MissionOutcome, SimError> {
        let profiles = self.solve_dwell(&targets)?;
        let exposures = self.exposures(&profiles);
        let mut points = self.points.clone();
        points.par_iter_mut().try_for_each(|pt| {
            for (pose, dt) in &exposures {
                let e = self.assembly.at(*pose).irradiance_at(&pt.position, &pt.normal)?;
                pt.add_dose(accumulate_dose(e, *dt)?);
            }
            Ok::<_, crate::irradiance::IrradianceError>(())
        })?;

        let travel_m: f64 = self.visits.iter().map(|v| v.approach.length_m(&self.grid)).sum();
        let irradiation_s: f64 = profiles.iter().map(|p| p.total_time).sum();
        let sites = self
            .visits
            .iter()
            .zip(&profiles)
            .map(|(v, p)| SiteSummary {
                object_id: v.site.object_id.clone(),
                label: v.site.label.clone(),
                risk: v.site.risk,
                stop_point: v.site.stop_point,
                segments: v.trajectory.len(),
                dwell_s: p.total_time,
            })
            .collect();
        let report = self.report(policy, &points, &targets, travel_m, irradiation_s, sites)?;
        let plan = MissionPlan {
            start: self.start,
            visits: self
                .visits
                .iter()
                .zip(profiles)
                .map(|(v, profile)| SiteVisit {
                    site: v.site.clone(),
                    approach: v.approach.clone(),
                    trajectory: v.trajectory.clone(),
                    profile,
                })
                .collect(),
        };
        Ok(MissionOutcome {
            report,
            plan: Some(plan),
            points,
        })
    }

    /// Tower poses, visited in the listed order.
    pub fn station_poses(&self) -> Result<(Vec<Pose>, f64), SimError> {
        let cfg = &self.scene.station;
        if cfg.positions.is_empty() {
            return Err(SimError::Scene("fixed-station policy needs station positions".into()));
        }
        let mut travel_m = 0.0;
        let mut prev = self.start;
        let mut poses = Vec::new();
        for (i, [x, y]) in cfg.positions.iter().copied().enumerate() {
            let cell = self
                .grid
                .cell_of(x, y)
                .filter(|c| self.grid.is_free(*c))
                .ok_or(SimError::StationBlocked(i))?;
            travel_m += astar(&self.grid, prev, cell)?.length_m(&self.grid);
            prev = cell;
            // Lamp axis vertical.
            poses.push(Pose::looking_along(
                Point3::new(x, y, self.scene.room.min.z + cfg.height),
                &Vec3::x(),
                &Vec3::z(),
            ));
        }
        Ok((poses, travel_m))
    }

    fn run_station(&self) -> Result<MissionOutcome, SimError> {
        let cfg = &self.scene.station;
        let (poses, travel_m) = self.station_poses()?;
        let tower = LampAssembly::new(&cfg.assembly, Pose::identity())
            .map_err(|e| SimError::Scene(format!("station assembly: {e}")))?;
        let lift = self.scene.mapping.resolution;
        let mut points = self.points.clone();
        points.par_iter_mut().try_for_each(|pt| {
            let from = pt.position + pt.normal * lift;
            for pose in &poses {
                if ray_occluded(&self.scene, &from, &pose.translation()) {
                    continue;
                }
                let e = tower.at(*pose).irradiance_at(&pt.position, &pt.normal)?;
                pt.add_dose(accumulate_dose(e, cfg.duration_s)?);
            }
            Ok::<_, crate::irradiance::IrradianceError>(())
        })?;
        let irradiation_s = cfg.duration_s * poses.len() as f64;
        let report = self.report(Policy::FixedStation, &points, &self.scene.targets, travel_m, irradiation_s, Vec::new())?;
        Ok(MissionOutcome {
            report,
            plan: None,
            points,
        })
    }

    fn report(
        &self,
        policy: Policy,
        points: &[SurfacePoint],
        targets: &DoseTargets,
        travel_m: f64,
        irradiation_s: f64,
        sites: Vec<SiteSummary>,
    ) -> Result<MissionReport, SimError> {
        let scene = &self.scene;
        let snap = PROBE_SURFACE_TOLERANCE + 0.5 * 3f64.sqrt() * scene.mapping.resolution;
        let probes = read_probes(&scene.probes, snap, scene.thresholds.saturation, |id| {
            self.objects
                .iter()
                .find(|o| o.object_id == id)
                .map(|o| (o.risk, o.range.clone().map(|i| (i, &points[i]))))
        })?;
        let coverage = evaluate_probes(&probes, &scene.thresholds);
        let of_class = |c: RiskClass| DoseSummary::of(points.iter().filter(move |p| p.risk == c).map(|p| p.dose()));
        let travel_s = travel_m / scene.chassis.speed;
        Ok(MissionReport {
            scene: scene.name.clone(),
            policy: policy.name().into(),
            seed: scene.seed,
            hcr: coverage.hcr,
            ocr: coverage.ocr,
            et_s: travel_s + irradiation_s,
            travel_s,
            irradiation_s,
            travel_m,
            surface_points: points.len(),
            hotspot_fraction: self.hotspot_fraction(),
            points_below_target: points
                .iter()
                .filter(|p| p.dose() < targets.for_risk(p.risk) * (1.0 - 1e-6))
                .count(),
            hotspot_dose: of_class(RiskClass::Hotspot),
            nonhotspot_dose: of_class(RiskClass::NonHotspot),
            probes,
            sites,
            targets: *targets,
            thresholds: scene.thresholds,
        })
    }
}

/// Filtered, normal-estimated surface cloud of every object. Each occupied
/// leaf goes to the object whose surface is nearest to its centre.
fn object_clouds(scene: &Scene, tree: &OccupancyOctree) -> Result<Vec<SurfaceCloud>, SimError> {
    let res = scene.mapping.resolution;
    let registry = scene.registry();
    scene
        .objects
        .par_iter()
        .enumerate()
        .map(|(i, obj)| {
            let err = |source: MappingError| SimError::Mapping {
                object: obj.id.clone(),
                source,
            };
            let risk = registry.classify(&obj.label);
            let viewpoint = obj.shape.viewpoint();
            let raw = extract_surface(tree, &obj.shape.aabb().expanded(res), viewpoint, risk).map_err(err)?;
            let own: Vec<SurfacePoint> = raw
                .points
                .into_iter()
                .filter(|p| owner(scene, &p.position, res) == Some(i))
                .collect();
            if own.is_empty() {
                return Err(err(MappingError::EmptyRegion));
            }
            let cloud = SurfaceCloud::new(own, obj.label.clone(), viewpoint);
            let k = scene.mapping.k_normals.min(cloud.len().saturating_sub(1));
            let mut cloud = estimate_normals(&cloud, k).map_err(err)?;
            cloud.points.retain(|p| exposed(scene, i, &(p.position + p.normal * res)));
            if cloud.is_empty() {
                return Err(err(MappingError::EmptyRegion));
            }
            Ok(cloud)
        })
        .collect()
}

/// False when the leaf one step out along a normal lies in a wall or inside
/// another solid, i.e. the point is a contact face no lamp can see.
fn exposed(scene: &Scene, object: usize, step: &Point3) -> bool {
    scene.room.contains(step)
        && !scene
            .objects
            .iter()
            .enumerate()
            .any(|(j, o)| j != object && o.shape.contains_strict(step))
        && !scene.obstacles.iter().any(|o| o.shape.contains_strict(step))
}

fn owner(scene: &Scene, p: &Point3, max_distance: f64) -> Option<usize> {
    scene
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| (o.shape.surface_distance(p), i))
        .filter(|(d, _)| *d <= max_distance)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, i)| i)
}

/// Chassis planning grid: primitives' footprints and a wall band are
/// occupied, then inflated by the chassis radius.
fn chassis_grid(scene: &Scene) -> Result<GridMap, SimError> {
    let c = &scene.chassis;
    let size = scene.room.size();
    let w = (size.x / c.grid_resolution).ceil() as usize;
    let h = (size.y / c.grid_resolution).ceil() as usize;
    let mut grid = GridMap::new(w, h, c.grid_resolution, Point3::new(scene.room.min.x, scene.room.min.y, 0.0))?;
    for shape in scene.primitives() {
        let b = shape.aabb();
        // Shrink slightly so a footprint ending on a cell border does not
        // claim the next cell.
        grid.mark(&b.expanded(-1e-9), CellState::Occupied);
    }
    let mut grid = grid.inflated(c.radius);
    for iy in 0..h {
        for ix in 0..w {
            let p = grid.cell_center([ix, iy]);
            let wall = (p.x - scene.room.min.x)
                .min(scene.room.max.x - p.x)
                .min(p.y - scene.room.min.y)
                .min(scene.room.max.y - p.y);
            if wall < c.radius {
                grid.set([ix, iy], CellState::Occupied);
            }
        }
    }
    Ok(grid)
}

/// Facet order for sweeps: top first, then the sides around, bottom last.
fn facet_rank(cloud: &SurfaceCloud) -> usize {
    let n = cloud.points.iter().fold(Vec3::zeros(), |a, p| a + p.normal);
    let axis = (0..3).max_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs())).unwrap_or(2);
    match (axis, n[axis] >= 0.0) {
        (2, true) => 0,
        (0, true) => 1,
        (1, true) => 2,
        (0, false) => 3,
        (1, false) => 4,
        _ => 5,
    }
}

fn sweep(
    scene: &Scene,
    grid: &GridMap,
    site: &HotspotSite,
    cloud: &SurfaceCloud,
    surface: &ObjectSurface,
) -> Result<ScanTrajectory, SimError> {
    let arm = &scene.arm;
    let stop = grid.cell_center(site.stop_point);
    let reach = ReachBox {
        center: Point3::new(stop.x, stop.y, scene.room.min.z + 0.5 * (arm.z_min + arm.z_max)),
        half_extents: Vec3::new(arm.reach, arm.reach, 0.5 * (arm.z_max - arm.z_min)),
    };
    let reachable = |pose: &Pose| reach.contains(pose) && in_free_space(scene, &pose.translation(), arm.clearance);
    let mut facets = split_by_axis(cloud);
    facets.sort_by_key(facet_rank);
    let mut traj = ScanTrajectory {
        segments: Vec::new(),
        standoff: scene.mapping.standoff,
    };
    for facet in &facets {
        match generate_scan_trajectory(facet, scene.mapping.standoff, scene.sweep_spacing(), &reachable) {
            Ok(t) => traj.extend(t),
            Err(MappingError::NoReachablePoses) => continue,
            Err(source) => {
                return Err(SimError::Mapping {
                    object: surface.object_id.clone(),
                    source,
                })
            }
        }
    }
    if traj.is_empty() {
        return Err(SimError::UnreachablePoint {
            object: surface.object_id.clone(),
            point_index: surface.range.start,
            position: cloud.points[0].position,
        });
    }
    Ok(traj)
}

/// Runs a single policy from scratch.
pub fn run_mission(scene: &Scene, policy: Policy) -> Result<MissionOutcome, SimError> {
    MissionContext::build(scene)?.run(policy)
}
