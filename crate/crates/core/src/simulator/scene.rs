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
//! Declarative scene files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::shape::Shape;
use super::SimError;
use crate::geometry::{Aabb, Point3, RiskClass};
use crate::irradiance::AssemblyConfig;
use crate::optimizer::{DoseTargets, DwellParams};
use crate::planner::{RiskRegistry, StopPointParams};

/// Largest allowed gap between a probe and its object's surface, m.
pub const PROBE_SURFACE_TOLERANCE: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    pub label: String,
    pub shape: Shape,
}

/// Static geometry that blocks light and the chassis but is not disinfected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub id: String,
    pub shape: Shape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub id: String,
    pub object: String,
    pub position: Point3,
}

/// Evaluation thresholds, mJ/cm².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub hotspot: f64,
    pub overall: f64,
    /// Dosimeter cards read no higher than this.
    pub saturation: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            hotspot: 25.0,
            overall: 5.0,
            saturation: 100.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MappingConfig {
    /// Octree leaf size, m.
    pub resolution: f64,
    /// Lamp-to-surface distance, m.
    pub standoff: f64,
    /// Sweep line spacing, m. Defaults to the lamp length.
    pub sweep_spacing: Option<f64>,
    pub k_normals: usize,
}

impl Default for MappingConfig {
    fn default() -> Self {
        Self {
            resolution: 0.02,
            standoff: 0.3,
            sweep_spacing: None,
            k_normals: 12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChassisConfig {
    /// m/s
    pub speed: f64,
    /// Planning grid cell size, m.
    pub grid_resolution: f64,
    /// Obstacles are inflated by this radius, m.
    pub radius: f64,
}

impl Default for ChassisConfig {
    fn default() -> Self {
        Self {
            speed: 0.3,
            grid_resolution: 0.05,
            radius: 0.25,
        }
    }
}

/// Reachable end-effector positions relative to the chassis stop point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArmConfig {
    /// Horizontal half-extent of the reach box, m.
    pub reach: f64,
    pub z_min: f64,
    pub z_max: f64,
    /// Minimum distance from the lamp centre to walls and primitives, m.
    pub clearance: f64,
}

impl Default for ArmConfig {
    fn default() -> Self {
        Self {
            reach: 2.5,
            z_min: 0.05,
            z_max: 2.2,
            clearance: 0.05,
        }
    }
}

/// Stationary tower lamp visiting fixed positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StationConfig {
    pub positions: Vec<[f64; 2]>,
    /// Irradiation time at each position, s.
    pub duration_s: f64,
    /// Height of the lamp centres, m.
    pub height: f64,
    pub assembly: AssemblyConfig,
}

impl Default for StationConfig {
    fn default() -> Self {
        Self {
            positions: Vec::new(),
            duration_s: 300.0,
            height: 1.0,
            assembly: AssemblyConfig {
                flux_w: 4.0,
                length_m: 0.8,
                spacing_m: 0.05,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    #[serde(default)]
    pub name: String,
    pub room: Aabb,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    pub objects: Vec<SceneObject>,
    #[serde(default)]
    pub probes: Vec<Probe>,
    /// Chassis start position, m.
    pub start: [f64; 2],
    #[serde(default)]
    pub assembly: AssemblyConfig,
    #[serde(default)]
    pub targets: DoseTargets,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub mapping: MappingConfig,
    #[serde(default)]
    pub dwell: DwellParams,
    #[serde(default)]
    pub chassis: ChassisConfig,
    #[serde(default)]
    pub arm: ArmConfig,
    #[serde(default)]
    pub station: StationConfig,
    #[serde(default)]
    pub stop_points: StopPointParams,
    /// Label classes added to (or overriding) the default registry.
    #[serde(default)]
    pub risk_overrides: BTreeMap<String, RiskClass>,
    #[serde(default)]
    pub seed: u64,
}

impl Scene {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let scene: Scene = serde_json::from_str(text).map_err(|e| SimError::Scene(e.to_string()))?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn registry(&self) -> RiskRegistry {
        let mut r = RiskRegistry::default();
        for (label, class) in &self.risk_overrides {
            r.insert(label, *class);
        }
        r
    }

    pub fn object(&self, id: &str) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Every light- and motion-blocking primitive: obstacles, then objects.
    pub fn primitives(&self) -> impl Iterator<Item = &Shape> {
        self.obstacles.iter().map(|o| &o.shape).chain(self.objects.iter().map(|o| &o.shape))
    }

    pub fn sweep_spacing(&self) -> f64 {
        self.mapping.sweep_spacing.unwrap_or(self.assembly.length_m)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Scene(m));
        if (0..3).any(|i| self.room.max[i] <= self.room.min[i]) {
            return bad("room has no volume".into());
        }
        let mut ids = BTreeSet::new();
        for (id, shape) in self
            .obstacles
            .iter()
            .map(|o| (&o.id, &o.shape))
            .chain(self.objects.iter().map(|o| (&o.id, &o.shape)))
        {
            if !ids.insert(id.as_str()) {
                return bad(format!("duplicate id {id:?}"));
            }
            shape.validate().map_err(|e| SimError::Scene(format!("{id}: {e}")))?;
        }
        for o in &self.objects {
            let b = o.shape.aabb();
            if !(self.room.contains(&b.min) && self.room.contains(&b.max)) {
                return bad(format!("object {} extends outside the room", o.id));
            }
        }
        for p in &self.probes {
            let Some(obj) = self.object(&p.object) else {
                return bad(format!("probe {} refers to unknown object {:?}", p.id, p.object));
            };
            let d = obj.shape.surface_distance(&p.position);
            if d > PROBE_SURFACE_TOLERANCE {
                return bad(format!("probe {} is {d:.4} m from the surface of {}", p.id, obj.id));
            }
        }
        let start = Point3::new(self.start[0], self.start[1], self.room.min.z);
        if !self.room.contains(&start) {
            return bad("start lies outside the room".into());
        }
        let m = &self.mapping;
        if !(m.resolution > 0.0 && m.standoff > 0.0 && self.sweep_spacing() > 0.0 && m.k_normals >= 3) {
            return bad(format!("invalid mapping settings {m:?}"));
        }
        if !(self.chassis.speed > 0.0 && self.chassis.grid_resolution > 0.0 && self.chassis.radius >= 0.0) {
            return bad(format!("invalid chassis settings {:?}", self.chassis));
        }
        let t = &self.thresholds;
        if !(t.hotspot > 0.0 && t.overall > 0.0 && t.saturation > 0.0) {
            return bad(format!("invalid thresholds {t:?}"));
        }
        if !(self.station.duration_s >= 0.0) {
            return bad("station duration must be non-negative".into());
        }
        self.targets.validate().map_err(|e| SimError::Scene(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINI: &str = r#"{
        "name": "mini",
        "room": {"min": [0, 0, 0], "max": [3, 3, 2.5]},
        "objects": [
            {"id": "t", "label": "table", "shape": {"type": "box", "min": [1.2, 1.2, 0], "max": [1.8, 1.6, 0.72]}}
        ],
        "probes": [{"id": "p0", "object": "t", "position": [1.5, 1.4, 0.72]}],
        "start": [0.4, 0.4]
    }"#;

    #[test]
    fn parses_with_defaults() {
        let s = Scene::from_json(MINI).unwrap();
        assert_eq!(s.thresholds.hotspot, 25.0);
        assert_eq!(s.targets.hotspot_min, 22.0);
        assert_eq!(s.sweep_spacing(), 0.135);
        assert_eq!(s.registry().classify("table"), RiskClass::Hotspot);
    }

    #[test]
    fn probe_off_surface() {
        let text = MINI.replace("[1.5, 1.4, 0.72]", "[1.5, 1.4, 0.75]");
        assert!(matches!(Scene::from_json(&text), Err(SimError::Scene(_))));
    }

    #[test]
    fn object_outside_room() {
        let text = MINI.replace("[1.8, 1.6, 0.72]", "[3.8, 1.6, 0.72]");
        assert!(Scene::from_json(&text).is_err());
    }
}
