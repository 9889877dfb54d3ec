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
//! Spatial types shared by every stage of the pipeline.
//!
//! All lengths are meters. Frames are right-handed and rotations are unit
//! quaternions. The lamp-local frame used by the irradiance model has `x`
//! along the lamp tubes, `y` across the three tubes and `z` pointing from
//! the assembly toward the scene.

use nalgebra::{Isometry3, Translation3, UnitQuaternion};
use serde::{Deserialize, Serialize};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;

/// Rigid transform from a local frame into the world frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    iso: Isometry3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            iso: Isometry3::identity(),
        }
    }

    pub fn new(translation: Point3, rotation: UnitQuaternion<f64>) -> Self {
        Self {
            iso: Isometry3::from_parts(Translation3::from(translation.coords), rotation),
        }
    }

    pub fn from_translation(translation: Point3) -> Self {
        Self::new(translation, UnitQuaternion::identity())
    }

    /// Builds a pose whose local `z` axis points along `forward` and whose
    /// local `x` axis is the component of `x_hint` orthogonal to `forward`.
    ///
    /// Falls back to an arbitrary perpendicular when `x_hint` is parallel to
    /// `forward`.
    pub fn looking_along(position: Point3, forward: &Vec3, x_hint: &Vec3) -> Self {
        let z = forward.normalize();
        let mut x = x_hint - z * x_hint.dot(&z);
        if x.norm() < 1e-9 {
            x = any_perpendicular(&z);
        }
        let x = x.normalize();
        let y = z.cross(&x);
        let rot = nalgebra::Rotation3::from_basis_unchecked(&[x, y, z]);
        Self::new(position, UnitQuaternion::from_rotation_matrix(&rot))
    }

    pub fn translation(&self) -> Point3 {
        Point3::from(self.iso.translation.vector)
    }

    pub fn rotation(&self) -> UnitQuaternion<f64> {
        self.iso.rotation
    }

    pub fn inverse(&self) -> Self {
        Self {
            iso: self.iso.inverse(),
        }
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Pose) -> Self {
        Self {
            iso: self.iso * other.iso,
        }
    }

    pub fn transform_point(&self, p: &Point3) -> Point3 {
        self.iso.transform_point(p)
    }

    pub fn inverse_transform_point(&self, p: &Point3) -> Point3 {
        self.iso.inverse_transform_point(p)
    }

    pub fn transform_vector(&self, v: &Vec3) -> Vec3 {
        self.iso.rotation * v
    }

    pub fn inverse_transform_vector(&self, v: &Vec3) -> Vec3 {
        self.iso.rotation.inverse() * v
    }

    /// Local `x` axis expressed in the world frame.
    pub fn x_axis(&self) -> Vec3 {
        self.transform_vector(&Vec3::x())
    }

    /// Local `z` axis expressed in the world frame.
    pub fn z_axis(&self) -> Vec3 {
        self.transform_vector(&Vec3::z())
    }

    pub fn quaternion_norm(&self) -> f64 {
        self.iso.rotation.quaternion().norm()
    }
}

/// Serialized form: translation plus a `[w, x, y, z]` quaternion.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct PoseRepr {
    translation: [f64; 3],
    rotation: [f64; 4],
}

impl Serialize for Pose {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let t = self.translation();
        let q = self.rotation();
        PoseRepr {
            translation: [t.x, t.y, t.z],
            rotation: [q.w, q.i, q.j, q.k],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PoseRepr::deserialize(d)?;
        let [w, i, j, k] = r.rotation;
        let q = nalgebra::Quaternion::new(w, i, j, k);
        if q.norm() < 1e-12 {
            return Err(serde::de::Error::custom("zero quaternion"));
        }
        Ok(Pose::new(
            Point3::from(r.translation),
            UnitQuaternion::from_quaternion(q),
        ))
    }
}

pub fn transform_point(pose: &Pose, p: &Point3) -> Point3 {
    pose.transform_point(p)
}

/// Expresses a world point in the lamp-local frame of an assembly mounted at
/// `assembly_pose`.
pub fn world_to_lamp_frame(assembly_pose: &Pose, p: &Point3) -> Point3 {
    assembly_pose.inverse_transform_point(p)
}

pub fn lamp_to_world_frame(assembly_pose: &Pose, p: &Point3) -> Point3 {
    assembly_pose.transform_point(p)
}

pub fn any_perpendicular(v: &Vec3) -> Vec3 {
    let a = if v.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    v.cross(&a).normalize()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskClass {
    Hotspot,
    #[serde(alias = "non-hotspot", alias = "non_hotspot")]
    NonHotspot,
}

impl RiskClass {
    /// Scalar used in PLY files: 1 for hotspot, 0 otherwise.
    pub fn as_scalar(self) -> u8 {
        match self {
            RiskClass::Hotspot => 1,
            RiskClass::NonHotspot => 0,
        }
    }

    pub fn from_scalar(v: f64) -> Self {
        if v >= 0.5 {
            RiskClass::Hotspot
        } else {
            RiskClass::NonHotspot
        }
    }
}

/// A disinfection target on an object surface.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint {
    pub position: Point3,
    /// Outward unit normal.
    pub normal: Vec3,
    pub risk: RiskClass,
    /// Accumulated dose in mJ/cm².
    dose: f64,
}

impl SurfacePoint {
    /// Normalizes `normal`; a zero normal is replaced by `+z`.
    pub fn new(position: Point3, normal: Vec3, risk: RiskClass) -> Self {
        let n = normal.try_normalize(1e-15).unwrap_or_else(Vec3::z);
        Self {
            position,
            normal: n,
            risk,
            dose: 0.0,
        }
    }

    pub fn with_dose(mut self, dose: f64) -> Self {
        self.dose = dose.max(0.0);
        self
    }

    pub fn dose(&self) -> f64 {
        self.dose
    }

    /// Adds a dose increment; negative increments are ignored so the
    /// accumulator never decreases.
    pub fn add_dose(&mut self, increment: f64) {
        if increment > 0.0 {
            self.dose += increment;
        }
    }

    pub fn reset_dose(&mut self) {
        self.dose = 0.0;
    }
}

/// Axis-aligned box, closed on all faces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn new(a: Point3, b: Point3) -> Self {
        Self {
            min: Point3::new(a.x.min(b.x), a.y.min(b.y), a.z.min(b.z)),
            max: Point3::new(a.x.max(b.x), a.y.max(b.y), a.z.max(b.z)),
        }
    }

    pub fn contains(&self, p: &Point3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.max[i] && other.min[i] <= self.max[i])
    }

    pub fn expanded(&self, margin: f64) -> Self {
        let m = Vec3::repeat(margin);
        Self {
            min: self.min - m,
            max: self.max + m,
        }
    }

    pub fn center(&self) -> Point3 {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn size(&self) -> Vec3 {
        self.max - self.min
    }

    /// Euclidean distance from `p` to the closed box (0 inside).
    pub fn distance_to(&self, p: &Point3) -> f64 {
        let mut d2 = 0.0;
        for i in 0..3 {
            let v = if p[i] < self.min[i] {
                self.min[i] - p[i]
            } else if p[i] > self.max[i] {
                p[i] - self.max[i]
            } else {
                0.0
            };
            d2 += v * v;
        }
        d2.sqrt()
    }
}
