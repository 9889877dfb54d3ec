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
//! UV-C irradiance of linear lamps on surface points.
//!
//! A lamp of length `L` and radiant flux `Φ` is a uniform line source lying
//! on the lamp-local `x` axis at height `y = y′`. Each element `dℓ` acts as a
//! point source of flux `Φ/L·dℓ`, so integrating the inverse-square law over
//! the tube gives
//!
//! ```text
//! E = Φ / (4π L ρ) · [atan((L/2 − x)/ρ) + atan((L/2 + x)/ρ)] · cosθ,
//! ρ = √((y − y′)² + z²)
//! ```
//!
//! where `cosθ = r̂·n̂` is taken with `r̂` pointing from the surface point
//! toward the lamp center and is clamped to `[0, 1]`. The same center-based
//! cosine is used by the midpoint quadrature, which makes the quadrature an
//! independent check of the closed form.
//!
//! Irradiance is carried in W/m² internally. Doses are mJ/cm².

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::geometry::{world_to_lamp_frame, Point3, Pose, SurfacePoint, Vec3};

/// W/m² · s → mJ/cm².
pub const DOSE_PER_W_S_M2: f64 = 0.1;
/// W/m² → mW/cm².
pub const MW_CM2_PER_W_M2: f64 = 0.1;
/// W/m² → µW/cm².
pub const UW_CM2_PER_W_M2: f64 = 100.0;

const AXIS_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrradianceError {
    #[error("surface point lies on the lamp axis (rho = {rho:e} m)")]
    DegenerateGeometry { rho: f64 },
    #[error("negative exposure duration {0} s")]
    NegativeDuration(f64),
    #[error("invalid lamp parameter: {0}")]
    InvalidLamp(String),
}

/// A single linear tube in the lamp-local frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lamp {
    /// Tube length in meters.
    pub length: f64,
    /// UV-C radiant flux in watts.
    pub radiant_flux: f64,
    /// Mount position along the assembly `y` axis, meters.
    pub y_offset: f64,
}

impl Lamp {
    pub fn new(length: f64, radiant_flux: f64, y_offset: f64) -> Result<Self, IrradianceError> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(IrradianceError::InvalidLamp(format!("length {length}")));
        }
        if !(radiant_flux > 0.0 && radiant_flux.is_finite()) {
            return Err(IrradianceError::InvalidLamp(format!("flux {radiant_flux}")));
        }
        if !y_offset.is_finite() {
            return Err(IrradianceError::InvalidLamp(format!("y offset {y_offset}")));
        }
        Ok(Self {
            length,
            radiant_flux,
            y_offset,
        })
    }

    fn axis_distance(&self, p: &Point3) -> Result<f64, IrradianceError> {
        let dy = p.y - self.y_offset;
        let rho = (dy * dy + p.z * p.z).sqrt();
        if rho <= AXIS_EPS {
            return Err(IrradianceError::DegenerateGeometry { rho });
        }
        Ok(rho)
    }

    /// `r̂·n̂` with `r̂` from the point to the lamp center, clamped to `[0, 1]`.
    fn center_cosine(&self, p: &Point3, n: &Vec3) -> f64 {
        let to_center = Point3::new(0.0, self.y_offset, 0.0) - p;
        let d = to_center.norm();
        if d == 0.0 {
            return 0.0;
        }
        (to_center.dot(n) / d).clamp(0.0, 1.0)
    }
}

/// Irradiance in W/m².
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Irradiance(pub f64);

impl Irradiance {
    pub fn w_per_m2(self) -> f64 {
        self.0
    }

    pub fn mw_per_cm2(self) -> f64 {
        self.0 * MW_CM2_PER_W_M2
    }

    pub fn uw_per_cm2(self) -> f64 {
        self.0 * UW_CM2_PER_W_M2
    }

    pub fn from_mw_per_cm2(v: f64) -> Self {
        Self(v / MW_CM2_PER_W_M2)
    }
}

impl std::ops::Add for Irradiance {
    type Output = Irradiance;
    fn add(self, rhs: Self) -> Self {
        Irradiance(self.0 + rhs.0)
    }
}

impl std::iter::Sum for Irradiance {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        Irradiance(iter.map(|e| e.0).sum())
    }
}

/// Closed-form irradiance of one lamp on a point given in the lamp frame.
pub fn irradiance_closed_form(
    lamp: &Lamp,
    p_lamp: &Point3,
    n_lamp: &Vec3,
) -> Result<Irradiance, IrradianceError> {
    let rho = lamp.axis_distance(p_lamp)?;
    let cos = lamp.center_cosine(p_lamp, n_lamp);
    if cos == 0.0 {
        return Ok(Irradiance(0.0));
    }
    let half = 0.5 * lamp.length;
    let angular = ((half - p_lamp.x) / rho).atan() + ((half + p_lamp.x) / rho).atan();
    Ok(Irradiance(
        lamp.radiant_flux / (4.0 * PI * lamp.length * rho) * angular * cos,
    ))
}

/// Which incidence cosine the quadrature applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CosineMode {
    /// One cosine from the lamp center, shared by all segments. Agrees with
    /// the closed form in the limit.
    #[default]
    Center,
    /// A separate cosine per segment. For sensitivity studies only; it is a
    /// different model and never matches the closed form exactly.
    PerSegment,
}

/// Per-segment midpoint contributions (W/m²), ordered from `x = −L/2` to
/// `x = +L/2`.
pub fn segment_contributions(
    lamp: &Lamp,
    p_lamp: &Point3,
    n_lamp: &Vec3,
    n_segments: usize,
    mode: CosineMode,
) -> Result<Vec<f64>, IrradianceError> {
    if n_segments == 0 {
        return Err(IrradianceError::InvalidLamp("n_segments must be >= 1".into()));
    }
    let rho = lamp.axis_distance(p_lamp)?;
    let rho2 = rho * rho;
    let dl = lamp.length / n_segments as f64;
    let scale = lamp.radiant_flux / (4.0 * PI * lamp.length) * dl;
    let center_cos = lamp.center_cosine(p_lamp, n_lamp);
    let half = 0.5 * lamp.length;
    let out = (0..n_segments)
        .map(|k| {
            let ell = -half + (k as f64 + 0.5) * dl;
            let dx = p_lamp.x - ell;
            let r2 = dx * dx + rho2;
            let cos = match mode {
                CosineMode::Center => center_cos,
                CosineMode::PerSegment => {
                    let to_src = Vec3::new(ell, lamp.y_offset, 0.0) - p_lamp.coords;
                    (to_src.dot(n_lamp) / r2.sqrt()).clamp(0.0, 1.0)
                }
            };
            scale / r2 * cos
        })
        .collect();
    Ok(out)
}

/// Midpoint-rule sum over `n_segments` point sources along the tube.
pub fn irradiance_quadrature(
    lamp: &Lamp,
    p_lamp: &Point3,
    n_lamp: &Vec3,
    n_segments: usize,
) -> Result<Irradiance, IrradianceError> {
    irradiance_quadrature_with(lamp, p_lamp, n_lamp, n_segments, CosineMode::Center)
}

pub fn irradiance_quadrature_with(
    lamp: &Lamp,
    p_lamp: &Point3,
    n_lamp: &Vec3,
    n_segments: usize,
    mode: CosineMode,
) -> Result<Irradiance, IrradianceError> {
    let parts = segment_contributions(lamp, p_lamp, n_lamp, n_segments, mode)?;
    Ok(Irradiance(parts.iter().sum()))
}

/// Lamp parameters shared by the three tubes of an assembly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssemblyConfig {
    /// Radiant UV-C flux per tube, W.
    pub flux_w: f64,
    pub length_m: f64,
    /// Distance between neighbouring tubes, m.
    pub spacing_m: f64,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        Self {
            flux_w: 1.0,
            length_m: 0.135,
            spacing_m: 0.05,
        }
    }
}

/// Three parallel tubes at `y′ = +d, 0, −d` mounted on a common pose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LampAssembly {
    /// Upper, middle, lower.
    pub lamps: [Lamp; 3],
    pub spacing: f64,
    pub pose: Pose,
}

impl LampAssembly {
    pub fn new(config: &AssemblyConfig, pose: Pose) -> Result<Self, IrradianceError> {
        if !(config.spacing_m > 0.0) {
            return Err(IrradianceError::InvalidLamp(format!(
                "spacing {}",
                config.spacing_m
            )));
        }
        Self::with_spacing_unchecked(config, config.spacing_m, pose)
    }

    /// Allows `d = 0`, i.e. three coincident tubes.
    pub fn with_spacing_unchecked(
        config: &AssemblyConfig,
        spacing: f64,
        pose: Pose,
    ) -> Result<Self, IrradianceError> {
        let lamp = |y| Lamp::new(config.length_m, config.flux_w, y);
        Ok(Self {
            lamps: [lamp(spacing)?, lamp(0.0)?, lamp(-spacing)?],
            spacing,
            pose,
        })
    }

    pub fn at(&self, pose: Pose) -> Self {
        Self { pose, ..*self }
    }

    /// Irradiance of each tube (upper, middle, lower) on a world-frame point.
    pub fn per_lamp(
        &self,
        position: &Point3,
        normal: &Vec3,
    ) -> Result<[Irradiance; 3], IrradianceError> {
        let p = world_to_lamp_frame(&self.pose, position);
        let n = self.pose.inverse_transform_vector(normal);
        Ok([
            irradiance_closed_form(&self.lamps[0], &p, &n)?,
            irradiance_closed_form(&self.lamps[1], &p, &n)?,
            irradiance_closed_form(&self.lamps[2], &p, &n)?,
        ])
    }

    pub fn irradiance_at(
        &self,
        position: &Point3,
        normal: &Vec3,
    ) -> Result<Irradiance, IrradianceError> {
        Ok(self.per_lamp(position, normal)?.into_iter().sum())
    }
}

/// Total irradiance of the assembly on a world-frame surface point.
pub fn irradiance_assembly(
    assembly: &LampAssembly,
    sp: &SurfacePoint,
) -> Result<Irradiance, IrradianceError> {
    assembly.irradiance_at(&sp.position, &sp.normal)
}

/// Dose increment in mJ/cm² from exposure to `e` for `dt` seconds.
pub fn accumulate_dose(e: Irradiance, dt: f64) -> Result<f64, IrradianceError> {
    if dt < 0.0 || dt.is_nan() {
        return Err(IrradianceError::NegativeDuration(dt));
    }
    Ok(e.0 * dt * DOSE_PER_W_S_M2)
}
