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
//! Scene primitives: axis-aligned boxes, vertical cylinders and
//! axis-aligned rectangular patches.

use serde::{Deserialize, Serialize};

use crate::geometry::{Aabb, Point3, Vec3};
use crate::mapping::Viewpoint;

const EPS: f64 = 1e-12;

/// Outward normal of a patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Facing {
    #[serde(rename = "+x")]
    PosX,
    #[serde(rename = "-x")]
    NegX,
    #[serde(rename = "+y")]
    PosY,
    #[serde(rename = "-y")]
    NegY,
    #[serde(rename = "+z")]
    PosZ,
    #[serde(rename = "-z")]
    NegZ,
}

impl Facing {
    pub fn axis(self) -> usize {
        match self {
            Facing::PosX | Facing::NegX => 0,
            Facing::PosY | Facing::NegY => 1,
            Facing::PosZ | Facing::NegZ => 2,
        }
    }

    pub fn normal(self) -> Vec3 {
        let mut n = Vec3::zeros();
        n[self.axis()] = match self {
            Facing::PosX | Facing::PosY | Facing::PosZ => 1.0,
            _ => -1.0,
        };
        n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Box {
        min: Point3,
        max: Point3,
    },
    /// Vertical axis.
    Cylinder {
        center: [f64; 2],
        radius: f64,
        z_min: f64,
        z_max: f64,
    },
    /// Zero-thickness rectangle; `min` and `max` agree on the facing axis.
    Patch {
        min: Point3,
        max: Point3,
        facing: Facing,
    },
}

impl Shape {
    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Shape::Box { min, max } => {
                if (0..3).all(|i| max[i] > min[i]) {
                    Ok(())
                } else {
                    Err(format!("box min {min:?} not below max {max:?}"))
                }
            }
            Shape::Cylinder { radius, z_min, z_max, .. } => {
                if radius > 0.0 && z_max > z_min {
                    Ok(())
                } else {
                    Err(format!("cylinder radius {radius}, z [{z_min}, {z_max}]"))
                }
            }
            Shape::Patch { min, max, facing } => {
                let a = facing.axis();
                let flat = (max[a] - min[a]).abs() <= EPS;
                let spans = (0..3).filter(|&i| i != a).all(|i| max[i] > min[i]);
                if flat && spans {
                    Ok(())
                } else {
                    Err(format!("patch {min:?}..{max:?} is not a rectangle facing {facing:?}"))
                }
            }
        }
    }

    pub fn aabb(&self) -> Aabb {
        match *self {
            Shape::Box { min, max } | Shape::Patch { min, max, .. } => Aabb::new(min, max),
            Shape::Cylinder {
                center,
                radius,
                z_min,
                z_max,
            } => Aabb::new(
                Point3::new(center[0] - radius, center[1] - radius, z_min),
                Point3::new(center[0] + radius, center[1] + radius, z_max),
            ),
        }
    }

    /// Orientation reference for estimated normals.
    pub fn viewpoint(&self) -> Viewpoint {
        match *self {
            Shape::Patch { min, max, facing } => {
                Viewpoint::Sensor(nalgebra::center(&min, &max) + facing.normal())
            }
            _ => Viewpoint::Interior(self.aabb().center()),
        }
    }

    /// Strictly inside the solid (patches have no interior).
    pub fn contains_strict(&self, p: &Point3) -> bool {
        match *self {
            Shape::Box { min, max } => (0..3).all(|i| p[i] > min[i] && p[i] < max[i]),
            Shape::Cylinder {
                center,
                radius,
                z_min,
                z_max,
            } => {
                let (dx, dy) = (p.x - center[0], p.y - center[1]);
                dx * dx + dy * dy < radius * radius && p.z > z_min && p.z < z_max
            }
            Shape::Patch { .. } => false,
        }
    }

    /// Unsigned distance from `p` to the surface.
    pub fn surface_distance(&self, p: &Point3) -> f64 {
        match *self {
            Shape::Box { min, max } => {
                let b = Aabb::new(min, max);
                if self.contains_strict(p) {
                    (0..3)
                        .map(|i| (p[i] - min[i]).min(max[i] - p[i]))
                        .fold(f64::INFINITY, f64::min)
                } else {
                    b.distance_to(p)
                }
            }
            Shape::Cylinder {
                center,
                radius,
                z_min,
                z_max,
            } => {
                let rho = ((p.x - center[0]).powi(2) + (p.y - center[1]).powi(2)).sqrt();
                if self.contains_strict(p) {
                    (radius - rho).min(p.z - z_min).min(z_max - p.z)
                } else {
                    let dr = (rho - radius).max(0.0);
                    let dz = (z_min - p.z).max(p.z - z_max).max(0.0);
                    (dr * dr + dz * dz).sqrt()
                }
            }
            Shape::Patch { min, max, .. } => Aabb::new(min, max).distance_to(p),
        }
    }

    /// Smallest `t ≥ 0` where `o + t·d` meets the closed solid or patch.
    pub fn ray_entry(&self, o: &Point3, d: &Vec3) -> Option<f64> {
        let (t0, t1) = self.interval(o, d, false)?;
        (t1 >= 0.0).then_some(t0.max(0.0))
    }

    /// True when the open segment `(a, b)` passes through the interior of
    /// the solid, or crosses a patch strictly inside its rectangle. Touching
    /// a face, edge or rim does not count.
    pub fn blocks_segment(&self, a: &Point3, b: &Point3) -> bool {
        let d = b - a;
        match self.interval(a, &d, true) {
            Some((t0, t1)) => {
                let (lo, hi) = (t0.max(0.0), t1.min(1.0));
                match self {
                    Shape::Patch { .. } => t0 > EPS && t0 < 1.0 - EPS,
                    _ => hi - lo > 1e-9,
                }
            }
            None => false,
        }
    }

    /// Parameter interval where the line `o + t·d` is inside the shape.
    /// With `strict`, boundary contact yields `None` (or an empty interval).
    fn interval(&self, o: &Point3, d: &Vec3, strict: bool) -> Option<(f64, f64)> {
        match *self {
            Shape::Box { min, max } => slab(o, d, &min, &max, strict),
            Shape::Patch { min, max, facing } => {
                let a = facing.axis();
                if d[a].abs() <= EPS {
                    return None;
                }
                let t = (min[a] - o[a]) / d[a];
                let p = o + d * t;
                let inside = (0..3).filter(|&i| i != a).all(|i| {
                    if strict {
                        p[i] > min[i] && p[i] < max[i]
                    } else {
                        p[i] >= min[i] - 1e-12 && p[i] <= max[i] + 1e-12
                    }
                });
                inside.then_some((t, t))
            }
            Shape::Cylinder {
                center,
                radius,
                z_min,
                z_max,
            } => {
                let (ox, oy) = (o.x - center[0], o.y - center[1]);
                let qa = d.x * d.x + d.y * d.y;
                let (mut t0, mut t1) = if qa <= EPS {
                    let inside = if strict {
                        ox * ox + oy * oy < radius * radius
                    } else {
                        ox * ox + oy * oy <= radius * radius
                    };
                    if !inside {
                        return None;
                    }
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else {
                    let qb = 2.0 * (ox * d.x + oy * d.y);
                    let qc = ox * ox + oy * oy - radius * radius;
                    let disc = qb * qb - 4.0 * qa * qc;
                    if disc < 0.0 || (strict && disc <= 0.0) {
                        return None;
                    }
                    let s = disc.sqrt();
                    ((-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa))
                };
                if d.z.abs() <= EPS {
                    let inside = if strict {
                        o.z > z_min && o.z < z_max
                    } else {
                        o.z >= z_min && o.z <= z_max
                    };
                    if !inside {
                        return None;
                    }
                } else {
                    let (a, b) = ((z_min - o.z) / d.z, (z_max - o.z) / d.z);
                    t0 = t0.max(a.min(b));
                    t1 = t1.min(a.max(b));
                }
                (t0 <= t1).then_some((t0, t1))
            }
        }
    }

    /// Surface samples `(position, outward normal)` on a grid of pitch at
    /// most `step`, placed at cell centres so none falls on an edge.
    pub fn sample_surface(&self, step: f64) -> Vec<(Point3, Vec3)> {
        let mut out = Vec::new();
        match *self {
            Shape::Box { min, max } => {
                for axis in 0..3 {
                    for (side, value) in [(1.0, max[axis]), (-1.0, min[axis])] {
                        let mut n = Vec3::zeros();
                        n[axis] = side;
                        face_grid(&min, &max, axis, value, step, |p| out.push((p, n)));
                    }
                }
            }
            Shape::Patch { min, max, facing } => {
                let n = facing.normal();
                face_grid(&min, &max, facing.axis(), min[facing.axis()], step, |p| out.push((p, n)));
            }
            Shape::Cylinder {
                center,
                radius,
                z_min,
                z_max,
            } => {
                let n_theta = (std::f64::consts::TAU * radius / step).ceil().max(3.0) as usize;
                let zs = centred(z_min, z_max, step);
                for k in 0..n_theta {
                    let th = std::f64::consts::TAU * (k as f64 + 0.5) / n_theta as f64;
                    let n = Vec3::new(th.cos(), th.sin(), 0.0);
                    for &z in &zs {
                        out.push((Point3::new(center[0] + radius * n.x, center[1] + radius * n.y, z), n));
                    }
                }
                let xs = centred(center[0] - radius, center[0] + radius, step);
                let ys = centred(center[1] - radius, center[1] + radius, step);
                for (z, nz) in [(z_max, 1.0), (z_min, -1.0)] {
                    for &y in &ys {
                        for &x in &xs {
                            if (x - center[0]).powi(2) + (y - center[1]).powi(2) < radius * radius {
                                out.push((Point3::new(x, y, z), Vec3::new(0.0, 0.0, nz)));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Cell centres of `[lo, hi]` split into cells no wider than `step`.
fn centred(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
}

fn face_grid(min: &Point3, max: &Point3, axis: usize, value: f64, step: f64, mut emit: impl FnMut(Point3)) {
    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
    for a in centred(min[u], max[u], step) {
        for b in centred(min[v], max[v], step) {
            let mut p = Point3::origin();
            p[axis] = value;
            p[u] = a;
            p[v] = b;
            emit(p);
        }
    }
}

fn slab(o: &Point3, d: &Vec3, min: &Point3, max: &Point3, strict: bool) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..3 {
        if d[i].abs() <= EPS {
            let inside = if strict {
                o[i] > min[i] && o[i] < max[i]
            } else {
                o[i] >= min[i] && o[i] <= max[i]
            };
            if !inside {
                return None;
            }
        } else {
            let (a, b) = ((min[i] - o[i]) / d[i], (max[i] - o[i]) / d[i]);
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t0 <= t1).then_some((t0, t1))
}
