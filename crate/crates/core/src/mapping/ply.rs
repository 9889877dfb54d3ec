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
//! ASCII PLY import/export of surface points.
//!
//! Vertices carry `x y z nx ny nz risk dose` plus `red green blue` derived
//! from the dose so the file renders as a dose map in common viewers. The
//! reader accepts any property order and ignores properties it does not
//! know.

use std::io::{BufRead, Write};

use super::MappingError;
use crate::geometry::{Point3, RiskClass, SurfacePoint, Vec3};

/// Dose (mJ/cm²) mapped to the top of the color ramp.
pub const COLOR_RAMP_MAX: f64 = 50.0;

pub fn write_ply<W: Write>(mut w: W, points: &[SurfacePoint]) -> std::io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "comment risk: 0 = non-hotspot, 1 = hotspot; dose in mJ/cm2")?;
    writeln!(w, "element vertex {}", points.len())?;
    for p in ["x", "y", "z", "nx", "ny", "nz"] {
        writeln!(w, "property double {p}")?;
    }
    writeln!(w, "property uchar risk")?;
    writeln!(w, "property double dose")?;
    for c in ["red", "green", "blue"] {
        writeln!(w, "property uchar {c}")?;
    }
    writeln!(w, "end_header")?;
    for p in points {
        let [r, g, b] = dose_color(p.dose());
        writeln!(
            w,
            "{} {} {} {} {} {} {} {} {} {} {}",
            p.position.x,
            p.position.y,
            p.position.z,
            p.normal.x,
            p.normal.y,
            p.normal.z,
            p.risk.as_scalar(),
            p.dose(),
            r,
            g,
            b
        )?;
    }
    Ok(())
}

/// Blue → green → red ramp over `[0, COLOR_RAMP_MAX]`.
pub fn dose_color(dose: f64) -> [u8; 3] {
    let t = (dose / COLOR_RAMP_MAX).clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = t / 0.5;
        (0.0, s, 1.0 - s)
    } else {
        let s = (t - 0.5) / 0.5;
        (s, 1.0 - s, 0.0)
    };
    [(r * 255.0).round() as u8, (g * 255.0).round() as u8, (b * 255.0).round() as u8]
}

pub fn read_ply<R: BufRead>(r: R) -> Result<Vec<SurfacePoint>, MappingError> {
    let bad = |m: &str| MappingError::Ply(m.to_string());
    let mut lines = r.lines();
    let mut next = || -> Result<Option<String>, MappingError> {
        lines
            .next()
            .transpose()
            .map_err(|e| MappingError::Ply(e.to_string()))
    };
    if next()?.as_deref().map(str::trim) != Some("ply") {
        return Err(bad("missing ply magic"));
    }
    let mut count = None;
    let mut props: Vec<String> = Vec::new();
    let mut in_vertex = false;
    loop {
        let line = next()?.ok_or_else(|| bad("unterminated header"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["format", fmt, ..] if *fmt != "ascii" => return Err(bad("only ascii PLY is supported")),
            ["element", "vertex", n] => {
                count = Some(n.parse::<usize>().map_err(|_| bad("bad vertex count"))?);
                in_vertex = true;
            }
            ["element", ..] => in_vertex = false,
            ["property", "list", ..] if in_vertex => return Err(bad("list vertex properties unsupported")),
            ["property", _ty, name] if in_vertex => props.push((*name).to_string()),
            ["end_header"] => break,
            _ => {}
        }
    }
    let count = count.ok_or_else(|| bad("no vertex element"))?;
    let col = |name: &str| props.iter().position(|p| p == name);
    let (ix, iy, iz) = match (col("x"), col("y"), col("z")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(bad("vertex needs x, y, z")),
    };
    let normal_cols = match (col("nx"), col("ny"), col("nz")) {
        (Some(a), Some(b), Some(c)) => Some((a, b, c)),
        _ => None,
    };
    let risk_col = col("risk");
    let dose_col = col("dose");
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let line = next()?.ok_or_else(|| bad("truncated vertex list"))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| bad("non-numeric vertex value")))
            .collect::<Result<_, _>>()?;
        if vals.len() < props.len() {
            return Err(bad("short vertex row"));
        }
        let position = Point3::new(vals[ix], vals[iy], vals[iz]);
        let normal = normal_cols
            .map(|(a, b, c)| Vec3::new(vals[a], vals[b], vals[c]))
            .unwrap_or_else(Vec3::z);
        let risk = risk_col
            .map(|i| RiskClass::from_scalar(vals[i]))
            .unwrap_or(RiskClass::NonHotspot);
        let dose = dose_col.map(|i| vals[i]).unwrap_or(0.0);
        out.push(SurfacePoint::new(position, normal, risk).with_dose(dose));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_foreign_property_order() {
        let text = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float dose\nproperty float z\n\
                    property float y\nproperty float x\nproperty uchar risk\nend_header\n7.5 3 2 1 1\n";
        let pts = read_ply(text.as_bytes()).unwrap();
        assert_eq!(pts[0].position, Point3::new(1.0, 2.0, 3.0));
        assert_eq!(pts[0].risk, RiskClass::Hotspot);
        assert_eq!(pts[0].dose(), 7.5);
    }

    #[test]
    fn rejects_binary() {
        let text = "ply\nformat binary_little_endian 1.0\nend_header\n";
        assert!(read_ply(text.as_bytes()).is_err());
    }

    #[test]
    fn color_ramp_ends() {
        assert_eq!(dose_color(0.0), [0, 0, 255]);
        assert_eq!(dose_color(1e3), [255, 0, 0]);
    }
}
