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
//! Probe evaluation and mission metrics.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::scene::{Probe, Thresholds};
use super::SimError;
use crate::geometry::{RiskClass, SurfacePoint};
use crate::optimizer::DoseTargets;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReading {
    pub id: String,
    pub object: String,
    pub risk: RiskClass,
    /// Index of the surface point the probe snapped to.
    pub point_index: usize,
    pub snap_distance_m: f64,
    pub dose_mj_cm2: f64,
    /// Above the card's readable range.
    pub saturated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoseSummary {
    pub count: usize,
    pub min: f64,
    pub mean: f64,
}

impl DoseSummary {
    pub fn of(doses: impl Iterator<Item = f64>) -> Option<Self> {
        let (mut count, mut min, mut sum) = (0usize, f64::INFINITY, 0.0);
        for d in doses {
            count += 1;
            min = min.min(d);
            sum += d;
        }
        (count > 0).then(|| Self {
            count,
            min,
            mean: sum / count as f64,
        })
    }
}

/// Coverage rates; `None` when there is no probe to count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub hcr: Option<f64>,
    pub ocr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteSummary {
    pub object_id: String,
    pub label: String,
    pub risk: RiskClass,
    pub stop_point: [usize; 2],
    pub segments: usize,
    pub dwell_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionReport {
    pub scene: String,
    pub policy: String,
    pub seed: u64,
    pub hcr: Option<f64>,
    pub ocr: Option<f64>,
    pub et_s: f64,
    pub travel_s: f64,
    pub irradiation_s: f64,
    pub travel_m: f64,
    pub surface_points: usize,
    pub hotspot_fraction: f64,
    /// Surface points below their planning target.
    pub points_below_target: usize,
    pub hotspot_dose: Option<DoseSummary>,
    pub nonhotspot_dose: Option<DoseSummary>,
    pub probes: Vec<ProbeReading>,
    pub sites: Vec<SiteSummary>,
    pub targets: DoseTargets,
    pub thresholds: Thresholds,
}

/// Snaps each probe to the nearest surface point of its object and reads
/// the dose there. `object_points(id)` yields `(global index, point)`.
pub fn read_probes<'a, F, I>(
    probes: &[Probe],
    snap_radius: f64,
    saturation: f64,
    object_points: F,
) -> Result<Vec<ProbeReading>, SimError>
where
    F: Fn(&str) -> Option<(RiskClass, I)>,
    I: Iterator<Item = (usize, &'a SurfacePoint)>,
{
    probes
        .iter()
        .map(|probe| {
            let (risk, pts) = object_points(&probe.object).ok_or_else(|| SimError::OrphanProbe(probe.id.clone()))?;
            let nearest = pts
                .map(|(i, p)| (i, (p.position - probe.position).norm(), p.dose()))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            match nearest {
                Some((point_index, dist, dose)) if dist <= snap_radius => Ok(ProbeReading {
                    id: probe.id.clone(),
                    object: probe.object.clone(),
                    risk,
                    point_index,
                    snap_distance_m: dist,
                    dose_mj_cm2: dose,
                    saturated: dose > saturation,
                }),
                _ => Err(SimError::OrphanProbe(probe.id.clone())),
            }
        })
        .collect()
}

/// HCR over hotspot probes at the hotspot threshold, OCR over all probes
/// at the overall threshold.
pub fn evaluate_probes(readings: &[ProbeReading], thresholds: &Thresholds) -> Coverage {
    let rate = |it: &mut dyn Iterator<Item = bool>| {
        let (mut n, mut ok) = (0usize, 0usize);
        for pass in it {
            n += 1;
            ok += usize::from(pass);
        }
        (n > 0).then(|| ok as f64 / n as f64)
    };
    Coverage {
        hcr: rate(
            &mut readings
                .iter()
                .filter(|r| r.risk == RiskClass::Hotspot)
                .map(|r| r.dose_mj_cm2 >= thresholds.hotspot),
        ),
        ocr: rate(&mut readings.iter().map(|r| r.dose_mj_cm2 >= thresholds.overall)),
    }
}

/// `mm:ss`, rounded to the nearest second.
pub fn format_mmss(seconds: f64) -> String {
    let s = seconds.max(0.0).round() as u64;
    format!("{:02}:{:02}", s / 60, s % 60)
}

fn pct(v: Option<f64>) -> String {
    v.map(|v| format!("{:.1}%", 100.0 * v)).unwrap_or_else(|| "n/a".into())
}

/// Relative ET saving of `candidate` over `baseline`, percent.
pub fn savings_pct(baseline: &MissionReport, candidate: &MissionReport) -> f64 {
    100.0 * (baseline.et_s - candidate.et_s) / baseline.et_s
}

/// Several policies on one scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub scene: String,
    pub seed: u64,
    pub reports: Vec<MissionReport>,
    /// Differentiated ET saving over uniform-high, percent.
    pub savings_pct: Option<f64>,
}

impl Comparison {
    pub fn new(reports: Vec<MissionReport>) -> Self {
        let find = |p: &str| reports.iter().find(|r| r.policy == p);
        let savings_pct = match (find("uniform"), find("diff")) {
            (Some(u), Some(d)) => Some(savings_pct(u, d)),
            _ => None,
        };
        Self {
            scene: reports.first().map(|r| r.scene.clone()).unwrap_or_default(),
            seed: reports.first().map(|r| r.seed).unwrap_or_default(),
            reports,
            savings_pct,
        }
    }

    pub fn table(&self) -> String {
        let mut out = format_table(&self.reports);
        if let Some(s) = self.savings_pct {
            let _ = writeln!(out, "differentiated saves {s:.1}% of ET over uniform-high");
        }
        out
    }
}

/// Plain-text table: policy, HCR, OCR, ET and its split.
pub fn format_table(reports: &[MissionReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>7} {:>7} {:>8} {:>8} {:>11}",
        "policy", "HCR", "OCR", "ET", "travel", "irradiation"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<10} {:>7} {:>7} {:>8} {:>8} {:>11}",
            r.policy,
            pct(r.hcr),
            pct(r.ocr),
            format_mmss(r.et_s),
            format_mmss(r.travel_s),
            format_mmss(r.irradiation_s)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reading(risk: RiskClass, dose: f64) -> ProbeReading {
        ProbeReading {
            id: String::new(),
            object: String::new(),
            risk,
            point_index: 0,
            snap_distance_m: 0.0,
            dose_mj_cm2: dose,
            saturated: false,
        }
    }

    #[test]
    fn all_above_threshold() {
        let r: Vec<_> = (0..4).map(|i| reading(if i % 2 == 0 { RiskClass::Hotspot } else { RiskClass::NonHotspot }, 30.0)).collect();
        let c = evaluate_probes(&r, &Thresholds::default());
        assert_eq!((c.hcr, c.ocr), (Some(1.0), Some(1.0)));
    }

    #[test]
    fn six_of_eleven_hotspots() {
        let r: Vec<_> = (0..11).map(|i| reading(RiskClass::Hotspot, if i < 6 { 26.0 } else { 20.0 })).collect();
        let hcr = evaluate_probes(&r, &Thresholds::default()).hcr.unwrap();
        assert!((100.0 * hcr - 54.5).abs() < 0.05);
    }

    #[test]
    fn no_hotspot_probes() {
        let c = evaluate_probes(&[reading(RiskClass::NonHotspot, 6.0)], &Thresholds::default());
        assert_eq!(c.hcr, None);
        assert_eq!(c.ocr, Some(1.0));
    }

    #[test]
    fn mmss() {
        assert_eq!(format_mmss(754.4), "12:34");
        assert_eq!(format_mmss(59.6), "01:00");
    }

    #[test]
    fn orphan_probe() {
        let probe = Probe {
            id: "p".into(),
            object: "o".into(),
            position: crate::geometry::Point3::origin(),
        };
        let pts = [SurfacePoint::new(
            crate::geometry::Point3::new(0.1, 0.0, 0.0),
            crate::geometry::Vec3::z(),
            RiskClass::Hotspot,
        )];
        let res = read_probes(&[probe], 0.01, 100.0, |_| Some((RiskClass::Hotspot, pts.iter().enumerate())));
        assert!(matches!(res, Err(SimError::OrphanProbe(ref p)) if p == "p"));
    }
}
