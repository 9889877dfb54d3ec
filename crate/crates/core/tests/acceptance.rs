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

//! Acceptance criteria 1–8. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uvdose::geometry::{world_to_lamp_frame, Point3, RiskClass, SurfacePoint, Vec3};
use uvdose::irradiance::{irradiance_closed_form, Lamp};
use uvdose::lp::{solve, vertex_oracle, LpStatus};
use uvdose::mapping::{estimate_normals, SurfaceCloud, Viewpoint};
use uvdose::planner::{astar, CellState, GridMap, PlannerError};
use uvdose::simulator::{MissionContext, MissionOutcome, MissionReport, Policy, Scene};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scene_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes").join(name)
}

struct Run {
    ctx: MissionContext,
    outcomes: Vec<MissionOutcome>,
    elapsed: Duration,
}

impl Run {
    fn new(name: &str) -> Result<Self, String> {
        let t0 = Instant::now();
        let scene = Scene::load(&scene_path(name)).map_err(|e| e.to_string())?;
        let ctx = MissionContext::build(&scene).map_err(|e| e.to_string())?;
        let policies: &[Policy] = if scene.station.positions.is_empty() {
            &[Policy::Differentiated, Policy::UniformHigh]
        } else {
            &Policy::ALL
        };
        let (_, outcomes) = ctx.compare(policies).map_err(|e| e.to_string())?;
        Ok(Self {
            ctx,
            outcomes,
            elapsed: t0.elapsed(),
        })
    }

    fn report(&self, policy: Policy) -> &MissionReport {
        &self.outcomes.iter().find(|o| o.report.policy == policy.name()).unwrap().report
    }
}

fn criterion_1() -> Verdict {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let length = rng.random_range(0.05..1.2);
        let flux = rng.random_range(0.2..20.0);
        let y_off = rng.random_range(-0.1..0.1);
        let lamp = Lamp::new(length, flux, y_off).map_err(|e| e.to_string())?;
        // At least 5 cm from the tube axis.
        let p = Point3::new(
            rng.random_range(-1.0..1.0),
            y_off + rng.random_range(-0.5..0.5),
            rng.random_range(0.05..1.5),
        );
        let to_center = (Vec3::new(0.0, y_off, 0.0) - p.coords).normalize();
        let jitter = Vec3::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let n = (to_center + jitter).normalize();
        let e = irradiance_closed_form(&lamp, &p, &n).map_err(|e| e.to_string())?.0;
        let q = common::tube_quadrature([0.0, y_off, 0.0], [1.0, 0.0, 0.0], length, flux, p.into(), n.into(), 100_000);
        let err = if q == 0.0 { e.abs() } else { (e - q).abs() / q };
        worst = worst.max(err);
    }
    let elapsed = t0.elapsed();
    check(
        worst <= 1e-6 && elapsed < Duration::from_secs(10),
        format!("worst relative error {worst:.2e} over 1000 configurations, {elapsed:.1?}"),
    )
}

fn criterion_2() -> Verdict {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1b);
    let (mut worst_obj, mut worst_kkt) = (0.0f64, 0.0f64);
    let (mut max_rows, mut max_cols) = (0, 0);
    for trial in 0..200 {
        let lp = common::random_lp(&mut rng, 150_000);
        max_rows = max_rows.max(lp.rows());
        max_cols = max_cols.max(lp.cols());
        let ipm = solve(&lp);
        let exact = vertex_oracle(&lp).map_err(|e| e.to_string())?;
        if ipm.status != LpStatus::Optimal || !lp.certifies(&ipm.t) {
            return Err(format!("trial {trial}: status {:?}", ipm.status));
        }
        worst_obj = worst_obj.max((ipm.objective - exact.objective).abs() / exact.objective.abs());
        worst_kkt = worst_kkt.max(ipm.kkt_residuals.max());
    }
    let elapsed = t0.elapsed();
    check(
        worst_obj <= 1e-5 && worst_kkt <= 1e-6 && elapsed < Duration::from_secs(30),
        format!(
            "objective rel err {worst_obj:.1e}, KKT {worst_kkt:.1e}, up to {max_rows} rows / {max_cols} vars, {elapsed:.1?}"
        ),
    )
}

fn criterion_3(ward: &Run) -> Verdict {
    let ctx = &ward.ctx;
    let targets = ctx.scene.targets;
    if targets.hotspot_min < 22.0 || targets.nonhotspot_min < 5.0 {
        return Err(format!("scene targets {targets:?} below the dose standard"));
    }
    let profiles = ctx.solve_dwell(&targets).map_err(|e| e.to_string())?;
    let min_dt = profiles.iter().flat_map(|p| p.dwell_times()).fold(f64::INFINITY, f64::min);
    let exposures = ctx.exposures(&profiles);
    let violations = ctx
        .points
        .iter()
        .filter(|pt| {
            let dose = common::compensated_sum(exposures.iter().flat_map(|(pose, dt)| {
                let p = world_to_lamp_frame(pose, &pt.position);
                let n = pose.inverse_transform_vector(&pt.normal);
                ctx.assembly
                    .lamps
                    .iter()
                    .map(move |l| irradiance_closed_form(l, &p, &n).map_or(f64::NAN, |e| e.mw_per_cm2() * dt))
                    .collect::<Vec<_>>()
            }));
            dose.is_nan() || dose < targets.for_risk(pt.risk) * (1.0 - 1e-6)
        })
        .count();
    check(
        violations == 0 && min_dt >= 0.1,
        format!(
            "{} points, {violations} below target, min dwell {min_dt:.3} s, {} segments",
            ctx.points.len(),
            exposures.len()
        ),
    )
}

fn savings(run: &Run) -> Verdict {
    let d = run.report(Policy::Differentiated);
    let u = run.report(Policy::UniformHigh);
    let pct = 100.0 * (u.et_s - d.et_s) / u.et_s;
    let full = [d, u].iter().all(|r| r.hcr == Some(1.0) && r.ocr == Some(1.0));
    let hot = 100.0 * run.ctx.hotspot_fraction();
    check(
        d.et_s < u.et_s && (15.0..=45.0).contains(&pct) && full && run.elapsed < Duration::from_secs(300),
        format!(
            "{}: ET {:.0} s vs {:.0} s, savings {pct:.1}%, hotspot {hot:.0}%, HCR/OCR {}, {:.1?}",
            run.ctx.scene.name,
            d.et_s,
            u.et_s,
            if full { "100%" } else { "below 100%" },
            run.elapsed
        ),
    )
}

fn criterion_4(ward: &Run, clinic: &Run) -> Verdict {
    match (savings(ward), savings(clinic)) {
        (Ok(a), Ok(b)) => Ok(format!("{a}; {b}")),
        (a, b) => Err(format!("{}; {}", a.unwrap_or_else(|e| e), b.unwrap_or_else(|e| e))),
    }
}

fn criterion_5(clinic: &Run) -> Verdict {
    if clinic.ctx.scene.obstacles.is_empty() {
        return Err("clinic scene has no occluding partition".into());
    }
    let s = clinic.report(Policy::FixedStation);
    let arms_full = [Policy::Differentiated, Policy::UniformHigh]
        .iter()
        .all(|p| clinic.report(*p).ocr == Some(1.0));
    let ocr = s.ocr.unwrap_or(1.0);
    check(
        ocr < 1.0 && arms_full,
        format!("station OCR {:.1}% HCR {:.1}%, arm policies OCR 100%: {arms_full}", 100.0 * ocr, 100.0 * s.hcr.unwrap_or(1.0)),
    )
}

fn criterion_6() -> Verdict {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa5);
    let mut matched = 0;
    for _ in 0..50 {
        let mut g = GridMap::new(20, 20, 0.05, Point3::origin()).map_err(|e| e.to_string())?;
        for y in 0..20 {
            for x in 0..20 {
                if rng.random_bool(0.25) {
                    g.set([x, y], CellState::Occupied);
                }
            }
        }
        let mut free = || loop {
            let c = [rng.random_range(0..20), rng.random_range(0..20)];
            if g.is_free(c) {
                return c;
            }
        };
        let (a, b) = (free(), free());
        let oracle = common::dijkstra_cost(&g, a, b);
        let got = match astar(&g, a, b) {
            Ok(p) => Some(p.cost()),
            Err(PlannerError::NoPath { .. }) => None,
            Err(e) => return Err(e.to_string()),
        };
        if got != oracle {
            return Err(format!("{a:?} -> {b:?}: {got:?} vs {oracle:?}"));
        }
        matched += 1;
    }
    let elapsed = t0.elapsed();
    check(elapsed < Duration::from_secs(5), format!("{matched}/50 exact, {elapsed:.1?}"))
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7);
    let plane: Vec<SurfacePoint> = (0..400)
        .map(|_| {
            let p = Point3::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), 0.4);
            SurfacePoint::new(p, Vec3::x(), RiskClass::Hotspot)
        })
        .collect();
    let cloud = SurfaceCloud::new(plane, "plane", Viewpoint::Sensor(Point3::new(0.5, 0.5, 2.0)));
    let out = estimate_normals(&cloud, 12).map_err(|e| e.to_string())?;
    let plane_err = out.points.iter().map(|p| (p.normal - Vec3::z()).norm()).fold(0.0, f64::max);

    let (n, c) = (500, Point3::new(0.0, 0.0, 1.0));
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let sphere: Vec<SurfacePoint> = (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let th = golden * i as f64;
            SurfacePoint::new(c + 0.3 * Vec3::new(rho * th.cos(), rho * th.sin(), z), Vec3::z(), RiskClass::Hotspot)
        })
        .collect();
    let out = estimate_normals(&SurfaceCloud::new(sphere, "sphere", Viewpoint::Interior(c)), 12)
        .map_err(|e| e.to_string())?;
    let sphere_deg = out
        .points
        .iter()
        .map(|p| p.normal.dot(&(p.position - c).normalize()).clamp(-1.0, 1.0).acos().to_degrees())
        .fold(0.0, f64::max);
    check(
        plane_err <= 1e-6 && sphere_deg <= 2.0,
        format!("plane {plane_err:.1e}, sphere worst {sphere_deg:.2}° (500 points, k = 12)"),
    )
}

fn criterion_8() -> Verdict {
    let scene = scene_path("clinic.json");
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    let mut bytes = Vec::new();
    for d in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_uvdose"))
            .args(["compare", "--scene", scene.to_str().unwrap(), "--seed", "11", "--out"])
            .arg(d.path())
            .env("UVDOSE_LOG", "error")
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("compare exited with {status}"));
        }
        bytes.push(std::fs::read(d.path().join("comparison.json")).map_err(|e| e.to_string())?);
    }
    check(bytes[0] == bytes[1], format!("clinic comparison.json, {} bytes per run", bytes[0].len()))
}

fn main() {
    let t0 = Instant::now();
    let ward = Run::new("ward.json");
    let clinic = Run::new("clinic.json");
    let scene_err = |r: &Result<Run, String>| r.as_ref().err().cloned().unwrap_or_default();
    let results: Vec<(u32, &str, Verdict)> = vec![
        (1, "irradiance closed form vs quadrature", criterion_1()),
        (2, "interior point vs vertex enumeration", criterion_2()),
        (3, "ward dose certificate", ward.as_ref().map_err(|_| scene_err(&ward)).and_then(criterion_3)),
        (
            4,
            "differentiated savings",
            match (&ward, &clinic) {
                (Ok(w), Ok(c)) => criterion_4(w, c),
                _ => Err(format!("{} {}", scene_err(&ward), scene_err(&clinic))),
            },
        ),
        (5, "fixed-station blind spots", clinic.as_ref().map_err(|_| scene_err(&clinic)).and_then(criterion_5)),
        (6, "A* vs Dijkstra", criterion_6()),
        (7, "normal estimation", criterion_7()),
        (8, "deterministic compare", criterion_8()),
    ];
    let mut failed = 0;
    for (n, name, verdict) in &results {
        match verdict {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.1?}", results.len() - failed, t0.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
