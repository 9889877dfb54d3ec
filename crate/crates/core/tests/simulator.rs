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

mod common;

use std::path::Path;
use std::sync::OnceLock;

use uvdose::geometry::{Point3, RiskClass};
use uvdose::irradiance::irradiance_closed_form;
use uvdose::geometry::world_to_lamp_frame;
use uvdose::simulator::{MissionContext, MissionOutcome, Obstacle, Policy, Scene, Shape, SimError};

fn fixture(name: &str) -> Scene {
    Scene::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

struct Small {
    ctx: MissionContext,
    outcomes: Vec<MissionOutcome>,
}

fn small() -> &'static Small {
    static CELL: OnceLock<Small> = OnceLock::new();
    CELL.get_or_init(|| {
        let ctx = MissionContext::build(&fixture("small.json")).unwrap();
        let (_, outcomes) = ctx.compare(&Policy::ALL).unwrap();
        Small { ctx, outcomes }
    })
}

#[test]
fn every_point_gets_its_energy() {
    let s = small();
    let ctx = &s.ctx;
    for (policy, outcome) in [Policy::Differentiated, Policy::UniformHigh].iter().zip(&s.outcomes) {
        let targets = match policy {
            Policy::UniformHigh => ctx.scene.targets.uniform_high(),
            _ => ctx.scene.targets,
        };
        let profiles = ctx.solve_dwell(&targets).unwrap();
        let exposures = ctx.exposures(&profiles);
        assert!(exposures.iter().all(|(_, dt)| *dt >= 0.1));
        for (base, done) in ctx.points.iter().zip(&outcome.points) {
            // Per-tube closed form, summed independently in mJ/cm².
            let dose = common::compensated_sum(exposures.iter().flat_map(|(pose, dt)| {
                let p = world_to_lamp_frame(pose, &base.position);
                let n = pose.inverse_transform_vector(&base.normal);
                ctx.assembly
                    .lamps
                    .iter()
                    .map(move |lamp| irradiance_closed_form(lamp, &p, &n).unwrap().mw_per_cm2() * dt)
                    .collect::<Vec<_>>()
            }));
            assert!((dose - done.dose()).abs() <= 1e-9 * dose.max(1.0), "{dose} vs {}", done.dose());
            assert!(done.dose() >= targets.for_risk(base.risk) * (1.0 - 1e-6));
        }
        assert_eq!(outcome.report.points_below_target, 0);
    }
}

#[test]
fn arm_policies_cover_everything_and_differentiated_is_faster() {
    let s = small();
    let (diff, uni, station) = (&s.outcomes[0].report, &s.outcomes[1].report, &s.outcomes[2].report);
    for r in [diff, uni] {
        assert_eq!(r.hcr, Some(1.0));
        assert_eq!(r.ocr, Some(1.0));
    }
    assert!(diff.et_s < uni.et_s);
    assert_eq!(diff.travel_s, uni.travel_s);
    for r in [diff, uni, station] {
        assert!((r.et_s - (r.travel_s + r.irradiation_s)).abs() < 1e-9);
        assert!((r.travel_s - r.travel_m / s.ctx.scene.chassis.speed).abs() < 1e-9);
    }
    assert!((station.irradiation_s - 600.0).abs() < 1e-9);
}

#[test]
fn both_objects_visited() {
    let s = small();
    let mut objects: Vec<usize> = s.ctx.visits.iter().map(|v| v.object).collect();
    objects.sort_unstable();
    assert_eq!(objects, vec![0, 1]);
    let hot = s.ctx.hotspot_fraction();
    assert!(hot > 0.0 && hot < 1.0);
    assert!(s.ctx.points.iter().any(|p| p.risk == RiskClass::Hotspot));
}

#[test]
fn reports_are_reproducible() {
    let scene = fixture("small.json");
    let a = MissionContext::build(&scene).unwrap().run(Policy::Differentiated).unwrap();
    let b = serde_json::to_string(&a.report).unwrap();
    assert_eq!(b, serde_json::to_string(&small().outcomes[0].report).unwrap());
}

#[test]
fn occluder_hides_surface_from_the_station() {
    let open = small().outcomes[2].report.ocr.unwrap();
    let mut scene = fixture("small.json");
    // A screen between the station and the shelf.
    scene.obstacles.push(Obstacle {
        id: "screen".into(),
        shape: Shape::Box {
            min: Point3::new(2.6, 1.9, 0.0),
            max: Point3::new(2.7, 2.9, 2.0),
        },
    });
    let outcome = MissionContext::build(&scene).unwrap().run(Policy::FixedStation).unwrap();
    let ocr = outcome.report.ocr.unwrap();
    assert!(ocr < 1.0);
    assert!(ocr < open || open < 1.0);
    let shelf_front = outcome.report.probes.iter().find(|p| p.id == "shelf-front").unwrap();
    assert_eq!(shelf_front.dose_mj_cm2, 0.0);
}

#[test]
fn walled_off_object_has_no_path() {
    let err = MissionContext::build(&fixture("walled.json")).unwrap_err();
    assert!(matches!(err, SimError::Planner(_)), "{err:?}");
}

#[test]
fn out_of_reach_object_is_reported() {
    let mut scene = fixture("small.json");
    scene.arm.z_max = 0.3;
    let err = MissionContext::build(&scene).and_then(|c| c.run(Policy::Differentiated)).unwrap_err();
    assert!(matches!(err, SimError::UnreachablePoint { .. }), "{err:?}");
}

#[test]
fn bad_scenes_are_rejected() {
    let mut scene = fixture("small.json");
    scene.start = [1.3, 1.2];
    assert!(matches!(MissionContext::build(&scene), Err(SimError::StartBlocked)));
    let mut scene = fixture("small.json");
    scene.probes[0].position = Point3::new(1.3, 1.2, 1.5);
    let err = MissionContext::build(&scene).unwrap_err();
    assert!(matches!(err, SimError::Scene(ref m) if m.contains("table-top")), "{err:?}");
}
