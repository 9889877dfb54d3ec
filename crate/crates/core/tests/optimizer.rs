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

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uvdose::geometry::{Point3, Pose, RiskClass, SurfacePoint, Vec3};
use uvdose::irradiance::{irradiance_assembly, AssemblyConfig, LampAssembly};
use uvdose::lp::{vertex_oracle, LinearProgram};
use uvdose::mapping::{ScanSegment, ScanTrajectory};
use uvdose::optimizer::{
    build_dose_matrix, compare_uniform_vs_differentiated, optimize_dwell, write_dose_report_csv, write_speed_csv,
    DoseMatrix, DoseTargets, DwellParams, OptimizeError, SpeedProfile,
};

use common::tube_quadrature;

const HOT: RiskClass = RiskClass::Hotspot;
const COLD: RiskClass = RiskClass::NonHotspot;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn down_at(x: f64, y: f64, z: f64) -> Pose {
    Pose::looking_along(Point3::new(x, y, z), &-Vec3::z(), &Vec3::x())
}

fn trajectory(poses: &[Pose]) -> ScanTrajectory {
    let mut segments: Vec<ScanSegment> = Vec::new();
    for p in poses {
        let arc_length = segments.last().map_or(0.0, |s| (p.translation() - s.pose.translation()).norm());
        segments.push(ScanSegment { pose: *p, arc_length });
    }
    ScanTrajectory { segments, standoff: 0.3 }
}

fn up(x: f64, y: f64, risk: RiskClass) -> SurfacePoint {
    SurfacePoint::new(Point3::new(x, y, 0.0), Vec3::z(), risk)
}

fn single(e: f64, risk: RiskClass) -> (DoseMatrix, Vec<SurfacePoint>) {
    (DoseMatrix::from_rows(&[vec![e]], vec![0.0]).unwrap(), vec![up(0.0, 0.0, risk)])
}

fn certify(dm: &DoseMatrix, points: &[SurfacePoint], targets: &DoseTargets, profile: &SpeedProfile) {
    let dwell = profile.dwell_times();
    for (n, p) in points.iter().enumerate() {
        let dose = common::compensated_sum((0..dm.n_segments()).map(|i| dm.get(i, n) * dwell[i]));
        let target = targets.for_risk(p.risk);
        assert!(dose >= target * (1.0 - 1e-6), "point {n}: {dose} < {target}");
    }
    assert!(dwell.iter().all(|t| *t >= 0.1));
    assert!((profile.total_time - common::compensated_sum(dwell.iter().copied())).abs() < 1e-9);
}

#[test]
fn dose_matrix_matches_quadrature() {
    let config = AssemblyConfig::default();
    let assembly = LampAssembly::new(&config, Pose::identity()).unwrap();
    let poses = [down_at(0.0, 0.0, 0.3), down_at(0.1, 0.0, 0.3), down_at(0.2, 0.05, 0.3)];
    let points = [up(0.05, 0.02, HOT), up(0.15, -0.04, COLD)];
    let dm = build_dose_matrix(&trajectory(&poses), &points, &assembly, None).unwrap();
    for (i, pose) in poses.iter().enumerate() {
        for (n, sp) in points.iter().enumerate() {
            let w_per_m2: f64 = [config.spacing_m, 0.0, -config.spacing_m]
                .iter()
                .map(|y| {
                    let c = pose.transform_point(&Point3::new(0.0, *y, 0.0));
                    tube_quadrature(
                        c.into(),
                        pose.x_axis().into(),
                        config.length_m,
                        config.flux_w,
                        sp.position.into(),
                        sp.normal.into(),
                        100_000,
                    )
                })
                .sum();
            // 1 W/m² = 0.1 mW/cm².
            assert!(rel(dm.get(i, n), 0.1 * w_per_m2) < 1e-6);
        }
    }
}

#[test]
fn dose_matrix_delegates_and_culls() {
    let assembly = LampAssembly::new(&AssemblyConfig::default(), Pose::identity()).unwrap();
    let pose = down_at(0.0, 0.0, 0.3);
    let facing = up(0.0, 0.0, HOT);
    let behind = SurfacePoint::new(Point3::new(0.0, 0.0, 0.0), -Vec3::z(), HOT);
    let dm = build_dose_matrix(&trajectory(&[pose]), &[facing.clone(), behind], &assembly, None).unwrap();
    let direct = irradiance_assembly(&assembly.at(pose), &facing).unwrap().mw_per_cm2();
    assert_eq!(dm.get(0, 0), direct);
    assert_eq!(dm.get(0, 1), 0.0);
    let hidden = |_: usize, _: &Pose, _: &SurfacePoint| false;
    let dm = build_dose_matrix(&trajectory(&[pose]), std::slice::from_ref(&facing), &assembly, Some(&hidden)).unwrap();
    assert_eq!(dm.get(0, 0), 0.0);
    assert!(matches!(
        build_dose_matrix(&ScanTrajectory::default(), &[facing], &assembly, None),
        Err(OptimizeError::Empty(_))
    ));
}

#[test]
fn standard_doses() {
    let params = DwellParams::default();
    let targets = DoseTargets::default();
    let (dm, pts) = single(1.0, HOT);
    let p = optimize_dwell(&dm, &pts, &targets, &params).unwrap();
    assert!((p.segments[0].dwell - 22.0).abs() < 1e-6 && (p.total_time - 22.0).abs() < 1e-6);
    let (dm, pts) = single(1.0, COLD);
    assert!((optimize_dwell(&dm, &pts, &targets, &params).unwrap().total_time - 5.0).abs() < 1e-6);
    let (u, d) = compare_uniform_vs_differentiated(&dm, &pts, &targets, &params).unwrap();
    assert!((u - 22.0).abs() < 1e-6 && (d - 5.0).abs() < 1e-6);
}

#[test]
fn two_by_two_matches_vertex_oracle() {
    let dm = DoseMatrix::from_rows(&[vec![2.0, 0.0], vec![1.0, 3.0]], vec![0.0, 0.0]).unwrap();
    let pts = [up(0.0, 0.0, HOT), up(1.0, 0.0, HOT)];
    let p = optimize_dwell(&dm, &pts, &DoseTargets::default(), &DwellParams::default()).unwrap();
    let lp = LinearProgram::min_total(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]), vec![22.0; 2], vec![0.1; 2])
        .unwrap();
    let exact = vertex_oracle(&lp).unwrap();
    for (got, want) in p.dwell_times().iter().zip(&exact.t) {
        assert!((got - want).abs() < 1e-6);
        assert!((got - 22.0 / 3.0).abs() < 1e-6);
    }
}

#[test]
fn dark_point_is_reported() {
    let dm = DoseMatrix::from_rows(&[vec![1.0, 0.0, 2.0]], vec![0.0]).unwrap();
    let pts = [up(0.0, 0.0, HOT), up(1.0, 0.0, COLD), up(2.0, 0.0, HOT)];
    assert_eq!(
        optimize_dwell(&dm, &pts, &DoseTargets::default(), &DwellParams::default()),
        Err(OptimizeError::UnreachablePoint(1))
    );
}

#[test]
fn speed_limit_sets_the_lower_bound() {
    let dm = DoseMatrix::from_rows(&[vec![10.0], vec![10.0]], vec![0.0, 2.0]).unwrap();
    let p = optimize_dwell(&dm, &[up(0.0, 0.0, COLD)], &DoseTargets::default(), &DwellParams::default()).unwrap();
    assert!((p.segments[1].dwell - 8.0).abs() < 1e-6);
    assert!(p.segments[1].speed <= 0.25 + 1e-9);
    assert!((p.segments[0].dwell - 0.1).abs() < 1e-9);
}

fn random_instance(rng: &mut ChaCha8Rng, segments: usize, points: usize) -> (DoseMatrix, Vec<SurfacePoint>) {
    let rows: Vec<Vec<f64>> = (0..segments)
        .map(|_| (0..points).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.01..3.0) }).collect())
        .collect();
    let mut rows = rows;
    for n in 0..points {
        rows[n % segments][n] = rng.random_range(0.5..3.0);
    }
    let arcs = (0..segments).map(|i| if i == 0 { 0.0 } else { rng.random_range(0.0..0.2) }).collect();
    let pts = (0..points)
        .map(|n| up(n as f64, 0.0, if rng.random_bool(0.3) { HOT } else { COLD }))
        .collect();
    (DoseMatrix::from_rows(&rows, arcs).unwrap(), pts)
}

#[test]
fn random_plans_certify_and_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let targets = DoseTargets::default();
    let params = DwellParams::default();
    for _ in 0..40 {
        let (segments, points) = (rng.random_range(1..=6), rng.random_range(1..=10));
        let (dm, pts) = random_instance(&mut rng, segments, points);
        let profile = optimize_dwell(&dm, &pts, &targets, &params).unwrap();
        certify(&dm, &pts, &targets, &profile);
        let lp = LinearProgram::min_total(
            DMatrix::from_fn(points, segments, |n, i| dm.get(i, n)),
            pts.iter().map(|p| targets.for_risk(p.risk)).collect(),
            dm.arc_lengths.iter().map(|a| (a / params.v_max).max(0.1)).collect(),
        )
        .unwrap();
        let exact = vertex_oracle(&lp).unwrap();
        assert!(rel(profile.total_time, exact.objective) < 1e-5);
    }
}

#[test]
fn subsampled_constraints_still_certify() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (dm, pts) = random_instance(&mut rng, 8, 400);
    let targets = DoseTargets::default();
    let capped = DwellParams {
        constraint_cap: 30,
        ..DwellParams::default()
    };
    let profile = optimize_dwell(&dm, &pts, &targets, &capped).unwrap();
    certify(&dm, &pts, &targets, &profile);
    let full = optimize_dwell(&dm, &pts, &targets, &DwellParams::default()).unwrap();
    assert!(profile.total_time >= full.total_time * (1.0 - 1e-6));
}

#[test]
fn mixed_patch_differentiated_is_cheaper() {
    let assembly = LampAssembly::new(&AssemblyConfig::default(), Pose::identity()).unwrap();
    let poses: Vec<Pose> = (0..5).flat_map(|i| (0..3).map(move |j| down_at(0.1 * i as f64, 0.1 * j as f64, 0.3))).collect();
    let points: Vec<SurfacePoint> = (0..=20)
        .flat_map(|i| (0..=10).map(move |j| (0.02 * i as f64, 0.02 * j as f64)))
        .map(|(x, y)| up(x, y, if x < 0.12 { HOT } else { COLD }))
        .collect();
    let hot = points.iter().filter(|p| p.risk == HOT).count() as f64 / points.len() as f64;
    assert!((0.25..0.35).contains(&hot));
    let dm = build_dose_matrix(&trajectory(&poses), &points, &assembly, None).unwrap();
    let targets = DoseTargets::default();
    let (u, d) = compare_uniform_vs_differentiated(&dm, &points, &targets, &DwellParams::default()).unwrap();
    assert!(d < u, "{d} vs {u}");
    let all_hot: Vec<SurfacePoint> = points.iter().map(|p| up(p.position.x, p.position.y, HOT)).collect();
    let (u, d) = compare_uniform_vs_differentiated(&dm, &all_hot, &targets, &DwellParams::default()).unwrap();
    assert!(rel(d, u) < 1e-9);
}

#[test]
fn csv_layouts() {
    let profile = SpeedProfile::from_dwell(&[0.0, 0.5], &[1.0, 4.0]);
    let mut buf = Vec::new();
    write_speed_csv(&mut buf, &profile).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("segment_index,arc_length_m,dwell_s,speed_m_per_s"));
    assert_eq!(text.lines().nth(2), Some("1,0.5,4,0.125"));
    let mut buf = Vec::new();
    write_dose_report_csv(&mut buf, &[up(1.0, 2.0, HOT).with_dose(30.0)], &DoseTargets::default()).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().nth(1), Some("0,1,2,0,1,30,22,8"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differentiated_never_costs_more(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, n) = (rng.random_range(1..=8), rng.random_range(1..=30));
        let (dm, pts) = random_instance(&mut rng, s, n);
        let (u, d) = compare_uniform_vs_differentiated(&dm, &pts, &DoseTargets::default(), &DwellParams::default()).unwrap();
        prop_assert!(d <= u * (1.0 + 1e-6));
    }

    #[test]
    fn removing_a_point_never_costs_more(seed in any::<u64>(), drop in 0usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, n) = (rng.random_range(1..=8), rng.random_range(2..=30));
        let (dm, pts) = random_instance(&mut rng, s, n);
        let drop = drop % n;
        let rows: Vec<Vec<f64>> = (0..s)
            .map(|i| (0..n).filter(|&k| k != drop).map(|k| dm.get(i, k)).collect())
            .collect();
        let fewer = DoseMatrix::from_rows(&rows, dm.arc_lengths.clone()).unwrap();
        let mut kept = pts.clone();
        kept.remove(drop);
        let targets = DoseTargets::default();
        let params = DwellParams::default();
        let full = optimize_dwell(&dm, &pts, &targets, &params).unwrap();
        let less = optimize_dwell(&fewer, &kept, &targets, &params).unwrap();
        prop_assert!(less.total_time <= full.total_time * (1.0 + 1e-6));
        certify(&fewer, &kept, &targets, &less);
    }
}
