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
//! Irradiance of a three-tube assembly on a line of floor points, closed
//! form against a fine point-source sum.

use uvdose::geometry::{Point3, Pose, Vec3};
use uvdose::irradiance::{accumulate_dose, irradiance_quadrature, AssemblyConfig, Irradiance, LampAssembly};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = AssemblyConfig::default();
    // 30 cm above the floor, looking down.
    let pose = Pose::looking_along(Point3::new(0.0, 0.0, 0.3), &-Vec3::z(), &Vec3::x());
    let assembly = LampAssembly::new(&config, pose)?;
    println!("{:>6} {:>14} {:>14} {:>12}", "x_m", "closed_uW_cm2", "quad_uW_cm2", "dose_60s");
    for i in 0..=8 {
        let x = -0.2 + 0.05 * i as f64;
        let p = Point3::new(x, 0.0, 0.0);
        let e = assembly.irradiance_at(&p, &Vec3::z())?;
        let local = pose.inverse_transform_point(&p);
        let n = pose.inverse_transform_vector(&Vec3::z());
        let quad: f64 = assembly
            .lamps
            .iter()
            .map(|l| irradiance_quadrature(l, &local, &n, 10_000).map(|q| q.0))
            .sum::<Result<f64, _>>()?;
        let dose = accumulate_dose(e, 60.0)?;
        println!("{x:>6.2} {:>14.4} {:>14.4} {dose:>9.3} mJ/cm²", e.uw_per_cm2(), Irradiance(quad).uw_per_cm2());
    }
    Ok(())
}
