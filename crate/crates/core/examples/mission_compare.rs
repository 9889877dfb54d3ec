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
//! Runs every policy on a bundled scene and prints the comparison table.
//!
//! `cargo run --release --example mission_compare -- scenes/clinic.json`

use std::path::PathBuf;
use std::time::Instant;

use uvdose::simulator::{MissionContext, Policy, Scene};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenes/ward.json"));
    let scene = Scene::load(&path)?;
    let t0 = Instant::now();
    let ctx = MissionContext::build(&scene)?;
    println!(
        "{}: {} surface points ({:.0}% hotspot), {} sites, built in {:.1?}",
        scene.name,
        ctx.points.len(),
        100.0 * ctx.hotspot_fraction(),
        ctx.visits.len(),
        t0.elapsed()
    );
    let policies: Vec<Policy> = if scene.station.positions.is_empty() {
        vec![Policy::Differentiated, Policy::UniformHigh]
    } else {
        Policy::ALL.to_vec()
    };
    let (comparison, _) = ctx.compare(&policies)?;
    print!("{}", comparison.table());
    println!("total {:.1?}", t0.elapsed());
    Ok(())
}
