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
//! Virtual scan of a table into the occupancy octree, surface extraction,
//! normals and a 30 cm standoff sweep.

use uvdose::geometry::{RiskClass, Vec3};
use uvdose::mapping::{estimate_normals, extract_surface, generate_scan_trajectory, split_by_axis};
use uvdose::simulator::{synthesize_scan, Scene};

const SCENE: &str = r#"{
    "name": "one table",
    "room": {"min": [0, 0, 0], "max": [3, 3, 2.5]},
    "objects": [{"id": "t", "label": "table", "shape": {"type": "box", "min": [1.1, 1.2, 0.66], "max": [1.9, 1.8, 0.74]}}],
    "start": [0.4, 0.4],
    "mapping": {"resolution": 0.04}
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scene = Scene::from_json(SCENE)?;
    let tree = synthesize_scan(&scene)?;
    println!("occupied leaves: {}", tree.occupied_leaves().len());
    let table = &scene.objects[0];
    let raw = extract_surface(&tree, &table.shape.aabb().expanded(0.04), table.shape.viewpoint(), RiskClass::Hotspot)?;
    let cloud = estimate_normals(&raw, 12)?;
    println!("surface points: {}", cloud.len());
    for facet in split_by_axis(&cloud) {
        let n = facet.points.iter().fold(Vec3::zeros(), |a, p| a + p.normal).normalize();
        let sweep = generate_scan_trajectory(&facet, 0.3, 0.135, &|_| true)?;
        let length: f64 = sweep.arc_lengths().iter().sum();
        println!(
            "facet n≈[{:+.0} {:+.0} {:+.0}]: {:4} points, {:3} poses, {:.2} m of sweep",
            n.x,
            n.y,
            n.z,
            facet.len(),
            sweep.len(),
            length
        );
    }
    Ok(())
}
