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
//! Virtual depth scans of scene objects.

use super::raycast::{first_hit, in_free_space};
use super::scene::Scene;
use super::SimError;
use crate::mapping::OccupancyOctree;

/// Sensor distances tried, nearest last, when looking for free space in
/// front of a surface sample.
const SENSOR_DISTANCES: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

/// Looks at every object surface sample head-on from free space in front of
/// it and inserts the first intersection along that ray. Samples with no
/// free space in front (against a wall or another object) stay unobserved.
/// All rays form one batch, so a leaf that ends any ray is never carved
/// free by another.
pub fn synthesize_scan(scene: &Scene) -> Result<OccupancyOctree, SimError> {
    let res = scene.mapping.resolution;
    let size = scene.room.size();
    let extent = size.x.max(size.y).max(size.z);
    let mut tree = OccupancyOctree::new(scene.room.min, extent, res)
        .map_err(|e| SimError::Scene(format!("octree: {e}")))?;
    let mut rays = Vec::new();
    for obj in &scene.objects {
        for (p, n) in obj.shape.sample_surface(0.5 * res) {
            let Some(origin) = SENSOR_DISTANCES
                .iter()
                .map(|k| p + n * *k)
                .find(|o| in_free_space(scene, o, 1e-6))
            else {
                continue;
            };
            let dir = -n;
            let Some((t, _)) = first_hit(scene, &origin, &dir) else {
                continue;
            };
            // Just past the surface so the hit lands in the leaf behind it.
            rays.push((origin, origin + dir * (t + 1e-6)));
        }
    }
    tree.integrate_rays(&rays)
        .map_err(|e| SimError::Scene(format!("scan: {e}")))?;
    Ok(tree)
}
