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
use super::scene::Scene;
use crate::geometry::{Point3, Vec3};

/// Whether the open segment `(a, b)` passes through any obstacle or object.
pub fn ray_occluded(scene: &Scene, a: &Point3, b: &Point3) -> bool {
    scene.primitives().any(|s| s.blocks_segment(a, b))
}

/// Nearest primitive surface along the ray `o + t·d`, as `(t, index)` over
/// [`Scene::primitives`].
pub fn first_hit(scene: &Scene, o: &Point3, d: &Vec3) -> Option<(f64, usize)> {
    scene
        .primitives()
        .enumerate()
        .filter_map(|(i, s)| s.ray_entry(o, d).map(|t| (t, i)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
}

/// Inside the room and at least `margin` away from walls and every
/// primitive.
pub fn in_free_space(scene: &Scene, p: &Point3, margin: f64) -> bool {
    let r = &scene.room;
    (0..3).all(|i| p[i] >= r.min[i] + margin && p[i] <= r.max[i] - margin)
        && scene
            .primitives()
            .all(|s| !s.contains_strict(p) && s.surface_distance(p) >= margin)
}
