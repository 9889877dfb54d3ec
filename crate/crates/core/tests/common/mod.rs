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
//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::f64::consts::SQRT_2;
use std::ops::Add;

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use uvdose::planner::GridMap;

/// Path cost kept as (straight, diagonal) step counts so sums are exact.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Steps(u32, u32);

impl Steps {
    pub fn value(self) -> f64 {
        self.0 as f64 + SQRT_2 * self.1 as f64
    }
}

impl Add for Steps {
    type Output = Steps;
    fn add(self, o: Steps) -> Steps {
        Steps(self.0 + o.0, self.1 + o.1)
    }
}

impl PartialOrd for Steps {
    fn partial_cmp(&self, o: &Steps) -> Option<Ordering> {
        self.value().partial_cmp(&o.value())
    }
}

/// Shortest 8-connected path cost by Dijkstra over an explicit graph, with
/// diagonal moves only between two free orthogonal cells.
pub fn dijkstra_cost(g: &GridMap, from: [usize; 2], to: [usize; 2]) -> Option<f64> {
    let (w, h) = (g.width(), g.height());
    let mut graph = UnGraph::<(), Steps>::new_undirected();
    let nodes: Vec<NodeIndex> = (0..w * h).map(|_| graph.add_node(())).collect();
    let id = |x: usize, y: usize| nodes[y * w + x];
    for y in 0..h {
        for x in 0..w {
            if !g.is_free([x, y]) {
                continue;
            }
            if x + 1 < w && g.is_free([x + 1, y]) {
                graph.add_edge(id(x, y), id(x + 1, y), Steps(1, 0));
            }
            if y + 1 < h && g.is_free([x, y + 1]) {
                graph.add_edge(id(x, y), id(x, y + 1), Steps(1, 0));
            }
            if x + 1 < w && y + 1 < h && g.is_free([x + 1, y + 1]) && g.is_free([x + 1, y]) && g.is_free([x, y + 1]) {
                graph.add_edge(id(x, y), id(x + 1, y + 1), Steps(0, 1));
            }
            if x >= 1 && y + 1 < h && g.is_free([x - 1, y + 1]) && g.is_free([x - 1, y]) && g.is_free([x, y + 1]) {
                graph.add_edge(id(x, y), id(x - 1, y + 1), Steps(0, 1));
            }
        }
    }
    let dist = dijkstra(&graph, id(from[0], from[1]), Some(id(to[0], to[1])), |e| *e.weight());
    dist.get(&id(to[0], to[1])).map(|s| s.value())
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Point-source sum for one straight tube given in world coordinates.
/// `center` and unit `axis` locate the tube; the incidence cosine is taken
/// once from `p` toward `center` and clamped to `[0, 1]`. W/m².
pub fn tube_quadrature(
    center: [f64; 3],
    axis: [f64; 3],
    length: f64,
    flux: f64,
    p: [f64; 3],
    n: [f64; 3],
    segments: usize,
) -> f64 {
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let to_center = sub(center, p);
    let cos = (dot(to_center, n) / dot(to_center, to_center).sqrt()).clamp(0.0, 1.0);
    if cos == 0.0 {
        return 0.0;
    }
    let dl = length / segments as f64;
    let k = flux / (4.0 * std::f64::consts::PI * length) * dl * cos;
    compensated_sum((0..segments).map(|i| {
        let s = -0.5 * length + (i as f64 + 0.5) * dl;
        let src = [center[0] + s * axis[0], center[1] + s * axis[1], center[2] + s * axis[2]];
        let d = sub(p, src);
        k / dot(d, d)
    }))
}

/// Number of active-set choices the vertex oracle enumerates.
pub fn vertex_combinations(rows: usize, cols: usize) -> u128 {
    let (n, k) = ((rows + cols) as u128, cols as u128);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Random `min 1ᵀt` LP with non-negative `A`, sized so vertex enumeration
/// stays below `max_combinations`.
pub fn random_lp(rng: &mut impl rand::Rng, max_combinations: u128) -> uvdose::lp::LinearProgram {
    loop {
        let cols = rng.random_range(1..=12usize);
        let rows = rng.random_range(1..=20usize);
        if vertex_combinations(rows, cols) > max_combinations {
            continue;
        }
        let a = nalgebra::DMatrix::from_fn(rows, cols, |_, _| {
            if rng.random_bool(0.25) {
                0.0
            } else {
                rng.random_range(0.0..1.0)
            }
        });
        // Every row needs some coverage to be feasible.
        if (0..rows).any(|i| a.row(i).iter().all(|v| *v == 0.0)) {
            continue;
        }
        let b = (0..rows).map(|_| rng.random_range(1.0..10.0)).collect();
        let lb = (0..cols).map(|_| rng.random_range(0.0..0.5)).collect();
        return uvdose::lp::LinearProgram::min_total(a, b, lb).unwrap();
    }
}
