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

use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::dijkstra_cost;
use uvdose::geometry::{Point3, RiskClass};
use uvdose::planner::tour::{distance_matrix, nearest_neighbor, order_from_matrix, two_opt};
use uvdose::planner::{astar, path_length, CellState, GridMap, HotspotSite, PlannerError};

fn random_grid(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> GridMap {
    let mut g = GridMap::new(w, h, 0.05, Point3::origin()).unwrap();
    for y in 0..h {
        for x in 0..w {
            if rng.random_bool(density) {
                g.set([x, y], CellState::Occupied);
            }
        }
    }
    g
}

fn random_free(rng: &mut ChaCha8Rng, g: &GridMap) -> [usize; 2] {
    loop {
        let c = [rng.random_range(0..g.width()), rng.random_range(0..g.height())];
        if g.is_free(c) {
            return c;
        }
    }
}

#[test]
fn astar_matches_dijkstra_on_random_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut solved = 0;
    for _ in 0..50 {
        let g = random_grid(&mut rng, 20, 20, 0.25);
        let (a, b) = (random_free(&mut rng, &g), random_free(&mut rng, &g));
        let oracle = dijkstra_cost(&g, a, b);
        match astar(&g, a, b) {
            Ok(p) => {
                solved += 1;
                assert_eq!(Some(p.cost()), oracle, "{a:?} -> {b:?}");
                assert_eq!(p.cells.first(), Some(&a));
                assert_eq!(p.cells.last(), Some(&b));
                assert!(p.cells.iter().all(|c| g.is_free(*c)));
            }
            Err(PlannerError::NoPath { .. }) => assert_eq!(oracle, None),
            Err(e) => panic!("{e}"),
        }
    }
    assert!(solved > 25);
}

#[test]
fn astar_path_is_connected_without_corner_cuts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let g = random_grid(&mut rng, 25, 25, 0.3);
        let (a, b) = (random_free(&mut rng, &g), random_free(&mut rng, &g));
        let Ok(p) = astar(&g, a, b) else { continue };
        for w in p.cells.windows(2) {
            let dx = w[1][0] as isize - w[0][0] as isize;
            let dy = w[1][1] as isize - w[0][1] as isize;
            assert!(dx.abs() <= 1 && dy.abs() <= 1 && (dx, dy) != (0, 0));
            if dx != 0 && dy != 0 {
                assert!(g.is_free([w[1][0], w[0][1]]) && g.is_free([w[0][0], w[1][1]]));
            }
        }
    }
}

fn site(i: usize, cell: [usize; 2]) -> HotspotSite {
    HotspotSite {
        object_id: format!("s{i}"),
        label: "sink".into(),
        risk: RiskClass::Hotspot,
        footprint: vec![],
        stop_point: cell,
    }
}

#[test]
fn tour_within_five_percent_of_exhaustive_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = GridMap::new(40, 40, 0.05, Point3::origin()).unwrap();
    for _ in 0..50 {
        let start = random_free(&mut rng, &g);
        let sites: Vec<HotspotSite> = (0..7).map(|i| site(i, random_free(&mut rng, &g))).collect();
        let d = distance_matrix(&g, start, &sites).unwrap();
        let order = order_from_matrix(&d);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..7).collect::<Vec<_>>());
        let best = (0..7)
            .permutations(7)
            .map(|p| path_length(&d, &p))
            .fold(f64::INFINITY, f64::min);
        let got = path_length(&d, &order);
        assert!(got <= 1.05 * best + 1e-9, "{got} vs optimum {best}");
    }
}

proptest! {
    #[test]
    fn two_opt_never_lengthens(seed in any::<u64>(), k in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (0..=k).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
        let d: Vec<Vec<f64>> = pts
            .iter()
            .map(|a| pts.iter().map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()).collect())
            .collect();
        let mut order = nearest_neighbor(&d);
        let before = path_length(&d, &order);
        two_opt(&d, &mut order);
        prop_assert!(path_length(&d, &order) <= before + 1e-12);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..k).collect::<Vec<_>>());
    }
}
