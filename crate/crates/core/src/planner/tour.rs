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
//! Visit order over sites on an open path that starts at the chassis
//! position. Nearest-neighbour seeds, one per choice of first site, are each
//! improved with 2-opt and or-opt moves until neither shortens the path; the
//! shortest result wins.

use rayon::prelude::*;

use super::astar::astar;
use super::grid::{Cell, GridMap};
use super::sites::HotspotSite;
use super::PlannerError;

/// Pairwise A* costs over `[start, stop points...]`, in cell units.
pub fn distance_matrix(grid: &GridMap, start: Cell, sites: &[HotspotSite]) -> Result<Vec<Vec<f64>>, PlannerError> {
    let nodes: Vec<Cell> = std::iter::once(start).chain(sites.iter().map(|s| s.stop_point)).collect();
    let n = nodes.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let costs: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            astar(grid, nodes[i], nodes[j]).map(|p| p.cost()).map_err(|e| match e {
                PlannerError::NoPath { .. } | PlannerError::BlockedCell(_) => {
                    PlannerError::UnreachableSite(sites[j - 1].object_id.clone())
                }
                other => other,
            })
        })
        .collect::<Result<_, _>>()?;
    let mut d = vec![vec![0.0; n]; n];
    for (&(i, j), c) in pairs.iter().zip(costs) {
        d[i][j] = c;
        d[j][i] = c;
    }
    Ok(d)
}

/// Length of the open path `0 → order[0]+1 → order[1]+1 → ...` through a
/// matrix whose node 0 is the start.
pub fn path_length(d: &[Vec<f64>], order: &[usize]) -> f64 {
    let mut prev = 0;
    let mut total = 0.0;
    for &s in order {
        total += d[prev][s + 1];
        prev = s + 1;
    }
    total
}

pub fn nearest_neighbor(d: &[Vec<f64>]) -> Vec<usize> {
    let k = d.len() - 1;
    nearest_neighbor_from(d, (0..k).min_by(|&a, &b| d[0][a + 1].total_cmp(&d[0][b + 1]).then(a.cmp(&b))))
}

/// Greedy order with an optional forced first site.
pub fn nearest_neighbor_from(d: &[Vec<f64>], first: Option<usize>) -> Vec<usize> {
    let k = d.len() - 1;
    let mut visited = vec![false; k];
    let mut order = Vec::with_capacity(k);
    let mut at = 0;
    if let Some(f) = first {
        visited[f] = true;
        order.push(f);
        at = f + 1;
    }
    while order.len() < k {
        let next = (0..k)
            .filter(|&s| !visited[s])
            .min_by(|&a, &b| d[at][a + 1].total_cmp(&d[at][b + 1]).then(a.cmp(&b)))
            .expect("unvisited site remains");
        visited[next] = true;
        order.push(next);
        at = next + 1;
    }
    order
}

/// Segment reversals until no reversal shortens the path.
pub fn two_opt(d: &[Vec<f64>], order: &mut [usize]) {
    let k = order.len();
    let node = |order: &[usize], p: isize| if p < 0 { 0 } else { order[p as usize] + 1 };
    loop {
        let mut improved = false;
        for i in 0..k {
            for j in i + 1..k {
                let prev = node(order, i as isize - 1);
                let (a, b) = (order[i] + 1, order[j] + 1);
                let mut delta = d[prev][b] - d[prev][a];
                if j + 1 < k {
                    let next = order[j + 1] + 1;
                    delta += d[a][next] - d[b][next];
                }
                if delta < -1e-10 {
                    order[i..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Visit order of `sites` starting from `start`, as indices into `sites`.
pub fn order_sites(grid: &GridMap, sites: &[HotspotSite], start: Cell) -> Result<Vec<usize>, PlannerError> {
    if sites.is_empty() {
        return Ok(Vec::new());
    }
    let d = distance_matrix(grid, start, sites)?;
    Ok(order_from_matrix(&d))
}

pub fn order_from_matrix(d: &[Vec<f64>]) -> Vec<usize> {
    let k = d.len() - 1;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for first in 0..k {
        let mut order = nearest_neighbor_from(d, Some(first));
        improve(d, &mut order);
        let l = path_length(d, &order);
        if best.as_ref().is_none_or(|(b, _)| l < *b - 1e-10) {
            best = Some((l, order));
        }
    }
    best.map(|(_, o)| o).unwrap_or_default()
}

/// Alternates 2-opt and or-opt until neither applies.
pub fn improve(d: &[Vec<f64>], order: &mut Vec<usize>) {
    loop {
        two_opt(d, order);
        if !or_opt(d, order) {
            break;
        }
    }
}

/// Moves one run of up to three consecutive sites (either orientation) to
/// the position that shortens the path most. Returns whether it moved one.
pub fn or_opt(d: &[Vec<f64>], order: &mut Vec<usize>) -> bool {
    let k = order.len();
    let current = path_length(d, order);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for len in 1..=3.min(k.saturating_sub(1)) {
        for i in 0..=k - len {
            let run: Vec<usize> = order[i..i + len].to_vec();
            let rest: Vec<usize> = order[..i].iter().chain(&order[i + len..]).copied().collect();
            for at in 0..=rest.len() {
                if at == i {
                    continue;
                }
                for reversed in [false, true] {
                    let mut cand = rest[..at].to_vec();
                    if reversed {
                        cand.extend(run.iter().rev());
                    } else {
                        cand.extend(&run);
                    }
                    cand.extend(&rest[at..]);
                    let l = path_length(d, &cand);
                    if l < current - 1e-10 && best.as_ref().is_none_or(|(b, _)| l < *b) {
                        best = Some((l, cand));
                    }
                }
            }
        }
    }
    match best {
        Some((_, cand)) => {
            *order = cand;
            true
        }
        None => false,
    }
}
