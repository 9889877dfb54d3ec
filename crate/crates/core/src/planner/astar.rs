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
//! 8-connected A* with an octile heuristic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::grid::{Cell, GridMap};
use super::PlannerError;

/// Step counts of a path. The cost `straight + √2·diagonal` is always
/// evaluated from the counts, so equal paths compare exactly equal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCount {
    pub straight: u32,
    pub diagonal: u32,
}

impl StepCount {
    pub fn cost(self) -> f64 {
        self.straight as f64 + SQRT_2 * self.diagonal as f64
    }

    fn step(self, diagonal: bool) -> Self {
        if diagonal {
            Self {
                diagonal: self.diagonal + 1,
                ..self
            }
        } else {
            Self {
                straight: self.straight + 1,
                ..self
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    pub cells: Vec<Cell>,
    pub steps: StepCount,
}

impl GridPath {
    /// Cost in cell units.
    pub fn cost(&self) -> f64 {
        self.steps.cost()
    }

    pub fn length_m(&self, grid: &GridMap) -> f64 {
        self.cost() * grid.resolution()
    }
}

/// Octile distance between two cells, in cell units.
pub fn octile(a: Cell, b: Cell) -> f64 {
    let dx = a[0].abs_diff(b[0]) as f64;
    let dy = a[1].abs_diff(b[1]) as f64;
    let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
    (hi - lo) + SQRT_2 * lo
}

/// Free 8-neighbours of `cell`. A diagonal move is allowed only when both
/// orthogonal cells it squeezes between are free.
pub fn neighbors(grid: &GridMap, cell: Cell) -> impl Iterator<Item = (Cell, bool)> + '_ {
    const DIRS: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];
    DIRS.iter().filter_map(move |&(dx, dy)| {
        let n = offset(cell, dx, dy)?;
        if !grid.is_free(n) {
            return None;
        }
        let diagonal = dx != 0 && dy != 0;
        if diagonal {
            let side_a = offset(cell, dx, 0)?;
            let side_b = offset(cell, 0, dy)?;
            if !(grid.is_free(side_a) && grid.is_free(side_b)) {
                return None;
            }
        }
        Some((n, diagonal))
    })
}

fn offset(cell: Cell, dx: isize, dy: isize) -> Option<Cell> {
    let x = cell[0].checked_add_signed(dx)?;
    let y = cell[1].checked_add_signed(dy)?;
    Some([x, y])
}

#[derive(PartialEq)]
struct Open {
    f: f64,
    h: f64,
    index: usize,
}

impl Eq for Open {}

impl Ord for Open {
    // Reversed so the max-heap pops the smallest (f, h, index).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.h.total_cmp(&self.h))
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn astar(grid: &GridMap, from: Cell, to: Cell) -> Result<GridPath, PlannerError> {
    for c in [from, to] {
        if !grid.in_bounds(c) {
            return Err(PlannerError::OutOfGrid(c));
        }
        if !grid.is_free(c) {
            return Err(PlannerError::BlockedCell(c));
        }
    }
    let n = grid.width() * grid.height();
    let mut best: Vec<Option<StepCount>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();

    let start = grid.index(from);
    let goal = grid.index(to);
    best[start] = Some(StepCount::default());
    let h0 = octile(from, to);
    open.push(Open {
        f: h0,
        h: h0,
        index: start,
    });

    while let Some(Open { index, .. }) = open.pop() {
        if closed[index] {
            continue;
        }
        closed[index] = true;
        if index == goal {
            return Ok(GridPath {
                cells: backtrack(grid, &parent, start, goal),
                steps: best[goal].unwrap_or_default(),
            });
        }
        let cell = grid.cell_at_index(index);
        let g = best[index].unwrap_or_default();
        for (next, diagonal) in neighbors(grid, cell) {
            let j = grid.index(next);
            if closed[j] {
                continue;
            }
            let cand = g.step(diagonal);
            if best[j].is_none_or(|b| cand.cost() < b.cost()) {
                best[j] = Some(cand);
                parent[j] = index;
                let h = octile(next, to);
                open.push(Open {
                    f: cand.cost() + h,
                    h,
                    index: j,
                });
            }
        }
    }
    Err(PlannerError::NoPath { from, to })
}

fn backtrack(grid: &GridMap, parent: &[usize], start: usize, goal: usize) -> Vec<Cell> {
    let mut out = vec![grid.cell_at_index(goal)];
    let mut at = goal;
    while at != start {
        at = parent[at];
        out.push(grid.cell_at_index(at));
    }
    out.reverse();
    out
}
