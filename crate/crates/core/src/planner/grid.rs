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
//! 2D occupancy grid for chassis planning.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PlannerError;
use crate::geometry::{Aabb, Point3};

/// `[ix, iy]`, with `iy` growing along world `+y`.
pub type Cell = [usize; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellState {
    Free,
    Occupied,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMap {
    width: usize,
    height: usize,
    resolution: f64,
    /// World position of the outer corner of cell `[0, 0]`.
    origin: Point3,
    cells: Vec<CellState>,
}

impl GridMap {
    /// All-free grid.
    pub fn new(width: usize, height: usize, resolution: f64, origin: Point3) -> Result<Self, PlannerError> {
        Self::filled(width, height, resolution, origin, CellState::Free)
    }

    pub fn filled(
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point3,
        state: CellState,
    ) -> Result<Self, PlannerError> {
        if width == 0 || height == 0 {
            return Err(PlannerError::InvalidGrid(format!("{width}x{height} grid")));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(PlannerError::InvalidGrid(format!("resolution {resolution}")));
        }
        Ok(Self {
            width,
            height,
            resolution,
            origin,
            cells: vec![state; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Point3 {
        self.origin
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell[0] < self.width && cell[1] < self.height
    }

    pub fn index(&self, cell: Cell) -> usize {
        cell[1] * self.width + cell[0]
    }

    pub fn cell_at_index(&self, index: usize) -> Cell {
        [index % self.width, index / self.width]
    }

    pub fn get(&self, cell: Cell) -> Option<CellState> {
        self.in_bounds(cell).then(|| self.cells[self.index(cell)])
    }

    pub fn set(&mut self, cell: Cell, state: CellState) {
        if self.in_bounds(cell) {
            let i = self.index(cell);
            self.cells[i] = state;
        }
    }

    /// Unknown cells are not traversable.
    pub fn is_free(&self, cell: Cell) -> bool {
        self.get(cell) == Some(CellState::Free)
    }

    pub fn cell_of(&self, x: f64, y: f64) -> Option<Cell> {
        let fx = ((x - self.origin.x) / self.resolution).floor();
        let fy = ((y - self.origin.y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let cell = [fx as usize, fy as usize];
        self.in_bounds(cell).then_some(cell)
    }

    pub fn cell_center(&self, cell: Cell) -> Point3 {
        Point3::new(
            self.origin.x + (cell[0] as f64 + 0.5) * self.resolution,
            self.origin.y + (cell[1] as f64 + 0.5) * self.resolution,
            self.origin.z,
        )
    }

    /// Cells whose area overlaps the `xy` footprint of `region`.
    pub fn cells_in(&self, region: &Aabb) -> Vec<Cell> {
        let r = self.resolution;
        let lo = |v: f64, o: f64| ((v - o) / r).floor().max(0.0) as usize;
        let hi = |v: f64, o: f64, n: usize| (((v - o) / r).ceil().max(0.0) as usize).min(n);
        let (x0, x1) = (lo(region.min.x, self.origin.x), hi(region.max.x, self.origin.x, self.width));
        let (y0, y1) = (lo(region.min.y, self.origin.y), hi(region.max.y, self.origin.y, self.height));
        let mut out = Vec::new();
        for iy in y0..y1 {
            for ix in x0..x1 {
                out.push([ix, iy]);
            }
        }
        out
    }

    pub fn mark(&mut self, region: &Aabb, state: CellState) {
        for c in self.cells_in(region) {
            self.set(c, state);
        }
    }

    /// Copy with every occupied cell grown by `radius` metres.
    pub fn inflated(&self, radius: f64) -> Self {
        let reach = (radius / self.resolution).ceil() as isize;
        let mut out = self.clone();
        if reach <= 0 {
            return out;
        }
        let r2 = (radius / self.resolution).powi(2);
        for iy in 0..self.height {
            for ix in 0..self.width {
                if self.cells[self.index([ix, iy])] != CellState::Occupied {
                    continue;
                }
                for dy in -reach..=reach {
                    for dx in -reach..=reach {
                        if ((dx * dx + dy * dy) as f64) > r2 {
                            continue;
                        }
                        let (nx, ny) = (ix as isize + dx, iy as isize + dy);
                        if nx >= 0 && ny >= 0 {
                            out.set([nx as usize, ny as usize], CellState::Occupied);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|c| **c == state).count()
    }

    /// Loads a PGM image and its YAML-style sidecar (`image`, `resolution`,
    /// `origin`, `negate`, `occupied_thresh`, `free_thresh`).
    pub fn load(yaml_path: &Path) -> Result<Self, PlannerError> {
        let text = std::fs::read_to_string(yaml_path)
            .map_err(|e| PlannerError::Io(format!("{}: {e}", yaml_path.display())))?;
        let meta = MapMetadata::parse(&text)?;
        let image_path = yaml_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(&meta.image);
        let bytes = std::fs::read(&image_path)
            .map_err(|e| PlannerError::Io(format!("{}: {e}", image_path.display())))?;
        Self::from_pgm(&bytes, &meta)
    }

    pub fn from_pgm(bytes: &[u8], meta: &MapMetadata) -> Result<Self, PlannerError> {
        let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Pnm)
            .map_err(|e| PlannerError::InvalidGrid(format!("PGM: {e}")))?
            .to_luma8();
        let (w, h) = (img.width() as usize, img.height() as usize);
        let mut grid = Self::filled(
            w,
            h,
            meta.resolution,
            Point3::new(meta.origin[0], meta.origin[1], 0.0),
            CellState::Unknown,
        )?;
        for (col, row, px) in img.enumerate_pixels() {
            let v = px.0[0] as f64 / 255.0;
            let occ = if meta.negate { v } else { 1.0 - v };
            let state = if occ > meta.occupied_thresh {
                CellState::Occupied
            } else if occ < meta.free_thresh {
                CellState::Free
            } else {
                CellState::Unknown
            };
            // Image row 0 is the top of the map.
            grid.set([col as usize, h - 1 - row as usize], state);
        }
        Ok(grid)
    }

    /// Binary PGM with the conventional 0 / 205 / 254 encoding.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        for iy in (0..self.height).rev() {
            for ix in 0..self.width {
                out.push(match self.cells[self.index([ix, iy])] {
                    CellState::Free => 254,
                    CellState::Occupied => 0,
                    CellState::Unknown => 205,
                });
            }
        }
        out
    }
}

/// Sidecar of a PGM occupancy image.
#[derive(Clone, Debug, PartialEq)]
pub struct MapMetadata {
    pub image: String,
    pub resolution: f64,
    pub origin: [f64; 3],
    pub negate: bool,
    pub occupied_thresh: f64,
    pub free_thresh: f64,
}

impl Default for MapMetadata {
    fn default() -> Self {
        Self {
            image: String::new(),
            resolution: 0.05,
            origin: [0.0; 3],
            negate: false,
            occupied_thresh: 0.65,
            free_thresh: 0.196,
        }
    }
}

impl MapMetadata {
    /// Reads the flat `key: value` subset used by occupancy-map sidecars.
    pub fn parse(text: &str) -> Result<Self, PlannerError> {
        let mut meta = Self::default();
        let mut have_resolution = false;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once(':') else {
                return Err(PlannerError::InvalidGrid(format!("bad sidecar line {raw:?}")));
            };
            let value = value.trim().trim_matches(|c| c == '"' || c == '\'');
            let num = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| PlannerError::InvalidGrid(format!("bad number for {key}: {v:?}")))
            };
            match key.trim() {
                "image" => meta.image = value.to_string(),
                "resolution" => {
                    meta.resolution = num(value)?;
                    have_resolution = true;
                }
                "origin" => {
                    let inner = value.trim_start_matches('[').trim_end_matches(']');
                    let vals: Vec<f64> = inner.split(',').map(num).collect::<Result<_, _>>()?;
                    if vals.len() != 3 {
                        return Err(PlannerError::InvalidGrid(format!("origin needs 3 values, got {}", vals.len())));
                    }
                    meta.origin = [vals[0], vals[1], vals[2]];
                }
                "negate" => meta.negate = num(value)? != 0.0,
                "occupied_thresh" => meta.occupied_thresh = num(value)?,
                "free_thresh" => meta.free_thresh = num(value)?,
                _ => {}
            }
        }
        if !have_resolution {
            return Err(PlannerError::InvalidGrid("sidecar lacks resolution".into()));
        }
        Ok(meta)
    }
}
