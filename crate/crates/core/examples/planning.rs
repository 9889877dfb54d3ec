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
//! Stop points and visit order for a handful of detections on a small
//! occupancy grid, then the A* legs between them.

use uvdose::geometry::{Aabb, Point3};
use uvdose::planner::{astar, mark_hotspots, order_sites, CellState, Detection, GridMap, RiskRegistry, StopPointParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut grid = GridMap::new(120, 80, 0.05, Point3::origin())?;
    let boxes = [
        ("bed-1", "bed rail", [1.0, 0.5, 2.0, 1.5]),
        ("sink", "sink", [5.4, 3.2, 6.0, 4.0]),
        ("desk", "desk", [3.0, 0.2, 4.0, 0.9]),
        ("cart", "medical machine", [3.2, 2.4, 3.7, 2.9]),
        ("switch", "switch", [0.0, 3.5, 0.1, 3.6]),
    ];
    let detections: Vec<Detection> = boxes
        .iter()
        .map(|(id, label, [x0, y0, x1, y1])| Detection {
            id: id.to_string(),
            label: label.to_string(),
            footprint: Aabb::new(Point3::new(*x0, *y0, 0.0), Point3::new(*x1, *y1, 1.0)),
        })
        .collect();
    for d in &detections {
        grid.mark(&d.footprint, CellState::Occupied);
    }
    let grid = grid.inflated(0.25);
    let sites = mark_hotspots(&grid, &RiskRegistry::default(), &detections, &StopPointParams::default())?;
    let start = grid.cell_of(0.5, 3.0).ok_or("start outside grid")?;
    let order = order_sites(&grid, &sites, start)?;
    let mut at = start;
    let mut total = 0.0;
    for i in order {
        let leg = astar(&grid, at, sites[i].stop_point)?;
        total += leg.length_m(&grid);
        println!("{:8} stop {:?}  leg {:.2} m", sites[i].object_id, sites[i].stop_point, leg.length_m(&grid));
        at = sites[i].stop_point;
    }
    println!("tour {total:.2} m (desk is not a hotspot and is skipped)");
    Ok(())
}
