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
//! Minimum total dwell subject to per-point dose rows, solved by the
//! interior-point method and checked against vertex enumeration.

use nalgebra::DMatrix;
use uvdose::lp::{solve, vertex_oracle, LinearProgram};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Dose per second of three segments on four points.
    let a = DMatrix::from_row_slice(
        4,
        3,
        &[
            0.30, 0.05, 0.00, //
            0.10, 0.25, 0.05, //
            0.00, 0.20, 0.20, //
            0.00, 0.02, 0.35,
        ],
    );
    let lp = LinearProgram::min_total(a, vec![22.0, 22.0, 5.0, 5.0], vec![0.1; 3])?;
    let ipm = solve(&lp);
    let exact = vertex_oracle(&lp)?;
    println!("status     {:?} after {} iterations", ipm.status, ipm.iterations);
    println!("dwell      {:.4?}", ipm.t);
    println!("objective  {:.6} (vertex enumeration {:.6})", ipm.objective, exact.objective);
    println!("kkt        {:.2e}", ipm.kkt_residuals.max());
    println!("certified  {}", lp.certifies(&ipm.t));
    Ok(())
}
