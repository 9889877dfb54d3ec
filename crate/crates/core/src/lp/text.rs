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
//! Plain-text LP format used for fixtures and debugging.
//!
//! ```text
//! n_rows n_cols
//! A (row-major, n_rows lines of n_cols values)
//! b (n_rows values)
//! lb (n_cols values)
//! ```
//!
//! The objective is implicitly all ones. Tokens are whitespace separated, so
//! line breaks are cosmetic; `#` starts a comment.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::{LinearProgram, LpError};

pub fn to_text(lp: &LinearProgram) -> String {
    let (m, n) = (lp.rows(), lp.cols());
    let mut out = format!("{m} {n}\n");
    let join = |it: &mut dyn Iterator<Item = f64>| it.map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ");
    for i in 0..m {
        let _ = writeln!(out, "{}", join(&mut lp.a.row(i).iter().copied()));
    }
    let _ = writeln!(out, "{}", join(&mut lp.b.iter().copied()));
    let _ = writeln!(out, "{}", join(&mut lp.lb.iter().copied()));
    out
}

pub fn from_text(text: &str) -> Result<LinearProgram, LpError> {
    let mut toks = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let mut next_usize = |what: &str| -> Result<usize, LpError> {
        toks.next()
            .ok_or_else(|| LpError::Parse(format!("missing {what}")))?
            .parse()
            .map_err(|_| LpError::Parse(format!("bad {what}")))
    };
    let m = next_usize("n_rows")?;
    let n = next_usize("n_cols")?;
    let rest: Vec<f64> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .skip(2)
        .map(|t| t.parse::<f64>().map_err(|_| LpError::Parse(format!("bad number {t:?}"))))
        .collect::<Result<_, _>>()?;
    let expected = m * n + m + n;
    if rest.len() != expected {
        return Err(LpError::DimensionMismatch(format!(
            "expected {expected} values after the header, found {}",
            rest.len()
        )));
    }
    let a = DMatrix::from_row_slice(m, n, &rest[..m * n]);
    let b = rest[m * n..m * n + m].to_vec();
    let lb = rest[m * n + m..].to_vec();
    LinearProgram::min_total(a, b, lb)
}
