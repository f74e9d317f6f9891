//! Survival sets driven by Poisson rectangles.
//!
//! Column `j` covers times `[d(j-1), dj)` and row `i` covers heights
//! `[d(i-1), di)`; `I'[i][j]` records whether the field has a point in that
//! cell. Removal is by rank: with `S'_{j-1} = {l_1 < l_2 < ...}`, the element
//! `l_k` survives iff rows `1..=k` of column `j` are empty.

use serde::Serialize;

use super::PoissonField;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeChain {
    pub d: f64,
    /// `S'_0, ..., S'_J`, each increasing.
    pub retained: Vec<Vec<usize>>,
}

impl PrimeChain {
    pub fn lengths(&self) -> Vec<usize> {
        self.retained.iter().map(Vec::len).collect()
    }
}

fn cell_index(coord: f64, d: f64) -> usize {
    (coord / d).floor() as usize + 1
}

/// Whether the `(i, j)` rectangle (1-based) holds a field point.
pub fn rectangle_indicator(field: &PoissonField, d: f64, i: usize, j: usize) -> bool {
    let (t0, t1) = (d * (j - 1) as f64, d * j as f64);
    let (x0, x1) = (d * (i - 1) as f64, d * i as f64);
    let start = field.points.partition_point(|p| p.0 < t0);
    field.points[start..].iter().take_while(|p| p.0 < t1).any(|p| x0 <= p.1 && p.1 < x1)
}

/// `S'_0 = {0}` through `S'_J`.
///
/// Needs `field.horizon_t >= d J` and `field.horizon_x >= d (J + 1)`; rows
/// above `J + 1` can never remove anything since `|S'_{j-1}| <= j`.
pub fn prime_chain_from_field(field: &PoissonField, d: f64, steps: usize) -> Result<PrimeChain> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::param(format!("grid scale must be positive, got {d}")));
    }
    let need_t = d * steps as f64;
    let need_x = d * (steps + 1) as f64;
    if field.horizon_t < need_t || field.horizon_x < need_x {
        return Err(Error::param(format!(
            "field [0, {}) x [0, {}) does not cover [0, {need_t}) x [0, {need_x})",
            field.horizon_t, field.horizon_x
        )));
    }
    // lowest occupied row in each column
    let mut first_hit = vec![usize::MAX; steps + 1];
    for &(s, x) in &field.points {
        let j = cell_index(s, d);
        if j > steps {
            break;
        }
        let i = cell_index(x, d);
        first_hit[j] = first_hit[j].min(i);
    }
    let mut retained = Vec::with_capacity(steps + 1);
    retained.push(vec![0]);
    for j in 1..=steps {
        let prev: &Vec<usize> = &retained[j - 1];
        let keep = prev.len().min(first_hit[j].saturating_sub(1));
        let mut next = Vec::with_capacity(keep + 1);
        next.extend_from_slice(&prev[..keep]);
        next.push(j);
        retained.push(next);
    }
    Ok(PrimeChain { d, retained })
}

/// Floating-point allowance when checking `|R(dj) - d |S'_j|| <= d`: a few
/// ulps of the largest quantity involved, `d (j + 1)`.
pub fn sandwich_rounding(d: f64, j: usize) -> f64 {
    8.0 * f64::EPSILON * d * (j + 1) as f64
}
