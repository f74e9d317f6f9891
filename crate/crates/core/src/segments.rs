//! Segment decomposition of a long walk.
//!
//! The walk is cut into segments `A_1, A_2, ...` of roughly `r` steps. Each
//! segment is erased on its own (locally with look-back/look-ahead `s` in
//! case 1, fully in case 2) and `I[i][j]` records whether segment `j` hits
//! the erased segment `i`. The sets `S_j` of surviving segment indices then
//! follow a simple recursion, and the scaling constants `gamma`, `alpha` of a
//! graph family are Monte Carlo means of the erased length and capacity of a
//! single segment.
//!
//! Schedule lengths come from the formulas
//!
//! * case 1: `r = floor(tau^(1/4) |G|^(3/8))`, `s = floor(tau^(3/4) |G|^(1/8))`,
//!   `A_i = {(i-1)r + 2s + 1, ..., ir - s}`;
//! * case 2 (4-dimensional torus of side `n`): `r = floor(n^2 (ln n)^(9/22))`,
//!   `w = floor(n^2 (ln n)^eta)`, `A_i = {(i-1)r, ..., ir - 1}`,
//!
//! with natural logarithms. At sizes that fit on a desk these formulas are
//! usually infeasible (`r < 3s + 1`, or `r - 2w < 1`), so [`ScheduleParams`]
//! also accepts an explicit `tau` and explicit `r`, `s`, `w`. Infeasible
//! schedules are reported as [`Error::Infeasible`], never clipped.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{GraphKind, GraphModel, Vertex};
use crate::loop_erasure::{local_loop_erasure, loop_erase};
use crate::replicates::map_replicates;
use crate::stats::Estimate;
use crate::walk::{lazy_step, walk_with_rng, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Case::One),
            "2" => Ok(Case::Two),
            other => Err(Error::config(format!("case must be 1 or 2, got {other:?}"))),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::One => "1",
            Case::Two => "2",
        })
    }
}

pub const DEFAULT_ETA: f64 = 0.05;

/// Inputs to [`build_schedule_with`]. Explicit `r`, `s`, `w` replace the
/// formula values; `tau` is required in case 1 unless both `r` and `s` are
/// given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleParams {
    pub tau: Option<u64>,
    pub eta: f64,
    pub r: Option<u64>,
    pub s: Option<u64>,
    pub w: Option<u64>,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self { tau: None, eta: DEFAULT_ETA, r: None, s: None, w: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentSchedule {
    pub case: Case,
    pub r: u64,
    /// Local window, case 1 only (0 in case 2).
    pub s: u64,
    /// Cut window, case 2 only (0 in case 1).
    pub w: u64,
    pub eta: f64,
    pub horizon: u64,
    /// `windows[i - 1]` is `A_i` as a half-open range of times.
    pub windows: Vec<Range<u64>>,
    /// Case 2 on something other than the 4-dimensional torus.
    pub exploratory: bool,
}

impl SegmentSchedule {
    pub fn segment_count(&self) -> usize {
        self.windows.len()
    }

    /// `A_i`, 1-based.
    pub fn window(&self, i: usize) -> Range<u64> {
        self.windows[i - 1].clone()
    }

    /// Times not covered by any window, up to the last window's end.
    pub fn gaps(&self) -> Vec<Range<u64>> {
        let mut out = Vec::new();
        let mut cursor = 0;
        for w in &self.windows {
            if w.start > cursor {
                out.push(cursor..w.start);
            }
            cursor = w.end;
        }
        out
    }

    /// Walk length used by the capacity: `r` in case 1, `r - 2w` in case 2.
    pub fn capacity_run_length(&self) -> Result<u64> {
        match self.case {
            Case::One => Ok(self.r),
            Case::Two => match self.r.checked_sub(2 * self.w) {
                Some(len) if len >= 1 => Ok(len),
                _ => Err(Error::Infeasible(format!(
                    "capacity run length r - 2w = {} - {} is not positive",
                    self.r,
                    2 * self.w
                ))),
            },
        }
    }

    /// Steps needed to evaluate segments `1..=count` (including look-ahead).
    pub fn steps_for(&self, count: usize) -> u64 {
        let count = count as u64;
        match self.case {
            Case::One => count * self.r,
            Case::Two => (count * self.r).saturating_sub(1),
        }
    }
}

/// Largest `k` with `k^8 <= x`.
fn floor_root8(x: u128) -> u64 {
    let mut k = (x as f64).powf(0.125).floor() as u64;
    let pow8 = |k: u64| (k as u128).checked_pow(8);
    while pow8(k).is_none_or(|p| p > x) {
        k -= 1;
    }
    while pow8(k + 1).is_some_and(|p| p <= x) {
        k += 1;
    }
    k
}

/// `floor(tau^(a/8) N^(b/8))` evaluated exactly in integers when possible.
fn case1_length(tau: u64, vertex_count: u64, tau_pow: u32, n_pow: u32) -> u64 {
    let exact = (tau as u128)
        .checked_pow(tau_pow)
        .and_then(|a| (vertex_count as u128).checked_pow(n_pow).and_then(|b| a.checked_mul(b)));
    match exact {
        Some(x) => floor_root8(x),
        None => ((tau as f64).powf(tau_pow as f64 / 8.0) * (vertex_count as f64).powf(n_pow as f64 / 8.0)).floor() as u64,
    }
}

/// Schedule from the case formulas alone.
pub fn build_schedule(case: Case, g: &GraphModel, tau: Option<u64>, eta: f64, horizon: u64) -> Result<SegmentSchedule> {
    build_schedule_with(case, g, &ScheduleParams { tau, eta, ..ScheduleParams::default() }, horizon)
}

pub fn build_schedule_with(case: Case, g: &GraphModel, params: &ScheduleParams, horizon: u64) -> Result<SegmentSchedule> {
    match case {
        Case::One => {
            let need_tau = || params.tau.ok_or_else(|| Error::config("case 1 schedule needs tau (or explicit r and s)"));
            let r = match params.r {
                Some(r) => r,
                None => case1_length(need_tau()?, g.vertex_count(), 2, 3),
            };
            let s = match params.s {
                Some(s) => s,
                None => case1_length(need_tau()?, g.vertex_count(), 6, 1),
            };
            if r < 3 * s + 1 {
                return Err(Error::Infeasible(format!("case 1 needs r - 3s >= 1, got r = {r}, s = {s}")));
            }
            let windows = (1..)
                .take_while(|&i| i * r <= horizon)
                .map(|i| (i - 1) * r + 2 * s + 1..i * r - s + 1)
                .collect();
            Ok(SegmentSchedule { case, r, s, w: 0, eta: params.eta, horizon, windows, exploratory: false })
        }
        Case::Two => {
            let (d, n) = match g.kind() {
                GraphKind::Torus { d, n } => (d, n),
                _ => return Err(Error::config("case 2 schedules are defined on tori only")),
            };
            if !(params.eta > 0.0) {
                return Err(Error::config("eta must be positive"));
            }
            let nn = (n * n) as f64;
            let ln = (n as f64).ln();
            let r = params.r.unwrap_or_else(|| (nn * ln.powf(9.0 / 22.0)).floor() as u64);
            let w = params.w.unwrap_or_else(|| (nn * ln.powf(params.eta)).floor() as u64);
            if r == 0 {
                return Err(Error::Infeasible("case 2 segment length r is zero".into()));
            }
            let windows = (1..).take_while(|&i| i * r - 1 <= horizon).map(|i| (i - 1) * r..i * r).collect();
            Ok(SegmentSchedule { case, r, s: 0, w, eta: params.eta, horizon, windows, exploratory: d != 4 })
        }
    }
}

/// The erased segment `i`: `LE_s(A_i)` in case 1, `LE(X restricted to A_i)`
/// in case 2.
pub fn erased_segment(traj: &Trajectory, schedule: &SegmentSchedule, i: usize) -> Result<Vec<Vertex>> {
    let window = schedule.window(i);
    match schedule.case {
        Case::One => Ok(local_loop_erasure(traj, window, schedule.s)?.path),
        Case::Two => {
            if window.end - 1 > traj.len_steps() {
                return Err(Error::param("trajectory does not cover the schedule"));
            }
            loop_erase(&traj.steps[window.start as usize..window.end as usize])
        }
    }
}

fn sorted_set(mut v: Vec<Vertex>) -> Vec<Vertex> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Strictly upper triangular 0/1 matrix over segments `1..=J`, stored by
/// column: `hits[j]` lists the `i < j` with `I[i][j] = 1`, increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct IndicatorMatrix {
    segments: usize,
    hits: Vec<Vec<usize>>,
}

impl IndicatorMatrix {
    pub fn new(segments: usize) -> Self {
        Self { segments, hits: vec![Vec::new(); segments + 1] }
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn set(&mut self, i: usize, j: usize) {
        assert!(1 <= i && i < j && j <= self.segments, "indicator ({i}, {j}) out of range");
        if let Err(pos) = self.hits[j].binary_search(&i) {
            self.hits[j].insert(pos, i);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        j <= self.segments && self.hits[j].binary_search(&i).is_ok()
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.hits[j]
    }
}

/// `I[i][j]` for every pair of complete segments in the trajectory.
pub fn segment_indicators(traj: &Trajectory, schedule: &SegmentSchedule) -> Result<IndicatorMatrix> {
    Ok(analyze_segments(traj, schedule)?.indicators)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentAnalysis {
    pub schedule: SegmentSchedule,
    pub indicators: IndicatorMatrix,
    /// `S_0, ..., S_J`, each increasing.
    pub retained: Vec<Vec<usize>>,
    /// Erased length of each segment, `erased_lengths[i - 1]` for segment `i`.
    pub erased_lengths: Vec<usize>,
}

/// Segment statistics for every segment the trajectory fully covers.
pub fn analyze_segments(traj: &Trajectory, schedule: &SegmentSchedule) -> Result<SegmentAnalysis> {
    let count = (1..=schedule.segment_count())
        .take_while(|&i| schedule.steps_for(i) <= traj.len_steps())
        .count();
    let erased: Vec<Vec<Vertex>> = (1..=count).map(|i| erased_segment(traj, schedule, i)).collect::<Result<_>>()?;
    let erased_lengths = erased.iter().map(Vec::len).collect();
    let erased_sets: Vec<Vec<Vertex>> = erased.into_iter().map(sorted_set).collect();
    let mut indicators = IndicatorMatrix::new(count);
    for j in 2..=count {
        let window = schedule.window(j);
        let visited = &traj.steps[window.start as usize..window.end as usize];
        // case 2 never links adjacent segments
        let last_i = match schedule.case {
            Case::One => j - 1,
            Case::Two => j - 2,
        };
        for i in 1..=last_i {
            let set = &erased_sets[i - 1];
            if visited.iter().any(|v| set.binary_search(v).is_ok()) {
                indicators.set(i, j);
            }
        }
    }
    let retained = retained_sets(&indicators, count);
    Ok(SegmentAnalysis { schedule: schedule.clone(), indicators, retained, erased_lengths })
}

/// One step of the survival recursion: keep `k` from `prev` unless some
/// `i` in `prev` with `1 <= i <= k` has `hit(i)`, then add `j`.
pub fn retain_step(prev: &[usize], j: usize, hit: impl Fn(usize) -> bool) -> Vec<usize> {
    // prev is increasing, so everything from the first hit on is dropped
    let cut = prev.iter().position(|&i| i >= 1 && hit(i)).unwrap_or(prev.len());
    let mut next = Vec::with_capacity(cut + 1);
    next.extend_from_slice(&prev[..cut]);
    next.push(j);
    next
}

/// `S_0 = {0}` and `S_j` by the survival recursion, for `j <= J`.
pub fn retained_sets(indicators: &IndicatorMatrix, segments: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(segments + 1);
    out.push(vec![0]);
    for j in 1..=segments {
        let next = retain_step(&out[j - 1], j, |i| indicators.get(i, j));
        out.push(next);
    }
    out
}

/// Monte Carlo hitting probability of `set` by a lazy walk of `run_length`
/// steps started uniformly. Standard error is `sqrt(p(1-p)/replicates)`.
pub fn estimate_capacity<R: Rng + ?Sized>(
    g: &GraphModel,
    set: &[Vertex],
    run_length: u64,
    replicates: u64,
    rng: &mut R,
) -> Result<Estimate> {
    if replicates == 0 {
        return Err(Error::param("capacity needs at least one replicate"));
    }
    let set = sorted_set(set.to_vec());
    if let Some(&v) = set.last() {
        g.check_vertex(v)?;
    }
    if set.is_empty() {
        return Ok(Estimate::proportion(0, replicates));
    }
    let hits = (0..replicates).filter(|_| walk_hits(g, &set, run_length, rng)).count() as u64;
    Ok(Estimate::proportion(hits, replicates))
}

fn walk_hits<R: Rng + ?Sized>(g: &GraphModel, sorted: &[Vertex], run_length: u64, rng: &mut R) -> bool {
    let mut v = g.uniform_vertex(rng);
    if sorted.binary_search(&v).is_ok() {
        return true;
    }
    for _ in 0..run_length {
        v = lazy_step(g, v, rng);
        if sorted.binary_search(&v).is_ok() {
            return true;
        }
    }
    false
}

/// Scaling constants of a graph in a given case.
///
/// `a = alpha^(-1/2)`, `b = alpha^(1/2) / gamma`, and `d` is the rescaled
/// length of one erased segment: `r alpha^(1/2) |G|^(-1/2)` in case 1,
/// `alpha^(1/2) (ln n)^(-1/11)` in case 2. The surrogate size is
/// `m = ceil(d^-2)` in case 1 and `floor(d^-2)` in case 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingConstants {
    pub case: Case,
    pub gamma: f64,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub m: u64,
    pub stderr_gamma: f64,
    pub stderr_alpha: f64,
}

impl ScalingConstants {
    pub fn from_estimates(
        schedule: &SegmentSchedule,
        g: &GraphModel,
        gamma: Estimate,
        alpha: Estimate,
    ) -> Result<Self> {
        if !(gamma.mean > 0.0 && alpha.mean > 0.0) || !gamma.mean.is_finite() || !alpha.mean.is_finite() {
            return Err(Error::Infeasible(format!(
                "scaling constants must be positive, got gamma = {}, alpha = {}",
                gamma.mean, alpha.mean
            )));
        }
        let root_alpha = alpha.mean.sqrt();
        let d = match schedule.case {
            Case::One => schedule.r as f64 * root_alpha / (g.vertex_count() as f64).sqrt(),
            Case::Two => {
                let n = g.side_length().ok_or_else(|| Error::config("case 2 needs a torus"))?;
                root_alpha * (n as f64).ln().powf(-1.0 / 11.0)
            }
        };
        let inv_sq = 1.0 / (d * d);
        let m = match schedule.case {
            Case::One => inv_sq.ceil(),
            Case::Two => inv_sq.floor(),
        };
        if m < 1.0 {
            return Err(Error::Infeasible(format!("surrogate size m = {m} from d = {d}")));
        }
        Ok(Self {
            case: schedule.case,
            gamma: gamma.mean,
            alpha: alpha.mean,
            a: 1.0 / root_alpha,
            b: root_alpha / gamma.mean,
            d,
            m: m as u64,
            stderr_gamma: gamma.stderr,
            stderr_alpha: alpha.stderr,
        })
    }
}

/// Estimates `gamma` and `alpha` from `replicates` independent walks started
/// at vertex 0, using the first segment of each. The capacity of each erased
/// segment is estimated with `capacity_walks` stationary walks.
pub fn estimate_constants(
    g: &GraphModel,
    schedule: &SegmentSchedule,
    replicates: usize,
    capacity_walks: u64,
    base_seed: u64,
) -> Result<ScalingConstants> {
    if replicates < 2 {
        return Err(Error::param("constant estimation needs at least 2 replicates"));
    }
    let run_length = schedule.capacity_run_length()?;
    let steps = schedule.steps_for(1);
    let samples = map_replicates(replicates, base_seed, |_, rng| -> Result<(f64, f64)> {
        let traj = walk_with_rng(g, 0, steps, rng)?;
        let seg = erased_segment(&traj, schedule, 1)?;
        let cap = estimate_capacity(g, &seg, run_length, capacity_walks, rng)?;
        Ok((seg.len() as f64, cap.mean))
    });
    let samples: Vec<(f64, f64)> = samples.into_iter().collect::<Result<_>>()?;
    let lengths: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let caps: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (length_scale, cap_scale) = match schedule.case {
        Case::One => {
            let r = schedule.r as f64;
            (r, g.vertex_count() as f64 / (r * r))
        }
        Case::Two => {
            let n = g.side_length().ok_or_else(|| Error::config("case 2 needs a torus"))? as f64;
            let ln = n.ln();
            (n * n * ln.powf(5.0 / 66.0), ln.powf(2.0 / 11.0))
        }
    };
    let gamma = Estimate::from_samples(&lengths).scaled(1.0 / length_scale);
    let alpha = Estimate::from_samples(&caps).scaled(cap_scale);
    ScalingConstants::from_estimates(schedule, g, gamma, alpha)
}
