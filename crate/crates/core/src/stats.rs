//! Empirical-distribution tools: estimates with standard errors, one- and
//! two-sample Kolmogorov-Smirnov distances, the rescaled length process `Z_n`
//! and the Skorohod modulus `w(Z, theta, T)`.

use serde::Serialize;

use crate::graph::GraphModel;
use crate::rayleigh::StepPath;
use crate::segments::{Case, ScalingConstants};
use crate::{Error, Result};

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: u64,
}

impl Estimate {
    /// Mean and `s / sqrt(n)` with the unbiased sample variance.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n < 2 {
            0.0
        } else {
            let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        };
        Self { mean, stderr, count: n as u64 }
    }

    /// Binomial proportion `hits / trials`.
    pub fn proportion(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Self { mean: p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), count: trials }
    }

    /// A known value with no sampling error.
    pub fn exact(value: f64) -> Self {
        Self { mean: value, stderr: 0.0, count: 0 }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self { mean: self.mean * factor, stderr: self.stderr * factor.abs(), count: self.count }
    }
}

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::param("KS statistic needs at least one sample"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::param("KS statistic got a NaN sample"));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sup_x |F_N(x) - F(x)|` for a continuous distribution function `cdf`.
///
/// Both one-sided gaps are taken at every order statistic, which also
/// handles tied samples correctly.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let v = sorted_finite(samples)?;
    let n = v.len() as f64;
    let d = v.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = cdf(x);
        acc.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    });
    Ok(d)
}

/// `sup_x |F_a(x) - F_b(x)|` between two empirical distributions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let a = sorted_finite(a)?;
    let b = sorted_finite(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        // step past every copy of the smaller value in both samples
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Time and length scales that turn the loop-erased length `Y` into `Z_n`.
///
/// Case 1: `Z_n(t) = b |G|^(-1/2) Y_{floor(a |G|^(1/2) t)}`.
/// Case 2: `Z_n(t) = b n^-2 (ln n)^(-1/6) Y_{floor(a n^2 (ln n)^(1/2) t)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rescaling {
    pub case: Case,
    pub a: f64,
    pub b: f64,
    /// `|G|^(1/2)` or `n^2 (ln n)^(1/2)`.
    pub time_base: f64,
    /// `|G|^(-1/2)` or `n^-2 (ln n)^(-1/6)`.
    pub length_unit: f64,
}

impl Rescaling {
    pub fn new(case: Case, a: f64, b: f64, g: &GraphModel) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::param(format!("scaling constants must be positive, got a = {a}, b = {b}")));
        }
        let (time_base, length_unit) = match case {
            Case::One => {
                let root = (g.vertex_count() as f64).sqrt();
                (root, 1.0 / root)
            }
            Case::Two => {
                let n = g.side_length().ok_or_else(|| Error::config("case 2 needs a torus"))? as f64;
                let ln = n.ln();
                (n * n * ln.sqrt(), 1.0 / (n * n * ln.powf(1.0 / 6.0)))
            }
        };
        Ok(Self { case, a, b, time_base, length_unit })
    }

    pub fn from_constants(constants: &ScalingConstants, g: &GraphModel) -> Result<Self> {
        Self::new(constants.case, constants.a, constants.b, g)
    }

    /// `L_n`: walk steps per unit of rescaled time.
    pub fn time_scale(&self) -> f64 {
        self.a * self.time_base
    }

    /// `M_n`: loop-erased length per unit of `Z`.
    pub fn length_scale(&self) -> f64 {
        1.0 / (self.b * self.length_unit)
    }

    /// `g(t) = floor(L_n t)`, the walk step read at rescaled time `t`.
    pub fn g(&self, t: f64) -> u64 {
        (self.time_scale() * t).floor() as u64
    }

    pub fn z(&self, y: f64) -> f64 {
        self.b * self.length_unit * y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RescaledLengthPath {
    pub rescaling: Rescaling,
    /// `(t, Y_{g(t)}, Z_n(t))`.
    pub samples: Vec<(f64, u64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_path: Option<StepPath>,
}

/// `Z_n` at each `times[k]`, given `ys[k] = Y_{g(times[k])}`.
pub fn rescale_lengths(times: &[f64], ys: &[u64], rescaling: &Rescaling) -> Result<RescaledLengthPath> {
    if times.len() != ys.len() {
        return Err(Error::param(format!("{} times but {} lengths", times.len(), ys.len())));
    }
    let samples = times.iter().zip(ys).map(|(&t, &y)| (t, y, rescaling.z(y as f64))).collect();
    Ok(RescaledLengthPath { rescaling: *rescaling, samples, full_path: None })
}

/// Samples `Z_n` at `times` from a full length history `Y_0, Y_1, ...`,
/// optionally recording the step path on `[0, horizon]`.
pub fn rescale_history(
    history: &[usize],
    times: &[f64],
    rescaling: &Rescaling,
    horizon: Option<f64>,
) -> Result<RescaledLengthPath> {
    let at = |t: f64| -> Result<u64> {
        let k = rescaling.g(t) as usize;
        history.get(k).map(|&y| y as u64).ok_or_else(|| {
            Error::param(format!("time {t} needs step {k} but history has {} entries", history.len()))
        })
    };
    let ys: Vec<u64> = times.iter().map(|&t| at(t)).collect::<Result<_>>()?;
    let mut out = rescale_lengths(times, &ys, rescaling)?;
    if let Some(horizon) = horizon {
        let last = rescaling.g(horizon) as usize;
        if last >= history.len() {
            return Err(Error::param(format!("horizon {horizon} needs step {last}")));
        }
        let start = rescaling.z(history[0] as f64);
        let scale = rescaling.time_scale();
        let mut breakpoints = Vec::new();
        for k in 1..=last {
            if history[k] != history[k - 1] {
                let t = k as f64 / scale;
                if t > 0.0 && t <= horizon && breakpoints.last().is_none_or(|b: &(f64, f64)| b.0 < t) {
                    breakpoints.push((t, rescaling.z(history[k] as f64)));
                }
            }
        }
        out.full_path = Some(StepPath::from_breakpoints(start, 0.0, horizon, breakpoints)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FddReport {
    pub times: Vec<f64>,
    pub ks: Vec<f64>,
    pub n_lerw: usize,
    pub n_rayleigh: usize,
    pub seeds: Vec<u64>,
}

/// Per-time two-sample KS between the marginals of two replicate sets.
///
/// Each replicate row holds one value per entry of `times`.
pub fn fdd_compare(times: &[f64], lerw: &[Vec<f64>], rayleigh: &[Vec<f64>]) -> Result<FddReport> {
    for (name, rows) in [("lerw", lerw), ("rayleigh", rayleigh)] {
        if let Some(row) = rows.iter().find(|r| r.len() != times.len()) {
            return Err(Error::param(format!(
                "{name} row has {} values for {} times",
                row.len(),
                times.len()
            )));
        }
    }
    let column = |rows: &[Vec<f64>], k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    let ks = (0..times.len())
        .map(|k| ks_two_sample(&column(lerw, k), &column(rayleigh, k)))
        .collect::<Result<_>>()?;
    Ok(FddReport { times: times.to_vec(), ks, n_lerw: lerw.len(), n_rayleigh: rayleigh.len(), seeds: Vec::new() })
}

/// Range max/min over the per-breakpoint extremes of a path.
struct SparseTable {
    max: Vec<Vec<f64>>,
    min: Vec<Vec<f64>>,
}

impl SparseTable {
    fn new(hi: Vec<f64>, lo: Vec<f64>) -> Self {
        let mut max = vec![hi];
        let mut min = vec![lo];
        let n = max[0].len();
        let mut width = 1;
        while 2 * width <= n {
            let (pm, pn) = (max.last().unwrap(), min.last().unwrap());
            let nm: Vec<f64> = (0..=n - 2 * width).map(|i| pm[i].max(pm[i + width])).collect();
            let nn: Vec<f64> = (0..=n - 2 * width).map(|i| pn[i].min(pn[i + width])).collect();
            max.push(nm);
            min.push(nn);
            width *= 2;
        }
        Self { max, min }
    }

    /// `(max, min)` over `[lo, hi)`, which must be nonempty.
    fn query(&self, lo: usize, hi: usize) -> (f64, f64) {
        let level = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        let w = 1 << level;
        (
            self.max[level][lo].max(self.max[level][hi - w]),
            self.min[level][lo].min(self.min[level][hi - w]),
        )
    }
}

struct Oscillation<'a> {
    path: &'a StepPath,
    times: Vec<f64>,
    table: Option<SparseTable>,
}

impl<'a> Oscillation<'a> {
    fn new(path: &'a StepPath) -> Self {
        let bps = path.breakpoints();
        let times = bps.iter().map(|b| b.0).collect();
        let (hi, lo): (Vec<f64>, Vec<f64>) = bps
            .iter()
            .map(|&(t, v)| {
                let left = path.left_limit(t);
                (left.max(v), left.min(v))
            })
            .unzip();
        let table = (!hi.is_empty()).then(|| SparseTable::new(hi, lo));
        Self { path, times, table }
    }

    /// `sup - inf` of the path over `[a, b)`.
    fn on(&self, a: f64, b: f64) -> f64 {
        let (va, vb) = (self.path.value_at(a), self.path.left_limit(b));
        let (mut hi, mut lo) = (va.max(vb), va.min(vb));
        let first = self.times.partition_point(|&t| t <= a);
        let end = self.times.partition_point(|&t| t < b);
        if first < end {
            let (m, n) = self.table.as_ref().expect("breakpoints present").query(first, end);
            hi = hi.max(m);
            lo = lo.min(n);
        }
        hi - lo
    }
}

fn push_even_split(out: &mut Vec<f64>, a: f64, b: f64, theta: f64) {
    let pieces = ((b - a) / theta).floor() as usize;
    for k in 1..pieces {
        out.push(a + (b - a) * k as f64 / pieces as f64);
    }
}

/// Skorohod modulus `w(Z, theta, T)`: the least achievable worst
/// oscillation over partitions of `[0, T]` into intervals `[t_{i-1}, t_i)`
/// of length at least `theta`.
///
/// Partition points are restricted to a candidate set and the best partition
/// over that set is found by dynamic programming. Candidates are `0`, `T`,
/// each breakpoint `t` and `t - theta`, the chains `t + k theta` and
/// `k theta`, a `theta / 4` grid, and even splittings of `[0, T]` and of each
/// stretch between consecutive breakpoints.
///
/// For step paths (slope 0) any optimal partition can be slid left until
/// every boundary sits on a jump or exactly `theta` after the previous one,
/// so the result is exact. Pure-slope paths are covered by the even
/// splittings. Otherwise the result is an upper bound.
///
/// Interval lengths are compared with a relative slack of `1e-12` so that
/// chained candidates are not lost to rounding.
pub fn modulus_w(path: &StepPath, theta: f64, horizon: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < horizon && horizon.is_finite()) {
        return Err(Error::param(format!("need 0 < theta < T, got theta = {theta}, T = {horizon}")));
    }
    let jumps: Vec<f64> = path.breakpoints().iter().map(|b| b.0).filter(|&t| t > 0.0 && t < horizon).collect();
    let mut cand = vec![0.0, horizon];
    for &t in &jumps {
        cand.push(t - theta);
    }
    // chains of minimal-length intervals starting at 0 or at a jump
    for &anchor in std::iter::once(&0.0).chain(&jumps) {
        let links = ((horizon - anchor) / theta).floor() as usize;
        cand.extend((0..=links).map(|k| anchor + k as f64 * theta));
    }
    let step = theta / 4.0;
    let grid = (horizon / step).floor() as usize;
    cand.extend((1..=grid).map(|k| k as f64 * step));
    push_even_split(&mut cand, 0.0, horizon, theta);
    let mut anchors = vec![0.0];
    anchors.extend(&jumps);
    anchors.push(horizon);
    for w in anchors.windows(2) {
        push_even_split(&mut cand, w[0], w[1], theta);
    }
    cand.retain(|&t| (0.0..=horizon).contains(&t));
    cand.sort_by(f64::total_cmp);
    cand.dedup();

    let slack = 1e-12 * horizon;
    let osc = Oscillation::new(path);
    let n = cand.len();
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    for k in 1..n {
        let end = cand[k];
        let reachable = cand.partition_point(|&c| c <= end - theta + slack);
        for i in 0..reachable {
            if best[i] >= best[k] {
                continue;
            }
            let v = best[i].max(osc.on(cand[i], end));
            if v < best[k] {
                best[k] = v;
            }
        }
    }
    Ok(best[n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn normal_cdf_approx(x: f64) -> f64 {
        // logistic stand-in; only its values matter for the oracle comparison
        1.0 / (1.0 + (-1.7 * x).exp())
    }

    #[test]
    fn estimate_basics() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        let p = Estimate::proportion(25, 100);
        assert_eq!(p.mean, 0.25);
        assert!((p.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        let s = e.scaled(-2.0);
        assert_eq!(s.mean, -5.0);
        assert_eq!(s.stderr, 2.0 * e.stderr);
        assert_eq!(Estimate::exact(3.0).stderr, 0.0);
        assert_eq!(Estimate::from_samples(&[7.0]).stderr, 0.0);
    }

    #[test]
    fn ks_single_sample_at_median() {
        let d = ks_statistic(&[0.0], normal_cdf_approx).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        assert!(ks_statistic(&[], normal_cdf_approx).is_err());
        assert!(ks_statistic(&[f64::NAN], normal_cdf_approx).is_err());
    }

    fn naive_ks(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
        let n = samples.len() as f64;
        let ecdf = |x: f64| samples.iter().filter(|&&s| s <= x).count() as f64 / n;
        let ecdf_left = |x: f64| samples.iter().filter(|&&s| s < x).count() as f64 / n;
        let mut d = 0.0f64;
        for &x in samples {
            d = d.max((ecdf(x) - cdf(x)).abs()).max((ecdf_left(x) - cdf(x)).abs());
        }
        d
    }

    #[test]
    fn ks_matches_naive_oracle() {
        let mut rng = seeded(1);
        for trial in 0..200 {
            let n = rng.random_range(1..60);
            // coarse values force ties on many trials
            let samples: Vec<f64> = (0..n)
                .map(|_| if trial % 2 == 0 { rng.random_range(-3..4) as f64 } else { rng.random::<f64>() * 6.0 - 3.0 })
                .collect();
            let fast = ks_statistic(&samples, normal_cdf_approx).unwrap();
            let slow = naive_ks(&samples, normal_cdf_approx);
            assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
        }
    }

    #[test]
    fn ks_all_mass_at_top() {
        let samples = vec![5.0; 7];
        let d = ks_statistic(&samples, |x| if x >= 5.0 { 1.0 } else { 0.0 }).unwrap();
        assert!((d - naive_ks(&samples, |x| if x >= 5.0 { 1.0 } else { 0.0 })).abs() < 1e-15);
        assert_eq!(d, 1.0);
    }

    #[test]
    fn ks_uniform_samples_are_close() {
        let mut rng = seeded(2);
        let samples: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_statistic(&samples, |x| x.clamp(0.0, 1.0)).unwrap() <= 0.01);
    }

    fn naive_two_sample(a: &[f64], b: &[f64]) -> f64 {
        let f = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        a.iter().chain(b).map(|&x| (f(a, x) - f(b, x)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn two_sample_oracle_and_symmetry() {
        let mut rng = seeded(3);
        for _ in 0..200 {
            let a: Vec<f64> = (0..rng.random_range(1..40)).map(|_| rng.random_range(0..10) as f64).collect();
            let b: Vec<f64> = (0..rng.random_range(1..40)).map(|_| rng.random_range(0..12) as f64).collect();
            let d = ks_two_sample(&a, &b).unwrap();
            assert!((d - naive_two_sample(&a, &b)).abs() < 1e-12);
            assert_eq!(d, ks_two_sample(&b, &a).unwrap());
        }
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[2.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn rescaling_arithmetic() {
        let g = GraphModel::complete(10_000).unwrap();
        let r = Rescaling::new(Case::One, 1.0, 1.0, &g).unwrap();
        assert_eq!(r.z(500.0), 5.0);
        assert_eq!(r.z(0.0), 0.0);
        assert_eq!(r.g(1.0), 100);
        let mut rng = seeded(4);
        for _ in 0..1000 {
            let b = rng.random::<f64>() * 10.0 + 0.01;
            let y = rng.random_range(0..100_000u64) as f64;
            let r1 = Rescaling::new(Case::One, 1.0, b, &g).unwrap();
            let r2 = Rescaling::new(Case::One, 1.0, 2.0 * b, &g).unwrap();
            assert_eq!(r2.z(y), 2.0 * r1.z(y));
            assert_eq!(r1.z(2.0 * y), 2.0 * r1.z(y));
        }
        assert!(Rescaling::new(Case::One, 0.0, 1.0, &g).is_err());
        assert!(Rescaling::new(Case::Two, 1.0, 1.0, &g).is_err());
    }

    #[test]
    fn case_two_scales() {
        let g = GraphModel::torus(4, 10).unwrap();
        let r = Rescaling::new(Case::Two, 2.0, 3.0, &g).unwrap();
        let ln = 10f64.ln();
        assert!((r.time_scale() - 2.0 * 100.0 * ln.sqrt()).abs() < 1e-9);
        assert!((r.length_scale() - 100.0 * ln.powf(1.0 / 6.0) / 3.0).abs() < 1e-9);
        assert!((r.z(r.length_scale()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn history_sampling() {
        let g = GraphModel::complete(100).unwrap();
        let r = Rescaling::new(Case::One, 1.0, 1.0, &g).unwrap();
        let history: Vec<usize> = (0..=20).map(|k| 1 + k / 3).collect();
        let out = rescale_history(&history, &[0.5, 1.0, 2.0], &r, Some(2.0)).unwrap();
        assert_eq!((out.samples[0].0, out.samples[0].1), (0.5, 2));
        assert!((out.samples[0].2 - 0.2).abs() < 1e-15);
        assert_eq!((out.samples[2].0, out.samples[2].1), (2.0, 7));
        assert!((out.samples[2].2 - 0.7).abs() < 1e-15);
        let path = out.full_path.unwrap();
        assert_eq!(path.slope(), 0.0);
        for &t in &[0.05, 0.55, 1.25, 1.95] {
            let expect = r.z(history[r.g(t) as usize] as f64);
            assert!((path.value_at(t) - expect).abs() < 1e-15, "t = {t}");
        }
        assert!(rescale_history(&history, &[2.1], &r, None).is_err());
    }

    #[test]
    fn fdd_identity_and_errors() {
        let rows: Vec<Vec<f64>> = (0..50).map(|k| vec![k as f64, (k * k) as f64]).collect();
        let rep = fdd_compare(&[1.0, 2.0], &rows, &rows).unwrap();
        assert_eq!(rep.ks, vec![0.0, 0.0]);
        assert_eq!(rep.n_lerw, 50);
        assert!(fdd_compare(&[1.0], &rows, &rows).is_err());
        let other: Vec<Vec<f64>> = (0..30).map(|k| vec![k as f64 * 0.5, k as f64]).collect();
        let ab = fdd_compare(&[1.0, 2.0], &rows, &other).unwrap();
        let ba = fdd_compare(&[1.0, 2.0], &other, &rows).unwrap();
        assert_eq!(ab.ks, ba.ks);
    }

    fn step(start: f64, jumps: &[(f64, f64)]) -> StepPath {
        StepPath::from_breakpoints(start, 0.0, 1.0, jumps.to_vec()).unwrap()
    }

    #[test]
    fn modulus_pure_slope() {
        let path = StepPath::new(0.0, 1.0, 1.0);
        let w = modulus_w(&path, 0.3, 1.0).unwrap();
        assert!((w - 1.0 / 3.0).abs() < 1e-12, "w = {w}");
        let w = modulus_w(&StepPath::new(0.0, 2.0, 3.0), 0.7, 3.0).unwrap();
        assert!((w - 2.0 * 3.0 / 4.0).abs() < 1e-12, "w = {w}");
    }

    #[test]
    fn modulus_places_boundary_at_jump() {
        let path = step(1.0, &[(0.5, 0.0)]);
        assert_eq!(modulus_w(&path, 0.2, 1.0).unwrap(), 0.0);
        assert_eq!(modulus_w(&StepPath::new(3.0, 0.0, 1.0), 0.4, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn modulus_close_jumps() {
        let path = step(1.0, &[(0.5, 0.6), (0.6, 0.3)]);
        let w = modulus_w(&path, 0.2, 1.0).unwrap();
        assert!((w - 0.3).abs() < 1e-12, "w = {w}");
        assert!((w - brute_force(&path, 0.2, 1.0, 40)).abs() < 1e-12);
    }

    #[test]
    fn modulus_parameter_range() {
        let path = StepPath::new(0.0, 1.0, 1.0);
        assert!(modulus_w(&path, 0.0, 1.0).is_err());
        assert!(modulus_w(&path, 1.0, 1.0).is_err());
    }

    /// Oscillation by dense evaluation, left limits included.
    fn naive_osc(path: &StepPath, a: f64, b: f64) -> f64 {
        let mut vals = vec![path.value_at(a), path.left_limit(b)];
        for &(t, v) in path.breakpoints() {
            if t > a && t < b {
                vals.push(v);
                vals.push(path.left_limit(t));
            }
        }
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    }

    /// Minimum over every partition with boundaries on a grid of `cells`.
    fn brute_force(path: &StepPath, theta: f64, horizon: f64, cells: usize) -> f64 {
        let pts: Vec<f64> = (0..=cells).map(|k| horizon * k as f64 / cells as f64).collect();
        fn go(path: &StepPath, pts: &[f64], from: usize, theta: f64, worst: f64, best: &mut f64) {
            if from == pts.len() - 1 {
                *best = best.min(worst);
                return;
            }
            for to in from + 1..pts.len() {
                if pts[to] - pts[from] >= theta - 1e-12 {
                    let w = worst.max(naive_osc(path, pts[from], pts[to]));
                    if w < *best {
                        go(path, pts, to, theta, w, best);
                    }
                }
            }
        }
        let mut best = f64::INFINITY;
        go(path, &pts, 0, theta, 0.0, &mut best);
        best
    }

    #[test]
    fn modulus_against_brute_force_on_grid_paths() {
        let mut rng = seeded(5);
        let cells = 20;
        for _ in 0..40 {
            // jumps on the grid, so grid partitions contain an optimum
            let mut jumps = Vec::new();
            for k in 1..cells {
                if rng.random::<f64>() < 0.25 {
                    jumps.push((k as f64 / cells as f64, rng.random::<f64>() * 2.0));
                }
            }
            let path = step(1.0, &jumps);
            let theta = 0.1 + 0.05 * rng.random_range(0..4) as f64;
            let fast = modulus_w(&path, theta, 1.0).unwrap();
            let slow = brute_force(&path, theta, 1.0, cells);
            assert!(fast <= slow + 1e-12, "fast {fast} slow {slow}");
            assert!(fast >= slow - 1e-12, "fast {fast} slow {slow}");
        }
    }

    #[test]
    fn modulus_monotone_in_theta_for_step_paths() {
        let mut rng = seeded(7);
        for _ in 0..30 {
            let mut jumps: Vec<(f64, f64)> =
                (0..rng.random_range(1..12)).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
            jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
            jumps.dedup_by(|a, b| a.0 == b.0);
            let path = step(0.5, &jumps);
            let ws: Vec<f64> = [0.4, 0.3, 0.2, 0.1, 0.05].iter().map(|&th| modulus_w(&path, th, 1.0).unwrap()).collect();
            assert!(ws.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{ws:?}");
        }
    }

    #[test]
    fn modulus_bounded_by_total_oscillation() {
        let mut rng = seeded(6);
        for _ in 0..50 {
            let mut t = 0.0;
            let mut jumps = Vec::new();
            loop {
                t += rng.random::<f64>() * 0.3;
                if t >= 2.0 {
                    break;
                }
                jumps.push((t, rng.random::<f64>() * t));
            }
            let path = StepPath::from_breakpoints(0.0, 1.0, 2.0, jumps).unwrap();
            let total = naive_osc(&path, 0.0, 2.0);
            let w = modulus_w(&path, 0.25, 2.0).unwrap();
            assert!(w <= total + 1e-12);
            assert!(w >= 0.0);
        }
    }
}
