//! The lazy random walk and its exact transition probabilities.
//!
//! From `v` the walk stays put with probability 1/2 and otherwise moves to one
//! of the `degree` neighbor slots, each with probability `1/(2 degree)`.
//!
//! Transition profiles `p_t(x) = P(X_t = x | X_0 = 0)` are computed exactly:
//! on tori by the character expansion of the (convolution) kernel, elsewhere
//! by iterating the kernel on a dense probability vector.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::graph::{GraphKind, GraphModel, Vertex};
use crate::rng::seeded;
use crate::{Error, Result};

/// Largest vertex count for which dense probability vectors are built.
pub const DENSE_LIMIT: u64 = 10_000_000;

/// Absolute tolerance for probability comparisons.
pub const PROB_TOL: f64 = 1e-12;

/// One lazy step from `v`, using a single draw.
#[inline]
pub fn lazy_step<R: Rng + ?Sized>(g: &GraphModel, v: Vertex, rng: &mut R) -> Vertex {
    let deg = g.degree();
    let k = rng.random_range(0..2 * deg);
    if k < deg {
        v
    } else {
        g.neighbor(v, k - deg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub graph: GraphModel,
    pub start: Vertex,
    pub steps: Vec<Vertex>,
    pub seed: u64,
}

impl Trajectory {
    /// Number of steps `T` (the trajectory holds `T + 1` vertices).
    pub fn len_steps(&self) -> u64 {
        (self.steps.len() - 1) as u64
    }

    pub fn at(&self, t: u64) -> Vertex {
        self.steps[t as usize]
    }

    /// Builds a trajectory from explicit vertices, checking that consecutive
    /// entries are equal or adjacent.
    pub fn from_vertices(graph: GraphModel, steps: Vec<Vertex>) -> Result<Self> {
        let start = *steps.first().ok_or_else(|| Error::param("trajectory must be nonempty"))?;
        for &v in &steps {
            graph.check_vertex(v)?;
        }
        for w in steps.windows(2) {
            if w[0] != w[1] && !graph.neighbors(w[0])?.contains(&w[1]) {
                return Err(Error::param(format!("{} and {} are not adjacent", w[0], w[1])));
            }
        }
        Ok(Self { graph, start, steps, seed: 0 })
    }
}

/// `T` lazy steps from `start`, with a fresh generator seeded by `seed`.
pub fn walk_trajectory(g: &GraphModel, start: Vertex, steps: u64, seed: u64) -> Result<Trajectory> {
    let mut rng = seeded(seed);
    let mut traj = walk_with_rng(g, start, steps, &mut rng)?;
    traj.seed = seed;
    Ok(traj)
}

/// As [`walk_trajectory`] but drawing from a caller-owned generator.
pub fn walk_with_rng<R: Rng + ?Sized>(g: &GraphModel, start: Vertex, steps: u64, rng: &mut R) -> Result<Trajectory> {
    g.check_vertex(start)?;
    let len = usize::try_from(steps)
        .ok()
        .and_then(|s| s.checked_add(1))
        .ok_or_else(|| Error::param("step count overflows"))?;
    let mut out = Vec::with_capacity(len);
    let mut v = start;
    out.push(v);
    for _ in 0..steps {
        v = lazy_step(g, v, rng);
        out.push(v);
    }
    Ok(Trajectory { graph: g.clone(), start, steps: out, seed: 0 })
}

fn dense_guard(g: &GraphModel) -> Result<usize> {
    if g.vertex_count() > DENSE_LIMIT {
        return Err(Error::SizeGuard { vertex_count: g.vertex_count(), limit: DENSE_LIMIT });
    }
    Ok(g.vertex_count() as usize)
}

/// One application of the lazy kernel to a probability vector.
pub fn kernel_step(g: &GraphModel, p: &[f64]) -> Vec<f64> {
    let deg = g.degree() as f64;
    match g.kind() {
        GraphKind::Complete { .. } => {
            let total: f64 = p.iter().sum();
            p.iter().map(|&x| 0.5 * x + 0.5 * (total - x) / deg).collect()
        }
        _ => (0..p.len())
            .map(|x| {
                let nb: f64 = (0..g.degree()).map(|k| p[g.neighbor(x as u64, k) as usize]).sum();
                0.5 * p[x] + 0.5 * nb / deg
            })
            .collect(),
    }
}

/// Character expansion of the lazy kernel on `(Z_n)^d`.
///
/// The eigenvalue for frequency `k` is `1/2 + (1/2d) sum_j cos(2 pi k_j / n)`;
/// since it is even in every coordinate the inverse transform reduces to a
/// real cosine transform along each axis in turn.
#[derive(Debug, Clone)]
pub struct TorusSpectrum {
    d: usize,
    n: usize,
    eigenvalues: Vec<f64>,
    // cos(2 pi k x / n), row-major in (k, x)
    cos_table: Vec<f64>,
}

impl TorusSpectrum {
    pub fn new(g: &GraphModel) -> Result<Self> {
        let (d, n) = match g.kind() {
            GraphKind::Torus { d, n } => (d as usize, n as usize),
            _ => return Err(Error::param("spectral profiles need a torus")),
        };
        let size = dense_guard(g)?;
        let cos_table: Vec<f64> = (0..n * n)
            .map(|i| {
                let (k, x) = (i / n, i % n);
                // reduce k*x mod n first so the angle stays in [0, 2 pi)
                (2.0 * PI * ((k * x) % n) as f64 / n as f64).cos()
            })
            .collect();
        let mut eigenvalues = vec![0.0; size];
        for (idx, ev) in eigenvalues.iter_mut().enumerate() {
            let mut rest = idx;
            let mut s = 0.0;
            for _ in 0..d {
                s += cos_table[(rest % n) * n + 1];
                rest /= n;
            }
            *ev = 0.5 + s / (2.0 * d as f64);
        }
        Ok(Self { d, n, eigenvalues, cos_table })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Exact `p_t(.)` from the origin.
    pub fn profile(&self, t: u64) -> Vec<f64> {
        let exp = i32::try_from(t).unwrap_or(i32::MAX);
        let mut data: Vec<f64> = self.eigenvalues.iter().map(|l| l.powi(exp)).collect();
        let n = self.n;
        let size = data.len();
        let mut line = vec![0.0; n];
        let mut stride = 1;
        for _ in 0..self.d {
            let block = stride * n;
            for base in (0..size).step_by(block) {
                for off in 0..stride {
                    let start = base + off;
                    for (x, out) in line.iter_mut().enumerate() {
                        *out = (0..n).map(|k| data[start + k * stride] * self.cos_table[k * n + x]).sum();
                    }
                    for (x, &val) in line.iter().enumerate() {
                        data[start + x * stride] = val;
                    }
                }
            }
            stride = block;
        }
        let norm = size as f64;
        data.iter().map(|v| (v / norm).max(0.0)).collect()
    }
}

/// Exact `p_t(x)` for all `x`, started from vertex 0.
pub fn transition_profile(g: &GraphModel, t: u64) -> Result<Vec<f64>> {
    match g.kind() {
        GraphKind::Torus { .. } => Ok(TorusSpectrum::new(g)?.profile(t)),
        _ => {
            let mut p = point_mass(g)?;
            for _ in 0..t {
                p = kernel_step(g, &p);
            }
            Ok(p)
        }
    }
}

fn point_mass(g: &GraphModel) -> Result<Vec<f64>> {
    let mut p = vec![0.0; dense_guard(g)?];
    p[0] = 1.0;
    Ok(p)
}

/// Yields `p_0, p_1, ...` using the spectral route on tori and kernel
/// iteration elsewhere.
pub struct ProfileSequence<'a> {
    graph: &'a GraphModel,
    spectrum: Option<TorusSpectrum>,
    current: Vec<f64>,
    t: u64,
}

impl<'a> ProfileSequence<'a> {
    pub fn new(graph: &'a GraphModel) -> Result<Self> {
        let spectrum = match graph.kind() {
            GraphKind::Torus { .. } => Some(TorusSpectrum::new(graph)?),
            _ => None,
        };
        Ok(Self { graph, spectrum, current: point_mass(graph)?, t: 0 })
    }
}

impl Iterator for ProfileSequence<'_> {
    type Item = (u64, Vec<f64>);

    fn next(&mut self) -> Option<Self::Item> {
        let t = self.t;
        let out = match &self.spectrum {
            Some(s) if t > 0 => s.profile(t),
            Some(_) => self.current.clone(),
            None => {
                if t > 0 {
                    self.current = kernel_step(self.graph, &self.current);
                }
                self.current.clone()
            }
        };
        self.t += 1;
        Some((t, out))
    }
}

/// `sup_x |p(x) / pi(x) - 1|` with `pi` uniform.
pub fn separation_deviation(p: &[f64]) -> f64 {
    let size = p.len() as f64;
    p.iter().map(|&x| (x * size - 1.0).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingReport {
    /// Least `t` with deviation at most 1/2, `None` if not reached by `t_max`.
    pub tau: Option<u64>,
    pub t_max: u64,
    /// `(t, deviation)` for every `t` scanned.
    pub separation_curve: Vec<(u64, f64)>,
}

/// Uniform mixing time by a linear scan over `t = 0..=t_max`. The deviation
/// is not assumed monotone; the first crossing is reported.
pub fn mixing_time(g: &GraphModel, t_max: u64) -> Result<MixingReport> {
    let mut curve = Vec::new();
    let mut tau = None;
    for (t, p) in ProfileSequence::new(g)? {
        if t > t_max {
            break;
        }
        let dev = separation_deviation(&p);
        curve.push((t, dev));
        if dev <= 0.5 + PROB_TOL {
            tau = Some(t);
            break;
        }
    }
    Ok(MixingReport { tau, t_max, separation_curve: curve })
}

/// `sup_x sum_{t=0}^{floor(sqrt|G|)} (t+1) p_t(x)`.
pub fn green_sum(g: &GraphModel) -> Result<f64> {
    let horizon = g.vertex_count().isqrt();
    let mut acc = vec![0.0; dense_guard(g)?];
    for (t, p) in ProfileSequence::new(g)? {
        if t > horizon {
            break;
        }
        let w = (t + 1) as f64;
        for (a, x) in acc.iter_mut().zip(&p) {
            *a += w * x;
        }
    }
    Ok(acc.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::RngCore;

    /// Dense transition matrix of the lazy walk, built from neighbor slots.
    fn dense_matrix(g: &GraphModel) -> Vec<Vec<f64>> {
        let size = g.vertex_count() as usize;
        let deg = g.degree() as f64;
        let mut m = vec![vec![0.0; size]; size];
        for (v, row) in m.iter_mut().enumerate() {
            row[v] += 0.5;
            for w in g.neighbors(v as u64).unwrap() {
                row[w as usize] += 0.5 / deg;
            }
        }
        m
    }

    fn dense_powers(g: &GraphModel, t_max: usize) -> Vec<Vec<f64>> {
        let m = dense_matrix(g);
        let size = m.len();
        let mut row = vec![0.0; size];
        row[0] = 1.0;
        let mut out = vec![row.clone()];
        for _ in 0..t_max {
            let next: Vec<f64> = (0..size).map(|y| (0..size).map(|x| row[x] * m[x][y]).sum()).collect();
            row = next;
            out.push(row.clone());
        }
        out
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    struct StayRng;

    impl RngCore for StayRng {
        fn next_u32(&mut self) -> u32 {
            0
        }
        fn next_u64(&mut self) -> u64 {
            0
        }
        fn fill_bytes(&mut self, dst: &mut [u8]) {
            dst.fill(0);
        }
    }

    #[test]
    fn stay_stub_never_moves() {
        let g = GraphModel::torus(3, 5).unwrap();
        for v in [0, 17, 124] {
            assert_eq!(lazy_step(&g, v, &mut StayRng), v);
        }
    }

    fn within_4_sigma(count: u64, draws: u64, p: f64) -> bool {
        let mean = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        (count as f64 - mean).abs() <= 4.0 * sigma
    }

    #[test]
    fn lazy_step_frequencies_complete_two() {
        let g = GraphModel::complete(2).unwrap();
        let mut rng = seeded(1);
        let draws = 1_000_000;
        let stays = (0..draws).filter(|_| lazy_step(&g, 0, &mut rng) == 0).count() as u64;
        assert!(within_4_sigma(stays, draws, 0.5));
    }

    #[test]
    fn lazy_step_frequencies_cycle() {
        let g = GraphModel::torus(1, 4).unwrap();
        let mut rng = seeded(2);
        let draws = 1_000_000;
        let mut counts = [0u64; 4];
        for _ in 0..draws {
            counts[lazy_step(&g, 0, &mut rng) as usize] += 1;
        }
        assert_eq!(counts[2], 0);
        assert!(within_4_sigma(counts[0], draws, 0.5));
        assert!(within_4_sigma(counts[1], draws, 0.25));
        assert!(within_4_sigma(counts[3], draws, 0.25));
    }

    #[test]
    fn trajectory_basics() {
        let g = GraphModel::torus(2, 5).unwrap();
        let t0 = walk_trajectory(&g, 7, 0, 3).unwrap();
        assert_eq!(t0.steps, vec![7]);
        let a = walk_trajectory(&g, 7, 500, 3).unwrap();
        let b = walk_trajectory(&g, 7, 500, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.steps.len(), 501);
        for w in a.steps.windows(2) {
            assert!(w[0] == w[1] || g.neighbors(w[0]).unwrap().contains(&w[1]));
        }
        assert!(walk_trajectory(&g, 25, 3, 1).is_err());
    }

    #[test]
    fn trajectory_transition_frequencies_match_kernel() {
        // Over 10^6 steps on the 6-cycle, the fraction of stays is 1/2 and of
        // +1 / -1 moves 1/4 each.
        let g = GraphModel::torus(1, 6).unwrap();
        let traj = walk_trajectory(&g, 0, 1_000_000, 77).unwrap();
        let (mut stay, mut up) = (0u64, 0u64);
        for w in traj.steps.windows(2) {
            if w[0] == w[1] {
                stay += 1;
            } else if w[1] == (w[0] + 1) % 6 {
                up += 1;
            }
        }
        assert!(within_4_sigma(stay, 1_000_000, 0.5));
        assert!(within_4_sigma(up, 1_000_000, 0.25));
    }

    #[test]
    fn endpoint_is_uniform_on_complete_five() {
        let g = GraphModel::complete(5).unwrap();
        let reps = 100_000u64;
        let mut counts = [0u64; 5];
        for r in 0..reps {
            let mut rng = crate::rng::stream_rng(5, r);
            let traj = walk_with_rng(&g, 0, 40, &mut rng).unwrap();
            counts[*traj.steps.last().unwrap() as usize] += 1;
        }
        for c in counts {
            assert!(within_4_sigma(c, reps, 0.2), "{counts:?}");
        }
    }

    #[test]
    fn profile_examples() {
        let g = GraphModel::torus(2, 3).unwrap();
        let p0 = transition_profile(&g, 0).unwrap();
        assert!((p0[0] - 1.0).abs() < PROB_TOL);
        assert!(p0[1..].iter().all(|x| x.abs() < PROB_TOL));
        let p = transition_profile(&GraphModel::complete(2).unwrap(), 1).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn spectral_matches_dense_powering_on_cycle() {
        let g = GraphModel::torus(1, 4).unwrap();
        let powers = dense_powers(&g, 50);
        let spectrum = TorusSpectrum::new(&g).unwrap();
        for (t, row) in powers.iter().enumerate() {
            assert!(max_abs_diff(&spectrum.profile(t as u64), row) <= PROB_TOL, "t={t}");
        }
    }

    #[test]
    fn spectral_matches_dense_powering_small_tori() {
        for (d, n) in [(2, 2), (2, 5), (3, 3), (2, 6), (4, 2)] {
            let g = GraphModel::torus(d, n).unwrap();
            let powers = dense_powers(&g, 100);
            let spectrum = TorusSpectrum::new(&g).unwrap();
            for (t, row) in powers.iter().enumerate() {
                let p = spectrum.profile(t as u64);
                assert!(max_abs_diff(&p, row) <= PROB_TOL, "{g} t={t}");
                assert!((p.iter().sum::<f64>() - 1.0).abs() <= PROB_TOL);
            }
        }
    }

    #[test]
    fn iteration_matches_dense_powering_other_models() {
        for g in [GraphModel::complete(6).unwrap(), GraphModel::hypercube(4).unwrap()] {
            let powers = dense_powers(&g, 30);
            for (t, p) in ProfileSequence::new(&g).unwrap().take(31) {
                assert!(max_abs_diff(&p, &powers[t as usize]) <= PROB_TOL);
            }
        }
    }

    #[test]
    fn deviation_at_zero_is_size_minus_one() {
        for g in [
            GraphModel::torus(2, 4).unwrap(),
            GraphModel::complete(7).unwrap(),
            GraphModel::hypercube(5).unwrap(),
        ] {
            let p = transition_profile(&g, 0).unwrap();
            assert_eq!(separation_deviation(&p), (g.vertex_count() - 1) as f64);
        }
    }

    #[test]
    fn mixing_complete_two() {
        let r = mixing_time(&GraphModel::complete(2).unwrap(), 10).unwrap();
        assert_eq!(r.tau, Some(1));
        assert_eq!(r.separation_curve, vec![(0, 1.0), (1, 0.0)]);
    }

    #[test]
    fn mixing_not_reached() {
        let r = mixing_time(&GraphModel::complete(5).unwrap(), 0).unwrap();
        assert_eq!(r.tau, None);
        assert_eq!(r.separation_curve.len(), 1);
    }

    #[test]
    fn mixing_ratio_on_planar_tori() {
        let ratios: Vec<f64> = [4u64, 6, 8, 12]
            .iter()
            .map(|&n| {
                let tau = mixing_time(&GraphModel::torus(2, n).unwrap(), 10_000).unwrap().tau.unwrap();
                tau as f64 / (n * n) as f64
            })
            .collect();
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min <= 3.0, "{ratios:?}");
    }

    #[test]
    fn green_sum_complete_two() {
        let v = green_sum(&GraphModel::complete(2).unwrap()).unwrap();
        assert!((v - 2.0).abs() < PROB_TOL);
    }

    #[test]
    fn green_sum_bounded_on_five_dim_tori() {
        let vals: Vec<f64> = [3u64, 4, 5]
            .iter()
            .map(|&n| green_sum(&GraphModel::torus(5, n).unwrap()).unwrap())
            .collect();
        for v in &vals {
            assert!(*v >= 1.0);
        }
        let max = vals.iter().cloned().fold(f64::MIN, f64::max);
        let min = vals.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min <= 2.0, "{vals:?}");
    }

    #[test]
    fn size_guard() {
        let g = GraphModel::torus(8, 10).unwrap();
        assert!(matches!(transition_profile(&g, 1), Err(Error::SizeGuard { .. })));
    }
}
