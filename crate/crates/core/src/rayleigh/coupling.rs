//! A joint law for `V` (at most one 1 among `j` slots, each slot w.p. `p`)
//! and `W` (`j` i.i.d. Bernoulli(`q`)) that puts as much mass as possible on
//! `V = W`.
//!
//! Outcomes are bit masks over the slots. Each common outcome (all zero and
//! the `j` single-one patterns) gets the smaller of its two marginal masses;
//! the leftovers are paired by a northwest-corner sweep in mask order.

use rand::Rng;
use serde::Serialize;

use crate::{Error, Result};

/// Largest `j` for which the `2^j` outcomes of `W` are enumerated.
pub const MAX_SLOTS: usize = 20;

/// Below this a residual is treated as used up.
const MASS_EPS: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingLaw {
    pub j: usize,
    pub p: f64,
    pub q: f64,
    /// `(v_mask, w_mask, mass)` with positive mass.
    pub cells: Vec<(u32, u32, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingSample {
    pub v: Vec<u8>,
    pub w: Vec<u8>,
    pub match_probability: f64,
    pub bound: f64,
}

/// `1 - j|p - q| - j(j - 1) q^2`.
pub fn match_lower_bound(j: usize, p: f64, q: f64) -> f64 {
    let j = j as f64;
    1.0 - j * (p - q).abs() - j * (j - 1.0) * q * q
}

fn v_outcomes(j: usize) -> impl Iterator<Item = u32> {
    std::iter::once(0).chain((0..j).map(|i| 1u32 << i))
}

impl CouplingLaw {
    pub fn new(j: usize, p: f64, q: f64) -> Result<Self> {
        if j == 0 || j > MAX_SLOTS {
            return Err(Error::param(format!("coupling needs 1 <= j <= {MAX_SLOTS}, got {j}")));
        }
        if !(p > 0.0 && p * (j as f64) < 1.0) {
            return Err(Error::param(format!("need 0 < p < 1/j, got p = {p}, j = {j}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::param(format!("need 0 < q < 1, got {q}")));
        }
        let law = Self { j, p, q, cells: Vec::new() };
        let mut rv: Vec<(u32, f64)> = v_outcomes(j).map(|v| (v, law.v_mass(v))).collect();
        let mut rw: Vec<f64> = (0..1u32 << j).map(|w| law.w_mass(w)).collect();
        let mut cells = Vec::new();
        for (v, mass) in rv.iter_mut() {
            let common = mass.min(rw[*v as usize]);
            cells.push((*v, *v, common));
            *mass -= common;
            rw[*v as usize] -= common;
        }
        // northwest corner over the leftovers
        let (mut a, mut b) = (0usize, 0usize);
        while a < rv.len() && b < rw.len() {
            if rv[a].1 <= MASS_EPS {
                a += 1;
                continue;
            }
            if rw[b] <= MASS_EPS {
                b += 1;
                continue;
            }
            let amount = rv[a].1.min(rw[b]);
            cells.push((rv[a].0, b as u32, amount));
            rv[a].1 -= amount;
            rw[b] -= amount;
        }
        cells.retain(|c| c.2 > 0.0);
        Ok(Self { cells, ..law })
    }

    /// Marginal law of `V` at a mask (zero off its support).
    pub fn v_mass(&self, v: u32) -> f64 {
        match v.count_ones() {
            0 => 1.0 - self.j as f64 * self.p,
            1 if v < (1 << self.j) => self.p,
            _ => 0.0,
        }
    }

    pub fn w_mass(&self, w: u32) -> f64 {
        let ones = w.count_ones() as i32;
        self.q.powi(ones) * (1.0 - self.q).powi(self.j as i32 - ones)
    }

    /// Total mass on the diagonal `V = W`.
    pub fn match_probability(&self) -> f64 {
        self.cells.iter().filter(|c| c.0 == c.1).map(|c| c.2).sum()
    }

    pub fn bound(&self) -> f64 {
        match_lower_bound(self.j, self.p, self.q)
    }

    /// Row sums of the joint law, indexed by mask.
    pub fn v_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.j];
        for &(v, _, m) in &self.cells {
            out[v as usize] += m;
        }
        out
    }

    pub fn w_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.j];
        for &(_, w, m) in &self.cells {
            out[w as usize] += m;
        }
        out
    }

    /// One joint draw as a pair of masks.
    pub fn sample_masks<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, u32) {
        let u = rng.random::<f64>();
        let mut acc = 0.0;
        for &(v, w, m) in &self.cells {
            acc += m;
            if u < acc {
                return (v, w);
            }
        }
        // rounding left a sliver above the last cumulative sum
        let last = self.cells.last().expect("coupling has mass");
        (last.0, last.1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<u8>, Vec<u8>) {
        let (v, w) = self.sample_masks(rng);
        (self.bits(v), self.bits(w))
    }

    fn bits(&self, mask: u32) -> Vec<u8> {
        (0..self.j).map(|i| ((mask >> i) & 1) as u8).collect()
    }
}

/// Build the coupling for `(p, q, j)` and draw once from it.
pub fn maximal_coupling<R: Rng + ?Sized>(p: f64, q: f64, j: usize, rng: &mut R) -> Result<CouplingSample> {
    let law = CouplingLaw::new(j, p, q)?;
    let (v, w) = law.sample(rng);
    Ok(CouplingSample { v, w, match_probability: law.match_probability(), bound: law.bound() })
}
