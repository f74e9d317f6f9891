//! Complete-graph stand-in for segment intersections.
//!
//! `xi_1, xi_2, ...` are i.i.d. uniform on `{1, ..., m}` and segment `i` hits
//! segment `j` when `xi_i = xi_j`. The survival sets are then exactly the
//! retained times of the loop erasure of `(0, xi_1, xi_2, ...)`, where the
//! sentinel 0 can never be revisited.

use rand::Rng;
use serde::Serialize;

use crate::loop_erasure::{History, LoopErasedState};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateChain {
    pub m: u64,
    /// `xi[i - 1]` is `xi_i`.
    pub xi: Vec<u64>,
    /// `lengths[j] = |S_j|`, starting from `|S_0| = 1`.
    pub lengths: Vec<usize>,
}

impl SurrogateChain {
    pub fn steps(&self) -> usize {
        self.xi.len()
    }

    /// `S_j` as increasing indices, recomputed from the draws.
    pub fn retained_at(&self, j: usize) -> Vec<usize> {
        assert!(j <= self.steps(), "step {j} beyond chain length {}", self.steps());
        let mut state = erasure_state(self.m);
        state.push(0);
        for &x in &self.xi[..j] {
            state.push(x);
        }
        state.retained_times().iter().map(|&t| t as usize).collect()
    }

    /// `S_0, ..., S_J`.
    pub fn retained_sets(&self) -> Vec<Vec<usize>> {
        let mut state = erasure_state(self.m);
        state.push(0);
        let mut out = vec![vec![0]];
        for &x in &self.xi {
            state.push(x);
            out.push(state.retained_times().iter().map(|&t| t as usize).collect());
        }
        out
    }
}

fn erasure_state(m: u64) -> LoopErasedState {
    LoopErasedState::for_id_bound(m + 1, History::Off)
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::param("surrogate size m must be at least 1"));
    }
    Ok(())
}

pub fn surrogate_chain<R: Rng + ?Sized>(m: u64, steps: usize, rng: &mut R) -> Result<SurrogateChain> {
    check_m(m)?;
    let mut state = erasure_state(m);
    state.push(0);
    let mut xi = Vec::with_capacity(steps);
    let mut lengths = Vec::with_capacity(steps + 1);
    lengths.push(1);
    for _ in 0..steps {
        let x = rng.random_range(1..=m);
        state.push(x);
        xi.push(x);
        lengths.push(state.len());
    }
    Ok(SurrogateChain { m, xi, lengths })
}

/// `|S_0|, ..., |S_J|` only; consumes the same draws as [`surrogate_chain`].
pub fn surrogate_lengths<R: Rng + ?Sized>(m: u64, steps: usize, rng: &mut R) -> Result<Vec<usize>> {
    check_m(m)?;
    let mut state = erasure_state(m);
    state.push(0);
    let mut lengths = Vec::with_capacity(steps + 1);
    lengths.push(1);
    for _ in 0..steps {
        state.push(rng.random_range(1..=m));
        lengths.push(state.len());
    }
    Ok(lengths)
}
