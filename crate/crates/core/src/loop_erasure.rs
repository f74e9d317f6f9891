//! Chronological loop erasure.
//!
//! [`loop_erase`] follows the inductive definition directly: start from the
//! first point, and from the current point `v` continue with the point that
//! follows the *last* visit to `v`. [`LoopErasedState`] produces the same path
//! incrementally, one vertex at a time: a vertex already on the path truncates
//! the path back to it, any other vertex is appended.
//!
//! Only integer equality of ids is used, so the same code erases walks on
//! graphs and the abstract sequences of the surrogate chains.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use crate::graph::Vertex;
use crate::walk::Trajectory;
use crate::{Error, Result};

/// Batch loop erasure of a nonempty sequence.
pub fn loop_erase(seq: &[Vertex]) -> Result<Vec<Vertex>> {
    let first = *seq.first().ok_or_else(|| Error::param("loop erasure of an empty sequence"))?;
    let mut last_visit: HashMap<Vertex, usize> = HashMap::with_capacity(seq.len());
    for (i, &v) in seq.iter().enumerate() {
        last_visit.insert(v, i);
    }
    let end = seq.len() - 1;
    let mut out = vec![first];
    let mut r = last_visit[&first];
    while r != end {
        let next = seq[r + 1];
        out.push(next);
        r = last_visit[&next];
    }
    Ok(out)
}

/// Whether `length_history` keeps every `Y_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum History {
    Full,
    Off,
}

#[derive(Debug, Clone)]
enum PositionIndex {
    // ids < len, u32::MAX marks "not on the path"
    Dense(Vec<u32>),
    Sparse(HashMap<Vertex, usize>),
}

impl PositionIndex {
    #[inline]
    fn get(&self, v: Vertex) -> Option<usize> {
        match self {
            PositionIndex::Dense(slots) => match slots[v as usize] {
                u32::MAX => None,
                k => Some(k as usize),
            },
            PositionIndex::Sparse(map) => map.get(&v).copied(),
        }
    }

    #[inline]
    fn insert(&mut self, v: Vertex, k: usize) {
        match self {
            PositionIndex::Dense(slots) => slots[v as usize] = k as u32,
            PositionIndex::Sparse(map) => {
                map.insert(v, k);
            }
        }
    }

    #[inline]
    fn remove(&mut self, v: Vertex) {
        match self {
            PositionIndex::Dense(slots) => slots[v as usize] = u32::MAX,
            PositionIndex::Sparse(map) => {
                map.remove(&v);
            }
        }
    }
}

/// Dense indexing is used below this id-space size.
const DENSE_INDEX_LIMIT: u64 = 1 << 24;

/// Incremental loop erasure of a growing sequence.
///
/// `retained_times[k]` is the last time `path[k]` was visited, so reading the
/// pushed sequence at `retained_times` spells `path`.
#[derive(Debug, Clone)]
pub struct LoopErasedState {
    path: Vec<Vertex>,
    position_of: PositionIndex,
    retained_times: Vec<u64>,
    length_history: Vec<usize>,
    history: History,
    pushed: u64,
}

impl LoopErasedState {
    /// State backed by a hash map; works for any ids.
    pub fn new(history: History) -> Self {
        Self::with_index(PositionIndex::Sparse(HashMap::new()), history)
    }

    /// State for ids known to lie in `[0, id_bound)`. Uses a flat array when
    /// that is small enough.
    pub fn for_id_bound(id_bound: u64, history: History) -> Self {
        if id_bound <= DENSE_INDEX_LIMIT {
            Self::with_index(PositionIndex::Dense(vec![u32::MAX; id_bound as usize]), history)
        } else {
            Self::new(history)
        }
    }

    fn with_index(position_of: PositionIndex, history: History) -> Self {
        Self { path: Vec::new(), position_of, retained_times: Vec::new(), length_history: Vec::new(), history, pushed: 0 }
    }

    /// Appends `v` at the next time step and erases the loop it closes, if any.
    #[inline]
    pub fn push(&mut self, v: Vertex) {
        let time = self.pushed;
        match self.position_of.get(v) {
            Some(k) => {
                for w in self.path.drain(k + 1..) {
                    self.position_of.remove(w);
                }
                self.retained_times.truncate(k + 1);
                self.retained_times[k] = time;
            }
            None => {
                self.position_of.insert(v, self.path.len());
                self.path.push(v);
                self.retained_times.push(time);
            }
        }
        if self.history == History::Full {
            self.length_history.push(self.path.len());
        }
        self.pushed += 1;
    }

    /// Current loop-erased length `Y_t` (0 before the first push).
    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn path(&self) -> &[Vertex] {
        &self.path
    }

    pub fn retained_times(&self) -> &[u64] {
        &self.retained_times
    }

    /// `Y_0, ..., Y_t` when history is kept, empty otherwise.
    pub fn length_history(&self) -> &[usize] {
        &self.length_history
    }

    /// Number of vertices pushed so far.
    pub fn pushed(&self) -> u64 {
        self.pushed
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.position_of.get(v).is_some()
    }

    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.position_of.get(v)
    }
}

/// `Y_0, ..., Y_T` for a trajectory.
pub fn length_process(traj: &Trajectory) -> Vec<usize> {
    let mut state = LoopErasedState::for_id_bound(traj.graph.vertex_count(), History::Full);
    for &v in &traj.steps {
        state.push(v);
    }
    state.length_history
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalErasure {
    /// Locally retained times in the window, increasing.
    pub retained_times: Vec<u64>,
    /// The walk read at those times.
    pub path: Vec<Vertex>,
}

impl LocalErasure {
    pub fn len(&self) -> usize {
        self.retained_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retained_times.is_empty()
    }
}

/// Whether time `u` is locally retained with window `s`: the loop erasure of
/// the walk on `[max(0, u - s), u]` avoids the walk on `[u + 1, u + s]`.
pub fn is_locally_retained(steps: &[Vertex], u: usize, s: usize) -> bool {
    if s == 0 {
        return true;
    }
    let past = &steps[u.saturating_sub(s)..=u];
    let future = &steps[u + 1..=u + s];
    let erased = loop_erase(past).expect("window is nonempty");
    let erased: HashSet<Vertex> = erased.into_iter().collect();
    !future.iter().any(|v| erased.contains(v))
}

/// Local loop erasure of the walk over the time window `window`.
pub fn local_loop_erasure(traj: &Trajectory, window: Range<u64>, s: u64) -> Result<LocalErasure> {
    let t_max = traj.len_steps();
    if window.start < window.end && (window.end - 1).checked_add(s).is_none_or(|last| last > t_max) {
        return Err(Error::param(format!(
            "window {window:?} with lookahead {s} exceeds trajectory of {t_max} steps"
        )));
    }
    let mut retained_times = Vec::new();
    let mut path = Vec::new();
    for u in window {
        if is_locally_retained(&traj.steps, u as usize, s as usize) {
            retained_times.push(u);
            path.push(traj.at(u));
        }
    }
    Ok(LocalErasure { retained_times, path })
}
