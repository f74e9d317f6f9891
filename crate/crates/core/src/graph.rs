//! Finite vertex-transitive graphs with arithmetic neighbor enumeration.
//!
//! Vertex ids are `u64` in `[0, vertex_count)`:
//!
//! * torus `(Z_n)^d`: mixed radix, coordinate 0 is the least significant digit;
//! * complete graph `K_m`: the identity;
//! * hypercube `{0,1}^n`: a bit mask.
//!
//! Neighbors are enumerated in a fixed order. For the torus the order is
//! `+e_0, -e_0, +e_1, -e_1, ...`; with side length 2 the two directions of an
//! axis coincide and both entries are kept, so every vertex has exactly `2d`
//! neighbor slots and the walk kernel stays translation invariant.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Vertex = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphKind {
    Torus { d: u32, n: u64 },
    Complete { m: u64 },
    Hypercube { n: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphModel {
    kind: GraphKind,
    vertex_count: u64,
    degree: usize,
    // n^j for the torus, empty otherwise
    strides: Vec<u64>,
}

impl GraphModel {
    pub fn new(kind: GraphKind) -> Result<Self> {
        match kind {
            GraphKind::Torus { d, n } => {
                if d < 1 {
                    return Err(Error::param("torus dimension must be at least 1"));
                }
                if n < 2 {
                    return Err(Error::param("torus side length must be at least 2"));
                }
                let mut strides = Vec::with_capacity(d as usize);
                let mut acc: u64 = 1;
                for _ in 0..d {
                    strides.push(acc);
                    acc = acc.checked_mul(n).ok_or_else(|| {
                        Error::param(format!("torus {n}^{d} overflows 64-bit vertex ids"))
                    })?;
                }
                Ok(Self { kind, vertex_count: acc, degree: 2 * d as usize, strides })
            }
            GraphKind::Complete { m } => {
                if m < 2 {
                    return Err(Error::param("complete graph needs at least 2 vertices"));
                }
                let degree = usize::try_from(m - 1)
                    .map_err(|_| Error::param("complete graph degree exceeds usize"))?;
                Ok(Self { kind, vertex_count: m, degree, strides: Vec::new() })
            }
            GraphKind::Hypercube { n } => {
                if n < 1 {
                    return Err(Error::param("hypercube dimension must be at least 1"));
                }
                if n > 63 {
                    return Err(Error::param(format!("hypercube 2^{n} overflows 64-bit vertex ids")));
                }
                Ok(Self { kind, vertex_count: 1u64 << n, degree: n as usize, strides: Vec::new() })
            }
        }
    }

    pub fn torus(d: u32, n: u64) -> Result<Self> {
        Self::new(GraphKind::Torus { d, n })
    }

    pub fn complete(m: u64) -> Result<Self> {
        Self::new(GraphKind::Complete { m })
    }

    pub fn hypercube(n: u32) -> Result<Self> {
        Self::new(GraphKind::Hypercube { n })
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn vertex_count(&self) -> u64 {
        self.vertex_count
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Torus side length, if this is a torus.
    pub fn side_length(&self) -> Option<u64> {
        match self.kind {
            GraphKind::Torus { n, .. } => Some(n),
            _ => None,
        }
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, vertex_count: self.vertex_count })
        }
    }

    /// The `k`-th neighbor slot of `v`, `k < degree`. No range checks.
    #[inline]
    pub fn neighbor(&self, v: Vertex, k: usize) -> Vertex {
        match self.kind {
            GraphKind::Torus { n, .. } => {
                let stride = self.strides[k / 2];
                let coord = (v / stride) % n;
                if k.is_multiple_of(2) {
                    if coord + 1 == n {
                        v - coord * stride
                    } else {
                        v + stride
                    }
                } else if coord == 0 {
                    v + (n - 1) * stride
                } else {
                    v - stride
                }
            }
            GraphKind::Complete { .. } => {
                let k = k as u64;
                if k < v {
                    k
                } else {
                    k + 1
                }
            }
            GraphKind::Hypercube { .. } => v ^ (1u64 << k),
        }
    }

    /// All neighbor slots of `v`, in slot order.
    pub fn neighbors(&self, v: Vertex) -> Result<Vec<Vertex>> {
        self.check_vertex(v)?;
        Ok((0..self.degree).map(|k| self.neighbor(v, k)).collect())
    }

    pub fn uniform_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> Vertex {
        rng.random_range(0..self.vertex_count)
    }

    /// Torus coordinates of `v` (least significant first).
    pub fn torus_coords(&self, v: Vertex) -> Option<Vec<u64>> {
        match self.kind {
            GraphKind::Torus { n, .. } => Some(self.strides.iter().map(|s| (v / s) % n).collect()),
            _ => None,
        }
    }

    /// Inverse of [`GraphModel::torus_coords`].
    pub fn torus_vertex(&self, coords: &[u64]) -> Option<Vertex> {
        match self.kind {
            GraphKind::Torus { n, .. } if coords.len() == self.strides.len() => {
                Some(coords.iter().zip(&self.strides).map(|(c, s)| (c % n) * s).sum())
            }
            _ => None,
        }
    }

    /// The automorphism taking vertex 0 to `shift`: translation on the torus,
    /// XOR on the hypercube, `None` for the complete graph (use any permutation).
    pub fn translate(&self, v: Vertex, shift: Vertex) -> Option<Vertex> {
        match self.kind {
            GraphKind::Torus { .. } => {
                let a = self.torus_coords(v)?;
                let b = self.torus_coords(shift)?;
                let sum: Vec<u64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                self.torus_vertex(&sum)
            }
            GraphKind::Hypercube { .. } => Some(v ^ shift),
            GraphKind::Complete { .. } => None,
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Torus { d, n } => write!(f, "torus:d={d},n={n}"),
            GraphKind::Complete { m } => write!(f, "complete:m={m}"),
            GraphKind::Hypercube { n } => write!(f, "hypercube:n={n}"),
        }
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// Parses `torus:d=4,n=10`, `complete:m=1000` or `hypercube:n=12`.
impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::config(format!("malformed graph {s:?}: {why}"));
        let (kind, params) = s.trim().split_once(':').ok_or_else(|| bad("expected kind:key=value,..."))?;
        let mut pairs = Vec::new();
        for item in params.split(',') {
            let (k, v) = item.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let v: u64 = v.trim().parse().map_err(|_| bad("value is not a nonnegative integer"))?;
            pairs.push((k.trim(), v));
        }
        let take = |key: &str| -> Result<u64> {
            let mut found = pairs.iter().filter(|(k, _)| *k == key);
            let (_, v) = found.next().ok_or_else(|| bad(&format!("missing key {key}")))?;
            if found.next().is_some() {
                return Err(bad(&format!("duplicate key {key}")));
            }
            Ok(*v)
        };
        let allow = |keys: &[&str]| -> Result<()> {
            match pairs.iter().find(|(k, _)| !keys.contains(k)) {
                Some((k, _)) => Err(bad(&format!("unknown key {k}"))),
                None => Ok(()),
            }
        };
        let small = |v: u64| u32::try_from(v).map_err(|_| bad("dimension too large"));
        match kind.trim() {
            "torus" => {
                allow(&["d", "n"])?;
                Ok(GraphKind::Torus { d: small(take("d")?)?, n: take("n")? })
            }
            "complete" => {
                allow(&["m"])?;
                Ok(GraphKind::Complete { m: take("m")? })
            }
            "hypercube" => {
                allow(&["n"])?;
                Ok(GraphKind::Hypercube { n: small(take("n")?)? })
            }
            other => Err(bad(&format!("unknown graph kind {other:?}"))),
        }
    }
}

impl FromStr for GraphModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GraphModel::new(s.parse()?)
    }
}
