//! Loop-erased random walk on finite vertex-transitive graphs, the Rayleigh
//! process, and the surrogate chains that connect the two.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] builds tori, complete graphs and hypercubes with integer vertex ids.
//! * [`walk`] runs the lazy random walk and computes exact transition profiles,
//!   uniform mixing times and the Green-type sum used to screen graph families.
//! * [`loop_erasure`] implements chronological loop erasure, both batch and
//!   incremental, together with the local (windowed) variant.
//! * [`segments`] cuts a walk into segments, tracks which segments survive
//!   erasure and estimates the scaling constants of a graph family.
//! * [`rayleigh`] simulates the Rayleigh process two ways, the complete-graph
//!   surrogate chain, the Poisson-rectangle chain and the Bernoulli coupling.
//! * [`stats`] has the Kolmogorov-Smirnov tooling, path rescaling and the
//!   Skorohod modulus of continuity.
//! * [`experiment`] parses configs and runs seeded, reproducible pipelines.
//!
//! Monte Carlo loops go through [`replicates`], which runs on rayon when the
//! `parallel` feature is enabled (the default) and sequentially otherwise.
//! Results never depend on the number of workers.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;

pub mod experiment;
pub mod graph;
pub mod loop_erasure;
pub mod rayleigh;
pub mod replicates;
pub mod rng;
pub mod segments;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{GraphKind, GraphModel, Vertex};
pub use rng::SimRng;
