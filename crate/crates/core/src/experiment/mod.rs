//! Seeded experiment pipelines behind the `lerw` command-line tool.
//!
//! A run is described by an [`ExperimentConfig`] (flat `key=value` pairs) and
//! produces a [`RunResult`]: a CSV table with a header row and a JSON summary
//! `{config, estimates, diagnostics, version}`. Replicate `r` always draws from
//! `stream_rng(seed, r)`, so results do not depend on the worker count and a
//! run with fewer replicates reproduces a prefix of a longer one.

mod config;
mod pipelines;
mod result;

pub use config::{parse_config, parse_pairs, ExperimentConfig, FddSource, RayleighMode, Subcommand, KEYS};
pub use pipelines::{
    lerw_lengths, rayleigh_marginals, resolve_constants, resolve_tau, run_experiment, surrogate_index,
    surrogate_marginals,
};
pub use result::{format_real, RunResult, VERSION};
