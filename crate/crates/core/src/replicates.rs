//! Replicate scheduling.
//!
//! [`map_replicates`] evaluates a closure once per replicate index, each call
//! receiving its own generator from [`crate::rng::stream_rng`]. Output order
//! is replicate order, so results are identical for any worker count and for
//! the sequential build.

use crate::rng::{stream_rng, SimRng};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `f(index, rng)` for `index in 0..count`, in parallel when the
/// `parallel` feature is enabled.
pub fn map_replicates<T, F>(count: usize, base_seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut SimRng) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_replicates_par(count, base_seed, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_replicates_seq(count, base_seed, f)
    }
}

pub fn map_replicates_seq<T, F>(count: usize, base_seed: u64, f: F) -> Vec<T>
where
    F: Fn(usize, &mut SimRng) -> T,
{
    (0..count)
        .map(|r| {
            let mut rng = stream_rng(base_seed, r as u64);
            f(r, &mut rng)
        })
        .collect()
}

#[cfg(feature = "parallel")]
pub fn map_replicates_par<T, F>(count: usize, base_seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut SimRng) -> T + Sync + Send,
{
    (0..count)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(base_seed, r as u64);
            f(r, &mut rng)
        })
        .collect()
}

/// Runs `op` with at most `workers` threads. `None` uses the global pool.
/// Without the `parallel` feature the worker count is ignored.
pub fn with_workers<R: Send>(workers: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match workers {
            Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(op),
                Err(_) => op(),
            },
            _ => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        op()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn order_and_values_do_not_depend_on_scheduling() {
        let draw = |r: usize, rng: &mut SimRng| (r, rng.random::<u64>());
        let seq = map_replicates_seq(64, 11, draw);
        let par = map_replicates(64, 11, draw);
        assert_eq!(seq, par);
        let one = with_workers(Some(1), || map_replicates(64, 11, draw));
        let four = with_workers(Some(4), || map_replicates(64, 11, draw));
        assert_eq!(one, four);
        assert_eq!(one, seq);
    }
}
