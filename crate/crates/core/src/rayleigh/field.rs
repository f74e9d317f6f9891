use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::{Error, Result};

/// A realisation of a unit-intensity Poisson process on
/// `[0, horizon_t) x [0, horizon_x)`, sorted by time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonField {
    pub horizon_t: f64,
    pub horizon_x: f64,
    pub points: Vec<(f64, f64)>,
}

impl PoissonField {
    /// Field from explicit points (sorted here; bounds are checked).
    pub fn from_points(horizon_t: f64, horizon_x: f64, mut points: Vec<(f64, f64)>) -> Result<Self> {
        check_horizons(horizon_t, horizon_x)?;
        if points.iter().any(|&(s, x)| !(0.0..horizon_t).contains(&s) || !(0.0..horizon_x).contains(&x)) {
            return Err(Error::param("field point outside its rectangle"));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { horizon_t, horizon_x, points })
    }

    pub fn area(&self) -> f64 {
        self.horizon_t * self.horizon_x
    }
}

fn check_horizons(horizon_t: f64, horizon_x: f64) -> Result<()> {
    if !(horizon_t > 0.0 && horizon_x > 0.0 && horizon_t.is_finite() && horizon_x.is_finite()) {
        return Err(Error::param(format!("field horizons must be positive and finite, got ({horizon_t}, {horizon_x})")));
    }
    Ok(())
}

pub fn sample_poisson_field<R: Rng + ?Sized>(horizon_t: f64, horizon_x: f64, rng: &mut R) -> Result<PoissonField> {
    check_horizons(horizon_t, horizon_x)?;
    let count = Poisson::new(horizon_t * horizon_x)
        .map_err(|e| Error::param(format!("Poisson mean: {e}")))?
        .sample(rng) as usize;
    let mut points: Vec<(f64, f64)> = (0..count)
        .map(|_| (rng.random::<f64>() * horizon_t, rng.random::<f64>() * horizon_x))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(PoissonField { horizon_t, horizon_x, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replicates::map_replicates;
    use crate::rng::seeded;
    use crate::stats::ks_statistic;

    #[test]
    fn rejects_degenerate_horizons() {
        let mut rng = seeded(1);
        assert!(sample_poisson_field(0.0, 1.0, &mut rng).is_err());
        assert!(sample_poisson_field(1.0, -2.0, &mut rng).is_err());
        assert!(sample_poisson_field(f64::INFINITY, 1.0, &mut rng).is_err());
    }

    #[test]
    fn points_sorted_and_in_bounds() {
        let f = sample_poisson_field(2.0, 3.5, &mut seeded(3)).unwrap();
        assert!(f.points.windows(2).all(|w| w[0].0 <= w[1].0));
        assert!(f.points.iter().all(|&(s, x)| (0.0..2.0).contains(&s) && (0.0..3.5).contains(&x)));
        assert!(PoissonField::from_points(1.0, 1.0, vec![(1.0, 0.5)]).is_err());
    }

    #[test]
    fn mean_count_matches_area() {
        let reps = 10_000;
        let counts = map_replicates(reps, 8, |_, rng| sample_poisson_field(1.75, 4.0, rng).unwrap().points.len() as f64);
        let mean = counts.iter().sum::<f64>() / reps as f64;
        // Poisson(7): the sample mean has standard error sqrt(7 / reps)
        assert!((mean - 7.0).abs() <= 4.0 * (7.0 / reps as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn times_are_uniform() {
        let mut rng = seeded(12);
        let mut pooled = Vec::new();
        while pooled.len() < 10_000 {
            let f = sample_poisson_field(2.0, 5.0, &mut rng).unwrap();
            pooled.extend(f.points.iter().map(|p| p.0 / 2.0));
        }
        let ks = ks_statistic(&pooled, |u| u.clamp(0.0, 1.0)).unwrap();
        assert!(ks <= 0.02, "ks = {ks}");
    }
}
