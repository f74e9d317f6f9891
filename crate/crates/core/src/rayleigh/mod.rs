//! The Rayleigh process and the discrete chains that approximate it.
//!
//! The process grows at unit speed and, at rate equal to its current value,
//! jumps down to a uniform fraction of that value. Two constructions are
//! provided and checked against each other in the tests:
//!
//! * [`rayleigh_from_field`]: the lower envelope
//!   `R(t) = (y + t) ^ inf { x + (t - s) : (s, x) in field, s <= t }`
//!   over a unit-intensity planar Poisson field;
//! * [`rayleigh_event_driven`]: exact hazard inversion between jumps.
//!
//! The [`surrogate`] chain (loop erasure of i.i.d. uniform labels), the
//! [`prime`] chain (built from the same Poisson field as the envelope) and the
//! Bernoulli [`coupling`] connect segment survival sets to the process.

pub mod coupling;
mod field;
mod path;
pub mod prime;
pub mod surrogate;

pub use coupling::{maximal_coupling, CouplingLaw, CouplingSample};
pub use field::{sample_poisson_field, PoissonField};
pub use path::StepPath;
pub use prime::{prime_chain_from_field, rectangle_indicator, sandwich_rounding, PrimeChain};
pub use surrogate::{surrogate_chain, surrogate_lengths, SurrogateChain};

use rand::Rng;

use crate::{Error, Result};

/// `P(W > x) = exp(-x^2 / 2)` for the Rayleigh law.
pub fn rayleigh_survival(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::param(format!("Rayleigh survival needs x >= 0, got {x}")));
    }
    Ok((-0.5 * x * x).exp())
}

/// Rayleigh distribution function, `1 - exp(-x^2/2)` for `x >= 0` and 0 below.
pub fn rayleigh_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-0.5 * x * x).exp_m1()
    }
}

/// Envelope construction of `R` on `[0, horizon]` from `R(0) = y`.
///
/// The field must reach `horizon` in time and `y + horizon` in height; higher
/// points can never bind because `R(t) <= y + t`.
pub fn rayleigh_from_field(field: &PoissonField, y: f64, horizon: f64) -> Result<StepPath> {
    if !(y >= 0.0) || !(horizon > 0.0) {
        return Err(Error::param("need y >= 0 and horizon > 0"));
    }
    if field.horizon_t < horizon || field.horizon_x < y + horizon {
        return Err(Error::param(format!(
            "field [0, {}) x [0, {}) does not cover horizon {horizon} from y = {y}",
            field.horizon_t, field.horizon_x
        )));
    }
    let mut path = StepPath::new(y, 1.0, horizon);
    for &(s, x) in field.points.iter().take_while(|p| p.0 <= horizon) {
        if x < path.left_limit(s) {
            path.push_jump(s, x);
        }
    }
    Ok(path)
}

/// Hazard-driven simulation of `R` on `[0, horizon]` from `R(0) = y`.
///
/// From value `v` the cumulative hazard after waiting `u` is `v u + u^2 / 2`;
/// setting it equal to a standard exponential `E` gives
/// `u = 2E / (v + sqrt(v^2 + 2E))`. At the jump the value `v + u` is
/// multiplied by an independent uniform.
pub fn rayleigh_event_driven<R: Rng + ?Sized>(y: f64, horizon: f64, rng: &mut R) -> Result<StepPath> {
    if !(y >= 0.0) || !(horizon > 0.0) {
        return Err(Error::param("need y >= 0 and horizon > 0"));
    }
    let mut path = StepPath::new(y, 1.0, horizon);
    let (mut t, mut v) = (0.0f64, y);
    loop {
        // -ln(U) with U in [0, 1); U = 0 means no further jump
        let e = -rng.random::<f64>().ln();
        if e.is_infinite() {
            break;
        }
        let wait = 2.0 * e / (v + (v * v + 2.0 * e).sqrt());
        if t + wait > horizon {
            break;
        }
        t += wait;
        v = (v + wait) * rng.random::<f64>();
        path.push_jump(t, v);
    }
    Ok(path)
}

/// `R(horizon)` only, without recording the path.
pub fn rayleigh_value_at<R: Rng + ?Sized>(y: f64, horizon: f64, rng: &mut R) -> Result<f64> {
    Ok(rayleigh_event_driven(y, horizon, rng)?.value_at(horizon))
}
