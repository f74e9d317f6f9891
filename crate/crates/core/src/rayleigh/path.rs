use serde::Serialize;

/// A right-continuous path on `[0, horizon]` that moves with constant slope
/// between breakpoints and jumps at them.
///
/// `breakpoints` holds `(time, value after the jump)` in increasing time.
/// Rayleigh paths have slope 1 and only downward jumps; rescaled loop-erased
/// lengths are step functions (slope 0) with jumps both ways.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepPath {
    start: f64,
    slope: f64,
    horizon: f64,
    breakpoints: Vec<(f64, f64)>,
}

impl StepPath {
    pub fn new(start: f64, slope: f64, horizon: f64) -> Self {
        Self { start, slope, horizon, breakpoints: Vec::new() }
    }

    /// Path from explicit breakpoints, which must have increasing times in
    /// `(0, horizon]`.
    pub fn from_breakpoints(start: f64, slope: f64, horizon: f64, breakpoints: Vec<(f64, f64)>) -> crate::Result<Self> {
        let ok_times = breakpoints.windows(2).all(|w| w[0].0 < w[1].0)
            && breakpoints.iter().all(|&(t, v)| t > 0.0 && t <= horizon && v.is_finite());
        if !ok_times || !start.is_finite() || !slope.is_finite() || !(horizon > 0.0) {
            return Err(crate::Error::param("breakpoints must be finite with increasing times in (0, horizon]"));
        }
        Ok(Self { start, slope, horizon, breakpoints })
    }

    pub(crate) fn push_jump(&mut self, t: f64, value: f64) {
        debug_assert!(self.breakpoints.last().is_none_or(|b| b.0 <= t));
        self.breakpoints.push((t, value));
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    /// Value at `t`; beyond the last breakpoint the path keeps its slope.
    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|b| b.0 <= t);
        match idx {
            0 => self.start + self.slope * t,
            k => {
                let (tb, vb) = self.breakpoints[k - 1];
                vb + self.slope * (t - tb)
            }
        }
    }

    /// `lim_{u -> t-} value_at(u)`; equals `start` at `t = 0`.
    pub fn left_limit(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|b| b.0 < t);
        match idx {
            0 => self.start + self.slope * t,
            k => {
                let (tb, vb) = self.breakpoints[k - 1];
                vb + self.slope * (t - tb)
            }
        }
    }
}
