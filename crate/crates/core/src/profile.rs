//! Smooth one-dimensional profiles used by bumps, ramps and witnesses.

/// Cubic smoothstep on `[0, 1]`, clamped outside. C¹.
pub fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

pub fn smoothstep_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        6.0 * x * (1.0 - x)
    }
}

/// Quintic smootherstep on `[0, 1]`, clamped outside. C².
pub fn smootherstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

pub fn smootherstep_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        30.0 * x * x * (1.0 - x) * (1.0 - x)
    }
}

/// `1` on `r² ≤ inner²`, `0` on `r² ≥ 1`, smootherstep in between.
/// Takes the squared radius so callers stay smooth at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub inner: f64,
}

impl Bump {
    pub fn new(inner: f64) -> Self {
        assert!((0.0..1.0).contains(&inner));
        Self { inner }
    }

    pub fn value(&self, r2: f64) -> f64 {
        let a = self.inner * self.inner;
        1.0 - smootherstep((r2 - a) / (1.0 - a))
    }

    /// Derivative with respect to `r2`.
    pub fn deriv(&self, r2: f64) -> f64 {
        let a = self.inner * self.inner;
        -smootherstep_deriv((r2 - a) / (1.0 - a)) / (1.0 - a)
    }
}
