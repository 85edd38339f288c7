//! Finite-difference oracles for gradients and brackets.
//!
//! These are validators: production code always uses analytic gradients.

use crate::phase::{bracket_from_gradients, Hamiltonian};

/// Step used for coordinate `x`: `1e-6·(1 + |x|)`.
pub fn step(x: f64) -> f64 {
    1e-6 * (1.0 + x.abs())
}

/// Centered-difference gradient of `f` at `x`.
pub fn gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = step(x[i]);
            y[i] = x[i] + h;
            let fp = f(&y);
            y[i] = x[i] - h;
            let fm = f(&y);
            y[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Outcome of comparing an analytic gradient with centered differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub worst_index: usize,
}

impl GradientCheck {
    pub fn passes(&self, rel_tol: f64) -> bool {
        self.max_rel_error <= rel_tol
    }
}

/// Relative error is `|a − d| / max(1, |a|, |d|)` per component.
pub fn check_gradient(h: &dyn Hamiltonian, x: &[f64], t: f64) -> GradientCheck {
    let mut analytic = vec![0.0; x.len()];
    h.gradient(x, t, &mut analytic);
    let numeric = gradient(|y| h.value(y, t), x);
    let mut out = GradientCheck {
        max_abs_error: 0.0,
        max_rel_error: 0.0,
        worst_index: 0,
    };
    for (i, (a, d)) in analytic.iter().zip(&numeric).enumerate() {
        let abs = (a - d).abs();
        let rel = abs / a.abs().max(d.abs()).max(1.0);
        out.max_abs_error = out.max_abs_error.max(abs);
        if rel > out.max_rel_error {
            out.max_rel_error = rel;
            out.worst_index = i;
        }
    }
    out
}

/// `{F, G}` with both gradients taken by centered differences.
pub fn bracket(f: impl Fn(&[f64]) -> f64, g: impl Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    bracket_from_gradients(&gradient(f, x), &gradient(g, x))
}

/// `{F, G}` with `F` differenced numerically and `G` analytic.
pub fn bracket_outer(f: impl Fn(&[f64]) -> f64, g: &dyn Hamiltonian, x: &[f64], t: f64) -> f64 {
    let mut dg = vec![0.0; x.len()];
    g.gradient(x, t, &mut dg);
    bracket_from_gradients(&gradient(f, x), &dg)
}
