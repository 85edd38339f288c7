//! A smooth feasible pair for the circle-model tetragon.
//!
//! On the cylinder `(s, u)`: `F = f(s)` ramps from 0 on the floor to 1 on
//! the ceiling and `G = g(u)·χ(s)` falls from 1 on the high wall to 0 on the
//! low wall. Inside the rectangle `{F, G} = −f′(s)·g′(u) > 0` and the
//! chords of `G` run straight from floor to ceiling.

use crate::phase::{wrap_centered, FnHamiltonian, HamiltonianRef, PhaseChart, TimeDependence};
use crate::profile::{smootherstep, smootherstep_deriv};

#[derive(Clone)]
pub struct PrototypePair {
    pub r0: f64,
    pub r1: f64,
    pub t: f64,
    pub f: HamiltonianRef,
    pub g: HamiltonianRef,
}

impl std::fmt::Debug for PrototypePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrototypePair")
            .field("r0", &self.r0)
            .field("r1", &self.r1)
            .field("t", &self.t)
            .finish()
    }
}

/// `(value, derivative)` of a rising ramp from `a` to `a + w`.
fn up(x: f64, a: f64, w: f64) -> (f64, f64) {
    let y = (x - a) / w;
    (smootherstep(y), smootherstep_deriv(y) / w)
}

impl PrototypePair {
    pub fn new(r0: f64, r1: f64, t: f64) -> Self {
        assert!(r0 > 0.0 && r1 > r0 && t > 0.0 && t < 1.0);
        let e = 0.1 * (r1 - r0);
        let back = (0.5 * (1.0 - t)).min(0.25);
        let f_prof = move |s: f64| -> (f64, f64) {
            if s <= r1 + 2.0 * e {
                up(s, r0, r1 - r0)
            } else {
                let (v, d) = up(s, r1 + 2.0 * e, e);
                (1.0 - v, -d)
            }
        };
        let chi = move |s: f64| -> (f64, f64) {
            if s <= r0 {
                up(s, r0 - 2.0 * e, e)
            } else {
                let (v, d) = up(s, r1 + e, e);
                (1.0 - v, -d)
            }
        };
        let g_prof = move |u: f64| -> (f64, f64) {
            let w = wrap_centered(u);
            if w >= 0.0 {
                let (v, d) = up(w, 0.0, t);
                (1.0 - v, -d)
            } else {
                up(w, -back, back)
            }
        };
        let chart = PhaseChart::cotangent_torus(1).expect("one pair");
        let f = FnHamiltonian::new(
            chart.clone(),
            TimeDependence::Autonomous,
            move |x, _| f_prof(x[0]).0,
            move |x, _, g| {
                g[0] = f_prof(x[0]).1;
                g[1] = 0.0;
            },
        )
        .into_ref();
        let g = FnHamiltonian::new(
            chart,
            TimeDependence::Autonomous,
            move |x, _| g_prof(x[1]).0 * chi(x[0]).0,
            move |x, _, out| {
                let (gv, gd) = g_prof(x[1]);
                let (cv, cd) = chi(x[0]);
                out[0] = gv * cd;
                out[1] = gd * cv;
            },
        )
        .into_ref();
        Self { r0, r1, t, f, g }
    }

    /// Shortest floor-to-ceiling chord of `G`, along `u = T/2`.
    pub fn shortest_chord_time(&self) -> f64 {
        (self.r1 - self.r0) * self.t / 1.875
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::check_gradient;
    use crate::phase::poisson_bracket;

    #[test]
    fn constraints_and_gradients() {
        let p = PrototypePair::new(1.0, 2.0, 0.25);
        for i in 0..=50 {
            let u = 0.25 * i as f64 / 50.0;
            assert!(p.f.value(&[1.0, u], 0.0) <= 0.0);
            assert!(p.f.value(&[2.0, u], 0.0) >= 1.0);
            let s = 1.0 + i as f64 / 50.0;
            assert!(p.g.value(&[s, 0.0], 0.0) >= 1.0);
            assert!(p.g.value(&[s, 0.25], 0.0) <= 0.0);
        }
        for x in [[1.3, 0.1], [2.25, 0.9], [0.85, 0.6], [2.15, 0.05]] {
            assert!(check_gradient(&*p.f, &x, 0.0).passes(1e-6));
            assert!(check_gradient(&*p.g, &x, 0.0).passes(1e-6));
        }
        let b = poisson_bracket(&*p.f, &*p.g, &[1.5, 0.125], 0.0).unwrap();
        assert!((b - 1.875 * 1.875 / 0.25).abs() < 1e-9);
        // Compact support in s.
        assert_eq!(p.f.value(&[2.5, 0.1], 0.0), 0.0);
        assert_eq!(p.g.value(&[0.7, 0.0], 0.0), 0.0);
    }
}
