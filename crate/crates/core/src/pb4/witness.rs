//! The wall witness `u(s)`: a ramp in the radial coordinate whose flow moves
//! points along Reeb lines with speed `u′(s)`.
//!
//! `u` vanishes outside `(R0 + δ1, R1 + δ1)`, equals 1 at `R1`, and on
//! `[R0, R1]` is non-decreasing with `u′ ≤ (R1 − R0)⁻¹ + δ2`. The slope is
//! `m·ρ(s)` with `ρ` a smoothstep-cornered plateau, so `u` is C².

use serde::{Deserialize, Serialize};

use super::Pb4Error;
use crate::chord::{find_chord, ChordSearchConfig};
use crate::contact::ContactModel;
use crate::phase::{FnHamiltonian, HamiltonianRef, PhaseChart, TimeDependence};
use crate::profile::{smootherstep, smootherstep_deriv, smoothstep};
use crate::separation::{separation, SeparationConfig};
use crate::tetragon::build_tetragon;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallWitness {
    pub r0: f64,
    pub r1: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Plateau slope `m = 1/(R1 − R0 − δ1 − w)`.
    pub slope: f64,
    /// Corner width `w` of the slope profile.
    pub corner: f64,
}

pub fn wall_witness(r0: f64, r1: f64, delta1: f64, delta2: f64) -> Result<WallWitness, Pb4Error> {
    if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
        return Err(Pb4Error::Parameter(format!("need 0 < R0 < R1, got R0 = {r0}, R1 = {r1}")));
    }
    if !(delta1 > 0.0 && delta2 > 0.0) {
        return Err(Pb4Error::Parameter("δ1 and δ2 must be positive".into()));
    }
    let len = r1 - r0 - delta1;
    let slack = len - 1.0 / (1.0 / (r1 - r0) + delta2);
    if !(slack > 0.0) {
        return Err(Pb4Error::Parameter(format!(
            "δ1 = {delta1} leaves no room for the slope bound with δ2 = {delta2}"
        )));
    }
    let corner = (0.5 * slack).min(0.25 * len);
    Ok(WallWitness {
        r0,
        r1,
        delta1,
        delta2,
        slope: 1.0 / (len - corner),
        corner,
    })
}

/// Outcome of the witness checks on the circle-model tetragon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub t: f64,
    pub max_slope: f64,
    pub slope_bound: f64,
    pub u_at_r1: f64,
    /// Budget `T/(1 + δ2) − ε` of the chord search.
    pub budget: f64,
    pub seeds: usize,
    /// Sampling resolution on the high wall.
    pub resolution: f64,
    /// No chord from the high wall to the low wall was found within `budget`.
    pub no_chord_found: bool,
    /// Smallest distance to the low wall over all shots.
    pub best_miss: Option<f64>,
    /// `Δ(u; floor, ceiling)`.
    pub separation: f64,
}

impl WallWitness {
    fn start(&self) -> f64 {
        self.r0 + self.delta1
    }

    pub fn value(&self, s: f64) -> f64 {
        let (a, b, w, m) = (self.start(), self.r1, self.corner, self.slope);
        let ramp = |x: f64| x * x * x - 0.5 * x * x * x * x;
        if s <= a || s >= self.r1 + self.delta1 {
            0.0
        } else if s <= a + w {
            m * w * ramp((s - a) / w)
        } else if s <= b - w {
            m * (0.5 * w + (s - a - w))
        } else if s <= b {
            1.0 - m * w * ramp((b - s) / w)
        } else {
            1.0 - smootherstep((s - b) / self.delta1)
        }
    }

    pub fn deriv(&self, s: f64) -> f64 {
        let (a, b, w, m) = (self.start(), self.r1, self.corner, self.slope);
        if s <= a || s >= self.r1 + self.delta1 {
            0.0
        } else if s <= b {
            m * smoothstep(((s - a) / w).min((b - s) / w))
        } else {
            -smootherstep_deriv((s - b) / self.delta1) / self.delta1
        }
    }

    /// `u∘s` on the cylinder `(s, u)`, `u` periodic.
    pub fn hamiltonian(&self) -> HamiltonianRef {
        let (w1, w2) = (*self, *self);
        FnHamiltonian::new(
            PhaseChart::cotangent_torus(1).expect("one pair"),
            TimeDependence::Autonomous,
            move |x, _| w1.value(x[0]),
            move |x, _, g| {
                g[0] = w2.deriv(x[0]);
                g[1] = 0.0;
            },
        )
        .into_ref()
    }

    /// Runs the no-chord and separation checks on the circle tetragon with
    /// wall length `t`, sampling the high wall at resolution `h`.
    pub fn check(&self, t: f64, h: f64, eps: f64) -> Result<WitnessCheck, Pb4Error> {
        let tet = build_tetragon(ContactModel::Circle, self.r0, self.r1, t)
            .map_err(|e| Pb4Error::Parameter(e.to_string()))?;
        let budget = t / (1.0 + self.delta2) - eps;
        let seeds = ((self.r1 - self.r0) / h).round() as usize + 1;
        let cfg = ChordSearchConfig {
            seeds,
            ..ChordSearchConfig::default()
        };
        let ham = self.hamiltonian();
        let report = find_chord(&*ham, &tet.high_wall, &tet.low_wall, budget, &cfg)
            .map_err(|e| Pb4Error::Parameter(e.to_string()))?;
        let best_miss = match &report.outcome {
            crate::chord::ChordOutcome::NotFound { best } => best.as_ref().map(|m| m.distance),
            crate::chord::ChordOutcome::Found(_) => None,
        };
        let sep = separation(&*ham, &tet.floor, &tet.ceiling, &SeparationConfig::default());
        let n = 20_001;
        let max_slope = (0..n)
            .map(|i| self.deriv(self.r0 + (self.r1 - self.r0) * i as f64 / (n - 1) as f64))
            .fold(0.0, f64::max);
        Ok(WitnessCheck {
            t,
            max_slope,
            slope_bound: 1.0 / (self.r1 - self.r0) + self.delta2,
            u_at_r1: self.value(self.r1),
            budget,
            seeds: report.seeds,
            resolution: h,
            no_chord_found: report.chord().is_none(),
            best_miss,
            separation: sep.delta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig};

    #[test]
    fn bullet_conditions() {
        let w = wall_witness(1.0, 2.0, 0.005, 0.01).unwrap();
        assert_eq!(w.value(2.0), 1.0);
        assert!(w.slope <= 1.01);
        let mut prev = 0.0;
        for i in 0..=10_000 {
            let s = 0.9 + 1.3 * i as f64 / 10_000.0;
            let u = w.value(s);
            if s <= 1.005 || s >= 2.005 {
                assert_eq!(u, 0.0, "s = {s}");
            }
            if s <= 2.0 {
                assert!(u >= prev - 1e-15);
                assert!(w.deriv(s) <= 1.01);
            }
            prev = u;
        }
    }

    #[test]
    fn derivative_matches_value() {
        let w = wall_witness(1.0, 2.0, 0.05, 0.2).unwrap();
        for i in 1..400 {
            let s = 1.0 + 1.1 * i as f64 / 400.0;
            let h = 1e-6;
            let fd = (w.value(s + h) - w.value(s - h)) / (2.0 * h);
            assert!((fd - w.deriv(s)).abs() < 1e-5, "s = {s}: {fd} vs {}", w.deriv(s));
        }
    }

    #[test]
    fn large_deltas_are_rejected() {
        assert!(matches!(wall_witness(1.0, 2.0, 0.5, 0.01), Err(Pb4Error::Parameter(_))));
        assert!(wall_witness(2.0, 1.0, 0.01, 0.01).is_err());
    }

    #[test]
    fn flow_advances_reeb_time_at_speed_u_prime() {
        let w = wall_witness(1.0, 2.0, 0.005, 0.01).unwrap();
        let ham = w.hamiltonian();
        for s in [1.2, 1.5, 1.99] {
            let tau = 0.2;
            let tr = integrate(&*ham, &[s, 0.0], 0.0, tau, IntegratorConfig::with_tol(1e-12)).unwrap();
            let (_, end) = tr.last();
            assert_eq!(end[0], s);
            assert!((end[1] - w.deriv(s) * tau).abs() < 1e-12);
            assert!(end[1] <= tau * 1.01);
        }
    }
}
