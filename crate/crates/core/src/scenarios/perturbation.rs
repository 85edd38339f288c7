//! Wall-localized perturbations with calibrated separation increment.
//!
//! `F(z, t) = a·m(t)·(Σ_walls B(d²/ρ²) + f·B(|z − c|²/ρ_f²))`, where `d` is
//! the distance to a wall segment, `B` is a smootherstep bump, `m(t) = 1 +
//! μ·sin 2πt`, and the far bump at `c` has `f` times the wall amplitude. The
//! amplitude `a` is bisected until `|Δ(F; 𝓛, 𝓗)|` hits the requested `δ`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::ScenarioError;
use crate::phase::{wrap_centered, FnHamiltonian, HamiltonianRef, TimeDependence};
use crate::profile::Bump;
use crate::separation::{separation, SeparationConfig};
use crate::tetragon::{RegionShape, Tetragon};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationSpec {
    /// Requested `|Δ(F; 𝓛, 𝓗)|`.
    pub delta: f64,
    pub tube_radius: f64,
    /// Far-bump amplitude relative to the wall amplitude.
    pub far_factor: f64,
    pub far_radius: f64,
    /// Far-bump center; defaults to the middle of the tetragon's quadrant
    /// (sphere) or the far side of the cylinder (circle).
    pub far_center: Option<[f64; 2]>,
    /// `μ` in `m(t) = 1 + μ·sin 2πt`; zero gives an autonomous perturbation.
    pub modulation: f64,
    /// Accepted error on the measured `δ`.
    pub delta_tol: f64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        Self {
            delta: 0.25,
            tube_radius: 0.1,
            far_factor: 10.0,
            far_radius: 0.1,
            far_center: None,
            modulation: 0.5,
            delta_tol: 1e-4,
        }
    }
}

/// Unit-amplitude shape of the perturbation on a planar chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallBump {
    pub segments: Vec<([f64; 2], [f64; 2])>,
    pub periodic_q: bool,
    pub tube_radius: f64,
    pub far_center: [f64; 2],
    pub far_radius: f64,
    pub far_factor: f64,
    pub modulation: f64,
}

/// Calibrated perturbation and its measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub shape: WallBump,
    pub amplitude: f64,
    /// Measured `|Δ(F; 𝓛, 𝓗)|`.
    pub delta: f64,
    pub iterations: usize,
}

const BUMP_INNER: f64 = 0.5;

impl WallBump {
    /// Tubes around both walls of a tetragon with one-point Legendrian.
    pub fn for_tetragon(tet: &Tetragon, spec: &PerturbationSpec) -> Result<Self, ScenarioError> {
        if tet.model.legendrian_dim() != 0 {
            return Err(ScenarioError::Config(format!(
                "wall perturbations need a planar tetragon, got {}",
                tet.model.name()
            )));
        }
        if !(spec.tube_radius > 0.0 && spec.far_radius > 0.0 && spec.far_factor >= 0.0) {
            return Err(ScenarioError::Config("perturbation radii must be positive".into()));
        }
        let mut segments = Vec::new();
        for wall in [&tet.low_wall, &tet.high_wall] {
            let RegionShape::Wall { s_lo, s_hi, .. } = wall.shape else {
                unreachable!("walls are wall-shaped")
            };
            for patch in 0..wall.patches() {
                let a = wall.point(patch, &[s_lo]);
                let b = wall.point(patch, &[s_hi]);
                segments.push(([a[0], a[1]], [b[0], b[1]]));
            }
        }
        let periodic_q = tet.model.ambient_chart().has_periodic();
        let far_center = spec.far_center.unwrap_or_else(|| {
            let mid_s = 0.5 * (tet.r0 + tet.r1);
            if periodic_q {
                [mid_s, wrap_centered(0.5 * tet.t + 0.5).rem_euclid(1.0)]
            } else {
                let r = mid_s.sqrt();
                [r * tet.t.cos(), r * tet.t.sin()]
            }
        });
        Ok(Self {
            segments,
            periodic_q,
            tube_radius: spec.tube_radius,
            far_center,
            far_radius: spec.far_radius,
            far_factor: spec.far_factor,
            modulation: spec.modulation,
        })
    }

    fn offset(&self, z: &[f64], a: &[f64; 2]) -> [f64; 2] {
        let dq = z[1] - a[1];
        [z[0] - a[0], if self.periodic_q { wrap_centered(dq) } else { dq }]
    }

    /// Spatial profile and its gradient at `z`.
    pub fn profile(&self, z: &[f64]) -> (f64, [f64; 2]) {
        let bump = Bump::new(BUMP_INNER);
        let mut v = 0.0;
        let mut g = [0.0; 2];
        let rho2 = self.tube_radius * self.tube_radius;
        for (a, b) in &self.segments {
            let d = self.offset(z, a);
            let e = [b[0] - a[0], b[1] - a[1]];
            let len2 = e[0] * e[0] + e[1] * e[1];
            let t = ((d[0] * e[0] + d[1] * e[1]) / len2).clamp(0.0, 1.0);
            let r = [d[0] - t * e[0], d[1] - t * e[1]];
            let r2 = (r[0] * r[0] + r[1] * r[1]) / rho2;
            if r2 < 1.0 {
                v += bump.value(r2);
                let k = 2.0 * bump.deriv(r2) / rho2;
                g[0] += k * r[0];
                g[1] += k * r[1];
            }
        }
        let d = self.offset(z, &self.far_center);
        let rf2 = self.far_radius * self.far_radius;
        let r2 = (d[0] * d[0] + d[1] * d[1]) / rf2;
        if r2 < 1.0 {
            v += self.far_factor * bump.value(r2);
            let k = self.far_factor * 2.0 * bump.deriv(r2) / rf2;
            g[0] += k * d[0];
            g[1] += k * d[1];
        }
        (v, g)
    }

    pub fn time_dependence(&self) -> TimeDependence {
        if self.modulation == 0.0 {
            TimeDependence::Autonomous
        } else {
            TimeDependence::Periodic
        }
    }

    /// `F = a·m(t)·profile` on the given chart.
    pub fn hamiltonian(&self, amplitude: f64, chart: crate::phase::PhaseChart) -> HamiltonianRef {
        let (w1, w2, w3) = (self.clone(), self.clone(), self.clone());
        let mu = self.modulation;
        let m = move |t: f64| 1.0 + mu * (2.0 * PI * t).sin();
        FnHamiltonian::new(
            chart,
            self.time_dependence(),
            move |z, t| amplitude * m(t) * w1.profile(z).0,
            move |z, t, g| {
                let (_, d) = w2.profile(z);
                g[0] = amplitude * m(t) * d[0];
                g[1] = amplitude * m(t) * d[1];
            },
        )
        .with_time_derivative(move |z, t| amplitude * mu * 2.0 * PI * (2.0 * PI * t).cos() * w3.profile(z).0)
        .into_ref()
    }
}

/// `|Δ(F_a; 𝓛, 𝓗)|` for amplitude `a`.
pub fn measured_delta(shape: &WallBump, amplitude: f64, tet: &Tetragon, sep: &SeparationConfig) -> f64 {
    let f = shape.hamiltonian(amplitude, tet.model.ambient_chart());
    separation(&*f, &tet.low_wall, &tet.high_wall, sep).delta.abs()
}

/// Bisects the amplitude so that the measured `|Δ(F; 𝓛, 𝓗)|` equals `spec.delta`.
pub fn calibrate(spec: &PerturbationSpec, tet: &Tetragon, sep: &SeparationConfig) -> Result<Calibration, ScenarioError> {
    if !(spec.delta > 0.0) {
        return Err(ScenarioError::Config(format!("perturbation δ must be positive, got {}", spec.delta)));
    }
    let shape = WallBump::for_tetragon(tet, spec)?;
    let mut lo = 0.0;
    let mut hi = spec.delta;
    let mut iterations = 0;
    while measured_delta(&shape, hi, tet, sep) < spec.delta {
        hi *= 2.0;
        iterations += 1;
        if iterations > 60 {
            return Err(ScenarioError::Config("perturbation cannot reach the requested δ".into()));
        }
    }
    let (mut amplitude, mut delta) = (hi, measured_delta(&shape, hi, tet, sep));
    for _ in 0..60 {
        iterations += 1;
        if (delta - spec.delta).abs() <= 0.01 * spec.delta_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let d = measured_delta(&shape, mid, tet, sep);
        if d < spec.delta {
            lo = mid;
        } else {
            hi = mid;
        }
        amplitude = mid;
        delta = d;
    }
    if (delta - spec.delta).abs() > spec.delta_tol {
        return Err(ScenarioError::Config(format!(
            "calibration stalled at δ = {delta} for target {}",
            spec.delta
        )));
    }
    Ok(Calibration {
        shape,
        amplitude,
        delta,
        iterations,
    })
}
