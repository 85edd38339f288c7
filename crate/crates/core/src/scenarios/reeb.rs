//! Reeb chords of a rescaled contact form.
//!
//! The factor `f > 0` on `Σ` is the Reeb speed: the form is `λ0/f` and its
//! Reeb flow is the flow of the contact Hamiltonian `K = s·f` on the
//! level `s = 1` of the symplectization. A chord from `L` to `ψ_T(L)` then
//! has time at most `T/C`, `C = min f` over the swept region.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::{ScenarioError, ScenarioReport, TIME_SLACK};
use crate::chord::{find_chord, ChordSearchConfig};
use crate::contact::ContactModel;
use crate::phase::{FnHamiltonian, HamiltonianRef, TimeDependence};
use crate::separation::{region_extremum, SeparationConfig};
use crate::tetragon::{build_tetragon, Region, RegionShape, Tetragon};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReebFactor {
    Constant { c: f64 },
    /// `base + amp·sin θ`, with `θ = arg z1` on the sphere and `2πq1` on
    /// the circle and torus.
    SinAngle { base: f64, amp: f64 },
}

impl ReebFactor {
    pub fn global_min(&self) -> f64 {
        match *self {
            ReebFactor::Constant { c } => c,
            ReebFactor::SinAngle { base, amp } => base - amp.abs(),
        }
    }

    /// `f(θ)` as a function of the angle.
    pub fn of_angle(&self, theta: f64) -> f64 {
        match *self {
            ReebFactor::Constant { c } => c,
            ReebFactor::SinAngle { base, amp } => base + amp * theta.sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReebConfig {
    pub model: ContactModel,
    pub t: f64,
    pub factor: ReebFactor,
    /// `s`-range of the thickened target `ψ_T(L) × [s_lo, s_hi]`.
    pub target_s: [f64; 2],
    pub search: ChordSearchConfig,
    pub separation: SeparationConfig,
}

impl Default for ReebConfig {
    fn default() -> Self {
        Self {
            model: ContactModel::ContactSphere { k: 1 },
            t: FRAC_PI_4,
            factor: ReebFactor::SinAngle { base: 1.5, amp: 0.3 },
            target_s: [0.01, 100.0],
            search: ChordSearchConfig::default(),
            separation: SeparationConfig::default(),
        }
    }
}

/// The angle `θ` of `f(θ)` and its gradient on the ambient chart.
fn angle(model: ContactModel, x: &[f64], g: Option<&mut [f64]>) -> f64 {
    match model {
        ContactModel::ContactSphere { .. } => {
            let (p, q) = (x[0], x[model.k()]);
            if let Some(g) = g {
                let r2 = p * p + q * q;
                g.fill(0.0);
                g[0] = -q / r2;
                g[model.k()] = p / r2;
            }
            q.atan2(p)
        }
        _ => {
            let k = model.k();
            if let Some(g) = g {
                g.fill(0.0);
                g[k] = 2.0 * PI;
            }
            2.0 * PI * x[k]
        }
    }
}

/// `f` as a degree-zero function on the ambient chart.
pub fn factor_function(model: ContactModel, factor: ReebFactor) -> HamiltonianRef {
    FnHamiltonian::new(
        model.ambient_chart(),
        TimeDependence::Autonomous,
        move |x, _| factor.of_angle(angle(model, x, None)),
        move |x, _, g| match factor {
            ReebFactor::Constant { .. } => g.fill(0.0),
            ReebFactor::SinAngle { amp, .. } => {
                let th = angle(model, x, Some(&mut *g));
                let d = amp * th.cos();
                g.iter_mut().for_each(|v| *v *= d);
            }
        },
    )
    .into_ref()
}

/// The contact Hamiltonian `K = s·f`.
pub fn contact_hamiltonian(model: ContactModel, factor: ReebFactor) -> HamiltonianRef {
    let f1 = factor_function(model, factor);
    let f2 = f1.clone();
    FnHamiltonian::new(
        model.ambient_chart(),
        TimeDependence::Autonomous,
        move |x, t| model.s_value(x) * f1.value(x, t),
        move |x, t, g| {
            let mut ds = vec![0.0; g.len()];
            model.s_gradient(x, &mut ds);
            f2.gradient(x, t, g);
            let (s, f) = (model.s_value(x), f2.value(x, t));
            for (gi, di) in g.iter_mut().zip(&ds) {
                *gi = f * di + s * *gi;
            }
        },
    )
    .into_ref()
}

/// Closed-form or quadrature chord time for the one-dimensional cases.
fn analytic_time(cfg: &ReebConfig) -> Option<f64> {
    let quad = |a: f64, b: f64, w: f64| -> f64 {
        let n = 4000;
        let h = (b - a) / n as f64;
        let v = |i: usize| w / cfg.factor.of_angle(a + h * i as f64);
        let mut sum = v(0) + v(n);
        for i in 1..n {
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * v(i);
        }
        sum * h / 3.0
    };
    match (cfg.factor, cfg.model) {
        (ReebFactor::Constant { c }, _) => Some(cfg.t / c),
        // u advances at speed f(2πu).
        (_, ContactModel::Circle) => Some(quad(0.0, 2.0 * PI * cfg.t, 1.0 / (2.0 * PI))),
        // arg z advances at speed 2f, from either point of L.
        (_, ContactModel::ContactSphere { k: 1 }) => {
            Some(quad(0.0, 2.0 * cfg.t, 0.5).min(quad(PI, PI + 2.0 * cfg.t, 0.5)))
        }
        _ => None,
    }
}

pub(super) fn setup(cfg: &ReebConfig) -> Result<Tetragon, ScenarioError> {
    let model = cfg.model;
    if matches!(cfg.factor, ReebFactor::SinAngle { .. }) && matches!(model, ContactModel::ContactSphere { k } if k > 1) {
        return Err(ScenarioError::Config(
            "reeb_chord: sin(arg z1) is singular on the sphere for k > 1".into(),
        ));
    }
    if !(cfg.factor.global_min() > 0.0) {
        return Err(ScenarioError::Config(format!(
            "reeb_chord: f must be positive on Σ, min f = {}",
            cfg.factor.global_min()
        )));
    }
    let [s_lo, s_hi] = cfg.target_s;
    if !(s_lo > 0.0 && s_lo <= 1.0 && s_hi >= 1.0) {
        return Err(ScenarioError::Config(format!(
            "reeb_chord: target s-range [{s_lo}, {s_hi}] must contain 1"
        )));
    }
    Ok(build_tetragon(model, 1.0, 2.0, cfg.t)?)
}

pub fn run_reeb_chord(cfg: &ReebConfig) -> Result<ScenarioReport, ScenarioError> {
    let tet = setup(cfg)?;
    let model = tet.model;
    let [s_lo, s_hi] = cfg.target_s;
    let from = tet.reeb_target(0.0, 1.0, 1.0);
    let to = tet.reeb_target(cfg.t, s_lo, s_hi);
    let f = factor_function(model, cfg.factor);
    let swept = Region::new("swept", model, RegionShape::Sweep { s: 1.0, t_max: cfg.t });
    let (c_min, _) = region_extremum(&*f, &swept, 1.0, &cfg.separation);
    let c = c_min.value;
    let budget = cfg.t / c;
    let k_ham = contact_hamiltonian(model, cfg.factor);
    let search = find_chord(&*k_ham, &from, &to, budget, &cfg.search)?;
    let mut extras = BTreeMap::new();
    extras.insert("c_swept".into(), c);
    extras.insert("c_global".into(), cfg.factor.global_min());
    extras.insert("budget_global".into(), cfg.t / cfg.factor.global_min());
    let chord = search.chord();
    let mut report = ScenarioReport {
        scenario: "reeb_chord".into(),
        model,
        r0: 1.0,
        r1: 1.0,
        t: cfg.t,
        kappa: cfg.t,
        gamma: c,
        delta: 0.0,
        delta_total: None,
        budget,
        found: chord.is_some(),
        time_length: chord.map(|c| c.time_length),
        analytic_time: analytic_time(cfg),
        increment: None,
        expected_increment: None,
        increment_tol: 2.0 * cfg.search.tol,
        time_slack: TIME_SLACK,
        conditions_hold: c > 0.0,
        pass: false,
        extras,
        perturbation: None,
        search,
    };
    report.pass = report.verdict();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::check_gradient;

    #[test]
    fn contact_hamiltonian_gradient() {
        for model in [ContactModel::Circle, ContactModel::ContactSphere { k: 1 }] {
            let k = contact_hamiltonian(model, ReebFactor::SinAngle { base: 1.5, amp: 0.3 });
            let c = check_gradient(&*k, &[0.9, 0.3], 0.0);
            assert!(c.passes(1e-6), "{model:?}: {c:?}");
        }
    }

    #[test]
    fn non_positive_factor_is_rejected() {
        let cfg = ReebConfig {
            factor: ReebFactor::SinAngle { base: 0.2, amp: 0.3 },
            ..ReebConfig::default()
        };
        assert!(matches!(run_reeb_chord(&cfg), Err(ScenarioError::Config(_))));
    }
}
