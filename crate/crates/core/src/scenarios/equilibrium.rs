//! Hamiltonians on `ℂ^k` near the origin: the hyperbolic equilibrium
//! `H = (|p|² − |q|²)/2` and mechanical systems `|p|²/2 + U(q, t)`.
//!
//! Both run on the contact-sphere tetragon with `T = π/4`, where the high
//! wall lies in `q = 0` and the low wall in `p = 0`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::perturbation::{calibrate, PerturbationSpec};
use super::{check_k, full_norm, search_for, ChordRun, ScenarioError, ScenarioReport};
use crate::chord::ChordSearchConfig;
use crate::contact::ContactModel;
use crate::phase::{FnHamiltonian, HamiltonianRef, Sum, TimeDependence};
use crate::profile::{smootherstep, smootherstep_deriv};
use crate::separation::{separation, SeparationConfig};
use crate::tetragon::{build_tetragon, Tetragon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquilibriumConfig {
    pub k: usize,
    pub r0: f64,
    pub r1: f64,
    pub perturbation: Option<PerturbationSpec>,
    pub search: ChordSearchConfig,
    pub separation: SeparationConfig,
}

impl Default for EquilibriumConfig {
    fn default() -> Self {
        Self {
            k: 1,
            r0: 1.0,
            r1: 2.0,
            perturbation: None,
            search: ChordSearchConfig::default(),
            separation: SeparationConfig::default(),
        }
    }
}

/// `H = (|p|² − |q|²)/2` on `ℂ^k`.
pub fn hyperbolic(k: usize) -> HamiltonianRef {
    let model = ContactModel::ContactSphere { k };
    FnHamiltonian::new(
        model.ambient_chart(),
        TimeDependence::Autonomous,
        move |x, _| 0.5 * (x[..k].iter().map(|v| v * v).sum::<f64>() - x[k..].iter().map(|v| v * v).sum::<f64>()),
        move |x, _, g| {
            for i in 0..k {
                g[i] = x[i];
                g[k + i] = -x[k + i];
            }
        },
    )
    .into_ref()
}

pub(super) fn setup_equilibrium(cfg: &EquilibriumConfig) -> Result<Tetragon, ScenarioError> {
    check_k(cfg.k, "unstable_equilibrium")?;
    if cfg.perturbation.is_some() && cfg.k != 1 {
        return Err(ScenarioError::Config("perturbations are only supported for k = 1".into()));
    }
    Ok(build_tetragon(ContactModel::ContactSphere { k: cfg.k }, cfg.r0, cfg.r1, FRAC_PI_4)?)
}

pub fn run_unstable_equilibrium(cfg: &EquilibriumConfig) -> Result<ScenarioReport, ScenarioError> {
    let tet = setup_equilibrium(cfg)?;
    let model = tet.model;
    let h = hyperbolic(cfg.k);
    let gamma = separation(&*h, &tet.low_wall, &tet.high_wall, &cfg.separation).delta;
    let (ham, perturbation) = match &cfg.perturbation {
        None => (h, None),
        Some(spec) => {
            if spec.delta >= gamma {
                return Err(ScenarioError::NonSeparating { delta: spec.delta, gamma });
            }
            let cal = calibrate(spec, &tet, &cfg.separation)?;
            let f = cal.shape.hamiltonian(cal.amplitude, model.ambient_chart());
            let g: HamiltonianRef = Arc::new(Sum::new(vec![h, f]));
            let total = separation(&*g, &tet.low_wall, &tet.high_wall, &cfg.separation).delta;
            (g, Some((cal, total)))
        }
    };
    let analytic_time = perturbation.is_none().then(|| 0.5 * (cfg.r1 / cfg.r0).ln());
    ChordRun {
        scenario: "unstable_equilibrium",
        model,
        r: (cfg.r0, cfg.r1, FRAC_PI_4),
        kappa: tet.rectangle_area(),
        gamma,
        perturbation,
        ham: &*ham,
        from: &tet.floor,
        to: &tet.ceiling,
        search: search_for(cfg.search, cfg.r1),
        analytic_time,
        increment: Some((full_norm, cfg.r1.sqrt() - cfg.r0.sqrt())),
        conditions_hold: gamma > 0.0,
        extras: BTreeMap::new(),
    }
    .run()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MechanicalPotential {
    /// `U ≡ 0`, the free particle.
    Zero,
    /// `U = −depth·σ(|q|²)·(1 + modulation·sin 2πt)`, where `σ` rises from 0
    /// at `|q|² = R0/2` to 1 at `|q|² = R0`.
    Well { depth: f64, modulation: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MechanicalConfig {
    pub k: usize,
    pub r0: f64,
    pub r1: f64,
    /// Declared bound `U ≤ −β` on the shell `R0 ≤ |q|² ≤ R1`.
    pub beta: f64,
    pub potential: MechanicalPotential,
    /// Samples per axis for the shell check.
    pub shell_samples: usize,
    pub search: ChordSearchConfig,
    pub separation: SeparationConfig,
}

impl Default for MechanicalConfig {
    fn default() -> Self {
        Self {
            k: 1,
            r0: 1.0,
            r1: 2.0,
            beta: 0.5,
            potential: MechanicalPotential::Well {
                depth: 1.0,
                modulation: 0.5,
            },
            shell_samples: 64,
            search: ChordSearchConfig::default(),
            separation: SeparationConfig::default(),
        }
    }
}

impl MechanicalPotential {
    fn time_dependence(&self) -> TimeDependence {
        match self {
            MechanicalPotential::Well { modulation, .. } if *modulation != 0.0 => TimeDependence::Periodic,
            _ => TimeDependence::Autonomous,
        }
    }

    /// `U(q, t)` and its `q`-gradient factor `∂U/∂(|q|²)`.
    fn eval(&self, q2: f64, t: f64, r0: f64) -> (f64, f64) {
        match *self {
            MechanicalPotential::Zero => (0.0, 0.0),
            MechanicalPotential::Well { depth, modulation } => {
                let half = 0.5 * r0;
                let x = (q2 - half) / half;
                let m = -depth * (1.0 + modulation * (2.0 * PI * t).sin());
                (m * smootherstep(x), m * smootherstep_deriv(x) / half)
            }
        }
    }

    fn dt(&self, q2: f64, t: f64, r0: f64) -> f64 {
        match *self {
            MechanicalPotential::Zero => 0.0,
            MechanicalPotential::Well { depth, modulation } => {
                let half = 0.5 * r0;
                -depth * modulation * 2.0 * PI * (2.0 * PI * t).cos() * smootherstep((q2 - half) / half)
            }
        }
    }
}

/// `G = |p|²/2 + U(q, t)` on `ℂ^k`.
pub fn mechanical(k: usize, r0: f64, potential: MechanicalPotential) -> HamiltonianRef {
    let model = ContactModel::ContactSphere { k };
    let q2 = move |x: &[f64]| x[k..].iter().map(|v| v * v).sum::<f64>();
    FnHamiltonian::new(
        model.ambient_chart(),
        potential.time_dependence(),
        move |x, t| 0.5 * x[..k].iter().map(|v| v * v).sum::<f64>() + potential.eval(q2(x), t, r0).0,
        move |x, t, g| {
            let (_, du) = potential.eval(q2(x), t, r0);
            for i in 0..k {
                g[i] = x[i];
                g[k + i] = 2.0 * du * x[k + i];
            }
        },
    )
    .with_time_derivative(move |x, t| potential.dt(q2(x), t, r0))
    .into_ref()
}

/// Largest sampled `U` on the shell `R0 ≤ |q|² ≤ R1` over one period, and at `q = 0`.
fn shell_max(cfg: &MechanicalConfig) -> (f64, f64) {
    let n = cfg.shell_samples.max(2);
    let mut shell = f64::NEG_INFINITY;
    let mut origin = 0.0f64;
    for j in 0..n {
        let t = j as f64 / n as f64;
        origin = origin.max(cfg.potential.eval(0.0, t, cfg.r0).0.abs());
        for i in 0..n {
            let q2 = cfg.r0 + (cfg.r1 - cfg.r0) * i as f64 / (n - 1) as f64;
            shell = shell.max(cfg.potential.eval(q2, t, cfg.r0).0);
        }
    }
    (shell, origin)
}

pub(super) fn setup_mechanical(cfg: &MechanicalConfig) -> Result<(Tetragon, f64), ScenarioError> {
    check_k(cfg.k, "mechanical")?;
    if !(cfg.beta >= 0.0) {
        return Err(ScenarioError::Config(format!("mechanical: β must be non-negative, got {}", cfg.beta)));
    }
    let (shell, origin) = shell_max(cfg);
    if origin != 0.0 {
        return Err(ScenarioError::Config("mechanical: U(0, t) must vanish".into()));
    }
    if shell > -cfg.beta {
        return Err(ScenarioError::Config(format!(
            "mechanical: sampled max of U on the shell is {shell}, above −β = {}",
            -cfg.beta
        )));
    }
    let tet = build_tetragon(ContactModel::ContactSphere { k: cfg.k }, cfg.r0, cfg.r1, FRAC_PI_4)?;
    Ok((tet, shell))
}

pub fn run_mechanical(cfg: &MechanicalConfig) -> Result<ScenarioReport, ScenarioError> {
    let (tet, shell) = setup_mechanical(cfg)?;
    let model = tet.model;
    let g = mechanical(cfg.k, cfg.r0, cfg.potential);
    let measured = separation(&*g, &tet.low_wall, &tet.high_wall, &cfg.separation).delta;
    let declared = 0.5 * cfg.r0 + cfg.beta;
    let mut extras = BTreeMap::new();
    extras.insert("delta_measured".into(), measured);
    extras.insert("delta_declared".into(), declared);
    extras.insert("shell_max".into(), shell);
    let tol = cfg.separation.refine_tol.max(1e-9);
    ChordRun {
        scenario: "mechanical",
        model,
        r: (cfg.r0, cfg.r1, FRAC_PI_4),
        kappa: tet.rectangle_area(),
        gamma: declared,
        perturbation: None,
        ham: &*g,
        from: &tet.floor,
        to: &tet.ceiling,
        search: search_for(cfg.search, cfg.r1),
        analytic_time: None,
        increment: Some((full_norm, cfg.r1.sqrt() - cfg.r0.sqrt())),
        conditions_hold: measured >= declared - tol,
        extras,
    }
    .run()
}
