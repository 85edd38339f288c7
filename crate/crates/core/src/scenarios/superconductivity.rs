//! Superconductivity channel for `H = U(q)` on `T*𝕋^k` (the torus
//! stabilization factor is fixed to `m = 0`).
//!
//! With `p′ = 0` the flow keeps `q` fixed and moves `p(t) = p(0) − ∇U(q)·t`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::perturbation::{calibrate, PerturbationSpec};
use super::{check_k, momentum_norm, search_for, ChordRun, ScenarioError, ScenarioReport};
use crate::chord::ChordSearchConfig;
use crate::contact::ContactModel;
use crate::phase::{FnHamiltonian, HamiltonianRef, Sum, TimeDependence};
use crate::separation::{separation, SeparationConfig};
use crate::tetragon::{build_tetragon, Tetragon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuperconductivityConfig {
    pub k: usize,
    /// Torus stabilization factor; only `0` is run.
    pub m: usize,
    /// Wall length `T = r < 1/2`.
    pub r: f64,
    pub r0: f64,
    pub r1: f64,
    /// Constant added to `U = Π cos 2πq_i`.
    pub potential_shift: f64,
    pub perturbation: Option<PerturbationSpec>,
    pub search: ChordSearchConfig,
    pub separation: SeparationConfig,
}

impl Default for SuperconductivityConfig {
    fn default() -> Self {
        Self {
            k: 1,
            m: 0,
            r: 0.25,
            r0: 1.0,
            r1: 2.0,
            potential_shift: 0.0,
            perturbation: None,
            search: ChordSearchConfig::default(),
            separation: SeparationConfig::default(),
        }
    }
}

/// `U(q) = Π cos 2πq_i + shift` on `T*𝕋^k`.
pub fn cosine_potential(model: ContactModel, shift: f64) -> HamiltonianRef {
    let k = model.k();
    FnHamiltonian::new(
        model.ambient_chart(),
        TimeDependence::Autonomous,
        move |x, _| (0..k).map(|i| (2.0 * PI * x[k + i]).cos()).product::<f64>() + shift,
        move |x, _, g| {
            g.fill(0.0);
            for i in 0..k {
                let mut d = -2.0 * PI * (2.0 * PI * x[k + i]).sin();
                for j in (0..k).filter(|&j| j != i) {
                    d *= (2.0 * PI * x[k + j]).cos();
                }
                g[k + i] = d;
            }
        },
    )
    .into_ref()
}

pub(super) fn setup(cfg: &SuperconductivityConfig) -> Result<Tetragon, ScenarioError> {
    check_k(cfg.k, "superconductivity")?;
    if cfg.m != 0 {
        return Err(ScenarioError::Config(format!(
            "superconductivity: m = {} requested; torus stabilization is fixed to m = 0",
            cfg.m
        )));
    }
    if !(cfg.r > 0.0 && cfg.r < 0.5) {
        return Err(ScenarioError::Config(format!("superconductivity: need 0 < r < 1/2, got r = {}", cfg.r)));
    }
    let model = if cfg.k == 1 {
        ContactModel::Circle
    } else {
        ContactModel::UnitCotangentTorus { k: cfg.k }
    };
    Ok(build_tetragon(model, cfg.r0, cfg.r1, cfg.r)?)
}

pub fn run_superconductivity(cfg: &SuperconductivityConfig) -> Result<ScenarioReport, ScenarioError> {
    let tet = setup(cfg)?;
    let model = tet.model;
    let h = cosine_potential(model, cfg.potential_shift);
    let sep = separation(&*h, &tet.low_wall, &tet.high_wall, &cfg.separation);
    let gamma = sep.delta;
    let mut extras = BTreeMap::new();
    extras.insert("beta".into(), sep.min_on_y1.value - cfg.potential_shift);
    extras.insert("alpha".into(), sep.max_on_y0.value - cfg.potential_shift);

    let (ham, perturbation) = match &cfg.perturbation {
        None => (h, None),
        Some(spec) => {
            let cal = calibrate(spec, &tet, &cfg.separation)?;
            if cal.delta >= gamma {
                return Err(ScenarioError::NonSeparating { delta: cal.delta, gamma });
            }
            let f = cal.shape.hamiltonian(cal.amplitude, model.ambient_chart());
            let g: HamiltonianRef = std::sync::Arc::new(Sum::new(vec![h, f]));
            let total = separation(&*g, &tet.low_wall, &tet.high_wall, &cfg.separation).delta;
            (g, Some((cal, total)))
        }
    };
    let analytic_time = (cfg.k == 1 && perturbation.is_none())
        .then(|| (cfg.r1 - cfg.r0) / (2.0 * PI * (2.0 * PI * cfg.r.min(0.25)).sin()));
    let conditions_hold = gamma > 0.0
        && perturbation
            .as_ref()
            .is_none_or(|(c, total)| *total >= gamma - c.delta - cfg.separation.refine_tol.max(1e-9));
    ChordRun {
        scenario: "superconductivity",
        model,
        r: (cfg.r0, cfg.r1, cfg.r),
        kappa: tet.rectangle_area(),
        gamma,
        perturbation,
        ham: &*ham,
        from: &tet.floor,
        to: &tet.ceiling,
        search: search_for(cfg.search, cfg.r1),
        analytic_time,
        increment: Some((momentum_norm, cfg.r1 - cfg.r0)),
        conditions_hold,
        extras,
    }
    .run()
}
