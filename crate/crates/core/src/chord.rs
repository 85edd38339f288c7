//! Chord search from `X0` to `X1` under a time budget, and budget arithmetic.
//!
//! A sweep starts one integration per seed (region grid point × start phase),
//! detects crossings of the target's enclosing hypersurface, and accepts a
//! crossing when it lies within `tol` of the target. Near misses are refined
//! by compass search over the seed parameters. Among certified chords the
//! shortest is kept (ties broken by seed order) and then polished, again by
//! compass search, towards a locally minimal time-length.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrate::{integrate_dense, IntegrateError, IntegratorConfig, Stepper, Trajectory};
use crate::phase::Hamiltonian;
use crate::search::pattern_search;
use crate::tetragon::{per_axis, Axis, Region};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChordError {
    #[error("X0 and X1 intersect (distance {distance:e} ≤ tol)")]
    Overlap { distance: f64 },
    #[error("time budget must be positive, got {0}")]
    Budget(f64),
    #[error("non-separating after perturbation: Δ = {delta} ≤ δ = {perturbation}")]
    NonSeparating { delta: f64, perturbation: f64 },
}

/// `κ / (Δ − δ)`.
pub fn chord_budget(kappa: f64, delta: f64, perturbation: f64) -> Result<f64, ChordError> {
    if delta - perturbation <= 0.0 {
        return Err(ChordError::NonSeparating {
            delta,
            perturbation,
        });
    }
    Ok(kappa / (delta - perturbation))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChordSearchConfig {
    pub seeds: usize,
    /// Start phases per seed when the Hamiltonian depends on time.
    pub phases: usize,
    /// Membership tolerance for the endpoints.
    pub tol: f64,
    pub integrator: IntegratorConfig,
    /// Bisection tolerance on crossing times.
    pub event_time_tol: f64,
    /// Misses farther than this from `X1` are not refined.
    pub near_miss_radius: f64,
    /// Number of best near misses that get a shooting refinement.
    pub refinements: usize,
    /// Evaluation cap per refinement or polish.
    pub refine_evals: usize,
    pub polish: bool,
}

impl Default for ChordSearchConfig {
    fn default() -> Self {
        Self {
            seeds: 64,
            phases: 16,
            tol: 1e-6,
            integrator: IntegratorConfig::with_tol(1e-10),
            event_time_tol: 1e-10,
            near_miss_radius: 0.25,
            refinements: 8,
            refine_evals: 200,
            polish: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub t0: f64,
    pub time_length: f64,
    pub seed_index: usize,
    pub patch: usize,
    pub params: Vec<f64>,
    pub start_distance: f64,
    pub end_distance: f64,
    /// Endpoint distance to `X1` after re-integration at a hundredth of the tolerance.
    pub revalidated_distance: f64,
    pub ode_residual: f64,
    pub refined: bool,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearMiss {
    pub seed_index: usize,
    pub patch: usize,
    pub params: Vec<f64>,
    pub t0: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ChordOutcome {
    Found(Box<Chord>),
    NotFound { best: Option<NearMiss> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFailure {
    pub seed_index: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordReport {
    pub outcome: ChordOutcome,
    pub budget: f64,
    pub seeds: usize,
    pub phases: usize,
    pub certified_hits: usize,
    pub failures: Vec<SeedFailure>,
}

impl ChordReport {
    pub fn chord(&self) -> Option<&Chord> {
        match &self.outcome {
            ChordOutcome::Found(c) => Some(c),
            ChordOutcome::NotFound { .. } => None,
        }
    }
}

/// Result of one shot from a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    /// First certified hit: `(time-length, end point)`.
    pub hit: Option<(f64, Vec<f64>)>,
    /// Smallest distance to `X1` seen at crossings and step ends.
    pub miss: f64,
}

/// The shooting problem shared by sweeps, refinements and polishing.
pub struct ChordProblem<'a> {
    pub ham: &'a dyn Hamiltonian,
    pub x0: &'a Region,
    pub x1: &'a Region,
    pub budget: f64,
    pub cfg: ChordSearchConfig,
}

impl<'a> ChordProblem<'a> {
    fn periodic(&self) -> bool {
        !self.ham.is_autonomous()
    }

    /// Search axes: region parameters, then the start phase if time-periodic.
    pub fn axes(&self) -> Vec<Axis> {
        let mut a = self.x0.param_box();
        if self.periodic() {
            a.push((0.0, 1.0, true));
        }
        a
    }

    fn split<'b>(&self, x: &'b [f64]) -> (&'b [f64], f64) {
        let d = self.x0.param_box().len();
        (&x[..d], if self.periodic() { x[d] } else { 0.0 })
    }

    pub fn shoot(&self, patch: usize, x: &[f64]) -> Result<Shot, IntegrateError> {
        let (params, t0) = self.split(x);
        let start = self.x0.point(patch, params);
        let mut st = Stepper::new(self.ham, &start, t0, self.cfg.integrator)?;
        let t_end = t0 + self.budget;
        let level = |y: &[f64]| self.x1.level(y);
        let mut miss = self.x1.distance(&start);
        while st.t() < t_end {
            st.step(t_end)?;
            if let Some((t, y)) = st.locate_crossing(&level, self.cfg.event_time_tol)? {
                let d = self.x1.distance(&y);
                if d <= self.cfg.tol {
                    return Ok(Shot {
                        hit: Some((t - t0, y)),
                        miss: d,
                    });
                }
                miss = miss.min(d);
            }
            miss = miss.min(self.x1.distance(st.y()));
        }
        Ok(Shot { hit: None, miss })
    }

    fn hit_time(&self, patch: usize, x: &[f64]) -> f64 {
        match self.shoot(patch, x) {
            Ok(Shot { hit: Some((t, _)), .. }) => t,
            _ => f64::INFINITY,
        }
    }

    fn miss_value(&self, patch: usize, x: &[f64]) -> f64 {
        match self.shoot(patch, x) {
            Ok(Shot { hit: Some(_), .. }) => -1.0,
            Ok(s) => s.miss,
            Err(_) => f64::INFINITY,
        }
    }

    fn certify(&self, seed_index: usize, patch: usize, x: &[f64], refined: bool) -> Option<Chord> {
        let shot = self.shoot(patch, x).ok()?;
        let (time_length, end) = shot.hit?;
        let (params, t0) = self.split(x);
        let start = self.x0.point(patch, params);
        let fine = IntegratorConfig {
            tol: self.cfg.integrator.tol / 100.0,
            ..self.cfg.integrator
        };
        let tr = integrate_dense(self.ham, &start, t0, t0 + time_length, fine, 4).ok()?;
        let revalidated_distance = self.x1.distance(tr.last().1);
        if revalidated_distance > 2.0 * self.cfg.tol {
            return None;
        }
        Some(Chord {
            start_distance: self.x0.distance(&start),
            end_distance: self.x1.distance(&end),
            start,
            end,
            t0,
            time_length,
            seed_index,
            patch,
            params: params.to_vec(),
            revalidated_distance,
            ode_residual: tr.ode_residual(self.ham),
            refined,
            trajectory: tr,
        })
    }
}

/// Deterministic seed list `(patch, search vector)` in sweep order:
/// region grid point major, start phase minor.
pub fn seeds(problem: &ChordProblem<'_>) -> Vec<(usize, Vec<f64>)> {
    let phases = if problem.periodic() { problem.cfg.phases.max(1) } else { 1 };
    problem
        .x0
        .samples(problem.cfg.seeds)
        .into_iter()
        .flat_map(|(patch, params)| {
            (0..phases).map(move |j| {
                let mut x = params.clone();
                if phases > 1 {
                    x.push(j as f64 / phases as f64);
                }
                (patch, x)
            })
        })
        .collect()
}

pub fn find_chord(
    ham: &dyn Hamiltonian,
    x0: &Region,
    x1: &Region,
    budget: f64,
    cfg: &ChordSearchConfig,
) -> Result<ChordReport, ChordError> {
    if !(budget > 0.0) {
        return Err(ChordError::Budget(budget));
    }
    let overlap = x0
        .samples(256)
        .iter()
        .map(|(p, a)| x1.distance(&x0.point(*p, a)))
        .fold(f64::INFINITY, f64::min);
    if overlap <= cfg.tol {
        return Err(ChordError::Overlap { distance: overlap });
    }
    let problem = ChordProblem {
        ham,
        x0,
        x1,
        budget,
        cfg: *cfg,
    };
    let seeds = seeds(&problem);
    let shots: Vec<Result<Shot, IntegrateError>> =
        seeds.par_iter().map(|(p, x)| problem.shoot(*p, x)).collect();

    let mut failures = Vec::new();
    let mut hits: Vec<(f64, usize)> = Vec::new();
    let mut misses: Vec<(f64, usize)> = Vec::new();
    for (i, s) in shots.iter().enumerate() {
        match s {
            Ok(Shot { hit: Some((t, _)), .. }) => hits.push((*t, i)),
            Ok(Shot { miss, .. }) => misses.push((*miss, i)),
            Err(e) => failures.push(SeedFailure {
                seed_index: i,
                error: e.to_string(),
            }),
        }
    }
    let axes = problem.axes();
    let d = x0.param_box().len();
    let step0 = 0.5 / per_axis(cfg.seeds / x0.patches().max(1), d) as f64;

    // Shooting refinement of the best near misses.
    let mut refined_hits: Vec<(f64, usize, usize, Vec<f64>)> = Vec::new();
    misses.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let candidates: Vec<(f64, usize)> = misses
        .iter()
        .copied()
        .filter(|(m, _)| *m <= cfg.near_miss_radius)
        .take(cfg.refinements)
        .collect();
    if hits.is_empty() {
        let found: Vec<Option<(f64, usize, usize, Vec<f64>)>> = candidates
            .par_iter()
            .map(|&(_, i)| {
                let (patch, ref x) = seeds[i];
                let mut f = |y: &[f64]| problem.miss_value(patch, y);
                let r = pattern_search(&mut f, x, &axes, step0, 1e-12, cfg.refine_evals);
                if r.value < 0.0 {
                    let t = problem.hit_time(patch, &r.x);
                    Some((t, i, patch, r.x))
                } else {
                    None
                }
            })
            .collect();
        refined_hits.extend(found.into_iter().flatten());
    }

    let best_miss = misses.first().map(|&(m, i)| {
        let (patch, ref x) = seeds[i];
        let (params, t0) = problem.split(x);
        NearMiss {
            seed_index: i,
            patch,
            params: params.to_vec(),
            t0,
            distance: m,
        }
    });

    // Shortest certified chord; sweep hits before refined ones at equal time.
    let mut pool: Vec<(f64, usize, usize, Vec<f64>, bool)> = hits
        .iter()
        .map(|&(t, i)| (t, i, seeds[i].0, seeds[i].1.clone(), false))
        .collect();
    pool.extend(refined_hits.into_iter().map(|(t, i, p, x)| (t, i, p, x, true)));
    pool.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.4.cmp(&b.4)));
    let certified_hits = pool.len();

    let mut chord = None;
    for (t, i, patch, x, refined) in pool {
        let (x, refined) = if cfg.polish {
            let mut f = |y: &[f64]| problem.hit_time(patch, y);
            let r = pattern_search(&mut f, &x, &axes, step0, 1e-12, cfg.refine_evals);
            if r.value < t {
                (r.x, true)
            } else {
                (x, refined)
            }
        } else {
            (x, refined)
        };
        if let Some(c) = problem.certify(i, patch, &x, refined) {
            chord = Some(c);
            break;
        }
    }
    let outcome = match chord {
        Some(c) => ChordOutcome::Found(Box::new(c)),
        None => ChordOutcome::NotFound { best: best_miss },
    };
    Ok(ChordReport {
        outcome,
        budget,
        seeds: seeds.len(),
        phases: if problem.periodic() { cfg.phases } else { 1 },
        certified_hits,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::ContactModel;
    use crate::phase::{FnHamiltonian, PhaseChart, TimeDependence};
    use crate::tetragon::build_tetragon;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

    #[test]
    fn budget_arithmetic() {
        assert_abs_diff_eq!(chord_budget(FRAC_PI_4, 1.0, 0.0).unwrap(), FRAC_PI_4, epsilon = 1e-15);
        assert_eq!(chord_budget(0.25, 0.5, 0.0).unwrap(), 0.5);
        assert_abs_diff_eq!(chord_budget(FRAC_PI_4, 1.0, 0.25).unwrap(), FRAC_PI_3, epsilon = 1e-15);
        assert!(chord_budget(1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn saddle_chord_is_half_log_two() {
        let tet = build_tetragon(ContactModel::ContactSphere { k: 1 }, 1.0, 2.0, FRAC_PI_4).unwrap();
        let h = FnHamiltonian::new(
            PhaseChart::flat(1).unwrap(),
            TimeDependence::Autonomous,
            |x, _| 0.5 * (x[0] * x[0] - x[1] * x[1]),
            |x, _, g| {
                g[0] = x[0];
                g[1] = -x[1];
            },
        );
        let r = find_chord(&h, &tet.floor, &tet.ceiling, FRAC_PI_4, &ChordSearchConfig::default()).unwrap();
        let c = r.chord().expect("chord");
        assert_abs_diff_eq!(c.time_length, 0.5 * 2f64.ln(), epsilon = 1e-6);
        assert_abs_diff_eq!(*c.params.last().unwrap(), PI / 8.0, epsilon = 1e-3);
        assert!(c.end_distance <= 1e-6 && c.revalidated_distance <= 2e-6);
    }

    #[test]
    fn unreachable_target_reports_distance() {
        let tet = build_tetragon(ContactModel::Circle, 1.0, 2.0, 0.25).unwrap();
        let h = FnHamiltonian::zero(PhaseChart::cotangent_torus(1).unwrap());
        let r = find_chord(&h, &tet.floor, &tet.ceiling, 1.0, &ChordSearchConfig::default()).unwrap();
        match r.outcome {
            ChordOutcome::NotFound { best: Some(b) } => assert_abs_diff_eq!(b.distance, 1.0, epsilon = 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overlap_and_budget_rejected() {
        let tet = build_tetragon(ContactModel::Circle, 1.0, 2.0, 0.25).unwrap();
        let h = FnHamiltonian::zero(PhaseChart::cotangent_torus(1).unwrap());
        let cfg = ChordSearchConfig::default();
        assert!(matches!(find_chord(&h, &tet.floor, &tet.high_wall, 1.0, &cfg), Err(ChordError::Overlap { .. })));
        assert!(matches!(find_chord(&h, &tet.floor, &tet.ceiling, 0.0, &cfg), Err(ChordError::Budget(_))));
    }

    #[test]
    fn channel_chord_from_endpoint_seed() {
        let tet = build_tetragon(ContactModel::Circle, 1.0, 2.0, 0.25).unwrap();
        let h = FnHamiltonian::new(
            PhaseChart::cotangent_torus(1).unwrap(),
            TimeDependence::Autonomous,
            |x, _| (2.0 * PI * x[1]).cos(),
            |x, _, g| {
                g[0] = 0.0;
                g[1] = -2.0 * PI * (2.0 * PI * x[1]).sin();
            },
        );
        let r = find_chord(&h, &tet.floor, &tet.ceiling, 0.25, &ChordSearchConfig::default()).unwrap();
        let c = r.chord().unwrap();
        assert_abs_diff_eq!(c.time_length, 1.0 / (2.0 * PI), epsilon = 1e-9);
        assert_abs_diff_eq!(c.start[1], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn larger_budget_keeps_chord() {
        let tet = build_tetragon(ContactModel::Circle, 1.0, 2.0, 0.25).unwrap();
        let h = FnHamiltonian::new(
            PhaseChart::cotangent_torus(1).unwrap(),
            TimeDependence::Autonomous,
            |x, _| (2.0 * PI * x[1]).cos(),
            |x, _, g| {
                g[0] = 0.0;
                g[1] = -2.0 * PI * (2.0 * PI * x[1]).sin();
            },
        );
        let cfg = ChordSearchConfig {
            polish: false,
            ..ChordSearchConfig::default()
        };
        for budget in [0.2, 0.3, 0.5, 1.0] {
            let r = find_chord(&h, &tet.floor, &tet.ceiling, budget, &cfg).unwrap();
            assert!(r.chord().is_some(), "budget {budget}");
        }
    }
}
