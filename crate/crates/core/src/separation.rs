//! Separation constant `Δ(G; Y0, Y1) = min_{Y1×S¹} G − max_{Y0×S¹} G`.
//!
//! Each extremum is estimated by dense sampling of the region parameters
//! (times a uniform grid of phases when `G` depends on time) followed by
//! compass-search refinement from the best few samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::phase::Hamiltonian;
use crate::search::pattern_search;
use crate::tetragon::{Axis, Region};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeparationConfig {
    /// Parameter samples per region.
    pub samples: usize,
    /// Time samples over the period for time-dependent `G`.
    pub phases: usize,
    pub refine_starts: usize,
    pub refine_evals: usize,
    /// Relative step at which refinement stops.
    pub refine_tol: f64,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self {
            samples: 1024,
            phases: 16,
            refine_starts: 4,
            refine_evals: 400,
            refine_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub point: Vec<f64>,
    pub time: f64,
    pub patch: usize,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub delta: f64,
    pub min_on_y1: Extremum,
    pub max_on_y0: Extremum,
    pub samples: usize,
    pub refine_tol: f64,
    /// `Δ > 0`.
    pub separating: bool,
}

/// Extremum of `sign·G` over a region × period: `sign = 1` finds the minimum.
pub fn region_extremum(g: &dyn Hamiltonian, region: &Region, sign: f64, cfg: &SeparationConfig) -> (Extremum, usize) {
    let periodic = !g.is_autonomous();
    let mut axes: Vec<Axis> = region.param_box();
    if periodic {
        axes.push((0.0, 1.0, true));
    }
    let d = region.param_box().len();
    let phases = if periodic { cfg.phases.max(1) } else { 1 };
    let seeds = region.samples(cfg.samples);
    let eval = |patch: usize, x: &[f64]| -> f64 {
        let t = if periodic { x[d] } else { 0.0 };
        sign * g.value(&region.point(patch, &x[..d]), t)
    };
    let cands: Vec<(usize, Vec<f64>)> = seeds
        .iter()
        .flat_map(|(patch, params)| {
            (0..phases).map(move |j| {
                let mut x = params.clone();
                if periodic {
                    x.push(j as f64 / phases as f64);
                }
                (*patch, x)
            })
        })
        .collect();
    let values: Vec<f64> = cands.par_iter().map(|(p, x)| eval(*p, x)).collect();
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let per_axis = crate::tetragon::per_axis(cfg.samples / region.patches().max(1), d) as f64;
    let refined: Vec<(f64, usize, Vec<f64>)> = order
        .iter()
        .take(cfg.refine_starts.max(1))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&i| {
            let (patch, ref x0) = cands[i];
            let mut f = |x: &[f64]| eval(patch, x);
            let r = pattern_search(&mut f, x0, &axes, 1.0 / per_axis, cfg.refine_tol, cfg.refine_evals);
            (r.value, patch, r.x)
        })
        .collect();
    let (mut best_v, mut best_patch, mut best_x) = (values[order[0]], cands[order[0]].0, cands[order[0]].1.clone());
    for (v, p, x) in refined {
        if v < best_v {
            best_v = v;
            best_patch = p;
            best_x = x;
        }
    }
    let time = if periodic { best_x[d] } else { 0.0 };
    let point = region.point(best_patch, &best_x[..d]);
    (
        Extremum {
            value: sign * best_v,
            point,
            time,
            patch: best_patch,
            params: best_x[..d].to_vec(),
        },
        cands.len(),
    )
}

pub fn separation(g: &dyn Hamiltonian, y0: &Region, y1: &Region, cfg: &SeparationConfig) -> SeparationReport {
    let (min_on_y1, n1) = region_extremum(g, y1, 1.0, cfg);
    let (max_on_y0, n0) = region_extremum(g, y0, -1.0, cfg);
    let delta = min_on_y1.value - max_on_y0.value;
    SeparationReport {
        delta,
        min_on_y1,
        max_on_y0,
        samples: n0 + n1,
        refine_tol: cfg.refine_tol,
        separating: delta > 0.0,
    }
}
