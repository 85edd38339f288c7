//! Multi-start smoothed-max descent for `pb4+` on a grid.
//!
//! The objective is `LSE_β(max(b, 0))` over interior nodes, where `b` is the
//! discrete bracket. Steps are projected onto the constraint set and
//! accepted by backtracking; `β` follows an increasing schedule. Every value
//! that leaves this module has been re-validated by [`feasible_pair_value`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{bracket_field, feasible_pair_value, Grid, Mask, Pb4Problem};
use super::Pb4Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Pb4Config {
    /// Total starts, including the deterministic base start.
    pub starts: usize,
    pub seed: u64,
    /// Increasing inverse temperatures of the log-sum-exp.
    pub schedule: Vec<f64>,
    pub iterations_per_level: usize,
    /// Initial step, as the largest change of any node value.
    pub initial_step: f64,
    /// Amplitude of the random smooth perturbations of the extra starts.
    pub perturbation: f64,
}

impl Default for Pb4Config {
    fn default() -> Self {
        Self {
            starts: 8,
            seed: 0,
            schedule: vec![20.0, 50.0, 100.0, 200.0, 500.0, 1000.0],
            iterations_per_level: 60,
            initial_step: 0.01,
            perturbation: 0.05,
        }
    }
}

/// How the base start was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    /// Separable ramps with cutoffs; used when the masks form a rectangle.
    Separable,
    /// Discrete harmonic interpolation of the 0/1 constraints.
    Harmonic,
    /// Caller-supplied fields.
    Warm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub start: usize,
    pub beta: f64,
    pub iterations: usize,
    pub objective: f64,
    /// Validated `max {F, G}` at the end of the level.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub index: usize,
    pub initial: f64,
    pub last: f64,
    pub best: f64,
}

/// Coarse/fine comparison used as a discretization error proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoGrid {
    pub coarse_n: usize,
    pub fine_n: usize,
    pub coarse: f64,
    pub fine: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pb4Report {
    /// Validated `max {F, G}` of the best feasible pair found.
    pub estimate: f64,
    pub grid: Grid,
    pub thicken: usize,
    pub base_start: StartKind,
    pub best_start: usize,
    pub starts: Vec<StartSummary>,
    pub trace: Vec<TraceEntry>,
    pub two_grid: Option<TwoGrid>,
    pub exact: Option<f64>,
    #[serde(skip)]
    pub f: Vec<f64>,
    #[serde(skip)]
    pub g: Vec<f64>,
}

impl Pb4Report {
    /// Grid field as CSV with columns `s,u,value`.
    pub fn field_csv(&self, which: char) -> String {
        let field = if which == 'F' { &self.f } else { &self.g };
        let mut out = String::from("s,u,value\n");
        for j in 0..self.grid.nu {
            for i in 0..self.grid.ns {
                let k = self.grid.idx(i, j);
                out.push_str(&format!("{},{},{}\n", self.grid.s(i), self.grid.u(j), field[k]));
            }
        }
        out
    }

    pub fn bracket(&self) -> Vec<f64> {
        bracket_field(&self.grid, &self.f, &self.g)
    }
}

/// Runs the multi-start estimator.
pub fn estimate_pb4_plus(problem: &Pb4Problem, cfg: &Pb4Config) -> Result<Pb4Report, Pb4Error> {
    estimate_from(problem, cfg, None)
}

/// As [`estimate_pb4_plus`], with `warm` replacing the base start. The warm
/// pair is projected onto the problem's constraints first, so the returned
/// estimate never exceeds its validated value.
pub fn estimate_from(
    problem: &Pb4Problem,
    cfg: &Pb4Config,
    warm: Option<(&[f64], &[f64])>,
) -> Result<Pb4Report, Pb4Error> {
    if cfg.starts == 0 || cfg.schedule.is_empty() {
        return Err(Pb4Error::Config("need at least one start and one temperature".into()));
    }
    if cfg.schedule.iter().any(|b| !(b.is_finite() && *b > 0.0)) || !(cfg.initial_step > 0.0) {
        return Err(Pb4Error::Config("temperatures and step must be positive".into()));
    }
    let n = problem.grid.len();
    let (base_kind, mut f0, mut g0) = match warm {
        Some((f, g)) => {
            if f.len() != n || g.len() != n {
                return Err(Pb4Error::Problem("warm start does not match the grid".into()));
            }
            (StartKind::Warm, f.to_vec(), g.to_vec())
        }
        None => match separable_start(problem) {
            Some((f, g)) => (StartKind::Separable, f, g),
            None => {
                let (f, g) = harmonic_start(problem);
                (StartKind::Harmonic, f, g)
            }
        },
    };
    problem.project(&mut f0, &mut g0);

    let runs: Vec<StartRun> = (0..cfg.starts)
        .into_par_iter()
        .map(|index| {
            let (mut f, mut g) = (f0.clone(), g0.clone());
            if index > 0 {
                perturb(&problem.grid, &mut f, &mut g, cfg, index);
                problem.project(&mut f, &mut g);
            }
            descend(problem, cfg, index, f, g)
        })
        .collect::<Result<_, _>>()?;

    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.best < runs[best].best {
            best = k;
        }
    }
    if runs.iter().all(|r| r.last > r.initial) {
        return Err(Pb4Error::NonConvergence {
            trace: runs.iter().flat_map(|r| r.trace.clone()).collect(),
        });
    }
    let estimate = feasible_pair_value(problem, &runs[best].f, &runs[best].g)?;
    let starts = runs
        .iter()
        .map(|r| StartSummary {
            index: r.index,
            initial: r.initial,
            last: r.last,
            best: r.best,
        })
        .collect();
    let trace = runs.iter().flat_map(|r| r.trace.iter().cloned()).collect();
    let mut runs = runs;
    let winner = runs.swap_remove(best);
    Ok(Pb4Report {
        estimate,
        grid: problem.grid,
        thicken: problem.thicken,
        base_start: base_kind,
        best_start: best,
        starts,
        trace,
        two_grid: None,
        exact: None,
        f: winner.f,
        g: winner.g,
    })
}

struct StartRun {
    index: usize,
    initial: f64,
    last: f64,
    best: f64,
    f: Vec<f64>,
    g: Vec<f64>,
    trace: Vec<TraceEntry>,
}

/// `LSE_β(max(b, 0))` and, optionally, its gradient in `(F, G)`.
fn objective(grid: &Grid, f: &[f64], g: &[f64], beta: f64, grad: Option<(&mut [f64], &mut [f64])>) -> f64 {
    let b = bracket_field(grid, f, g);
    let top = b.iter().fold(0.0_f64, |m, &v| m.max(v));
    let e0 = (-beta * top).exp();
    let mut z = 0.0;
    for &v in &b {
        if v > 0.0 {
            z += (beta * (v - top)).exp();
        } else if v.is_finite() {
            z += e0;
        }
    }
    let value = top + z.ln() / beta;
    if let Some((df, dg)) = grad {
        df.fill(0.0);
        dg.fill(0.0);
        let (h2s, h2u) = (2.0 * grid.ds(), 2.0 * grid.du());
        grid.for_each_interior(|c, sm, sp, um, up| {
            if b[c] <= 0.0 {
                return;
            }
            let w = (beta * (b[c] - top)).exp() / z;
            let fu = (f[up] - f[um]) / h2u;
            let fs = (f[sp] - f[sm]) / h2s;
            let gu = (g[up] - g[um]) / h2u;
            let gs = (g[sp] - g[sm]) / h2s;
            df[up] += w * gs / h2u;
            df[um] -= w * gs / h2u;
            df[sp] -= w * gu / h2s;
            df[sm] += w * gu / h2s;
            dg[sp] += w * fu / h2s;
            dg[sm] -= w * fu / h2s;
            dg[up] -= w * fs / h2u;
            dg[um] += w * fs / h2u;
        });
    }
    value
}

fn descend(problem: &Pb4Problem, cfg: &Pb4Config, index: usize, mut f: Vec<f64>, mut g: Vec<f64>) -> Result<StartRun, Pb4Error> {
    let grid = &problem.grid;
    let initial = feasible_pair_value(problem, &f, &g)?;
    let (mut best, mut best_f, mut best_g) = (initial, f.clone(), g.clone());
    let mut last = initial;
    let mut trace = Vec::with_capacity(cfg.schedule.len());
    let n = grid.len();
    let (mut df, mut dg) = (vec![0.0; n], vec![0.0; n]);
    let mut step = cfg.initial_step;
    for &beta in &cfg.schedule {
        let mut obj = objective(grid, &f, &g, beta, Some((&mut df, &mut dg)));
        let mut iterations = 0;
        for _ in 0..cfg.iterations_per_level {
            let scale = df.iter().chain(&dg).fold(0.0_f64, |m, v| m.max(v.abs()));
            if scale == 0.0 {
                break;
            }
            let mut accepted = false;
            for _ in 0..30 {
                let a = step / scale;
                let mut nf: Vec<f64> = f.iter().zip(&df).map(|(x, d)| x - a * d).collect();
                let mut ng: Vec<f64> = g.iter().zip(&dg).map(|(x, d)| x - a * d).collect();
                problem.project(&mut nf, &mut ng);
                let moved: f64 = nf.iter().zip(&f).chain(ng.iter().zip(&g)).map(|(x, y)| (x - y) * (x - y)).sum();
                let nobj = objective(grid, &nf, &ng, beta, None);
                if moved > 0.0 && nobj <= obj - 1e-4 * moved / a {
                    f = nf;
                    g = ng;
                    obj = nobj;
                    step = (step * 1.5).min(0.1);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                step = cfg.initial_step;
                break;
            }
            iterations += 1;
            objective(grid, &f, &g, beta, Some((&mut df, &mut dg)));
        }
        let value = feasible_pair_value(problem, &f, &g)?;
        if value < best {
            best = value;
            best_f.clone_from(&f);
            best_g.clone_from(&g);
        }
        last = value;
        trace.push(TraceEntry {
            start: index,
            beta,
            iterations,
            objective: obj,
            value,
        });
    }
    Ok(StartRun {
        index,
        initial,
        last,
        best,
        f: best_f,
        g: best_g,
        trace,
    })
}

/// Adds a few smooth bumps, tapered to vanish on the frame.
fn perturb(grid: &Grid, f: &mut [f64], g: &mut [f64], cfg: &Pb4Config, index: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    for field in [f, g] {
        let bumps: Vec<(f64, f64, f64, f64)> = (0..3)
            .map(|_| {
                (
                    rng.gen_range(-cfg.perturbation..=cfg.perturbation),
                    rng.gen_range(0.0..1.0),
                    rng.gen_range(0.0..1.0),
                    rng.gen_range(0.05..0.2),
                )
            })
            .collect();
        for j in 0..grid.nu {
            for i in 0..grid.ns {
                let x = i as f64 / (grid.ns - 1) as f64;
                let y = j as f64 / (grid.nu - 1).max(1) as f64;
                let taper = if grid.periodic_u {
                    (std::f64::consts::PI * x).sin()
                } else {
                    (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).sin()
                };
                let mut d = 0.0;
                for &(amp, cx, cy, w) in &bumps {
                    d += amp * (-((x - cx).powi(2) + (y - cy).powi(2)) / (w * w)).exp();
                }
                field[grid.idx(i, j)] += taper * d;
            }
        }
    }
}

/// Discrete harmonic interpolation by SOR: `F` is 0 on X0 and the frame and
/// 1 on X1, `G` likewise on Y0/Y1.
pub fn harmonic_start(problem: &Pb4Problem) -> (Vec<f64>, Vec<f64>) {
    let f = harmonic(&problem.grid, &problem.x0, &problem.x1);
    let g = harmonic(&problem.grid, &problem.y0, &problem.y1);
    (f, g)
}

fn harmonic(grid: &Grid, zero: &Mask, one: &Mask) -> Vec<f64> {
    let n = grid.len();
    let mut v = vec![0.0; n];
    let fixed: Vec<bool> = (0..n)
        .map(|k| zero.nodes[k] || one.nodes[k] || grid.on_frame(k % grid.ns, k / grid.ns))
        .collect();
    for k in 0..n {
        if one.nodes[k] && !grid.on_frame(k % grid.ns, k / grid.ns) {
            v[k] = 1.0;
        }
    }
    let (ws, wu) = (1.0 / grid.ds().powi(2), 1.0 / grid.du().powi(2));
    let m = grid.ns.max(grid.nu) as f64;
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / m).sin());
    for _ in 0..(20 * grid.ns.max(grid.nu)) {
        let mut change: f64 = 0.0;
        grid.for_each_interior(|c, sm, sp, um, up| {
            if fixed[c] {
                return;
            }
            let target = (ws * (v[sm] + v[sp]) + wu * (v[um] + v[up])) / (2.0 * (ws + wu));
            let d = omega * (target - v[c]);
            v[c] += d;
            change = change.max(d.abs());
        });
        if change < 1e-10 {
            break;
        }
    }
    v
}

/// Index box `[a_min, a_max] × [b_min, b_max]` of a mask in a rotated frame.
type IndexBox = (usize, usize, usize, usize);

/// The four orientation-preserving index maps `(a, b) → (i, j)`.
fn rotation(grid: &Grid, r: usize) -> (usize, usize, Box<dyn Fn(usize, usize) -> usize + '_>) {
    let (ns, nu) = (grid.ns, grid.nu);
    match r {
        0 => (ns, nu, Box::new(move |a, b| grid.idx(a, b))),
        1 => (nu, ns, Box::new(move |a, b| grid.idx(ns - 1 - b, a))),
        2 => (ns, nu, Box::new(move |a, b| grid.idx(ns - 1 - a, nu - 1 - b))),
        _ => (nu, ns, Box::new(move |a, b| grid.idx(b, nu - 1 - a))),
    }
}

fn index_box(mask: &Mask, na: usize, nb: usize, at: &dyn Fn(usize, usize) -> usize) -> Option<IndexBox> {
    let mut bx: Option<IndexBox> = None;
    for b in 0..nb {
        for a in 0..na {
            if mask.nodes[at(a, b)] {
                bx = Some(match bx {
                    None => (a, a, b, b),
                    Some((a0, a1, b0, b1)) => (a0.min(a), a1.max(a), b0.min(b), b1.max(b)),
                });
            }
        }
    }
    bx
}

fn ramp(x: usize, x0: usize, x1: usize) -> f64 {
    if x <= x0 {
        0.0
    } else if x >= x1 {
        1.0
    } else {
        (x - x0) as f64 / (x1 - x0) as f64
    }
}

/// Separable start `F = f(a)·η(b)`, `G = g(b)·χ(a)` for rectangle layouts:
/// X0 left of X1 along `a`, Y1 below Y0 along `b`, in one of the four
/// orientation-preserving frames. The cutoffs are staggered so that
/// `{F, G} = −f′·g′·χ` wherever it is positive.
pub fn separable_start(problem: &Pb4Problem) -> Option<(Vec<f64>, Vec<f64>)> {
    let grid = &problem.grid;
    if grid.periodic_u {
        return None;
    }
    for r in 0..4 {
        let (na, nb, at) = rotation(grid, r);
        let bx = |m: &Mask| index_box(m, na, nb, &*at);
        let (Some(x0), Some(x1), Some(y0), Some(y1)) =
            (bx(&problem.x0), bx(&problem.x1), bx(&problem.y0), bx(&problem.y1))
        else {
            return None;
        };
        if !(x0.1 + 1 < x1.0 && y1.3 + 1 < y0.2) {
            continue;
        }
        // Along a: χ rises to Y1's left end, f ramps between X0 and X1, then
        // χ falls while f = 1, and f falls once χ = 0.
        let c0 = x1.1.max(y1.1) + 1;
        if c0 + 4 >= na {
            continue;
        }
        let c1 = c0 + (na - 1 - c0) / 2;
        let chi_lo = y1.0.min(x0.0).max(1);
        // Along b: g falls below Y1, then η falls to the frame; above, g = 0.
        let gb = y1.2;
        let g0 = (gb + 3) / 2;
        if g0 < 3 || g0 >= gb || x1.2 < g0 - 2 {
            continue;
        }
        let e1 = g0 - 2;
        let e2 = x1.3.max(y0.3).max(y1.3) + 1;
        if e2 + 1 >= nb {
            continue;
        }
        let f_a = |a: usize| -> f64 {
            if a <= c1 + 1 {
                ramp(a, x0.1, x1.0)
            } else {
                1.0 - ramp(a, c1 + 1, na - 1)
            }
        };
        let chi = |a: usize| -> f64 {
            if a <= c0 {
                ramp(a, 0, chi_lo)
            } else {
                1.0 - ramp(a, c0, c1)
            }
        };
        let g_b = |b: usize| -> f64 {
            if b <= gb {
                ramp(b, g0, gb)
            } else {
                1.0 - ramp(b, y1.3, y0.2)
            }
        };
        let eta = |b: usize| -> f64 {
            if b <= e2 {
                ramp(b, 0, e1)
            } else {
                1.0 - ramp(b, e2, nb - 1)
            }
        };
        let mut f = vec![0.0; grid.len()];
        let mut g = vec![0.0; grid.len()];
        for b in 0..nb {
            for a in 0..na {
                let k = at(a, b);
                f[k] = f_a(a) * eta(b);
                g[k] = g_b(b) * chi(a);
            }
        }
        if problem.check(&f, &g).is_ok() {
            return Some((f, g));
        }
    }
    None
}
