//! Measurements shared by the property tests and the acceptance runner.
//! Each helper returns the raw quantity; callers apply the tolerance.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tetralab::chord::{find_chord, ChordSearchConfig};
use tetralab::contact::ContactModel;
use tetralab::fd;
use tetralab::integrate::{integrate, integrate_dense, IntegratorConfig};
use tetralab::pb4::{estimate_from, estimate_pb4_plus, prototype_problem, Pb4Config, PrototypePair};
use tetralab::phase::{
    autonomize, poisson_bracket, volume_factor, FnHamiltonian, Hamiltonian, HamiltonianRef, PhaseChart,
    Polynomial, Sum, TimeDependence,
};
use tetralab::scenarios::{hyperbolic, mechanical, MechanicalPotential};
use tetralab::separation::{separation, SeparationConfig};
use tetralab::tetragon::{build_tetragon, smooth_tetragon};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_triple(seed: u64, pairs: usize) -> (Polynomial, Polynomial, Polynomial, Vec<f64>) {
    let chart = PhaseChart::flat(pairs).unwrap();
    let mut r = rng(seed);
    let f = Polynomial::random(chart.clone(), 3, 5, &mut r);
    let g = Polynomial::random(chart.clone(), 3, 5, &mut r);
    let h = Polynomial::random(chart, 3, 5, &mut r);
    let x = random_point(&mut r, 2 * pairs);
    (f, g, h, x)
}

/// `|{F,G} + {G,F}|` for random cubic polynomials on `ℝ⁴`.
pub fn antisymmetry_defect(seed: u64) -> f64 {
    let (f, g, _, x) = random_triple(seed, 2);
    let fg = poisson_bracket(&f, &g, &x, 0.0).unwrap();
    let gf = poisson_bracket(&g, &f, &x, 0.0).unwrap();
    (fg + gf).abs()
}

/// Jacobi sum with analytic inner and finite-difference outer brackets.
pub fn jacobi_defect(seed: u64) -> f64 {
    let (f, g, h, x) = random_triple(seed, 2);
    let inner = |a: &Polynomial, b: &Polynomial| {
        let (a, b) = (a.clone(), b.clone());
        move |y: &[f64]| poisson_bracket(&a, &b, y, 0.0).unwrap()
    };
    (fd::bracket_outer(inner(&g, &h), &f, &x, 0.0)
        + fd::bracket_outer(inner(&h, &f), &g, &x, 0.0)
        + fd::bracket_outer(inner(&f, &g), &h, &x, 0.0))
    .abs()
}

/// `|det-ratio − (1 − τ{F,G})|` at one random point and `τ ∈ [0, 1]`.
pub fn volume_defect(seed: u64) -> f64 {
    let pairs = 1 + (seed % 3) as usize;
    let (f, g, _, x) = random_triple(seed, pairs);
    let tau = rng(seed ^ 0x5eed).gen_range(0.0..1.0);
    let v = volume_factor(&f, &g, tau, &x, 0.0).unwrap();
    (v.determinant_ratio - v.analytic).abs()
}

/// Autonomous test systems for energy conservation.
pub fn energy_systems() -> Vec<(&'static str, HamiltonianRef)> {
    let plane = PhaseChart::flat(1).unwrap();
    let quartic = Polynomial::new(
        plane,
        vec![(0.5, vec![2, 0]), (0.5, vec![0, 2]), (0.25, vec![0, 4])],
    );
    let four = PhaseChart::flat(2).unwrap();
    let coupled = Polynomial::new(
        four,
        vec![
            (0.5, vec![2, 0, 0, 0]),
            (0.5, vec![0, 2, 0, 0]),
            (0.5, vec![0, 0, 2, 0]),
            (0.5, vec![0, 0, 0, 2]),
            (0.3, vec![0, 0, 2, 1]),
            (-0.1, vec![0, 0, 0, 3]),
        ],
    );
    let pendulum = FnHamiltonian::new(
        PhaseChart::cotangent_torus(1).unwrap(),
        TimeDependence::Autonomous,
        |x, _| 0.5 * x[0] * x[0] - (2.0 * PI * x[1]).cos() / (4.0 * PI * PI),
        |x, _, g| {
            g[0] = x[0];
            g[1] = (2.0 * PI * x[1]).sin() / (2.0 * PI);
        },
    );
    vec![
        ("quartic oscillator", Arc::new(quartic)),
        ("coupled cubic", Arc::new(coupled)),
        ("pendulum", pendulum.into_ref()),
        ("hyperbolic", hyperbolic(1)),
    ]
}

/// Largest `|H(x(t)) − H(x0)|` over `t ∈ [0, 10]`.
pub fn energy_drift(ham: &dyn Hamiltonian, x0: &[f64]) -> f64 {
    let traj = integrate(ham, x0, 0.0, 10.0, IntegratorConfig::with_tol(1e-12)).unwrap();
    let e0 = ham.value(x0, 0.0);
    traj.states.iter().map(|y| (ham.value(y, 0.0) - e0).abs()).fold(0.0, f64::max)
}

/// Start points for [`energy_drift`], small enough that the hyperbolic
/// flow stays bounded over the horizon.
pub fn energy_start(seed: u64, dim: usize, hyperbolic: bool) -> Vec<f64> {
    let mut r = rng(seed);
    let mut x = random_point(&mut r, dim);
    if hyperbolic {
        // Near the stable manifold `p = −q` the flow stays bounded.
        x[1] = -x[0] + 1e-5 * x[1];
    }
    x
}

pub fn tetragon_models() -> [(ContactModel, f64); 4] {
    [
        (ContactModel::Circle, 0.25),
        (ContactModel::UnitCotangentTorus { k: 2 }, 0.25),
        (ContactModel::ContactSphere { k: 1 }, FRAC_PI_4),
        (ContactModel::ContactSphere { k: 2 }, FRAC_PI_4),
    ]
}

pub fn smoothed_residual(model: ContactModel, t: f64, eps: f64) -> f64 {
    let tet = build_tetragon(model, 1.0, 2.0, t).unwrap();
    smooth_tetragon(&tet, eps).unwrap().lagrangian_residual(64).max_abs
}

/// A short optimizer run; the warm-start checks do not depend on descent quality.
pub fn quick_pb4() -> Pb4Config {
    Pb4Config {
        starts: 2,
        schedule: vec![50.0, 200.0],
        iterations_per_level: 15,
        ..Pb4Config::default()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Pb4Chain {
    /// Estimate on the prototype `P = (X0, X1, Y0, Y1)`.
    pub a: f64,
    /// Independent estimate on `(Y1, Y0, X0, X1)`.
    pub b: f64,
    /// Estimate with masks dilated by one more cell.
    pub thick: f64,
    /// `P` warmed from the dilated optimum: initial and final value.
    pub thin_initial: f64,
    pub thin: f64,
    /// Window with `R0, R1` doubled, warmed from `P`'s pair.
    pub scaled_initial: f64,
    pub scaled: f64,
}

pub fn pb4_chain(n: usize, t: f64, cfg: &Pb4Config) -> Pb4Chain {
    let p = prototype_problem(1.0, 2.0, t, n, 1).unwrap();
    let rp = estimate_pb4_plus(&p, cfg).unwrap();
    let rq = estimate_pb4_plus(&p.antisymmetric(), cfg).unwrap();
    let thick = prototype_problem(1.0, 2.0, t, n, 2).unwrap();
    let rt = estimate_pb4_plus(&thick, cfg).unwrap();
    let rthin = estimate_from(&p, cfg, Some((&rt.f, &rt.g))).unwrap();
    let scaled = prototype_problem(2.0, 4.0, t, n, 1).unwrap();
    let rs = estimate_from(&scaled, cfg, Some((&rp.f, &rp.g))).unwrap();
    Pb4Chain {
        a: rp.estimate,
        b: rq.estimate,
        thick: rt.estimate,
        thin_initial: rthin.starts[0].initial,
        thin: rthin.estimate,
        scaled_initial: rs.starts[0].initial,
        scaled: rs.estimate,
    }
}

/// Chords of `G` from floor to ceiling for the prototype pair, with the
/// largest `{F, G}` sampled densely along each and its time-length.
pub fn mean_value_chords(seed_counts: &[usize]) -> Vec<(f64, f64)> {
    let pair = PrototypePair::new(1.0, 2.0, 0.25);
    let tet = build_tetragon(ContactModel::Circle, 1.0, 2.0, 0.25).unwrap();
    let budget = (tet.r1 - tet.r0) * tet.t;
    seed_counts
        .iter()
        .filter_map(|&seeds| {
            let cfg = ChordSearchConfig {
                seeds,
                ..ChordSearchConfig::default()
            };
            let report = find_chord(&*pair.g, &tet.floor, &tet.ceiling, budget, &cfg).unwrap();
            let chord = report.chord()?.clone();
            let traj = integrate_dense(
                &*pair.g,
                &chord.start,
                chord.t0,
                chord.t0 + chord.time_length,
                IntegratorConfig::with_tol(1e-11),
                64,
            )
            .unwrap();
            let max = traj
                .states
                .iter()
                .zip(&traj.times)
                .map(|(y, &t)| poisson_bracket(&*pair.f, &*pair.g, y, t).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            Some((max, chord.time_length))
        })
        .collect()
}

/// Random perturbation `a·(c1 p + c2 q + c3 p q + c4 q²)·(1 + μ sin 2π(t + φ))`.
pub fn random_perturbation(seed: u64) -> HamiltonianRef {
    let mut r = rng(seed);
    let a = r.gen_range(0.0..0.5);
    let c: [f64; 4] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
    let mu = if seed % 2 == 0 { 0.0 } else { r.gen_range(0.0..1.0) };
    let phi = r.gen_range(0.0..1.0);
    let m = move |t: f64| 1.0 + mu * (2.0 * PI * (t + phi)).sin();
    let dep = if mu == 0.0 {
        TimeDependence::Autonomous
    } else {
        TimeDependence::Periodic
    };
    FnHamiltonian::new(
        PhaseChart::flat(1).unwrap(),
        dep,
        move |x, t| a * m(t) * (c[0] * x[0] + c[1] * x[1] + c[2] * x[0] * x[1] + c[3] * x[1] * x[1]),
        move |x, t, g| {
            g[0] = a * m(t) * (c[0] + c[2] * x[1]);
            g[1] = a * m(t) * (c[1] + c[2] * x[0] + 2.0 * c[3] * x[1]);
        },
    )
    .into_ref()
}

/// `(Δ(G + F), Δ(G), Δ(F))` on the walls of the `ℂ` tetragon with `G` hyperbolic.
pub fn robustness(seed: u64) -> (f64, f64, f64) {
    let tet = build_tetragon(ContactModel::ContactSphere { k: 1 }, 1.0, 2.0, FRAC_PI_4).unwrap();
    let g = hyperbolic(1);
    let f = random_perturbation(seed);
    let sum = Sum::new(vec![g.clone(), f.clone()]);
    let cfg = SeparationConfig::default();
    let d = |h: &dyn Hamiltonian| separation(h, &tet.low_wall, &tet.high_wall, &cfg).delta;
    (d(&sum), d(&*g), d(&*f))
}

/// Lifts a chord of the time-periodic mechanical Hamiltonian to its
/// autonomization and returns the distance of the projected endpoint to the
/// ceiling, with the `H` drift along the lift.
pub fn autonomized_chord() -> (f64, f64) {
    use tetralab::scenarios::{run_mechanical, MechanicalConfig};
    let report = run_mechanical(&MechanicalConfig::default()).unwrap();
    let chord = report.chord().expect("mechanical chord");
    let g = mechanical(1, 1.0, MechanicalPotential::Well { depth: 1.0, modulation: 0.5 });
    let h = autonomize(g).unwrap();
    let ext0 = h.join(&chord.start, 0.0, chord.t0);
    let lifted = integrate(&h, &ext0, 0.0, chord.time_length, IntegratorConfig::with_tol(1e-11)).unwrap();
    let (_, end) = lifted.last();
    let (x, _, _) = h.split(end);
    let tet = build_tetragon(ContactModel::ContactSphere { k: 1 }, 1.0, 2.0, FRAC_PI_4).unwrap();
    (tet.ceiling.distance(&x), (h.value(end, 0.0) - h.value(&ext0, 0.0)).abs())
}
