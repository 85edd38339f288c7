//! Acceptance suite: runs the nine criteria at their stated tolerances and
//! runtimes, printing one PASS/FAIL line each. Exits nonzero on any failure.

mod common;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use tetralab::pb4::{estimate_prototype, wall_witness, Pb4Config};
use tetralab::scenarios::{
    run_mechanical, run_reeb_chord, run_superconductivity, run_unstable_equilibrium, EquilibriumConfig,
    MechanicalConfig, PerturbationSpec, ReebConfig, ReebFactor, SuperconductivityConfig,
};

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
    /// Every computed number the verdict depends on, for the determinism check.
    fingerprint: Value,
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn criteria() -> Vec<Criterion> {
    vec![
        ("unstable equilibrium", Duration::from_secs(1), unstable_equilibrium),
        ("perturbed equilibrium", Duration::from_secs(30), perturbed_equilibrium),
        ("superconductivity", Duration::from_secs(61), superconductivity),
        ("mechanical", Duration::from_secs(10), mechanical),
        ("pb4+ prototype", Duration::from_secs(60), pb4_prototype),
        ("wall witness", Duration::from_secs(5), witness),
        ("reeb chord", Duration::from_secs(5), reeb),
        ("property suites", Duration::MAX, properties),
    ]
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn unstable_equilibrium() -> Outcome {
    let r = run_unstable_equilibrium(&EquilibriumConfig::default()).unwrap();
    let time = r.time_length.unwrap_or(f64::NAN);
    let inc = r.increment.unwrap_or(f64::NAN);
    Outcome {
        pass: r.found
            && within(time, 0.5 * 2f64.ln(), 1e-4)
            && time <= FRAC_PI_4
            && within(inc, 2f64.sqrt() - 1.0, 1e-6),
        detail: format!("time {time:.10} (½ln2 {:.10}), increment {inc:.10}", 0.5 * 2f64.ln()),
        fingerprint: serde_json::to_value(&r).unwrap(),
    }
}

fn perturbed_equilibrium() -> Outcome {
    let cfg = EquilibriumConfig {
        perturbation: Some(PerturbationSpec::default()),
        ..EquilibriumConfig::default()
    };
    let r = run_unstable_equilibrium(&cfg).unwrap();
    let cal = r.perturbation.as_ref().unwrap();
    let time = r.time_length.unwrap_or(f64::NAN);
    Outcome {
        pass: r.found
            && within(r.delta, 0.25, 0.01)
            && cal.shape.far_factor >= 10.0
            && r.search.seeds >= 64
            && r.search.phases >= 16
            && time <= FRAC_PI_3 + 1e-6,
        detail: format!(
            "δ {:.6}, far bump ×{}, budget {:.6}, time {time:.6} ≤ π/3",
            r.delta, cal.shape.far_factor, r.budget
        ),
        fingerprint: serde_json::to_value(&r).unwrap(),
    }
}

fn superconductivity() -> Outcome {
    let start = Instant::now();
    let r1 = run_superconductivity(&SuperconductivityConfig::default()).unwrap();
    let k1_elapsed = start.elapsed();
    let r2 = run_superconductivity(&SuperconductivityConfig {
        k: 2,
        ..SuperconductivityConfig::default()
    })
    .unwrap();
    let k2_elapsed = start.elapsed() - k1_elapsed;
    let time = r1.time_length.unwrap_or(f64::NAN);
    let inc = r1.increment.unwrap_or(f64::NAN);
    let k1 = r1.found
        && within(time, 1.0 / (2.0 * PI), 1e-6)
        && within(r1.budget, 0.25, 1e-12)
        && time <= r1.budget
        && within(inc, 1.0, 1e-6)
        && k1_elapsed < Duration::from_secs(1);
    let k2 = r2.pass && r2.time_length.is_some_and(|t| t <= 0.25) && k2_elapsed < Duration::from_secs(60);
    Outcome {
        pass: k1 && k2,
        detail: format!(
            "k=1 time {time:.10} (1/2π {:.10}), increment {inc:.10}, {k1_elapsed:.2?}; k=2 time {:?} ≤ {:.6}, increment {:?}, {k2_elapsed:.2?}",
            1.0 / (2.0 * PI),
            r2.time_length,
            r2.budget,
            r2.increment
        ),
        fingerprint: json!([r1, r2]),
    }
}

fn mechanical() -> Outcome {
    let r = run_mechanical(&MechanicalConfig::default()).unwrap();
    let delta = r.extras["delta_measured"];
    let time = r.time_length.unwrap_or(f64::NAN);
    Outcome {
        pass: r.found && within(delta, 1.0, 1e-3) && time <= FRAC_PI_4 + 1e-6,
        detail: format!("Δ {delta:.6}, budget {:.6}, time {time:.6}", r.budget),
        fingerprint: serde_json::to_value(&r).unwrap(),
    }
}

fn pb4_prototype() -> Outcome {
    let r = estimate_prototype(1.0, 2.0, 0.25, 128, &Pb4Config::default()).unwrap();
    let two = r.two_grid.unwrap();
    Outcome {
        pass: (3.92..=4.40).contains(&r.estimate) && two.difference < 0.1,
        detail: format!(
            "128² estimate {:.6}, 256² {:.6}, difference {:.6}, exact 4",
            r.estimate, two.fine, two.difference
        ),
        fingerprint: json!({"report": r, "f": r.f, "g": r.g}),
    }
}

fn witness() -> Outcome {
    let w = wall_witness(1.0, 2.0, 0.005, 0.01).unwrap();
    let c = w.check(0.25, 1e-3, 0.01).unwrap();
    Outcome {
        pass: c.no_chord_found
            && c.resolution <= 1e-3
            && c.seeds >= 1001
            && within(c.budget, 0.25 / 1.01 - 0.01, 1e-15)
            && c.max_slope <= c.slope_bound
            && c.separation >= 1.0 - 1e-12,
        detail: format!(
            "no chord within {:.6} over {} seeds, closest miss {:?}, Δ(u; floor, ceiling) {:.6}",
            c.budget, c.seeds, c.best_miss, c.separation
        ),
        fingerprint: json!([w, c]),
    }
}

fn reeb() -> Outcome {
    let r = run_reeb_chord(&ReebConfig::default()).unwrap();
    let c = 1.25;
    let constant = run_reeb_chord(&ReebConfig {
        factor: ReebFactor::Constant { c },
        ..ReebConfig::default()
    })
    .unwrap();
    let time = r.time_length.unwrap_or(f64::NAN);
    let ctime = constant.time_length.unwrap_or(f64::NAN);
    Outcome {
        pass: r.found && time <= FRAC_PI_4 / 1.2 + 1e-6 && within(ctime, FRAC_PI_4 / c, 1e-8),
        detail: format!(
            "time {time:.10} ≤ T/1.2 = {:.10}; constant c = {c}: {ctime:.12} vs T/c {:.12}",
            FRAC_PI_4 / 1.2,
            FRAC_PI_4 / c
        ),
        fingerprint: json!([r, constant]),
    }
}

fn properties() -> Outcome {
    let mut fails = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            fails.push(name.to_string());
        }
    };
    let anti = (0..1000).map(antisymmetry_defect).fold(0.0, f64::max);
    check("antisymmetry", anti == 0.0);
    let jacobi = (0..200).map(jacobi_defect).fold(0.0, f64::max);
    check("jacobi", jacobi <= 1e-5);
    let volume = (0..1000).map(volume_defect).fold(0.0, f64::max);
    check("volume", volume <= 1e-8);
    let mut drift = 0.0f64;
    for (name, h) in energy_systems() {
        for s in 0..5 {
            let x0 = energy_start(s, h.chart().dim(), name == "hyperbolic");
            drift = drift.max(energy_drift(&*h, &x0));
        }
    }
    check("energy", drift <= 1e-8);
    let residual = tetragon_models()
        .iter()
        .map(|&(m, t)| smoothed_residual(m, t, 0.05))
        .fold(0.0, f64::max);
    check("lagrangian", residual <= 1e-8);
    let pb4 = pb4_chain(96, 0.25, &quick_pb4());
    check(
        "pb4",
        (pb4.a - pb4.b).abs() <= 0.05 * pb4.a
            && pb4.thin_initial == pb4.thick
            && pb4.thin <= pb4.thick
            && (pb4.scaled_initial - 0.5 * pb4.a).abs() <= 1e-12 * pb4.a
            && pb4.scaled <= pb4.scaled_initial,
    );
    let chords = mean_value_chords(&[16, 64, 256]);
    let mean_margin = chords.iter().map(|(m, tau)| m - 1.0 / tau).fold(f64::INFINITY, f64::min);
    check("mean value", chords.len() == 3 && mean_margin >= -1e-6);
    let robust_margin = (0..50)
        .map(|s| {
            let (sum, g, f) = robustness(s);
            sum - (g - f.abs())
        })
        .fold(f64::INFINITY, f64::min);
    check("robustness", robust_margin >= -1e-9);
    let (auto_dist, auto_drift) = autonomized_chord();
    check("autonomization", auto_dist <= 1e-6 && auto_drift <= 1e-8);
    Outcome {
        pass: fails.is_empty(),
        detail: format!(
            "antisym {anti:e}, jacobi {jacobi:.1e}, volume {volume:.1e}, drift {drift:.1e}, residual {residual:.1e}, \
             pb4 {:.4}/{:.4} warm {}, mean-value margin {mean_margin:.3}, robustness margin {robust_margin:.1e}{}",
            pb4.a,
            pb4.b,
            pb4.thin_initial == pb4.thick,
            if fails.is_empty() { String::new() } else { format!("; failed: {}", fails.join(", ")) }
        ),
        fingerprint: json!({
            "antisymmetry": anti, "jacobi": jacobi, "volume": volume, "drift": drift,
            "residual": residual,
            "pb4": [pb4.a, pb4.b, pb4.thick, pb4.thin_initial, pb4.thin, pb4.scaled_initial, pb4.scaled],
            "chords": chords, "robustness": robust_margin, "autonomization": [auto_dist, auto_drift],
        }),
    }
}

fn line(id: usize, name: &str, pass: bool, detail: &str, elapsed: Option<Duration>) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    match elapsed {
        Some(e) => println!("criterion {id} {verdict} {name}: {detail} [{e:.2?}]"),
        None => println!("criterion {id} {verdict} {name}: {detail}"),
    }
}

fn fingerprints(threads: usize) -> Vec<String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| criteria().iter().map(|(_, _, run)| run().fingerprint.to_string()).collect())
}

fn main() {
    let mut all = true;
    let mut first = Vec::new();
    for (i, (name, limit, run)) in criteria().into_iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed < limit;
        let detail = if elapsed < limit {
            o.detail
        } else {
            format!("{}; over the {limit:.0?} runtime limit", o.detail)
        };
        line(i + 1, name, pass, &detail, Some(elapsed));
        all &= pass;
        first.push(o.fingerprint.to_string());
    }

    let wide = fingerprints(8);
    let again = fingerprints(1);
    let names: Vec<_> = criteria().iter().map(|c| c.0).collect();
    let differing: Vec<_> = (0..first.len())
        .filter(|&i| first[i] != wide[i] || first[i] != again[i])
        .map(|i| names[i])
        .collect();
    let deterministic = differing.is_empty();
    let detail = if deterministic {
        format!("criteria 1-8 identical across default, 8-thread and 1-thread runs ({} reports)", first.len())
    } else {
        format!("differences in: {}", differing.join(", "))
    };
    line(9, "determinism", deterministic, &detail, None);
    all &= deterministic;

    if !all {
        std::process::exit(1);
    }
}
