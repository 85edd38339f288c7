//! Chords near the hyperbolic equilibrium `H = (|p|² − |q|²)/2` on `ℂ`,
//! unperturbed and with a calibrated wall perturbation.

use std::time::Instant;

use tetralab::scenarios::{run_unstable_equilibrium, EquilibriumConfig, PerturbationSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let start = Instant::now();
    let r = run_unstable_equilibrium(&EquilibriumConfig::default())?;
    let c = r.chord().expect("chord");
    println!("unperturbed: γ = {:.6}, budget {:.6}", r.gamma, r.budget);
    println!("  time {:.10} (½ ln 2 = {:.10})", c.time_length, 0.5 * 2f64.ln());
    println!("  start {:?} end {:?}", c.start, c.end);
    println!("  |z| increment {:.10}, pass {} ({:.2?})", r.increment.unwrap(), r.pass, start.elapsed());

    let start = Instant::now();
    let cfg = EquilibriumConfig {
        perturbation: Some(PerturbationSpec::default()),
        ..EquilibriumConfig::default()
    };
    let r = run_unstable_equilibrium(&cfg)?;
    let cal = r.perturbation.as_ref().expect("calibrated");
    println!("perturbed: amplitude {:.6} (far bump ×{}), δ = {:.6}", cal.amplitude, cal.shape.far_factor, r.delta);
    println!("  Δ(H + F) = {:.6}, budget {:.6} (π/3 = {:.6})", r.delta_total.unwrap(), r.budget, std::f64::consts::FRAC_PI_3);
    println!("  time {:?}, pass {} ({:.2?})", r.time_length, r.pass, start.elapsed());
    Ok(())
}
