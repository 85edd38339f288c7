//! Mechanical Hamiltonians `|p|²/2 + U(q, t)` with a time-periodic well.

use tetralab::scenarios::{run_mechanical, MechanicalConfig, MechanicalPotential};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = run_mechanical(&MechanicalConfig::default())?;
    println!(
        "well (β = 0.5, modulation ½): Δ measured {:.6}, declared {:.6}, shell max {:.3}",
        r.extras["delta_measured"], r.extras["delta_declared"], r.extras["shell_max"]
    );
    println!("  budget {:.6}, time {:?}, pass {}", r.budget, r.time_length, r.pass);

    let free = run_mechanical(&MechanicalConfig {
        beta: 0.0,
        potential: MechanicalPotential::Zero,
        ..MechanicalConfig::default()
    })?;
    println!("free particle: Δ {:.6}, budget {:.6}, time {:?}", free.gamma, free.budget, free.time_length);

    // A well of depth ½ modulated by ½ only reaches −¼ on the shell.
    let overclaimed = MechanicalConfig {
        potential: MechanicalPotential::Well {
            depth: 0.5,
            modulation: 0.5,
        },
        ..MechanicalConfig::default()
    };
    match run_mechanical(&overclaimed) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
