//! Superconductivity channels for `U(q) = Π cos 2πq_i` on `T*𝕋¹` and `T*𝕋²`.

use std::f64::consts::PI;
use std::time::Instant;

use tetralab::scenarios::{run_superconductivity, SuperconductivityConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in [1, 2] {
        let start = Instant::now();
        let r = run_superconductivity(&SuperconductivityConfig {
            k,
            ..SuperconductivityConfig::default()
        })?;
        println!("k = {k}: α = {:.6}, β = {:.6}, γ = {:.6}", r.extras["alpha"], r.extras["beta"], r.gamma);
        println!("  budget {:.6}, time {:?} (1/2π = {:.10})", r.budget, r.time_length, 1.0 / (2.0 * PI));
        if let Some(c) = r.chord() {
            println!("  from {:?} to {:?}", c.start, c.end);
        }
        println!("  |p| increment {:?}, pass {} ({:.2?})", r.increment, r.pass, start.elapsed());
    }
    let shifted = run_superconductivity(&SuperconductivityConfig {
        potential_shift: 3.0,
        ..SuperconductivityConfig::default()
    })?;
    println!("shifted U: γ = {:.6}, time {:?}", shifted.gamma, shifted.time_length);
    Ok(())
}
