//! The wall witness `u(s)`: no chord from the high wall to the low wall
//! before `T/(1 + δ2)`, and a 1-separation of floor and ceiling.

use std::time::Instant;

use tetralab::pb4::wall_witness;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let w = wall_witness(1.0, 2.0, 0.005, 0.01)?;
    println!("slope {:.6}, corner {:.6}, u(R1) = {}", w.slope, w.corner, w.value(2.0));
    let start = Instant::now();
    let c = w.check(0.25, 1e-3, 0.01)?;
    println!("max u′ on [R0, R1] {:.6} (bound {:.6})", c.max_slope, c.slope_bound);
    println!("budget {:.6}, {} high-wall seeds at h = {}", c.budget, c.seeds, c.resolution);
    println!("no chord found: {}, closest miss {:?}", c.no_chord_found, c.best_miss);
    println!("Δ(u; floor, ceiling) = {:.6} ({:.2?})", c.separation, start.elapsed());
    Ok(())
}
