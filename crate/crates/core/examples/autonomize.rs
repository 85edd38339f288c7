//! Autonomization `H = G(x, θ) + r`: the projection of an `H`-trajectory is
//! the `G`-trajectory started at time `θ(0)`, and `H` is conserved.

use tetralab::integrate::{integrate, IntegratorConfig};
use tetralab::phase::{autonomize, Hamiltonian};
use tetralab::scenarios::{mechanical, MechanicalPotential};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = mechanical(1, 1.0, MechanicalPotential::Well { depth: 1.0, modulation: 0.5 });
    let h = autonomize(g.clone())?;
    let (x0, t0, t1) = ([0.3, 0.8], 0.2, 1.7);
    let cfg = IntegratorConfig::with_tol(1e-11);

    let direct = integrate(&*g, &x0, t0, t1, cfg)?;
    let ext0 = h.join(&x0, 0.0, t0);
    let lifted = integrate(&h, &ext0, 0.0, t1 - t0, cfg)?;
    let (_, yd) = direct.last();
    let (_, ye) = lifted.last();
    let (x, r, theta) = h.split(ye);
    let gap = x.iter().zip(yd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("G-trajectory end {yd:?}");
    println!("projection end   {x:?} (max gap {gap:.1e})");
    println!("θ(end) = {theta:.10}, expected {:.10}", (t1 % 1.0));
    println!(
        "H drift {:.1e}, r = G(x0, t0) − G(x, t) error {:.1e}",
        (h.value(ye, 0.0) - h.value(&ext0, 0.0)).abs(),
        (r - (g.value(&x0, t0) - g.value(yd, t1))).abs()
    );
    Ok(())
}
