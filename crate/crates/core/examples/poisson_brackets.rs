//! Poisson brackets, the Jacobi identity and the deformed volume form on
//! `ℝ²` and `ℝ⁴`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tetralab::fd;
use tetralab::phase::{poisson_bracket, volume_factor, Hamiltonian, PhaseChart, Polynomial};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plane = PhaseChart::flat(1)?;
    let p = Polynomial::coordinate(plane.clone(), 0);
    let q = Polynomial::coordinate(plane.clone(), 1);
    let p2 = Polynomial::new(plane.clone(), vec![(1.0, vec![2, 0])]);
    println!("{{p, q}}          = {}", poisson_bracket(&p, &q, &[0.3, -1.2], 0.0)?);
    println!("{{p², q}}(3, 0)   = {}", poisson_bracket(&p2, &q, &[3.0, 0.0], 0.0)?);

    let chart = PhaseChart::flat(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = Polynomial::random(chart.clone(), 3, 5, &mut rng);
    let g = Polynomial::random(chart.clone(), 3, 5, &mut rng);
    let h = Polynomial::random(chart.clone(), 3, 5, &mut rng);
    let x = [0.4, -0.2, 0.7, 0.1];
    let fg = poisson_bracket(&f, &g, &x, 0.0)?;
    let gf = poisson_bracket(&g, &f, &x, 0.0)?;
    println!("{{F, G}} + {{G, F}} = {:e}", fg + gf);

    // {F,{G,H}} + {G,{H,F}} + {H,{F,G}} with the inner bracket analytic.
    let inner = |a: &Polynomial, b: &Polynomial| {
        let (a, b) = (a.clone(), b.clone());
        move |y: &[f64]| poisson_bracket(&a, &b, y, 0.0).unwrap()
    };
    let jacobi = fd::bracket_outer(inner(&g, &h), &f, &x, 0.0)
        + fd::bracket_outer(inner(&h, &f), &g, &x, 0.0)
        + fd::bracket_outer(inner(&f, &g), &h, &x, 0.0);
    println!("Jacobi sum      = {:e}", -jacobi);

    for tau in [0.0, 0.5, 1.0] {
        let v = volume_factor(&f, &g, tau, &x, 0.0)?;
        println!(
            "τ = {tau}: det ratio {:.12}, 1 − τ{{F,G}} {:.12}, degenerate {}",
            v.determinant_ratio, v.analytic, v.degenerate
        );
    }
    println!("F(x) = {:.6}", f.value(&x, 0.0));
    Ok(())
}
