//! Reeb chords from `L` to `ψ_T(L)` for rescaled contact forms.

use std::f64::consts::FRAC_PI_4;

use tetralab::contact::ContactModel;
use tetralab::scenarios::{run_reeb_chord, ReebConfig, ReebFactor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("sphere, 1.5 + 0.3 sin", ReebConfig::default()),
        (
            "sphere, constant 2",
            ReebConfig {
                factor: ReebFactor::Constant { c: 2.0 },
                ..ReebConfig::default()
            },
        ),
        (
            "circle, 1.5 + 0.3 sin",
            ReebConfig {
                model: ContactModel::Circle,
                t: 0.25,
                ..ReebConfig::default()
            },
        ),
    ];
    for (name, cfg) in cases {
        let r = run_reeb_chord(&cfg)?;
        println!("{name}:");
        println!(
            "  C over swept region {:.6}, global min {:.6}, T/C {:.10}",
            r.extras["c_swept"], r.extras["c_global"], r.budget
        );
        println!("  time {:?}, analytic {:?}, pass {}", r.time_length, r.analytic_time, r.pass);
    }
    println!("T/1.2 at T = π/4: {:.10}", FRAC_PI_4 / 1.2);
    Ok(())
}
