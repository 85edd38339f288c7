//! Builds the tetragon of each contact model, prints its regions and the
//! smoothed loop `γ_ε`, and checks that the smoothed surface is Lagrangian.

use tetralab::contact::ContactModel;
use tetralab::tetragon::{build_tetragon, smooth_tetragon};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let models = [
        (ContactModel::Circle, 0.25),
        (ContactModel::UnitCotangentTorus { k: 2 }, 0.25),
        (ContactModel::ContactSphere { k: 1 }, std::f64::consts::FRAC_PI_4),
        (ContactModel::ContactSphere { k: 2 }, std::f64::consts::FRAC_PI_4),
    ];
    for (model, t) in models {
        let tet = build_tetragon(model, 1.0, 2.0, t)?;
        println!("{} (T = {t:.4}), rectangle area {:.6}", model.name(), tet.rectangle_area());
        for r in tet.regions() {
            let samples = r.samples(8);
            let (patch, params) = &samples[samples.len() / 2];
            let y = r.point(*patch, params);
            println!("  {:<10} {} samples, e.g. {:?}, distance {:.1e}", r.name, samples.len(), y, r.distance(&y));
        }
        // Walls and sweeps meet along the corner curves.
        let corner = tet.floor.point(0, &vec![0.0; tet.floor.param_box().len()]);
        println!("  floor corner on high wall: {:.1e}", tet.high_wall.distance(&corner));

        let sm = smooth_tetragon(&tet, 0.05)?;
        let res = sm.lagrangian_residual(64);
        println!(
            "  smoothed ε = 0.05: area {:.6}, perimeter {:.6}, Lagrangian residual {:.1e} over {} points",
            sm.area,
            sm.perimeter(),
            res.max_abs,
            res.samples
        );
    }
    Ok(())
}
