//! Estimates `pb4+` of the circle-model tetragon (`R0 = 1`, `R1 = 2`,
//! `T = 1/4`) on a 128² grid and compares with the exact value 4.

use std::time::Instant;

use tetralab::pb4::{estimate_prototype, Pb4Config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let start = Instant::now();
    let report = estimate_prototype(1.0, 2.0, 0.25, 128, &Pb4Config::default())?;
    let two = report.two_grid.expect("two-grid run");
    println!("estimate (128²)   {:.6}", report.estimate);
    println!("estimate (256²)   {:.6}", two.fine);
    println!("two-grid diff     {:.6}", two.difference);
    println!("exact             {:.6}", report.exact.unwrap_or(f64::NAN));
    println!("base start        {:?}, best start {}", report.base_start, report.best_start);
    for s in &report.starts {
        println!("  start {}: {:.6} -> best {:.6} (last {:.6})", s.index, s.initial, s.best, s.last);
    }
    println!("elapsed           {:.2?}", start.elapsed());
    Ok(())
}
