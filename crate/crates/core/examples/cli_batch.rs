//! Runs a batch of scenarios through the configuration layer and lists the
//! written artifacts.

use tetralab::cli::{execute, parse_config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = r#"{
        "command": "scenario",
        "scenarios": [
            {"scenario": "unstable_equilibrium"},
            {"scenario": "superconductivity", "r": 0.2},
            {"scenario": "reeb_chord", "factor": {"kind": "constant", "c": 1.25}}
        ]
    }"#;
    let cfg = parse_config(text, &["scenarios.0.r1=3".to_string()])?;
    let out = std::env::temp_dir().join("tetralab-cli-batch");
    std::fs::create_dir_all(&out)?;
    let outcome = execute(&cfg, &out, 2)?;
    for line in &outcome.lines {
        println!("{line}");
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    println!("all pass: {}", outcome.pass);
    Ok(())
}
