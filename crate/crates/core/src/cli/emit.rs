//! Command execution and report emission.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{ChordRunConfig, CommandKind, HamiltonianSpec, Pb4RunConfig, RegionName, RunConfig, TetragonRunConfig};
use super::CliError;
use crate::chord::{find_chord, ChordReport};
use crate::contact::ContactModel;
use crate::pb4::{
    estimate_pb4_plus, estimate_prototype, prototype_exact, prototype_problem, wall_witness, Grid,
};
use crate::phase::{HamiltonianRef, Polynomial};
use crate::scenarios::{self, run_scenario, ScenarioConfig};
use crate::tetragon::{build_tetragon, smooth_tetragon, Region, Tetragon};

/// Envelope written as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport<T> {
    pub command: String,
    pub version: String,
    /// The resolved configuration of this run.
    pub config: Value,
    pub pass: bool,
    pub summary: Value,
    pub payload: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub delta: f64,
    pub budget: f64,
    pub time_length: Option<f64>,
    pub increment: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pb4Summary {
    pub estimate: f64,
    pub exact: f64,
    pub two_grid_difference: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordSummary {
    pub found: bool,
    pub time_length: Option<f64>,
    pub budget: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TetragonPayload {
    pub tetragon: Tetragon,
    pub rectangle_area: f64,
    pub smoothing: Option<f64>,
    pub smoothed_area: Option<f64>,
    pub perimeter: Option<f64>,
    pub lagrangian_residual: Option<f64>,
    pub residual_samples: usize,
    pub max_residual: f64,
}

/// What a command produced.
#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub pass: bool,
    pub files: Vec<PathBuf>,
    /// One human-readable summary line per run.
    pub lines: Vec<String>,
}

impl RunOutcome {
    pub fn default_pass() -> Self {
        Self {
            pass: true,
            ..Self::default()
        }
    }
}

#[derive(Serialize)]
struct Timing {
    threads: usize,
    total_seconds: f64,
    runs: Vec<(String, f64)>,
}

#[derive(Serialize, Deserialize)]
struct IndexEntry {
    index: usize,
    scenario: String,
    report: String,
    pass: bool,
}

#[derive(Serialize, Deserialize)]
struct Index {
    command: String,
    version: String,
    pass: bool,
    runs: Vec<IndexEntry>,
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }
}

fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

fn envelope<T: Serialize>(kind: CommandKind, config: &impl Serialize, pass: bool, summary: &impl Serialize, payload: T) -> Result<RunReport<T>, CliError> {
    Ok(RunReport {
        command: kind.name().into(),
        version: version(),
        config: serde_json::to_value(config)?,
        pass,
        summary: serde_json::to_value(summary)?,
        payload,
    })
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Threads(e.to_string()))
}

/// Runs `cfg` on `threads` threads and writes its artifacts into `out`.
pub fn execute(cfg: &RunConfig, out: &Path, threads: usize) -> Result<RunOutcome, CliError> {
    cfg.check_sections()?;
    let pool = pool(threads)?;
    let mut w = Writer {
        dir: out.to_path_buf(),
        files: Vec::new(),
    };
    let start = Instant::now();
    let (pass, lines, runs) = pool.install(|| match cfg.command {
        CommandKind::Scenario => scenario_command(&cfg.scenario_list(), &mut w),
        CommandKind::Pb4 => pb4_command(cfg.pb4.as_ref().expect("checked section"), cfg.seed, &mut w),
        CommandKind::Chord => chord_command(cfg.chord.as_ref().expect("checked section"), &mut w),
        CommandKind::Tetragon => tetragon_command(cfg.tetragon.as_ref().expect("checked section"), &mut w),
    })?;
    w.json(
        "timing.json",
        &Timing {
            threads,
            total_seconds: start.elapsed().as_secs_f64(),
            runs,
        },
    )?;
    Ok(RunOutcome {
        pass,
        files: w.files,
        lines,
    })
}

type CommandResult = Result<(bool, Vec<String>, Vec<(String, f64)>), CliError>;

fn scenario_command(list: &[ScenarioConfig], w: &mut Writer) -> CommandResult {
    let results: Vec<_> = list
        .par_iter()
        .map(|c| {
            let t = Instant::now();
            (run_scenario(c), t.elapsed().as_secs_f64())
        })
        .collect();
    let single = list.len() == 1;
    let mut index = Index {
        command: "scenario".into(),
        version: version(),
        pass: true,
        runs: Vec::new(),
    };
    let (mut lines, mut runs) = (Vec::new(), Vec::new());
    for (i, (c, (result, secs))) in list.iter().zip(results).enumerate() {
        let report = result?;
        let stem = if single { String::new() } else { format!("-{i}-{}", c.name()) };
        let name = format!("report{stem}.json");
        let summary = ScenarioSummary {
            scenario: report.scenario.clone(),
            delta: report.delta,
            budget: report.budget,
            time_length: report.time_length,
            increment: report.increment,
            pass: report.pass,
        };
        if let Some(chord) = report.chord() {
            let k = report.model.k();
            let norm: fn(&[f64], usize) -> f64 = match report.model {
                ContactModel::ContactSphere { .. } => |y, _| y.iter().map(|v| v * v).sum::<f64>().sqrt(),
                _ => |y, k| y[..k].iter().map(|v| v * v).sum::<f64>().sqrt(),
            };
            let label = if matches!(report.model, ContactModel::ContactSphere { .. }) { "|(p,q)|" } else { "|p|" };
            w.text(&format!("trajectory{stem}.csv"), &trajectory_csv(&chord.trajectory.times, &chord.trajectory.states))?;
            w.text(
                &format!("plot{stem}.dat"),
                &series("t", label, chord.trajectory.times.iter().zip(&chord.trajectory.states).map(|(t, y)| (*t, norm(y, k)))),
            )?;
        }
        lines.push(format!(
            "{} {}: delta={} budget={} time_length={} increment={}",
            if report.pass { "PASS" } else { "FAIL" },
            report.scenario,
            report.delta,
            report.budget,
            fmt_opt(report.time_length),
            fmt_opt(report.increment),
        ));
        index.pass &= report.pass;
        index.runs.push(IndexEntry {
            index: i,
            scenario: report.scenario.clone(),
            report: name.clone(),
            pass: report.pass,
        });
        let pass = report.pass;
        w.json(&name, &envelope(CommandKind::Scenario, c, pass, &summary, report)?)?;
        runs.push((name, secs));
    }
    w.json("index.json", &index)?;
    Ok((index.pass, lines, runs))
}

fn pb4_command(cfg: &Pb4RunConfig, seed: Option<u64>, w: &mut Writer) -> CommandResult {
    let mut opt = cfg.optimizer.clone();
    if let Some(s) = seed {
        opt.seed = s;
    }
    let t = Instant::now();
    let report = if cfg.two_grid {
        estimate_prototype(cfg.r0, cfg.r1, cfg.t, cfg.n, &opt)?
    } else {
        let mut r = estimate_pb4_plus(&prototype_problem(cfg.r0, cfg.r1, cfg.t, cfg.n, 1)?, &opt)?;
        r.exact = Some(prototype_exact(cfg.r0, cfg.r1, cfg.t));
        r
    };
    let secs = t.elapsed().as_secs_f64();
    let exact = prototype_exact(cfg.r0, cfg.r1, cfg.t);
    let diff = report.two_grid.as_ref().map(|g| g.difference);
    let ratio = report.estimate / exact;
    let pass = ratio >= cfg.relative_band[0]
        && ratio <= cfg.relative_band[1]
        && diff.is_none_or(|d| d < cfg.max_two_grid_difference);
    w.text("F.csv", &report.field_csv('F'))?;
    w.text("G.csv", &report.field_csv('G'))?;
    w.text("plot-F.dat", &series("s", "u", half_level(&report.grid, &report.f).into_iter()))?;
    w.text("plot-G.dat", &series("s", "u", half_level(&report.grid, &report.g).into_iter()))?;
    let line = format!(
        "{} pb4: estimate={} exact={} two_grid_difference={}",
        if pass { "PASS" } else { "FAIL" },
        report.estimate,
        exact,
        fmt_opt(diff)
    );
    let summary = Pb4Summary {
        estimate: report.estimate,
        exact,
        two_grid_difference: diff,
        pass,
    };
    let cfg_echo = Pb4RunConfig {
        optimizer: opt,
        ..cfg.clone()
    };
    w.json("report.json", &envelope(CommandKind::Pb4, &cfg_echo, pass, &summary, report)?)?;
    Ok((pass, vec![line], vec![("report.json".into(), secs)]))
}

fn region<'a>(tet: &'a Tetragon, name: RegionName) -> &'a Region {
    match name {
        RegionName::Floor => &tet.floor,
        RegionName::Ceiling => &tet.ceiling,
        RegionName::LowWall => &tet.low_wall,
        RegionName::HighWall => &tet.high_wall,
    }
}

/// Builds the Hamiltonian of a `chord find` run.
pub fn build_hamiltonian(cfg: &ChordRunConfig) -> Result<HamiltonianRef, CliError> {
    let model = cfg.model;
    let sphere = |what: &str| match model {
        ContactModel::ContactSphere { k } => Ok(k),
        _ => Err(CliError::Validation(format!("{what} needs the contact_sphere model"))),
    };
    Ok(match &cfg.hamiltonian {
        HamiltonianSpec::Hyperbolic => scenarios::hyperbolic(sphere("hyperbolic")?),
        HamiltonianSpec::Mechanical { potential } => scenarios::mechanical(sphere("mechanical")?, cfg.r0, *potential),
        HamiltonianSpec::CosinePotential { shift } => scenarios::cosine_potential(model, *shift),
        HamiltonianSpec::ReebContact { factor } => {
            if factor.global_min() <= 0.0 {
                return Err(CliError::Validation("the Reeb factor must be positive".into()));
            }
            scenarios::contact_hamiltonian(model, *factor)
        }
        HamiltonianSpec::WallWitness { delta1, delta2 } => {
            if model != ContactModel::Circle {
                return Err(CliError::Validation("wall_witness needs the circle model".into()));
            }
            wall_witness(cfg.r0, cfg.r1, *delta1, *delta2)?.hamiltonian()
        }
        HamiltonianSpec::Polynomial { terms } => {
            let chart = model.ambient_chart();
            if let Some((_, e)) = terms.iter().find(|(_, e)| e.len() != chart.dim()) {
                return Err(CliError::Validation(format!(
                    "polynomial exponent vector of length {} on a chart of dimension {}",
                    e.len(),
                    chart.dim()
                )));
            }
            std::sync::Arc::new(Polynomial::new(chart, terms.clone()))
        }
    })
}

fn chord_command(cfg: &ChordRunConfig, w: &mut Writer) -> CommandResult {
    let tet = build_tetragon(cfg.model, cfg.r0, cfg.r1, cfg.t)?;
    let ham = build_hamiltonian(cfg)?;
    let t = Instant::now();
    let report: ChordReport = find_chord(&*ham, region(&tet, cfg.from), region(&tet, cfg.to), cfg.budget, &cfg.search)?;
    let secs = t.elapsed().as_secs_f64();
    let chord = report.chord();
    let pass = chord.is_some();
    if let Some(c) = chord {
        let k = cfg.model.k();
        w.text("trajectory.csv", &trajectory_csv(&c.trajectory.times, &c.trajectory.states))?;
        w.text(
            "plot.dat",
            &series(
                "t",
                "|p|",
                c.trajectory
                    .times
                    .iter()
                    .zip(&c.trajectory.states)
                    .map(|(t, y)| (*t, y[..k].iter().map(|v| v * v).sum::<f64>().sqrt())),
            ),
        )?;
    }
    let summary = ChordSummary {
        found: pass,
        time_length: chord.map(|c| c.time_length),
        budget: cfg.budget,
        pass,
    };
    let line = format!(
        "{} chord: time_length={} budget={}",
        if pass { "PASS" } else { "FAIL" },
        fmt_opt(summary.time_length),
        cfg.budget
    );
    w.json("report.json", &envelope(CommandKind::Chord, cfg, pass, &summary, report)?)?;
    Ok((pass, vec![line], vec![("report.json".into(), secs)]))
}

fn tetragon_command(cfg: &TetragonRunConfig, w: &mut Writer) -> CommandResult {
    let t = Instant::now();
    let tet = build_tetragon(cfg.model, cfg.r0, cfg.r1, cfg.t)?;
    let mut payload = TetragonPayload {
        rectangle_area: tet.rectangle_area(),
        tetragon: tet.clone(),
        smoothing: cfg.smoothing,
        smoothed_area: None,
        perimeter: None,
        lagrangian_residual: None,
        residual_samples: 0,
        max_residual: cfg.max_residual,
    };
    let loop_points: Vec<(f64, f64)> = match cfg.smoothing {
        Some(eps) => {
            let sm = smooth_tetragon(&tet, eps)?;
            let res = sm.lagrangian_residual(cfg.residual_samples);
            payload.smoothed_area = Some(sm.area);
            payload.perimeter = Some(sm.perimeter());
            payload.lagrangian_residual = Some(res.max_abs);
            payload.residual_samples = res.samples;
            (0..=400).map(|i| sm.loop_point(i as f64 / 400.0).0).collect()
        }
        None => vec![(tet.r0, 0.0), (tet.r1, 0.0), (tet.r1, tet.t), (tet.r0, tet.t), (tet.r0, 0.0)],
    };
    let secs = t.elapsed().as_secs_f64();
    let pass = payload.lagrangian_residual.is_none_or(|r| r <= cfg.max_residual);
    let mut csv = String::from("region,patch");
    for i in 0..tet.model.ambient_chart().dim() {
        csv.push_str(&format!(",x{i}"));
    }
    csv.push('\n');
    for r in tet.regions() {
        for (patch, params) in r.samples(cfg.samples) {
            csv.push_str(&format!("{},{patch}", r.name));
            for v in r.point(patch, &params) {
                csv.push_str(&format!(",{v}"));
            }
            csv.push('\n');
        }
    }
    w.text("regions.csv", &csv)?;
    w.text("plot.dat", &series("s", "t", loop_points.into_iter()))?;
    let line = format!(
        "{} tetragon {}: area={} residual={}",
        if pass { "PASS" } else { "FAIL" },
        tet.model.name(),
        payload.smoothed_area.unwrap_or(payload.rectangle_area),
        fmt_opt(payload.lagrangian_residual)
    );
    let summary = serde_json::json!({
        "model": tet.model.name(),
        "rectangle_area": payload.rectangle_area,
        "smoothed_area": payload.smoothed_area,
        "lagrangian_residual": payload.lagrangian_residual,
        "pass": pass,
    });
    w.json("report.json", &envelope(CommandKind::Tetragon, cfg, pass, &summary, payload)?)?;
    Ok((pass, vec![line], vec![("report.json".into(), secs)]))
}

/// Semantic checks that need no search or optimization.
pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.check_sections()?;
    match cfg.command {
        CommandKind::Scenario => {
            for s in cfg.scenario_list() {
                scenarios::validate_scenario(&s)?;
            }
        }
        CommandKind::Pb4 => {
            let p = cfg.pb4.as_ref().expect("checked section");
            prototype_problem(p.r0, p.r1, p.t, p.n, 1)?;
            if !(p.relative_band[0] <= 1.0 && 1.0 <= p.relative_band[1]) {
                return Err(CliError::Validation("relative_band must contain 1".into()));
            }
        }
        CommandKind::Chord => {
            let c = cfg.chord.as_ref().expect("checked section");
            build_tetragon(c.model, c.r0, c.r1, c.t)?;
            build_hamiltonian(c)?;
            if !(c.budget > 0.0) {
                return Err(CliError::Validation(format!("budget must be positive, got {}", c.budget)));
            }
        }
        CommandKind::Tetragon => {
            let c = cfg.tetragon.as_ref().expect("checked section");
            let tet = build_tetragon(c.model, c.r0, c.r1, c.t)?;
            if let Some(eps) = c.smoothing {
                smooth_tetragon(&tet, eps)?;
            }
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

fn trajectory_csv(times: &[f64], states: &[Vec<f64>]) -> String {
    let dim = states.first().map_or(0, Vec::len);
    let mut out = String::from("t");
    for i in 0..dim {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    for (t, y) in times.iter().zip(states) {
        out.push_str(&t.to_string());
        for v in y {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Two-column whitespace-separated series with a commented header.
fn series(a: &str, b: &str, points: impl Iterator<Item = (f64, f64)>) -> String {
    let mut out = format!("# {a} {b}\n");
    for (x, y) in points {
        out.push_str(&format!("{x} {y}\n"));
    }
    out
}

/// Points where a grid field crosses 1/2, interpolated along grid edges.
fn half_level(grid: &Grid, field: &[f64]) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    let cross = |a: f64, b: f64| (a - 0.5) * (b - 0.5) < 0.0;
    for j in 0..grid.nu {
        for i in 0..grid.ns {
            let v = field[grid.idx(i, j)];
            if i + 1 < grid.ns {
                let r = field[grid.idx(i + 1, j)];
                if cross(v, r) {
                    let f = (0.5 - v) / (r - v);
                    pts.push((grid.s(i) + f * grid.ds(), grid.u(j)));
                }
            }
            if j + 1 < grid.nu {
                let up = field[grid.idx(i, j + 1)];
                if cross(v, up) {
                    let f = (0.5 - v) / (up - v);
                    pts.push((grid.s(i), grid.u(j) + f * grid.du()));
                }
            }
        }
    }
    pts
}
