//! Strict JSON run configurations with dotted-path overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::chord::ChordSearchConfig;
use crate::contact::ContactModel;
use crate::pb4::Pb4Config;
use crate::scenarios::{MechanicalPotential, ReebFactor, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Scenario,
    Pb4,
    Chord,
    Tetragon,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Scenario => "scenario",
            CommandKind::Pb4 => "pb4",
            CommandKind::Chord => "chord",
            CommandKind::Tetragon => "tetragon",
        }
    }
}

/// One file, one command. Exactly the section matching `command` is read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Overrides the optimizer seed of `pb4` runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub verbosity: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scenarios: Vec<ScenarioConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pb4: Option<Pb4RunConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chord: Option<ChordRunConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tetragon: Option<TetragonRunConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Pb4RunConfig {
    pub r0: f64,
    pub r1: f64,
    pub t: f64,
    /// Nodes per side of the coarse grid.
    pub n: usize,
    /// Also run `2n` and report the difference.
    pub two_grid: bool,
    pub max_two_grid_difference: f64,
    /// Accepted `estimate / exact` range.
    pub relative_band: [f64; 2],
    pub optimizer: Pb4Config,
}

impl Default for Pb4RunConfig {
    fn default() -> Self {
        Self {
            r0: 1.0,
            r1: 2.0,
            t: 0.25,
            n: 128,
            two_grid: true,
            max_two_grid_difference: 0.1,
            relative_band: [0.98, 1.10],
            optimizer: Pb4Config::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionName {
    Floor,
    Ceiling,
    LowWall,
    HighWall,
}

/// Built-in Hamiltonians for `chord find`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    /// `(|p|² − |q|²)/2`.
    Hyperbolic,
    /// `Π cos 2πq_i + shift`.
    CosinePotential { shift: f64 },
    /// `|p|²/2 + U(q, t)`.
    Mechanical { potential: MechanicalPotential },
    /// The wall witness `u(s)` (circle model only).
    WallWitness { delta1: f64, delta2: f64 },
    /// `s·f` for a Reeb speed factor `f`.
    ReebContact { factor: ReebFactor },
    /// Sum of `c·Π x_i^{e_i}` in chart coordinates.
    Polynomial { terms: Vec<(f64, Vec<u32>)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChordRunConfig {
    pub model: ContactModel,
    pub r0: f64,
    pub r1: f64,
    pub t: f64,
    pub hamiltonian: HamiltonianSpec,
    pub from: RegionName,
    pub to: RegionName,
    pub budget: f64,
    pub search: ChordSearchConfig,
}

impl Default for ChordRunConfig {
    fn default() -> Self {
        Self {
            model: ContactModel::ContactSphere { k: 1 },
            r0: 1.0,
            r1: 2.0,
            t: std::f64::consts::FRAC_PI_4,
            hamiltonian: HamiltonianSpec::Hyperbolic,
            from: RegionName::Floor,
            to: RegionName::Ceiling,
            budget: std::f64::consts::FRAC_PI_4,
            search: ChordSearchConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TetragonRunConfig {
    pub model: ContactModel,
    pub r0: f64,
    pub r1: f64,
    pub t: f64,
    /// Corner radius of `γ_ε`; no smoothing when absent.
    pub smoothing: Option<f64>,
    /// Sample points per region in the CSV export.
    pub samples: usize,
    pub residual_samples: usize,
    pub max_residual: f64,
}

impl Default for TetragonRunConfig {
    fn default() -> Self {
        Self {
            model: ContactModel::ContactSphere { k: 1 },
            r0: 1.0,
            r1: 2.0,
            t: std::f64::consts::FRAC_PI_4,
            smoothing: Some(0.05),
            samples: 64,
            residual_samples: 64,
            max_residual: 1e-8,
        }
    }
}

impl RunConfig {
    /// Scenario list, whether given as `scenario` or `scenarios`.
    pub fn scenario_list(&self) -> Vec<ScenarioConfig> {
        self.scenario.iter().chain(&self.scenarios).cloned().collect()
    }

    /// Checks that exactly the section named by `command` is present.
    pub fn check_sections(&self) -> Result<(), CliError> {
        let present = [
            ("scenario", self.scenario.is_some() || !self.scenarios.is_empty()),
            ("pb4", self.pb4.is_some()),
            ("chord", self.chord.is_some()),
            ("tetragon", self.tetragon.is_some()),
        ];
        let want = self.command.name();
        for (name, here) in present {
            if name == want && !here {
                return Err(CliError::Validation(format!("command `{want}` needs a `{want}` section")));
            }
            if name != want && here {
                return Err(CliError::Validation(format!(
                    "section `{name}` does not belong to command `{want}`"
                )));
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::Validation("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// Applies `path.to.key=value` overrides; `value` is parsed as JSON and
/// falls back to a string. Numeric segments index arrays.
pub fn apply_overrides(root: &mut Value, overrides: &[String]) -> Result<(), CliError> {
    for spec in overrides {
        let (path, raw) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Override(format!("`{spec}` is not of the form key=value")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut node = &mut *root;
        let keys: Vec<&str> = path.split('.').collect();
        for (i, key) in keys.iter().enumerate() {
            if key.is_empty() {
                return Err(CliError::Override(format!("empty segment in `{path}`")));
            }
            let last = i + 1 == keys.len();
            node = match node {
                Value::Array(items) => {
                    let idx: usize = key
                        .parse()
                        .map_err(|_| CliError::Override(format!("`{key}` in `{path}` must index an array")))?;
                    let len = items.len();
                    items
                        .get_mut(idx)
                        .ok_or_else(|| CliError::Override(format!("index {idx} out of range ({len}) in `{path}`")))?
                }
                Value::Object(map) => map
                    .entry(key.to_string())
                    .or_insert_with(|| if last { Value::Null } else { Value::Object(Default::default()) }),
                _ => {
                    return Err(CliError::Override(format!(
                        "`{}` in `{path}` is not an object",
                        keys[..i].join(".")
                    )))
                }
            };
        }
        *node = value;
    }
    Ok(())
}

/// Reads, overrides and strictly parses a run configuration.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, overrides)
}

pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| parse_error(None, String::new(), e))?;
    let cfg: RunConfig = if overrides.is_empty() {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| located(&value, Some(text), e))?
    } else {
        apply_overrides(&mut value, overrides)?;
        serde_path_to_error::deserialize(value.clone()).map_err(|e| located(&value, None, e))?
    };
    cfg.check_sections()?;
    Ok(cfg)
}

/// Builds a parse error with the deepest key path available. Scenario
/// blocks are internally tagged, so their inner paths are recovered by
/// re-parsing the block as its concrete variant.
fn located(root: &Value, text: Option<&str>, e: serde_path_to_error::Error<serde_json::Error>) -> CliError {
    let mut key = e.path().to_string();
    let inner = e.into_inner();
    let line = (inner.line() > 0).then_some(inner.line());
    let node = key
        .split('.')
        .try_fold(root, |v, seg| match seg.strip_suffix(']').and_then(|s| s.split_once('[')) {
            Some((name, idx)) => v.get(name)?.get(idx.parse::<usize>().ok()?),
            None => v.get(seg),
        });
    if let Some(Value::Object(map)) = node {
        if let Some(Value::String(tag)) = map.get("scenario") {
            let mut body = map.clone();
            body.remove("scenario");
            let sub = match tag.as_str() {
                "superconductivity" => variant::<crate::scenarios::SuperconductivityConfig>(body),
                "unstable_equilibrium" => variant::<crate::scenarios::EquilibriumConfig>(body),
                "mechanical" => variant::<crate::scenarios::MechanicalConfig>(body),
                "reeb_chord" => variant::<crate::scenarios::ReebConfig>(body),
                _ => None,
            };
            if let Some((path, err)) = sub {
                key = format!("{key}.{path}");
                return parse_error(line.map(|l| key_line(text, &key, l)), key, err);
            }
        }
    }
    key = with_field(key, &inner);
    parse_error(line.map(|l| key_line(text, &key, l)), key, inner)
}

fn variant<T: serde::de::DeserializeOwned>(body: serde_json::Map<String, Value>) -> Option<(String, serde_json::Error)> {
    let err = serde_path_to_error::deserialize::<_, T>(Value::Object(body)).err()?;
    let mut path = err.path().to_string();
    let inner = err.into_inner();
    path = with_field(path, &inner);
    Some((path, inner))
}

/// Appends the offending field of an unknown-field error to `path`.
fn with_field(path: String, e: &serde_json::Error) -> String {
    match unknown_field(e) {
        Some(f) if path.is_empty() || path == "." => f,
        Some(f) if !path.ends_with(&f) => format!("{path}.{f}"),
        _ => path,
    }
}

fn unknown_field(e: &serde_json::Error) -> Option<String> {
    let msg = e.to_string();
    let rest = msg.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

/// Line of the last key segment at or before `line`, falling back to `line`.
fn key_line(text: Option<&str>, key: &str, line: usize) -> usize {
    let Some(text) = text else { return line };
    let last = key.rsplit('.').next().unwrap_or(key);
    let needle = format!("\"{}\"", last.split('[').next().unwrap_or(last));
    text.lines()
        .take(line)
        .enumerate()
        .filter(|(_, l)| l.contains(&needle))
        .map(|(i, _)| i + 1)
        .last()
        .unwrap_or(line)
}

fn parse_error(line: Option<usize>, key: String, e: serde_json::Error) -> CliError {
    let line = line.or((e.line() > 0).then_some(e.line()));
    let key = if key.is_empty() || key == "." { None } else { Some(key) };
    CliError::Parse {
        line,
        key,
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_names_line_and_path() {
        let text = "{\n  \"command\": \"scenario\",\n  \"scenario\": {\n    \"scenario\": \"mechanical\",\n    \"bta\": 0.5\n  }\n}";
        let err = parse_config(text, &[]).unwrap_err();
        let CliError::Parse { line, key, .. } = &err else { panic!("{err}") };
        assert_eq!(*line, Some(5));
        assert_eq!(key.as_deref(), Some("scenario.bta"));
        let text = "{\n  \"command\": \"scenario\",\n  \"scenarios\": [\n    {\"scenario\": \"superconductivity\"},\n    {\"scenario\": \"mechanical\",\n     \"r0\": \"x\"}\n  ]\n}";
        let CliError::Parse { line, key, .. } = parse_config(text, &[]).unwrap_err() else { panic!() };
        assert_eq!(key.as_deref(), Some("scenarios[1].r0"));
        assert_eq!(line, Some(6));
    }

    #[test]
    fn overrides_reach_nested_leaves() {
        let text = r#"{"command": "scenario", "scenarios": [{"scenario": "unstable_equilibrium"}]}"#;
        let cfg = parse_config(text, &["scenarios.0.r1=3".into(), "threads=2".into()]).unwrap();
        let ScenarioConfig::UnstableEquilibrium(e) = &cfg.scenarios[0] else { panic!() };
        assert_eq!(e.r1, 3.0);
        assert_eq!(cfg.threads, Some(2));
        assert!(parse_config(text, &["scenarios.5.r1=3".into()]).is_err());
    }

    #[test]
    fn sections_must_match_command() {
        assert!(parse_config(r#"{"command": "pb4"}"#, &[]).is_err());
        assert!(parse_config(r#"{"command": "pb4", "pb4": {}, "chord": {}}"#, &[]).is_err());
        assert!(parse_config(r#"{"command": "pb4", "pb4": {}}"#, &[]).is_ok());
    }
}
