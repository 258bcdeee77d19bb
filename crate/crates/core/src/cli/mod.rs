//! Configuration-driven front end shared by the `ris-smbm` binary.
//!
//! # Configuration files
//!
//! A configuration is a TOML document with one table per experiment; the
//! table name becomes the experiment name and the prefix of every output
//! file. Recognized keys:
//!
//! | key                | type           | default      |
//! |--------------------|----------------|--------------|
//! | `scheme`           | string         | `"RIS-SMBM"` |
//! | `modulation_order` | integer        | required     |
//! | `num_tx_antennas`  | integer        | `1`          |
//! | `num_rf_mirrors`   | integer        | `0`          |
//! | `num_ris_elements` | integer        | required     |
//! | `detector`         | `"ml"`/`"elc"` | `"ml"`       |
//! | `start_db`, `stop_db`, `step_db` | float | required unless `snr_db` is given |
//! | `snr_db`           | float array    | explicit grid, replaces start/stop/step |
//! | `seed`             | integer        | `1`          |
//! | `min_bit_errors`   | integer        | `200`        |
//! | `max_trials`       | integer        | `10000000`   |
//! | `bound_samples`    | integer        | `1000`       |
//! | `workers`          | integer        | `0` (all cores) |
//!
//! `scheme = "RIS-SM"` ignores the mirror count and `"RIS-MBM"` the antenna
//! count. Every run echoes the effective experiment to `<name>_config.json`,
//! which is itself a valid configuration file.

pub mod presets;
pub mod report;

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{aber_bound, BoundMode, Scheme};
use crate::detect::Detector;
use crate::error::Error;
use crate::modulation::{build_constellation, SmbmConfig};
use crate::simkit::{benchmark_config, sweep, SimPlan, StopRule};

/// Failure of a CLI command, mapped onto the process exit status.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Contract(_) => CliError::Config(e.to_string()),
            Error::UnsupportedSize(_) | Error::UnsupportedScheme(_) => CliError::Unsupported(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn default_scheme() -> Scheme {
    Scheme::RisSmbm
}
fn default_one_usize() -> usize {
    1
}
fn default_detector() -> Detector {
    Detector::Ml
}
fn default_seed() -> u64 {
    1
}
fn default_min_errors() -> u64 {
    StopRule::default().min_bit_errors
}
fn default_max_trials() -> u64 {
    StopRule::default().max_trials
}
fn default_bound_samples() -> usize {
    1000
}

/// One experiment section as written in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    pub modulation_order: usize,
    #[serde(default = "default_one_usize")]
    pub num_tx_antennas: usize,
    #[serde(default)]
    pub num_rf_mirrors: u32,
    pub num_ris_elements: usize,
    #[serde(default = "default_detector")]
    pub detector: Detector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "snr_list")]
    pub snr_db: Option<Vec<f64>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_min_errors")]
    pub min_bit_errors: u64,
    #[serde(default = "default_max_trials")]
    pub max_trials: u64,
    #[serde(default = "default_bound_samples")]
    pub bound_samples: usize,
    #[serde(default)]
    pub workers: usize,
}

/// JSON has no infinities, so non-finite grid values travel as the strings
/// `"inf"` and `"-inf"`; plain numbers are accepted everywhere.
mod snr_list {
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Value {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        let items: Option<Vec<Value>> = v.as_ref().map(|list| {
            list.iter().map(|&x| if x.is_finite() { Value::Number(x) } else { Value::Text(format!("{x}")) }).collect()
        });
        items.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        let items: Option<Vec<Value>> = Option::deserialize(d)?;
        items
            .map(|list| {
                list.into_iter()
                    .map(|v| match v {
                        Value::Number(x) => Ok(x),
                        Value::Text(t) => match t.as_str() {
                            "inf" | "+inf" => Ok(f64::INFINITY),
                            "-inf" => Ok(f64::NEG_INFINITY),
                            _ => Err(de::Error::custom(format!("invalid snr_db entry '{t}'"))),
                        },
                    })
                    .collect()
            })
            .transpose()
    }
}

/// Command-line overrides applied on top of every section.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub section: ExperimentSection,
    pub cfg: SmbmConfig,
    pub snr_grid_db: Vec<f64>,
}

impl ExperimentConfig {
    pub fn plan(&self) -> SimPlan {
        SimPlan {
            cfg: self.cfg,
            detector: self.section.detector,
            snr_grid_db: self.snr_grid_db.clone(),
            master_seed: self.section.seed,
            stop: StopRule { min_bit_errors: self.section.min_bit_errors, max_trials: self.section.max_trials },
            workers: self.section.workers,
        }
    }

    /// The effective section with an explicit grid, as echoed to JSON.
    pub fn effective_section(&self) -> ExperimentSection {
        ExperimentSection {
            start_db: None,
            stop_db: None,
            step_db: None,
            snr_db: Some(self.snr_grid_db.clone()),
            ..self.section.clone()
        }
    }

    pub fn echo_json(&self) -> String {
        let mut root = serde_json::Map::new();
        root.insert(self.name.clone(), serde_json::to_value(self.effective_section()).expect("section serializes"));
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(root)).expect("json");
        text.push('\n');
        text
    }
}

/// `start, start + step, ...` up to and including `stop`.
pub fn snr_grid(start_db: f64, stop_db: f64, step_db: f64) -> Result<Vec<f64>, CliError> {
    if !(step_db > 0.0 && step_db.is_finite()) {
        return Err(CliError::Config(format!("step_db must be positive (got {step_db})")));
    }
    if !(start_db.is_finite() && stop_db.is_finite()) {
        return Err(CliError::Config("start_db and stop_db must be finite".into()));
    }
    if stop_db < start_db {
        return Err(CliError::Config(format!("stop_db {stop_db} is below start_db {start_db}")));
    }
    let count = ((stop_db - start_db) / step_db + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(CliError::Config(format!("SNR grid has {count} points")));
    }
    Ok((0..count).map(|k| start_db + k as f64 * step_db).collect())
}

fn resolve(name: &str, mut section: ExperimentSection, overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
    let ctx = |e: CliError| match e {
        CliError::Config(m) => CliError::Config(format!("[{name}] {m}")),
        CliError::Unsupported(m) => CliError::Unsupported(format!("[{name}] {m}")),
        other => other,
    };
    if let Some(seed) = overrides.seed {
        section.seed = seed;
    }
    if let Some(workers) = overrides.workers {
        section.workers = workers;
    }
    let grid = match (&section.snr_db, section.start_db, section.stop_db, section.step_db) {
        (Some(list), None, None, None) => {
            if list.iter().any(|v| v.is_nan()) {
                return Err(ctx(CliError::Config("snr_db contains NaN".into())));
            }
            list.clone()
        }
        (None, Some(a), Some(b), Some(s)) => snr_grid(a, b, s).map_err(ctx)?,
        (Some(_), ..) => {
            return Err(ctx(CliError::Config("give either snr_db or start_db/stop_db/step_db, not both".into())))
        }
        _ => {
            return Err(ctx(CliError::Config("missing SNR grid: set start_db, stop_db and step_db (or snr_db)".into())))
        }
    };
    if section.min_bit_errors == 0 {
        return Err(ctx(CliError::Config("min_bit_errors must be at least 1".into())));
    }
    if section.bound_samples == 0 {
        return Err(ctx(CliError::Config("bound_samples must be at least 1".into())));
    }
    let cfg = benchmark_config(
        section.scheme,
        section.modulation_order,
        section.num_tx_antennas,
        section.num_rf_mirrors,
        section.num_ris_elements,
    )
    .map_err(|e| ctx(e.into()))?;
    let exp = ExperimentConfig { name: name.to_string(), section, cfg, snr_grid_db: grid };
    exp.plan().validate().map_err(|e| ctx(e.into()))?;
    Ok(exp)
}

/// Parses a TOML or JSON configuration (JSON when the text starts with `{`).
pub fn parse_config(text: &str, overrides: &Overrides) -> Result<Vec<ExperimentConfig>, CliError> {
    let sections: Vec<(String, ExperimentSection)> = if text.trim_start().starts_with('{') {
        let root: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON config: {e}")))?;
        root.into_iter()
            .map(|(name, v)| {
                serde_json::from_value(v)
                    .map(|s| (name.clone(), s))
                    .map_err(|e| CliError::Config(format!("[{name}] {e}")))
            })
            .collect::<Result<_, _>>()?
    } else {
        let table: toml::Table =
            toml::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
        table
            .into_iter()
            .map(|(name, v)| {
                if !v.is_table() {
                    return Err(CliError::Config(format!(
                        "top-level key '{name}' must be an experiment section ([{name}])"
                    )));
                }
                v.try_into()
                    .map(|s| (name.clone(), s))
                    .map_err(|e: toml::de::Error| CliError::Config(format!("[{name}] {}", e.message())))
            })
            .collect::<Result<_, _>>()?
    };
    if sections.is_empty() {
        return Err(CliError::Config("configuration contains no experiment sections".into()));
    }
    sections.into_iter().map(|(name, s)| resolve(&name, s, overrides)).collect()
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<Vec<ExperimentConfig>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_config(&text, overrides).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn select<'a>(exps: &'a [ExperimentConfig], only: Option<&str>) -> Result<Vec<&'a ExperimentConfig>, CliError> {
    match only {
        None => Ok(exps.iter().collect()),
        Some(name) => {
            let hit: Vec<_> = exps.iter().filter(|e| e.name == name).collect();
            if hit.is_empty() {
                Err(CliError::Config(format!("no experiment named '{name}'")))
            } else {
                Ok(hit)
            }
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Runs the Monte Carlo sweep of every selected experiment and writes
/// `<name>_ber.csv` and `<name>_config.json` into `out_dir`.
pub fn cmd_simulate(exps: &[ExperimentConfig], only: Option<&str>, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for exp in select(exps, only)? {
        let points = sweep(&exp.plan())?;
        written.push(write_file(out_dir, &format!("{}_ber.csv", exp.name), &report::ber_csv(&points))?);
        written.push(write_file(out_dir, &format!("{}_config.json", exp.name), &exp.echo_json())?);
    }
    Ok(written)
}

/// Evaluates the union bound of every selected experiment and writes
/// `<name>_bound.csv` and `<name>_config.json` into `out_dir`.
pub fn cmd_bound(
    exps: &[ExperimentConfig],
    only: Option<&str>,
    out_dir: &Path,
    mode: BoundMode,
) -> Result<Vec<PathBuf>, CliError> {
    let selected = select(exps, only)?;
    // size checks before any work
    for exp in &selected {
        if exp.cfg.spectral_efficiency() > crate::analysis::MAX_BOUND_EFFICIENCY {
            return Err(CliError::Unsupported(format!(
                "[{}] union bound supports eta <= {}, configuration has eta = {}",
                exp.name,
                crate::analysis::MAX_BOUND_EFFICIENCY,
                exp.cfg.spectral_efficiency()
            )));
        }
    }
    let mut written = Vec::new();
    for exp in selected {
        let constellation = build_constellation(exp.cfg.modulation_order())?;
        let run = || {
            aber_bound(&exp.cfg, &constellation, &exp.snr_grid_db, exp.section.bound_samples, exp.section.seed, mode)
        };
        let points = if exp.section.workers == 0 {
            run()?
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(exp.section.workers)
                .build()
                .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?
                .install(run)?
        };
        written.push(write_file(out_dir, &format!("{}_bound.csv", exp.name), &report::bound_csv(&points))?);
        written.push(write_file(out_dir, &format!("{}_config.json", exp.name), &exp.echo_json())?);
    }
    Ok(written)
}

/// Which comparison tables to regenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableSet {
    All,
    EnergySaving,
    DataRate,
    Complexity,
}

impl std::str::FromStr for TableSet {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(TableSet::All),
            "table2" => Ok(TableSet::EnergySaving),
            "table3" => Ok(TableSet::DataRate),
            "table4" | "fig2" => Ok(TableSet::Complexity),
            other => Err(CliError::Config(format!(
                "unknown table preset '{other}' (expected all, table2, table3, table4 or fig2)"
            ))),
        }
    }
}

/// Regenerates the comparison tables. Returns the text report; CSV files are
/// written when `out_dir` is given. `rows` replaces the built-in parameter
/// rows when non-empty (`N` is only used by the complexity table).
pub fn cmd_tables(
    set: TableSet,
    rows: &[(usize, usize, u32, Option<usize>)],
    out_dir: Option<&Path>,
) -> Result<String, CliError> {
    let tables = report::build_tables(rows)?;
    let mut text = String::new();
    let want = |t: TableSet| set == TableSet::All || set == t;
    if want(TableSet::EnergySaving) {
        text.push_str(&tables.energy_text());
        text.push('\n');
        if let Some(dir) = out_dir {
            write_file(dir, "table2_energy_saving.csv", &tables.energy_csv())?;
        }
    }
    if want(TableSet::DataRate) {
        text.push_str(&tables.rate_text());
        text.push('\n');
        if let Some(dir) = out_dir {
            write_file(dir, "table3_data_rate.csv", &tables.rate_csv())?;
        }
    }
    if want(TableSet::Complexity) {
        text.push_str(&tables.complexity_text());
        if let Some(dir) = out_dir {
            write_file(dir, "table4_complexity.csv", &tables.complexity_csv())?;
        }
    }
    Ok(text)
}
