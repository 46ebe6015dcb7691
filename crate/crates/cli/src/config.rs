//! Run configuration: command-line flags over an optional `key = value`
//! file (named by `SOBOLEV_CONFIG`) over built-in defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use sobolev_core::numcore::Mode;

use crate::CliError;

pub const CONFIG_ENV: &str = "SOBOLEV_CONFIG";

pub const DEFAULT_SAMPLES: usize = 201;
pub const DEFAULT_GALERKIN_DEGREE: usize = 16;
pub const DEFAULT_GRID: usize = 199;
pub const MIN_GRID: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Constant,
    Minimizer,
    Verify,
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

/// Settings supplied on the command line; `None` defers to the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub k: Option<usize>,
    pub weight: Option<String>,
    pub mode: Option<Mode>,
    pub samples: Option<usize>,
    pub galerkin_degree: Option<usize>,
    pub grid: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub k: usize,
    pub weight_spec: String,
    pub mode: Mode,
    pub samples: usize,
    pub galerkin_degree: usize,
    pub grid: usize,
    pub output: Format,
    pub out_path: Option<PathBuf>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("config line {}: expected `key = value`", n + 1)))?;
        let key = key.trim().replace('-', "_");
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_field<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Input(format!("config key `{key}`: {e}")))
        })
        .transpose()
}

impl Overrides {
    pub fn from_file(text: &str) -> Result<Overrides, CliError> {
        let map = parse_config_file(text)?;
        const KNOWN: [&str; 8] = ["k", "weight", "mode", "samples", "galerkin_degree", "grid", "format", "out"];
        if let Some(key) = map.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(CliError::Input(format!("unknown config key `{key}`")));
        }
        Ok(Overrides {
            k: parse_field(&map, "k")?,
            weight: map.get("weight").cloned(),
            mode: parse_field(&map, "mode")?,
            samples: parse_field(&map, "samples")?,
            galerkin_degree: parse_field(&map, "galerkin_degree")?,
            grid: parse_field(&map, "grid")?,
            format: parse_field(&map, "format")?,
            out: map.get("out").map(PathBuf::from),
        })
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: Overrides) -> Overrides {
        Overrides {
            k: self.k.or(lower.k),
            weight: self.weight.or(lower.weight),
            mode: self.mode.or(lower.mode),
            samples: self.samples.or(lower.samples),
            galerkin_degree: self.galerkin_degree.or(lower.galerkin_degree),
            grid: self.grid.or(lower.grid),
            format: self.format.or(lower.format),
            out: self.out.or(lower.out),
        }
    }

    pub fn resolve(self, command: Command) -> Result<RunConfig, CliError> {
        let k = self.k.ok_or_else(|| CliError::Input("missing --k".into()))?;
        if k == 0 {
            return Err(CliError::Input("--k must be at least 1".into()));
        }
        let weight_spec = match (command, self.weight) {
            (_, Some(w)) => w,
            // Sweeps build their own weights.
            (Command::Sweep, None) => String::new(),
            (_, None) => return Err(CliError::Input("missing --weight".into())),
        };
        let samples = self.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 {
            return Err(CliError::Input("--samples must be at least 2".into()));
        }
        let grid = self.grid.unwrap_or(DEFAULT_GRID);
        if grid < MIN_GRID {
            return Err(CliError::Input(format!("--grid must be at least {MIN_GRID}")));
        }
        let default_format = match command {
            Command::Constant | Command::Verify => Format::Json,
            Command::Minimizer | Command::Sweep => Format::Csv,
        };
        Ok(RunConfig {
            command,
            k,
            weight_spec,
            // Every weight kind has an exact path.
            mode: self.mode.unwrap_or(Mode::Exact),
            samples,
            galerkin_degree: self.galerkin_degree.unwrap_or(DEFAULT_GALERKIN_DEGREE),
            grid,
            output: self.format.unwrap_or(default_format),
            out_path: self.out,
        })
    }
}

/// Reads the file named by `SOBOLEV_CONFIG`, if set.
pub fn load_env_config() -> Result<Overrides, CliError> {
    match std::env::var_os(CONFIG_ENV) {
        None => Ok(Overrides::default()),
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::Input(format!("cannot read config {}: {e}", PathBuf::from(&path).display()))
            })?;
            Overrides::from_file(&text)
        }
    }
}
