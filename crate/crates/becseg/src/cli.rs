//! Experiment configuration: subcommand plus a flat key-value parameter
//! map, assembled from an optional config file and command-line flags.
//!
//! Precedence: flags override file values; a repeated flag warns and the
//! last occurrence wins; unknown keys are rejected with the offending
//! name.  The config file is a flat `key = value` list with `#` comments.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Environment variable supplying the default output directory.
pub const OUT_ENV: &str = "BECSEG_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Tf,
    GpMinimize,
    Sigma1d,
    SigmaSweep,
    ShapeStability,
    ShapeRegimes,
    CrossoverCheck,
}

impl Command {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "tf" => Command::Tf,
            "gp-minimize" => Command::GpMinimize,
            "sigma1d" => Command::Sigma1d,
            "sigma-sweep" => Command::SigmaSweep,
            "shape-stability" => Command::ShapeStability,
            "shape-regimes" => Command::ShapeRegimes,
            "crossover-check" => Command::CrossoverCheck,
            other => {
                return Err(Error::Usage(format!(
                    "unknown command `{other}`; expected one of {}",
                    COMMAND_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Tf => "tf",
            Command::GpMinimize => "gp-minimize",
            Command::Sigma1d => "sigma1d",
            Command::SigmaSweep => "sigma-sweep",
            Command::ShapeStability => "shape-stability",
            Command::ShapeRegimes => "shape-regimes",
            Command::CrossoverCheck => "crossover-check",
        }
    }

    fn required_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Tf => &["alpha1", "alpha2", "g", "K"],
            Command::GpMinimize => &["alpha1", "alpha2", "g", "K", "epsilon"],
            Command::Sigma1d => &["lambda", "K"],
            Command::SigmaSweep => &["lambda", "K-list"],
            Command::ShapeStability => &["R-min", "R-max"],
            Command::ShapeRegimes => &["xi-list"],
            Command::CrossoverCheck => &["epsilon", "xi", "K"],
        }
    }

    fn optional_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Tf => &["h", "profile-rows"],
            Command::GpMinimize => &[
                "n",
                "tol",
                "max-iters",
                "potential",
                "xi",
                "half-width",
                "schedule",
            ],
            Command::Sigma1d => &["L", "n", "tol"],
            Command::SigmaSweep => &["L", "n", "tol", "weak-threshold"],
            Command::ShapeStability => &["R-steps", "k-max"],
            Command::ShapeRegimes => &["R", "alpha-frac", "sigma-K", "xi-coefficient"],
            Command::CrossoverCheck => &["n", "tol", "alpha-bar", "half-width"],
        }
    }
}

pub const COMMAND_NAMES: [&str; 7] = [
    "tf",
    "gp-minimize",
    "sigma1d",
    "sigma-sweep",
    "shape-stability",
    "shape-regimes",
    "crossover-check",
];

/// A fully resolved run description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub parameters: BTreeMap<String, String>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn get_f64(&self, key: &str) -> Result<f64> {
        self.parameters
            .get(key)
            .ok_or_else(|| Error::Usage(format!("missing required key `{key}`")))?
            .parse::<f64>()
            .map_err(|_| {
                Error::Usage(format!(
                    "key `{key}` is not a number: {:?}",
                    self.parameters[key]
                ))
            })
    }

    pub fn get_f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.parameters.get(key) {
            None => Ok(default),
            Some(_) => self.get_f64(key),
        }
    }

    pub fn get_usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.parameters.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::Usage(format!("key `{key}` is not an integer: {v:?}"))),
        }
    }

    pub fn get_str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.parameters
            .get(key)
            .map(|s| s.as_str())
            .unwrap_or(default)
    }

    /// Comma-separated list of reals.
    pub fn get_f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self
            .parameters
            .get(key)
            .ok_or_else(|| Error::Usage(format!("missing required key `{key}`")))?;
        raw.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Usage(format!("bad entry `{tok}` in list `{key}`")))
            })
            .collect()
    }
}

pub fn usage() -> String {
    format!(
        "usage: becseg <command> [--config FILE] [--out DIR] [--seed N] [--key value ...]\n\
         commands: {}\n\
         The config file holds flat `key = value` lines; flags override it.",
        COMMAND_NAMES.join(", ")
    )
}

/// Parse a flat `key = value` config file.
fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Usage(format!(
                "{}:{}: expected `key = value`, got {line:?}",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Build a run description from command-line arguments (without the
/// program name).  Returns the config plus any warnings to surface.
pub fn parse_config(args: &[String]) -> Result<(ExperimentConfig, Vec<String>)> {
    let mut warnings = Vec::new();
    if args.is_empty() {
        return Err(Error::Usage(usage()));
    }
    let command = Command::parse(&args[0])?;

    // Collect flags; duplicates warn, last occurrence wins.
    let mut flags: BTreeMap<String, String> = BTreeMap::new();
    let mut i = 1;
    while i < args.len() {
        let arg = &args[i];
        let Some(key) = arg.strip_prefix("--") else {
            return Err(Error::Usage(format!("expected a --flag, got `{arg}`")));
        };
        let Some(value) = args.get(i + 1) else {
            return Err(Error::Usage(format!("flag `--{key}` is missing a value")));
        };
        if flags.insert(key.to_string(), value.clone()).is_some() {
            warnings.push(format!(
                "flag `--{key}` given more than once; last value wins"
            ));
        }
        i += 2;
    }

    // File values first, then flags override.
    let mut parameters = BTreeMap::new();
    if let Some(path) = flags.remove("config") {
        for (k, v) in parse_config_file(Path::new(&path))? {
            parameters.insert(k, v);
        }
    }
    let file_out = parameters.remove("out");
    let file_seed = parameters.remove("seed");
    for (k, v) in &flags {
        if k != "out" && k != "seed" {
            parameters.insert(k.clone(), v.clone());
        }
    }

    // Reject unknown keys.
    let known: Vec<&str> = command
        .required_keys()
        .iter()
        .chain(command.optional_keys())
        .copied()
        .collect();
    for key in parameters.keys() {
        if !known.contains(&key.as_str()) {
            return Err(Error::Usage(format!(
                "unknown key `{key}` for command `{}`; known keys: {}",
                command.name(),
                known.join(", ")
            )));
        }
    }
    for key in command.required_keys() {
        if !parameters.contains_key(*key) {
            return Err(Error::Usage(format!(
                "missing required key `{key}` for command `{}`",
                command.name()
            )));
        }
    }

    let output_dir = flags
        .get("out")
        .cloned()
        .or(file_out)
        .or_else(|| std::env::var(OUT_ENV).ok())
        .unwrap_or_else(|| "becseg-out".to_string());
    let seed = match flags.get("seed").cloned().or(file_seed) {
        None => 0,
        Some(s) => s
            .parse::<u64>()
            .map_err(|_| Error::Usage(format!("seed must be a nonnegative integer, got {s:?}")))?,
    };

    Ok((
        ExperimentConfig {
            command,
            parameters,
            output_dir: PathBuf::from(output_dir),
            seed,
        },
        warnings,
    ))
}
