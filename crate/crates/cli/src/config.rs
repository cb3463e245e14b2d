//! Settings resolution: command-line flag, then config file, then the
//! built-in default.
//!
//! The config file is TOML. Top-level keys apply to every subcommand and a
//! table named after the subcommand overrides them:
//!
//! ```toml
//! alpha = "4pi/7"
//! seed = 7
//!
//! [spectrum]
//! j = 500
//! kappa = "0.4,7"
//! ```

use std::path::{Path, PathBuf};

use kicktop_core::floquet::EigenMethod;
use kicktop_core::multifractal::ExpansionBasis;
use kicktop_core::Parity;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::values::{parse_reals, parse_spins};

pub struct Layers {
    command: &'static str,
    file: Option<toml::Table>,
}

impl Layers {
    pub fn new(command: &'static str, config: Option<&Path>) -> Result<Self> {
        let file = match config {
            None => None,
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                Some(
                    text.parse::<toml::Table>()
                        .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
                )
            }
        };
        Ok(Self { command, file })
    }

    pub fn command(&self) -> &'static str {
        self.command
    }

    fn file_value(&self, key: &str) -> Option<&toml::Value> {
        let file = self.file.as_ref()?;
        file.get(self.command)
            .and_then(|t| t.as_table())
            .and_then(|t| t.get(key))
            .or_else(|| file.get(key).filter(|v| !v.is_table()))
    }

    /// Textual setting; file numbers and arrays are converted to the
    /// command-line syntax.
    pub fn text(&self, cli: Option<String>, key: &str, default: &str) -> Result<String> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.file_value(key) {
            None => Ok(default.to_string()),
            Some(v) => value_text(v).ok_or_else(|| {
                CliError::Usage(format!("config key '{key}' has unsupported value {v}"))
            }),
        }
    }

    pub fn value<T: DeserializeOwned>(&self, cli: Option<T>, key: &str, default: T) -> Result<T> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.file_value(key) {
            None => Ok(default),
            Some(v) => v
                .clone()
                .try_into()
                .map_err(|e| CliError::Usage(format!("config key '{key}': {e}"))),
        }
    }
}

fn value_text(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        toml::Value::Boolean(b) => Some(b.to_string()),
        toml::Value::Array(a) => a
            .iter()
            .map(value_text)
            .collect::<Option<Vec<_>>>()
            .map(|p| p.join(",")),
        _ => None,
    }
}

/// Flags shared by every subcommand, before resolution.
#[derive(Clone, Debug, Default)]
pub struct CommonInput {
    pub j: Option<String>,
    pub kappa: Option<String>,
    pub alpha: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub no_cache: bool,
    pub method: Option<String>,
}

/// Defaults that differ between subcommands.
pub struct CommonDefaults {
    pub j: &'static str,
    pub kappa: &'static str,
    pub alpha: &'static str,
}

pub const FIGURE_KAPPAS: &str = "0.4,1.7,3,7";

#[derive(Clone, Debug, Serialize)]
pub struct Common {
    pub j: Vec<u32>,
    pub kappa: Vec<f64>,
    pub alpha: Vec<f64>,
    pub seed: u64,
    pub threads: usize,
    pub out: PathBuf,
    pub cache: bool,
    pub method: EigenMethod,
}

pub fn usage(e: String) -> CliError {
    CliError::Usage(e)
}

impl Common {
    pub fn resolve(input: CommonInput, layers: &Layers, d: &CommonDefaults) -> Result<Self> {
        let j = parse_spins(&layers.text(input.j, "j", d.j)?).map_err(usage)?;
        let kappa = parse_reals(&layers.text(input.kappa, "kappa", d.kappa)?).map_err(usage)?;
        if kappa.iter().any(|&k| k < 0.0) {
            return Err(usage(format!("kappa must be >= 0, got {kappa:?}")));
        }
        let alpha = parse_reals(&layers.text(input.alpha, "alpha", d.alpha)?).map_err(usage)?;
        let seed = layers.value(input.seed, "seed", 0u64)?;
        let default_threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        let threads = layers.value(input.threads, "threads", default_threads)?;
        if threads == 0 {
            return Err(usage("threads must be >= 1".into()));
        }
        let out = layers.value(input.out, "out", PathBuf::from("kicktop-out"))?;
        let cache = layers.value(input.no_cache.then_some(false), "cache", true)?;
        let method = match layers.text(input.method, "method", "sector")?.as_str() {
            "sector" => EigenMethod::Sector,
            "full" => EigenMethod::Full,
            m => return Err(usage(format!("method '{m}' (expected sector or full)"))),
        };
        Ok(Self {
            j,
            kappa,
            alpha,
            seed,
            threads,
            out,
            cache,
            method,
        })
    }
}

pub fn parse_parity(s: &str) -> Result<Vec<Parity>> {
    match s {
        "even" => Ok(vec![Parity::Even]),
        "odd" => Ok(vec![Parity::Odd]),
        "both" => Ok(vec![Parity::Even, Parity::Odd]),
        _ => Err(usage(format!("parity '{s}' (expected even, odd or both)"))),
    }
}

pub fn parse_basis(s: &str) -> Result<ExpansionBasis> {
    match s {
        "full" => Ok(ExpansionBasis::Full),
        "even" => Ok(ExpansionBasis::Sector(Parity::Even)),
        "odd" => Ok(ExpansionBasis::Sector(Parity::Odd)),
        _ => Err(usage(format!("basis '{s}' (expected full, even or odd)"))),
    }
}
