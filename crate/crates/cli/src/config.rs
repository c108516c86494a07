//! Run configuration: command-line flags over an optional JSON config file.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Norm,
    RetractionVerify,
    BasisVerify,
    Decompose,
    BmReport,
    LambdaCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::RetractionVerify => "retraction-verify",
            Command::BasisVerify => "basis-verify",
            Command::Decompose => "decompose",
            Command::BmReport => "bm-report",
            Command::LambdaCheck => "lambda-check",
        }
    }
}

/// Every field is optional so that a file and the flags can be layered.
#[derive(Debug, Clone, Default, Parser, Serialize, Deserialize)]
#[command(name = "lipfree", version, about = "Free p-space norms, cube retractions and dyadic basis certificates")]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Exponent p in (0, 1].
    #[arg(long)]
    pub p: Option<f64>,
    /// Holder exponent alpha in (0, 1).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Side length of the lattice cubes.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Point file (norm, decompose) or complex file (retraction-verify, lambda-check).
    #[arg(long = "in")]
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    /// Element file, one "w point-index" per line.
    #[arg(long)]
    pub element: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the fields above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl RunConfig {
    /// Fills every unset field from `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            command: self.command.or(base.command),
            p: self.p.or(base.p),
            alpha: self.alpha.or(base.alpha),
            d: self.d.or(base.d),
            kmax: self.kmax.or(base.kmax),
            r: self.r.or(base.r),
            seed: self.seed.or(base.seed),
            samples: self.samples.or(base.samples),
            input: self.input.or(base.input),
            element: self.element.or(base.element),
            out: self.out.or(base.out),
            config: self.config,
        }
    }

    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Flags, then the config file they name.
    pub fn resolve(flags: RunConfig) -> Result<RunConfig, String> {
        match &flags.config {
            Some(path) => {
                let file = RunConfig::load(path)?;
                Ok(flags.over(file))
            }
            None => Ok(flags),
        }
    }
}
