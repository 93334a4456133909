//! Run settings from flags and an optional TOML file. Flags win over the file,
//! the file wins over built-in defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ceplane::ingest::{CleaningPolicy, Strictness};
use ceplane::noisegen::{MAX_EXPONENT, MIN_LENGTH, STANDARD_LADDER};
use ceplane::ordinal::{MAX_DIMENSION, MIN_DIMENSION};
use ceplane::quantifiers::MIN_RESOLUTION;
use ceplane::resample::{BEIJING_INTERVAL, BORLANGE_INTERVAL, MOBILE_CENTURY_INTERVAL};
use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const DEFAULT_DIMENSION: usize = 4;
pub const DEFAULT_DELAY: usize = 1;
pub const DEFAULT_NOISE_LENGTH: usize = 1 << 16;
pub const DEFAULT_BOUNDARY_RESOLUTION: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    /// One log per vehicle: `unix_ms, lat, lon, speed_mph`.
    MobileCentury,
    /// Three files in order: mobility, nodes, nodepos.
    Borlange,
    /// Text rows `vehicle, utc, lat*1e5, lon*1e5, speed`; directories are expanded.
    Beijing,
    /// Trips file written by `ingest`: `vehicle_id,trip_id,t,v`.
    Canonical,
}

impl DatasetKind {
    pub fn default_interval(self) -> Option<f64> {
        match self {
            DatasetKind::MobileCentury => Some(MOBILE_CENTURY_INTERVAL),
            DatasetKind::Borlange => Some(BORLANGE_INTERVAL),
            DatasetKind::Beijing => Some(BEIJING_INTERVAL),
            DatasetKind::Canonical => None,
        }
    }

    pub fn default_policy(self) -> CleaningPolicy {
        match self {
            DatasetKind::MobileCentury | DatasetKind::Canonical => CleaningPolicy::MobileCentury,
            DatasetKind::Borlange => CleaningPolicy::Borlange,
            DatasetKind::Beijing => CleaningPolicy::Beijing,
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetKind::MobileCentury => "mobile-century",
            DatasetKind::Borlange => "borlange",
            DatasetKind::Beijing => "beijing",
            DatasetKind::Canonical => "canonical",
        })
    }
}

/// Settings shared by the data subcommands, as given on the command line.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Input files or directories.
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub dataset: Option<DatasetKind>,
    /// Embedding dimension D.
    #[arg(long)]
    pub dimension: Option<usize>,
    /// Embedding delay.
    #[arg(long)]
    pub delay: Option<usize>,
    /// Resampling interval(s) in seconds; several values only for `sweep`.
    #[arg(long = "sample-interval", value_delimiter = ',')]
    pub sample_interval: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Abort on the first malformed row.
    #[arg(long, conflicts_with = "lenient")]
    pub strict: bool,
    /// Skip and count malformed rows (default).
    #[arg(long)]
    pub lenient: bool,
    /// Outlier policy: mobile-century (none), borlange or beijing.
    #[arg(long)]
    pub policy: Option<CleaningPolicy>,
    /// Only analyze these vehicles.
    #[arg(long, value_delimiter = ',')]
    pub vehicles: Option<Vec<String>>,
    /// Leave out windows that span the junction of two trips.
    #[arg(long)]
    pub mask_junctions: bool,
    /// Samples per boundary curve in plane exports.
    #[arg(long)]
    pub boundary_resolution: Option<usize>,
    /// TOML file with any of the settings above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct NoiseArgs {
    /// Spectral exponents of the ladder.
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Samples per noise series.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub dimension: Option<usize>,
    #[arg(long)]
    pub delay: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub boundary_resolution: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dataset: Option<DatasetKind>,
    pub inputs: Option<Vec<PathBuf>>,
    pub dimension: Option<usize>,
    pub delay: Option<usize>,
    pub sample_interval: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub strict: Option<bool>,
    pub policy: Option<String>,
    pub vehicles: Option<Vec<String>>,
    pub mask_junctions: Option<bool>,
    pub boundary_resolution: Option<usize>,
    pub ks: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub length: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        Self::from_str(&text).map_err(|e| match e {
            CliError::Validation(msg) => CliError::validation(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn load_optional(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

impl FromStr for FileConfig {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| CliError::validation(e.message().to_string()))
    }
}

/// Validated settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: DatasetKind,
    pub inputs: Vec<PathBuf>,
    pub dimension: usize,
    pub delay: usize,
    /// Empty when the dataset has no default and none was given.
    pub sample_intervals: Vec<f64>,
    pub out: PathBuf,
    pub strictness: Strictness,
    pub policy: CleaningPolicy,
    pub vehicles: Option<Vec<String>>,
    pub mask_junctions: bool,
    pub boundary_resolution: usize,
}

impl RunConfig {
    pub fn resolve(args: RunArgs) -> Result<Self> {
        let file = FileConfig::load_optional(args.config.as_deref())?;
        let dataset = args
            .dataset
            .or(file.dataset)
            .ok_or_else(|| CliError::validation("no dataset given (--dataset)"))?;
        let policy = match (args.policy, file.policy) {
            (Some(p), _) => p,
            (None, Some(s)) => s.parse().map_err(CliError::validation)?,
            (None, None) => dataset.default_policy(),
        };
        let strict = if args.strict {
            true
        } else if args.lenient {
            false
        } else {
            file.strict.unwrap_or(false)
        };
        let inputs = if args.inputs.is_empty() {
            file.inputs.unwrap_or_default()
        } else {
            args.inputs
        };
        let cfg = RunConfig {
            dataset,
            inputs,
            dimension: args
                .dimension
                .or(file.dimension)
                .unwrap_or(DEFAULT_DIMENSION),
            delay: args.delay.or(file.delay).unwrap_or(DEFAULT_DELAY),
            sample_intervals: args
                .sample_interval
                .or(file.sample_interval)
                .or_else(|| dataset.default_interval().map(|t| vec![t]))
                .unwrap_or_default(),
            out: args
                .out
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            strictness: if strict {
                Strictness::Strict
            } else {
                Strictness::Lenient
            },
            policy,
            vehicles: args.vehicles.or(file.vehicles),
            mask_junctions: args.mask_junctions || file.mask_junctions.unwrap_or(false),
            boundary_resolution: args
                .boundary_resolution
                .or(file.boundary_resolution)
                .unwrap_or(DEFAULT_BOUNDARY_RESOLUTION),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_embedding(self.dimension, self.delay)?;
        check_resolution(self.boundary_resolution)?;
        if self.inputs.is_empty() {
            return Err(CliError::validation("no input files given"));
        }
        let expected = match self.dataset {
            DatasetKind::Borlange => Some(3),
            DatasetKind::Canonical => Some(1),
            _ => None,
        };
        if let Some(n) = expected.filter(|&n| n != self.inputs.len()) {
            return Err(CliError::validation(format!(
                "{} expects {n} input path(s), got {}",
                self.dataset,
                self.inputs.len()
            )));
        }
        if let Some(t) = self
            .sample_intervals
            .iter()
            .find(|t| !(t.is_finite() && **t > 0.0))
        {
            return Err(CliError::validation(format!(
                "sample interval {t} must be positive"
            )));
        }
        Ok(())
    }

    /// The single interval used by `analyze`.
    pub fn sample_interval(&self) -> Result<f64> {
        match self.sample_intervals.as_slice() {
            [t] => Ok(*t),
            [] => Err(CliError::validation(format!(
                "no default sample interval for {}; pass --sample-interval",
                self.dataset
            ))),
            _ => Err(CliError::validation(
                "analyze takes one sample interval; use sweep for several",
            )),
        }
    }
}

/// Validated settings of a noise-ladder run.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub ks: Vec<f64>,
    pub seed: u64,
    pub length: usize,
    pub dimension: usize,
    pub delay: usize,
    pub out: PathBuf,
    pub boundary_resolution: usize,
}

impl NoiseConfig {
    pub fn resolve(args: NoiseArgs) -> Result<Self> {
        let file = FileConfig::load_optional(args.config.as_deref())?;
        let cfg = NoiseConfig {
            ks: args
                .ks
                .or(file.ks)
                .unwrap_or_else(|| STANDARD_LADDER.to_vec()),
            seed: args.seed.or(file.seed).unwrap_or(0),
            length: args.length.or(file.length).unwrap_or(DEFAULT_NOISE_LENGTH),
            dimension: args
                .dimension
                .or(file.dimension)
                .unwrap_or(DEFAULT_DIMENSION),
            delay: args.delay.or(file.delay).unwrap_or(DEFAULT_DELAY),
            out: args
                .out
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            boundary_resolution: args
                .boundary_resolution
                .or(file.boundary_resolution)
                .unwrap_or(DEFAULT_BOUNDARY_RESOLUTION),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_embedding(self.dimension, self.delay)?;
        check_resolution(self.boundary_resolution)?;
        if self.ks.is_empty() {
            return Err(CliError::validation("empty exponent list"));
        }
        if let Some(k) = self.ks.iter().find(|k| !(0.0..=MAX_EXPONENT).contains(*k)) {
            return Err(CliError::validation(format!(
                "exponent {k} outside [0, {MAX_EXPONENT}]"
            )));
        }
        if self.length < MIN_LENGTH {
            return Err(CliError::validation(format!(
                "noise length {} below minimum {MIN_LENGTH}",
                self.length
            )));
        }
        Ok(())
    }
}

fn check_embedding(dimension: usize, delay: usize) -> Result<()> {
    if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&dimension) {
        return Err(CliError::validation(format!(
            "dimension {dimension} outside [{MIN_DIMENSION}, {MAX_DIMENSION}]"
        )));
    }
    if delay == 0 {
        return Err(CliError::validation("delay must be at least 1"));
    }
    Ok(())
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < MIN_RESOLUTION {
        return Err(CliError::validation(format!(
            "boundary resolution {resolution} below minimum {MIN_RESOLUTION}"
        )));
    }
    Ok(())
}
