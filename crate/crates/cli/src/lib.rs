//! Command-line pipeline from raw GPS logs to the complexity-entropy plane.
//!
//! `ingest` parses and cleans a dataset, `analyze` resamples each vehicle and
//! places it on the plane, `sweep` repeats the analysis over several sampling
//! intervals, `noise` builds the `f^-k` reference ladder and `plot` renders
//! exports as SVG. Exit status is 0 on success, 1 for input errors and 2 for
//! invalid settings or results.

pub mod commands;
pub mod config;
pub mod error;
pub mod export;
pub mod pipeline;
pub mod plot;
pub mod trips_file;

pub use commands::{run, Cli, Command};
pub use config::{DatasetKind, NoiseConfig, RunConfig};
pub use error::{CliError, EXIT_INPUT, EXIT_VALIDATION};
pub use export::{PlaneExport, PlaneRow, RowKind};
