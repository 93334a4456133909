//! Dataset parsing, velocity derivation and outlier cleaning.
//!
//! Three raw layouts are understood:
//!
//! * **Mobile Century**: one comma-separated file per vehicle, rows
//!   `unix_ms, lat, lon, speed_mph`.
//! * **Borlänge**: three row-aligned files. `mobility` rows are
//!   `vehicle, day, trip, start, end` with timestamps `YYYY-MM-DD HH:MM:SS`;
//!   `nodes` rows hold the origin and destination node of the same interval;
//!   `nodepos` rows are `node, lon, lat`. Fields may be separated by commas,
//!   tabs or spaces.
//! * **Beijing**: text rows `vehicle, utc_s, lat·1e5, lon·1e5, speed`; the
//!   speed column has no known unit and is ignored.
//!
//! Every parser yields [`Trip`]s whose velocities are already in m/s, so the
//! unit-standardization step of the cleaning pipeline has nothing left to do.

mod beijing;
mod borlange;
mod clean;
mod geodesic;
mod mobile_century;
pub mod quantile;

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use beijing::{
    parse_beijing, read_beijing_fixes, split_trips_at_stops, VehicleFixes, BEIJING_COORDINATE_SCALE,
};
pub use borlange::{parse_borlange, BORLANGE_TIME_FORMAT};
pub use clean::{clean_pipeline, CleaningPolicy, CleaningReport};
pub use geodesic::{geodesic_distance, EARTH_MEAN_RADIUS_M};
pub use mobile_century::{parse_mobile_century, read_mobile_century_fixes, MPH_TO_MPS};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}: no data rows")]
    EmptyInput(PathBuf),
    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("row count mismatch: {mobility} mobility rows vs {nodes} nodes rows")]
    RowCountMismatch { mobility: usize, nodes: usize },
    #[error("invalid coordinate ({lat}, {lon})")]
    InvalidCoordinate { lat: f64, lon: f64 },
    #[error("all data discarded")]
    AllDiscarded,
}

pub type Result<T> = std::result::Result<T, IngestError>;

/// How parsers treat rows they cannot interpret.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Abort on the first malformed row.
    Strict,
    /// Skip malformed rows and count them.
    #[default]
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedUnit {
    MetersPerSecond,
    MilesPerHour,
}

impl SpeedUnit {
    pub fn to_mps(self, value: f64) -> f64 {
        match self {
            SpeedUnit::MetersPerSecond => value,
            SpeedUnit::MilesPerHour => value * MPH_TO_MPS,
        }
    }
}

/// One raw GPS record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpsFix {
    /// Seconds since the Unix epoch.
    pub timestamp: f64,
    pub lat: f64,
    pub lon: f64,
    pub speed: Option<(f64, SpeedUnit)>,
}

impl GpsFix {
    pub fn new(timestamp: f64, lat: f64, lon: f64) -> Result<Self> {
        validate_coordinate(lat, lon)?;
        Ok(Self {
            timestamp,
            lat,
            lon,
            speed: None,
        })
    }

    pub fn position(&self) -> (f64, f64) {
        (self.lat, self.lon)
    }
}

pub(crate) fn validate_coordinate(lat: f64, lon: f64) -> Result<()> {
    if lat.is_finite() && lon.is_finite() && lat.abs() <= 90.0 && lon.abs() <= 180.0 {
        Ok(())
    } else {
        Err(IngestError::InvalidCoordinate { lat, lon })
    }
}

/// A velocity sample in m/s at time `t` (seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub t: f64,
    pub v: f64,
}

impl Observation {
    pub fn new(t: f64, v: f64) -> Self {
        Self { t, v }
    }
}

/// A contiguous motion segment of one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct Trip {
    pub vehicle_id: String,
    /// Sequence number of the trip within its vehicle.
    pub trip_id: u32,
    /// Recording day, where the format provides one.
    pub day: Option<u32>,
    /// Trip number as written in the source, where the format provides one.
    pub source_trip: Option<u32>,
    pub observations: Vec<Observation>,
}

impl Trip {
    pub fn new(
        vehicle_id: impl Into<String>,
        trip_id: u32,
        observations: Vec<Observation>,
    ) -> Self {
        Self {
            vehicle_id: vehicle_id.into(),
            trip_id,
            day: None,
            source_trip: None,
            observations,
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn mean_velocity(&self) -> Option<f64> {
        if self.observations.is_empty() {
            return None;
        }
        Some(self.observations.iter().map(|o| o.v).sum::<f64>() / self.observations.len() as f64)
    }

    pub fn duration(&self) -> f64 {
        match (self.observations.first(), self.observations.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }
}

/// Row-level accounting of a parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseStats {
    pub rows: usize,
    pub malformed_rows: usize,
    pub unknown_nodes: usize,
    pub non_monotone: usize,
}

impl ParseStats {
    pub fn merge(&mut self, other: ParseStats) {
        self.rows += other.rows;
        self.malformed_rows += other.malformed_rows;
        self.unknown_nodes += other.unknown_nodes;
        self.non_monotone += other.non_monotone;
    }
}

impl fmt::Display for ParseStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} rows, {} malformed, {} unknown nodes, {} non-monotone",
            self.rows, self.malformed_rows, self.unknown_nodes, self.non_monotone
        )
    }
}

/// Trips plus the row accounting of the parse that produced them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Parsed {
    pub trips: Vec<Trip>,
    pub stats: ParseStats,
}

/// Velocity from a displacement in metres over an interval in seconds.
/// A zero interval yields NaN, which the cleaning pipeline discards.
pub fn displacement_velocity(displacement_m: f64, interval_s: f64) -> f64 {
    if interval_s == 0.0 {
        f64::NAN
    } else {
        displacement_m / interval_s
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-blank lines with their 1-based line numbers. Lines made only of dots
/// (elisions in excerpts) are skipped as well.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.chars().all(|c| c == '.')).then_some((i + 1, l))
    })
}

/// Splits on commas and whitespace, dropping empty tokens.
pub(crate) fn tokens(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Applies the strictness policy to a malformed row.
pub(crate) fn reject(
    strictness: Strictness,
    stats: &mut ParseStats,
    path: &Path,
    line: usize,
    reason: impl Into<String>,
) -> Result<()> {
    match strictness {
        Strictness::Strict => Err(IngestError::Malformed {
            path: path.to_path_buf(),
            line,
            reason: reason.into(),
        }),
        Strictness::Lenient => {
            stats.malformed_rows += 1;
            Ok(())
        }
    }
}

/// Velocity observation for the interval between two fixes, stamped at its midpoint.
pub(crate) fn interval_observation(a: &GpsFix, b: &GpsFix) -> Observation {
    let ds = geodesic_distance(a.position(), b.position()).unwrap_or(f64::NAN);
    let dt = b.timestamp - a.timestamp;
    Observation::new(
        0.5 * (a.timestamp + b.timestamp),
        displacement_velocity(ds, dt),
    )
}
