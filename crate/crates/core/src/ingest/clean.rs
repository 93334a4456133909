//! Cleaning of raw trip velocities.
//!
//! Phases, in order:
//!
//! 1. velocities were derived by the parsers;
//! 2. NaN, infinite and negative velocities are discarded, as are observations
//!    whose timestamp does not advance within their trip;
//! 3. outliers are discarded according to the dataset policy;
//! 4. unit standardization (parsers already emit m/s).
//!
//! Trips left with fewer than two observations are dropped at the end.

use std::fmt;
use std::str::FromStr;

use super::quantile::{quantile_sorted, quartiles};
use super::{IngestError, ParseStats, Result, Trip};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CleaningPolicy {
    /// No outlier rejection.
    MobileCentury,
    /// Drop trips whose mean velocity is outside the trip-mean interquartile
    /// range, then drop observations above the upper quartile of the rest.
    Borlange,
    /// Drop observations above the upper quartile of all velocities.
    Beijing,
}

impl fmt::Display for CleaningPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CleaningPolicy::MobileCentury => "mobile-century",
            CleaningPolicy::Borlange => "borlange",
            CleaningPolicy::Beijing => "beijing",
        })
    }
}

impl FromStr for CleaningPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "mobile-century" | "none" => Ok(CleaningPolicy::MobileCentury),
            "borlange" => Ok(CleaningPolicy::Borlange),
            "beijing" => Ok(CleaningPolicy::Beijing),
            other => Err(format!("unknown cleaning policy {other:?}")),
        }
    }
}

/// What the pipeline removed and why. Observation counts satisfy
/// `parsed == retained + discarded()`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CleaningReport {
    pub parse: ParseStats,
    pub parsed: usize,
    pub discarded_nan: usize,
    pub discarded_inf: usize,
    pub discarded_negative: usize,
    pub discarded_non_monotone: usize,
    pub outlier_trips: usize,
    pub discarded_outlier_trip_observations: usize,
    pub discarded_outliers: usize,
    pub short_trips: usize,
    pub discarded_short_trip_observations: usize,
    pub retained: usize,
    pub retained_trips: usize,
    /// Interquartile range of trip mean velocities (Borlänge policy).
    pub trip_mean_quartiles: Option<(f64, f64)>,
    /// Upper quartile of pooled velocities used as the outlier cut.
    pub velocity_upper_quartile: Option<f64>,
}

impl CleaningReport {
    pub fn discarded(&self) -> usize {
        self.discarded_nan
            + self.discarded_inf
            + self.discarded_negative
            + self.discarded_non_monotone
            + self.discarded_outlier_trip_observations
            + self.discarded_outliers
            + self.discarded_short_trip_observations
    }
}

fn drop_invalid(trips: &mut [Trip], report: &mut CleaningReport) {
    for trip in trips.iter_mut() {
        let mut last_t = f64::NEG_INFINITY;
        trip.observations.retain(|o| {
            if o.v.is_nan() {
                report.discarded_nan += 1;
            } else if o.v.is_infinite() {
                report.discarded_inf += 1;
            } else if o.v < 0.0 {
                report.discarded_negative += 1;
            } else if o.t.is_nan() || o.t <= last_t {
                report.discarded_non_monotone += 1;
            } else {
                last_t = o.t;
                return true;
            }
            false
        });
    }
}

fn drop_above(trips: &mut [Trip], cut: f64) -> usize {
    let mut n = 0;
    for trip in trips.iter_mut() {
        let before = trip.len();
        trip.observations.retain(|o| o.v <= cut);
        n += before - trip.len();
    }
    n
}

fn pooled_upper_quartile(trips: &[Trip]) -> Option<f64> {
    let mut all: Vec<f64> = trips
        .iter()
        .flat_map(|t| t.observations.iter().map(|o| o.v))
        .collect();
    all.sort_by(f64::total_cmp);
    quantile_sorted(&all, 0.75)
}

/// Runs the cleaning phases and reports every discarded observation.
pub fn clean_pipeline(
    mut trips: Vec<Trip>,
    policy: CleaningPolicy,
) -> Result<(Vec<Trip>, CleaningReport)> {
    let mut report = CleaningReport {
        parsed: trips.iter().map(Trip::len).sum(),
        ..Default::default()
    };

    drop_invalid(&mut trips, &mut report);
    trips.retain(|t| {
        let keep = !t.is_empty();
        if !keep {
            report.short_trips += 1;
        }
        keep
    });

    match policy {
        CleaningPolicy::MobileCentury => {}
        CleaningPolicy::Borlange => {
            let means: Vec<f64> = trips.iter().filter_map(Trip::mean_velocity).collect();
            if let Some((q1, q3)) = quartiles(&means) {
                report.trip_mean_quartiles = Some((q1, q3));
                trips.retain(|t| {
                    let m = t.mean_velocity().unwrap_or(f64::NAN);
                    let keep = m >= q1 && m <= q3;
                    if !keep {
                        report.outlier_trips += 1;
                        report.discarded_outlier_trip_observations += t.len();
                    }
                    keep
                });
            }
            if let Some(cut) = pooled_upper_quartile(&trips) {
                report.velocity_upper_quartile = Some(cut);
                report.discarded_outliers += drop_above(&mut trips, cut);
            }
        }
        CleaningPolicy::Beijing => {
            if let Some(cut) = pooled_upper_quartile(&trips) {
                report.velocity_upper_quartile = Some(cut);
                report.discarded_outliers += drop_above(&mut trips, cut);
            }
        }
    }

    trips.retain(|t| {
        let keep = t.len() >= 2;
        if !keep {
            report.short_trips += 1;
            report.discarded_short_trip_observations += t.len();
        }
        keep
    });

    report.retained = trips.iter().map(Trip::len).sum();
    report.retained_trips = trips.len();
    if trips.is_empty() {
        return Err(IngestError::AllDiscarded);
    }
    Ok((trips, report))
}
