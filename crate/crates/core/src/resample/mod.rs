//! Equally sampled velocity series from cleaned trips.
//!
//! Each trip is interpolated on its own grid `t_first, t_first + T_S, ...`
//! and the per-trip samples of a vehicle are concatenated in time order.
//! Nothing is interpolated across the gap between two trips; the positions
//! where one trip's samples end and the next begin are kept as junctions.

mod pchip;

use thiserror::Error;

use crate::ingest::Trip;
use crate::ordinal::TimeSeries;
use crate::Real;

pub use pchip::{pchip_interpolate, Pchip};

/// Default sampling intervals in seconds.
pub const MOBILE_CENTURY_INTERVAL: f64 = 3.0;
pub const BORLANGE_INTERVAL: f64 = 14.0;
pub const BEIJING_INTERVAL: f64 = 60.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResampleError {
    #[error("need at least 2 knots, got {0}")]
    TooFewKnots(usize),
    #[error("duplicate or decreasing knot time at index {0}")]
    NonIncreasingKnots(usize),
    #[error("non-finite knot at index {0}")]
    NonFinite(usize),
    #[error("extrapolation refused at t = {0}")]
    Extrapolation(f64),
    #[error("sampling interval must be positive and finite")]
    InvalidInterval,
}

pub type Result<T> = std::result::Result<T, ResampleError>;

/// Samples of one trip on its regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TripSamples<T> {
    pub values: Vec<T>,
    /// Interpolated values that came out negative and were set to zero.
    pub clamped: usize,
}

/// Number of grid points `floor(span / T_S) + 1`.
pub fn grid_len(span: f64, interval: f64) -> usize {
    (span / interval).floor() as usize + 1
}

/// Resamples one trip every `interval` seconds from its first observation.
pub fn resample_trip<T: Real>(trip: &Trip, interval: T) -> Result<TripSamples<T>> {
    let step = interval.to_f64().unwrap_or(f64::NAN);
    if !(step.is_finite() && step > 0.0) {
        return Err(ResampleError::InvalidInterval);
    }
    let obs = &trip.observations;
    if obs.len() < 2 {
        return Err(ResampleError::TooFewKnots(obs.len()));
    }
    // times relative to the first fix keep single precision usable
    let t0 = obs[0].t;
    let knots: Vec<(T, T)> = obs
        .iter()
        .map(|o| (T::lit(o.t - t0), T::lit(o.v)))
        .collect();
    let p = Pchip::new(&knots)?;
    let span = obs[obs.len() - 1].t - t0;
    let last = p.span().1;

    let mut clamped = 0;
    let values = (0..grid_len(span, step))
        .map(|i| {
            let x = T::lit(step * i as f64).min(last);
            let v = p.eval(x)?;
            Ok(if v < T::zero() {
                clamped += 1;
                T::zero()
            } else {
                v
            })
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(TripSamples { values, clamped })
}

/// Equally sampled velocity series of one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySeries<T> {
    pub vehicle_id: String,
    pub values: Vec<T>,
    pub sample_interval: T,
    pub trip_count: usize,
    /// Index of the first sample of every trip after the first.
    pub junctions: Vec<usize>,
    pub clamped: usize,
}

impl<T: Real> VelocitySeries<T> {
    pub fn to_time_series(&self) -> TimeSeries<T> {
        TimeSeries::new(self.values.clone())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Why a vehicle produced no series.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscardReason {
    NoUsableTrips,
    Stopped,
    TooShort { len: usize, required: usize },
}

impl std::fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiscardReason::NoUsableTrips => f.write_str("no usable trips"),
            DiscardReason::Stopped => f.write_str("vehicle never moves"),
            DiscardReason::TooShort { len, required } => {
                write!(f, "series of {len} samples, need {required}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesOutcome<T> {
    Kept(VelocitySeries<T>),
    Discarded {
        vehicle_id: String,
        reason: DiscardReason,
    },
}

/// Resamples and concatenates the trips of one vehicle. Vehicles whose series
/// is all zero or shorter than `min_len` samples are discarded.
pub fn assemble_series<T: Real>(
    vehicle_id: &str,
    trips: &[Trip],
    interval: T,
    min_len: usize,
) -> Result<SeriesOutcome<T>> {
    let mut ordered: Vec<&Trip> = trips.iter().filter(|t| t.len() >= 2).collect();
    ordered.sort_by(|a, b| a.observations[0].t.total_cmp(&b.observations[0].t));
    let discard = |reason| {
        Ok(SeriesOutcome::Discarded {
            vehicle_id: vehicle_id.to_string(),
            reason,
        })
    };
    if ordered.is_empty() {
        return discard(DiscardReason::NoUsableTrips);
    }

    let mut values = Vec::new();
    let mut junctions = Vec::new();
    let mut clamped = 0;
    for (i, trip) in ordered.iter().enumerate() {
        let samples = resample_trip(trip, interval)?;
        if i > 0 {
            junctions.push(values.len());
        }
        clamped += samples.clamped;
        values.extend(samples.values);
    }

    if values.iter().all(|&v| v == T::zero()) {
        return discard(DiscardReason::Stopped);
    }
    if values.len() < min_len {
        return discard(DiscardReason::TooShort {
            len: values.len(),
            required: min_len,
        });
    }
    if clamped > 0 {
        log::info!("{vehicle_id}: {clamped} negative interpolated velocities clamped to 0");
    }
    Ok(SeriesOutcome::Kept(VelocitySeries {
        vehicle_id: vehicle_id.to_string(),
        values,
        sample_interval: interval,
        trip_count: ordered.len(),
        junctions,
        clamped,
    }))
}

/// Trips grouped by vehicle, vehicles in order of first appearance.
pub fn group_by_vehicle(trips: &[Trip]) -> Vec<(String, Vec<Trip>)> {
    let mut groups: Vec<(String, Vec<Trip>)> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for trip in trips {
        let slot = *index.entry(trip.vehicle_id.clone()).or_insert_with(|| {
            groups.push((trip.vehicle_id.clone(), Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(trip.clone());
    }
    groups
}
