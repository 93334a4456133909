//! Canonical trips file: comma-separated, header `vehicle_id,trip_id,t,v`,
//! one row per observation, `t` in seconds and `v` in m/s. Rows of one trip
//! are contiguous and time-ordered.

use std::collections::HashMap;
use std::path::Path;

use ceplane::ingest::{IngestError, Observation, ParseStats, Parsed, Strictness, Trip};

use crate::error::{write_file, CliError, Result};
use crate::export::format_number;

pub const TRIPS_HEADER: [&str; 4] = ["vehicle_id", "trip_id", "t", "v"];

pub fn trips_to_csv(trips: &[Trip]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRIPS_HEADER).expect("in-memory write");
    for trip in trips {
        let id = trip.trip_id.to_string();
        for o in &trip.observations {
            w.write_record([
                trip.vehicle_id.as_str(),
                id.as_str(),
                &format_number(o.t),
                &format_number(o.v),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

pub fn write_trips(path: &Path, trips: &[Trip]) -> Result<()> {
    write_file(path, &trips_to_csv(trips))
}

pub fn read_trips(path: &Path, strictness: Strictness) -> Result<Parsed> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_trips(path, &text, strictness)
}

fn parse_trips(path: &Path, text: &str, strictness: Strictness) -> Result<Parsed> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| CliError::input(path, e))?
        .clone();
    if header.iter().ne(TRIPS_HEADER) {
        return Err(CliError::input(
            path,
            format!("expected header {}", TRIPS_HEADER.join(",")),
        ));
    }

    let mut stats = ParseStats::default();
    let mut trips: Vec<Trip> = Vec::new();
    let mut index: HashMap<(String, u32), usize> = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        stats.rows += 1;
        let row = record
            .map_err(|e| e.to_string())
            .and_then(|r| parse_row(&r));
        let (vehicle, trip_id, obs) = match row {
            Ok(row) => row,
            Err(reason) if strictness == Strictness::Strict => {
                return Err(IngestError::Malformed {
                    path: path.to_path_buf(),
                    line,
                    reason,
                }
                .into())
            }
            Err(reason) => {
                log::warn!("{}:{line}: skipped: {reason}", path.display());
                stats.malformed_rows += 1;
                continue;
            }
        };
        let slot = *index.entry((vehicle.clone(), trip_id)).or_insert_with(|| {
            trips.push(Trip::new(vehicle, trip_id, Vec::new()));
            trips.len() - 1
        });
        trips[slot].observations.push(obs);
    }
    if stats.rows == 0 {
        return Err(IngestError::EmptyInput(path.to_path_buf()).into());
    }
    Ok(Parsed { trips, stats })
}

fn parse_row(r: &csv::StringRecord) -> std::result::Result<(String, u32, Observation), String> {
    if r.len() != 4 {
        return Err(format!("expected 4 fields, found {}", r.len()));
    }
    let vehicle = r[0].to_string();
    if vehicle.is_empty() {
        return Err("empty vehicle id".into());
    }
    let trip_id = r[1]
        .parse()
        .map_err(|_| format!("bad trip id {:?}", &r[1]))?;
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("bad number {s:?}"));
    Ok((vehicle, trip_id, Observation::new(num(&r[2])?, num(&r[3])?)))
}
