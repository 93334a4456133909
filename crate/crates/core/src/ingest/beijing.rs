use std::collections::HashMap;
use std::path::PathBuf;

use super::{
    data_lines, interval_observation, read_text, reject, GpsFix, IngestError, Observation,
    ParseStats, Parsed, Result, Strictness, Trip,
};

/// Coordinates are stored as integer degrees·10⁵.
pub const BEIJING_COORDINATE_SCALE: f64 = 1e-5;

fn parse_row(row: &str) -> std::result::Result<(String, GpsFix), String> {
    let f: Vec<&str> = row.split(',').map(str::trim).collect();
    if f.len() != 5 {
        return Err(format!("expected 5 fields, found {}", f.len()));
    }
    let t: i64 = f[1]
        .parse()
        .map_err(|_| format!("bad timestamp {:?}", f[1]))?;
    let lat: i64 = f[2]
        .parse()
        .map_err(|_| format!("bad latitude {:?}", f[2]))?;
    let lon: i64 = f[3]
        .parse()
        .map_err(|_| format!("bad longitude {:?}", f[3]))?;
    let fix = GpsFix::new(
        t as f64,
        lat as f64 * BEIJING_COORDINATE_SCALE,
        lon as f64 * BEIJING_COORDINATE_SCALE,
    )
    .map_err(|e| e.to_string())?;
    Ok((f[0].to_string(), fix))
}

/// Fixes of each vehicle, keyed by vehicle id.
pub type VehicleFixes = Vec<(String, Vec<GpsFix>)>;

/// Per-vehicle fixes in first-appearance order. Fixes whose timestamp does not
/// advance past the vehicle's previous accepted fix are dropped and counted.
pub fn read_beijing_fixes(
    paths: &[PathBuf],
    strictness: Strictness,
) -> Result<(VehicleFixes, ParseStats)> {
    let mut stats = ParseStats::default();
    let mut vehicles: VehicleFixes = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for path in paths {
        let text = read_text(path)?;
        for (line, row) in data_lines(&text) {
            stats.rows += 1;
            let (id, fix) = match parse_row(row) {
                Ok(r) => r,
                Err(reason) => {
                    reject(strictness, &mut stats, path, line, reason)?;
                    continue;
                }
            };
            let slot = *index.entry(id.clone()).or_insert_with(|| {
                vehicles.push((id, Vec::new()));
                vehicles.len() - 1
            });
            let fixes = &mut vehicles[slot].1;
            if fixes
                .last()
                .is_some_and(|p: &GpsFix| fix.timestamp <= p.timestamp)
            {
                stats.non_monotone += 1;
                continue;
            }
            fixes.push(fix);
        }
    }
    if stats.rows == 0 {
        let p = paths.first().cloned().unwrap_or_default();
        return Err(IngestError::EmptyInput(p));
    }
    Ok((vehicles, stats))
}

/// Cuts a velocity sequence into trips. A trip opens when the velocity leaves
/// zero and closes when it returns to zero; the bounding zero observations
/// belong to the trip. A trailing run that never returns to zero is kept.
pub fn split_trips_at_stops(vehicle: &str, observations: &[Observation]) -> Vec<Trip> {
    let mut trips = Vec::new();
    let mut current: Vec<Observation> = Vec::new();
    let mut last_stop: Option<Observation> = None;
    let mut moving = false;
    for &o in observations {
        if o.v == 0.0 {
            if moving {
                current.push(o);
                trips.push(Trip::new(
                    vehicle,
                    trips.len() as u32,
                    std::mem::take(&mut current),
                ));
                moving = false;
            }
            last_stop = Some(o);
        } else {
            if !moving {
                current.extend(last_stop.take());
                moving = true;
            }
            current.push(o);
        }
    }
    if moving {
        trips.push(Trip::new(vehicle, trips.len() as u32, current));
    }
    trips
}

/// Reads the day files in the order given and derives per-vehicle trips from
/// consecutive fixes. The raw speed column is not used.
pub fn parse_beijing(paths: &[PathBuf], strictness: Strictness) -> Result<Parsed> {
    let (vehicles, stats) = read_beijing_fixes(paths, strictness)?;
    let mut trips = Vec::new();
    for (id, fixes) in &vehicles {
        let observations: Vec<Observation> = fixes
            .windows(2)
            .map(|w| interval_observation(&w[0], &w[1]))
            .collect();
        trips.extend(split_trips_at_stops(id, &observations));
    }
    Ok(Parsed { trips, stats })
}
