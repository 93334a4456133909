use std::path::{Path, PathBuf};

use super::{
    data_lines, read_text, reject, GpsFix, IngestError, Observation, ParseStats, Parsed, Result,
    SpeedUnit, Strictness, Trip,
};

/// Exact conversion factor, 1 mi = 1609.344 m.
pub const MPH_TO_MPS: f64 = 1609.344 / 3600.0;

/// Reads the fixes of one vehicle log.
pub fn read_mobile_century_fixes(
    path: &Path,
    strictness: Strictness,
) -> Result<(Vec<GpsFix>, ParseStats)> {
    let text = read_text(path)?;
    let mut stats = ParseStats::default();
    let mut fixes = Vec::new();
    for (line, row) in data_lines(&text) {
        stats.rows += 1;
        match parse_row(row) {
            Ok(fix) => fixes.push(fix),
            Err(reason) => reject(strictness, &mut stats, path, line, reason)?,
        }
    }
    if stats.rows == 0 {
        return Err(IngestError::EmptyInput(path.to_path_buf()));
    }
    Ok((fixes, stats))
}

fn parse_row(row: &str) -> std::result::Result<GpsFix, String> {
    let fields: Vec<&str> = row.split(',').map(str::trim).collect();
    if fields.len() != 4 {
        return Err(format!("expected 4 fields, found {}", fields.len()));
    }
    let ms: i64 = fields[0]
        .parse()
        .map_err(|_| format!("bad timestamp {:?}", fields[0]))?;
    let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| format!("bad {what} {s:?}"));
    let lat = num(fields[1], "latitude")?;
    let lon = num(fields[2], "longitude")?;
    let mph = num(fields[3], "speed")?;
    let mut fix = GpsFix::new(ms as f64 / 1000.0, lat, lon).map_err(|e| e.to_string())?;
    fix.speed = Some((mph, SpeedUnit::MilesPerHour));
    Ok(fix)
}

fn log_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let io = |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(path).map_err(io)? {
        let p = entry.map_err(io)?.path();
        if p.is_file() {
            files.push(p);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(IngestError::EmptyInput(path.to_path_buf()));
    }
    Ok(files)
}

/// Parses one vehicle log, or every file of a directory (one vehicle per file,
/// named after the file stem). Each log becomes a single trip.
pub fn parse_mobile_century(path: &Path, strictness: Strictness) -> Result<Parsed> {
    let mut parsed = Parsed::default();
    for file in log_files(path)? {
        let (fixes, mut stats) = read_mobile_century_fixes(&file, strictness)?;
        let vehicle = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut observations: Vec<Observation> = Vec::with_capacity(fixes.len());
        for fix in fixes {
            if observations.last().is_some_and(|o| fix.timestamp <= o.t) {
                stats.non_monotone += 1;
                continue;
            }
            let v = fix.speed.map_or(f64::NAN, |(s, unit)| unit.to_mps(s));
            observations.push(Observation::new(fix.timestamp, v));
        }
        parsed.stats.merge(stats);
        if !observations.is_empty() {
            parsed.trips.push(Trip::new(vehicle, 0, observations));
        }
    }
    Ok(parsed)
}
