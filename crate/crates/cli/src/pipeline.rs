//! In-memory pipeline behind the subcommands.

use std::path::{Path, PathBuf};

use ceplane::ingest::{
    clean_pipeline, parse_beijing, parse_borlange, parse_mobile_century, CleaningReport, Parsed,
    Trip,
};
use ceplane::noisegen::{generate_fk_noise, ladder_label, NoiseSpec};
use ceplane::ordinal::{ordinal_distribution_excluding, TimeSeries};
use ceplane::resample::{
    assemble_series, group_by_vehicle, DiscardReason, SeriesOutcome, VelocitySeries,
};
use ceplane::{ordinal_distribution, plane_point, OrdinalDistribution, PlanePoint};

use crate::config::{DatasetKind, NoiseConfig, RunConfig};
use crate::error::{CliError, Result};
use crate::export::{PlaneExport, PlaneRow, RowKind};
use crate::trips_file::read_trips;

fn validation(e: impl ToString) -> CliError {
    CliError::validation(e.to_string())
}

/// Files of a directory in name order, or the path itself.
fn expand(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CliError::input(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    Ok(files)
}

pub fn parse_dataset(cfg: &RunConfig) -> Result<Parsed> {
    let strictness = cfg.strictness;
    Ok(match cfg.dataset {
        DatasetKind::MobileCentury => {
            let mut all = Parsed::default();
            for path in &cfg.inputs {
                let p = parse_mobile_century(path, strictness)?;
                all.trips.extend(p.trips);
                all.stats.merge(p.stats);
            }
            all
        }
        DatasetKind::Borlange => {
            parse_borlange(&cfg.inputs[0], &cfg.inputs[1], &cfg.inputs[2], strictness)?
        }
        DatasetKind::Beijing => {
            let mut files = Vec::new();
            for path in &cfg.inputs {
                files.extend(expand(path)?);
            }
            parse_beijing(&files, strictness)?
        }
        DatasetKind::Canonical => read_trips(&cfg.inputs[0], strictness)?,
    })
}

/// Parses and cleans the configured dataset.
pub fn load_trips(cfg: &RunConfig) -> Result<(Vec<Trip>, CleaningReport)> {
    let parsed = parse_dataset(cfg)?;
    if parsed.stats.malformed_rows > 0 {
        log::warn!("skipped {} malformed rows", parsed.stats.malformed_rows);
    }
    let (trips, mut report) = clean_pipeline(parsed.trips, cfg.policy)?;
    report.parse = parsed.stats;
    Ok((trips, report))
}

#[derive(Debug, Clone)]
pub struct VehicleResult {
    pub series: VelocitySeries<f64>,
    pub distribution: OrdinalDistribution,
    pub point: PlanePoint<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Analysis {
    pub sample_interval: f64,
    pub vehicles: Vec<VehicleResult>,
    pub discarded: Vec<(String, DiscardReason)>,
}

impl Analysis {
    pub fn export(&self, dimension: usize, resolution: usize) -> Result<PlaneExport> {
        let rows = self
            .vehicles
            .iter()
            .map(|v| PlaneRow::point(RowKind::Vehicle, &v.point, v.series.len()))
            .collect();
        PlaneExport::with_boundaries(rows, dimension, resolution)
    }
}

/// Resamples every vehicle at `interval` and places it on the plane.
/// Vehicles too short for one window are skipped with a warning.
pub fn analyze_trips(trips: &[Trip], cfg: &RunConfig, interval: f64) -> Result<Analysis> {
    let min_len = (cfg.dimension - 1) * cfg.delay + 1;
    let mut analysis = Analysis {
        sample_interval: interval,
        ..Default::default()
    };
    for (vehicle, group) in group_by_vehicle(trips) {
        if cfg
            .vehicles
            .as_ref()
            .is_some_and(|keep| !keep.contains(&vehicle))
        {
            continue;
        }
        let series =
            match assemble_series(&vehicle, &group, interval, min_len).map_err(validation)? {
                SeriesOutcome::Kept(s) => s,
                SeriesOutcome::Discarded { vehicle_id, reason } => {
                    log::warn!("vehicle {vehicle_id} skipped: {reason}");
                    analysis.discarded.push((vehicle_id, reason));
                    continue;
                }
            };
        let ts = series.to_time_series();
        let distribution = if cfg.mask_junctions {
            ordinal_distribution_excluding(&ts, cfg.dimension, cfg.delay, &series.junctions)
        } else {
            ordinal_distribution(&ts, cfg.dimension, cfg.delay)
        }
        .map_err(validation)?;
        if distribution.total_windows() == 0 {
            log::warn!("vehicle {vehicle} skipped: no window inside a single trip");
            analysis.discarded.push((
                vehicle,
                DiscardReason::TooShort {
                    len: series.len(),
                    required: min_len,
                },
            ));
            continue;
        }
        if distribution.is_undersampled() {
            log::warn!(
                "vehicle {vehicle}: {} windows for {}! patterns",
                distribution.total_windows(),
                cfg.dimension
            );
        }
        let point = plane_point(&distribution, vehicle.as_str()).map_err(validation)?;
        analysis.vehicles.push(VehicleResult {
            series,
            distribution,
            point,
        });
    }
    if analysis.vehicles.is_empty() {
        return Err(CliError::validation(format!(
            "no vehicle yields a series at T_S = {interval} s"
        )));
    }
    Ok(analysis)
}

#[derive(Debug, Clone)]
pub struct LadderStep {
    pub exponent: f64,
    pub series: TimeSeries<f64>,
    pub point: PlanePoint<f64>,
}

pub fn noise_ladder(cfg: &NoiseConfig) -> Result<Vec<LadderStep>> {
    cfg.ks
        .iter()
        .map(|&k| {
            let series = generate_fk_noise::<f64>(&NoiseSpec::new(k, cfg.length, cfg.seed))
                .map_err(validation)?;
            let dist =
                ordinal_distribution(&series, cfg.dimension, cfg.delay).map_err(validation)?;
            let point = plane_point(&dist, ladder_label(k)).map_err(validation)?;
            Ok(LadderStep {
                exponent: k,
                series,
                point,
            })
        })
        .collect()
}

pub fn ladder_export(
    steps: &[LadderStep],
    dimension: usize,
    resolution: usize,
) -> Result<PlaneExport> {
    let rows = steps
        .iter()
        .map(|s| PlaneRow::point(RowKind::Noise, &s.point, s.series.len()))
        .collect();
    PlaneExport::with_boundaries(rows, dimension, resolution)
}
