use std::collections::HashSet;
use std::path::{Path, PathBuf};

use ceplane::ingest::{CleaningReport, Trip};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{NoiseArgs, NoiseConfig, RunArgs, RunConfig};
use crate::error::{write_file, CliError, Result};
use crate::export::{format_number, PlaneExport};
use crate::pipeline::{analyze_trips, ladder_export, load_trips, noise_ladder, Analysis};
use crate::plot::render_svg;
use crate::trips_file::write_trips;

pub const TRIPS_FILE: &str = "trips.csv";
pub const CLEANING_REPORT_FILE: &str = "cleaning_report.json";
pub const ANALYSIS_REPORT_FILE: &str = "analysis_report.json";
pub const PLANE_FILE: &str = "plane.csv";
pub const PDF_DIR: &str = "pdf";
pub const SERIES_DIR: &str = "series";

#[derive(Debug, Parser)]
#[command(
    name = "ceplane",
    version,
    about = "Velocity series on the complexity-entropy causality plane"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and clean a dataset into a trips file and a cleaning report.
    Ingest(RunArgs),
    /// Place every vehicle on the plane and write its pattern distribution.
    Analyze(RunArgs),
    /// Generate the f^-k reference ladder.
    Noise(NoiseArgs),
    /// Repeat `analyze` for several sampling intervals.
    Sweep(RunArgs),
    /// Draw plane exports as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Plane exports to overlay.
    #[arg(required = true)]
    pub exports: Vec<PathBuf>,
    /// Legend names, one per export (default: the export paths).
    #[arg(long, value_delimiter = ',')]
    pub names: Option<Vec<String>>,
    /// SVG file to write.
    #[arg(long, default_value = "plane.svg")]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::Ingest(args) => cmd_ingest(&RunConfig::resolve(args)?),
        Command::Analyze(args) => cmd_analyze(&RunConfig::resolve(args)?),
        Command::Noise(args) => cmd_noise(&NoiseConfig::resolve(args)?),
        Command::Sweep(args) => cmd_sweep(&RunConfig::resolve(args)?),
        Command::Plot(args) => cmd_plot(&args),
    }
}

fn vehicle_count(trips: &[Trip]) -> usize {
    trips
        .iter()
        .map(|t| t.vehicle_id.as_str())
        .collect::<HashSet<_>>()
        .len()
}

pub fn cleaning_report_json(
    cfg: &RunConfig,
    trips: &[Trip],
    r: &CleaningReport,
) -> serde_json::Value {
    json!({
        "dataset": cfg.dataset.to_string(),
        "policy": cfg.policy.to_string(),
        "parse": {
            "rows": r.parse.rows,
            "malformed_rows": r.parse.malformed_rows,
            "unknown_nodes": r.parse.unknown_nodes,
            "non_monotone": r.parse.non_monotone,
        },
        "observations": {
            "parsed": r.parsed,
            "retained": r.retained,
            "discarded": r.discarded(),
            "discarded_nan": r.discarded_nan,
            "discarded_inf": r.discarded_inf,
            "discarded_negative": r.discarded_negative,
            "discarded_non_monotone": r.discarded_non_monotone,
            "discarded_outlier_trip": r.discarded_outlier_trip_observations,
            "discarded_outliers": r.discarded_outliers,
            "discarded_short_trip": r.discarded_short_trip_observations,
        },
        "trips": {
            "retained": r.retained_trips,
            "outlier_trips": r.outlier_trips,
            "short_trips": r.short_trips,
        },
        "vehicles": vehicle_count(trips),
        "trip_mean_quartiles": r.trip_mean_quartiles.map(|(a, b)| [a, b]),
        "velocity_upper_quartile": r.velocity_upper_quartile,
    })
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json value serializes");
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn cmd_ingest(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (trips, report) = load_trips(cfg)?;
    let trips_path = cfg.out.join(TRIPS_FILE);
    let report_path = cfg.out.join(CLEANING_REPORT_FILE);
    write_trips(&trips_path, &trips)?;
    write_json(&report_path, &cleaning_report_json(cfg, &trips, &report))?;
    log::info!(
        "{} trips of {} vehicles, {} of {} observations kept",
        report.retained_trips,
        vehicle_count(&trips),
        report.retained,
        report.parsed
    );
    Ok(vec![trips_path, report_path])
}

fn file_stem_for(label: &str, taken: &mut HashSet<String>) -> String {
    let base: String = label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    let mut name = base.clone();
    let mut n = 1;
    while !taken.insert(name.clone()) {
        n += 1;
        name = format!("{base}_{n}");
    }
    name
}

fn pdf_csv(analysis: &crate::pipeline::VehicleResult) -> Vec<u8> {
    let d = &analysis.distribution;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["pattern", "index", "count", "probability"])
        .expect("in-memory write");
    let probs = d.probabilities::<f64>();
    for (p, count) in d.patterns() {
        w.write_record([
            p.to_string(),
            p.index().to_string(),
            count.to_string(),
            format_number(probs[p.index()]),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn analysis_report_json(a: &Analysis) -> serde_json::Value {
    let kept: Vec<_> = a
        .vehicles
        .iter()
        .map(|v| {
            json!({
                "vehicle": v.series.vehicle_id,
                "samples": v.series.len(),
                "trips": v.series.trip_count,
                "windows": v.distribution.total_windows(),
                "undersampled": v.distribution.is_undersampled(),
                "clamped": v.series.clamped,
            })
        })
        .collect();
    let discarded: Vec<_> = a
        .discarded
        .iter()
        .map(|(id, reason)| json!({ "vehicle": id, "reason": reason.to_string() }))
        .collect();
    json!({ "sample_interval": a.sample_interval, "kept": kept, "discarded": discarded })
}

/// Writes the plane export, pattern distributions and run report of one interval.
pub fn write_analysis(
    cfg: &RunConfig,
    trips: &[Trip],
    interval: f64,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let analysis = analyze_trips(trips, cfg, interval)?;
    let export = analysis.export(cfg.dimension, cfg.boundary_resolution)?;
    let plane_path = dir.join(PLANE_FILE);
    export.write(&plane_path)?;
    let mut written = vec![plane_path];

    let mut taken = HashSet::new();
    for v in &analysis.vehicles {
        let path = dir.join(PDF_DIR).join(format!(
            "{}.csv",
            file_stem_for(&v.series.vehicle_id, &mut taken)
        ));
        write_file(&path, &pdf_csv(v))?;
        written.push(path);
    }
    let report = dir.join(ANALYSIS_REPORT_FILE);
    write_json(&report, &analysis_report_json(&analysis))?;
    written.push(report);
    Ok(written)
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let interval = cfg.sample_interval()?;
    let (trips, _) = load_trips(cfg)?;
    write_analysis(cfg, &trips, interval, &cfg.out)
}

/// Directory of one sweep step, e.g. `ts_14`.
pub fn sweep_dir(out: &Path, interval: f64) -> PathBuf {
    out.join(format!("ts_{}", format_number(interval)))
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    if cfg.sample_intervals.is_empty() {
        return Err(CliError::validation("sweep needs --sample-interval"));
    }
    let (trips, _) = load_trips(cfg)?;
    let mut written = Vec::new();
    for &t in &cfg.sample_intervals {
        written.extend(write_analysis(cfg, &trips, t, &sweep_dir(&cfg.out, t))?);
    }
    Ok(written)
}

pub fn cmd_noise(cfg: &NoiseConfig) -> Result<Vec<PathBuf>> {
    let steps = noise_ladder(cfg)?;
    let plane_path = cfg.out.join(PLANE_FILE);
    ladder_export(&steps, cfg.dimension, cfg.boundary_resolution)?.write(&plane_path)?;
    let mut written = vec![plane_path];
    for step in &steps {
        let path = cfg
            .out
            .join(SERIES_DIR)
            .join(format!("noise_k{}.csv", format_number(step.exponent)));
        let mut text = String::from("x\n");
        for &x in step.series.values() {
            text.push_str(&format_number(x));
            text.push('\n');
        }
        write_file(&path, text.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

pub fn cmd_plot(args: &PlotArgs) -> Result<Vec<PathBuf>> {
    if let Some(names) = &args.names {
        if names.len() != args.exports.len() {
            return Err(CliError::validation(format!(
                "{} names for {} exports",
                names.len(),
                args.exports.len()
            )));
        }
    }
    let mut exports = Vec::new();
    for (i, path) in args.exports.iter().enumerate() {
        let export = PlaneExport::read(path)?;
        export.validate()?;
        let name = match &args.names {
            Some(n) => n[i].clone(),
            None => path.display().to_string(),
        };
        exports.push((name, export));
    }
    let svg = render_svg(&exports)?;
    write_file(&args.out, svg.as_bytes())?;
    Ok(vec![args.out.clone()])
}
