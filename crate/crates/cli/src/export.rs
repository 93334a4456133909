//! Plane export: one CSV row per plane location or boundary sample.
//!
//! Header `label,kind,H,C,D,tau,M`. `kind` is `vehicle`, `noise`, `cmin` or
//! `cmax`; boundary rows leave `tau` and `M` empty. `H` and `C` carry 12
//! significant digits and are rounded to them when a row is built, so an
//! export read back compares equal to the one written.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ceplane::ordinal::factorial;
use ceplane::quantifiers::{boundary_curves, within_bounds, BoundaryCurve, BoundaryKind};
use ceplane::PlanePoint;

use crate::error::{write_file, CliError, Result};

pub const PLANE_HEADER: [&str; 7] = ["label", "kind", "H", "C", "D", "tau", "M"];
pub const SIGNIFICANT_DIGITS: usize = 12;
/// Slack allowed between an exported location and the boundary curves.
pub const CONTAINMENT_TOLERANCE: f64 = 1e-9;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn quantize(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest text that reads back to the same `f64`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".to_string()
    } else if !(1e-5..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowKind {
    Vehicle,
    Noise,
    MinBoundary,
    MaxBoundary,
}

impl RowKind {
    pub fn is_boundary(self) -> bool {
        matches!(self, RowKind::MinBoundary | RowKind::MaxBoundary)
    }
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowKind::Vehicle => "vehicle",
            RowKind::Noise => "noise",
            RowKind::MinBoundary => "cmin",
            RowKind::MaxBoundary => "cmax",
        })
    }
}

impl FromStr for RowKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "vehicle" => Ok(RowKind::Vehicle),
            "noise" => Ok(RowKind::Noise),
            "cmin" => Ok(RowKind::MinBoundary),
            "cmax" => Ok(RowKind::MaxBoundary),
            other => Err(format!("unknown row kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneRow {
    pub label: String,
    pub kind: RowKind,
    pub entropy: f64,
    pub complexity: f64,
    pub dimension: usize,
    pub delay: Option<usize>,
    /// Length of the analyzed series.
    pub length: Option<usize>,
}

impl PlaneRow {
    pub fn point(kind: RowKind, point: &PlanePoint<f64>, length: usize) -> Self {
        Self {
            label: point.label.clone(),
            kind,
            entropy: quantize(point.entropy),
            complexity: quantize(point.complexity),
            dimension: point.dimension,
            delay: Some(point.delay),
            length: Some(length),
        }
    }

    pub fn boundary(curve: &BoundaryCurve<f64>, dimension: usize) -> Vec<Self> {
        let kind = match curve.kind {
            BoundaryKind::Minimum => RowKind::MinBoundary,
            BoundaryKind::Maximum => RowKind::MaxBoundary,
        };
        curve
            .samples
            .iter()
            .map(|&(h, c)| Self {
                label: kind.to_string(),
                kind,
                entropy: quantize(h),
                complexity: quantize(c),
                dimension,
                delay: None,
                length: None,
            })
            .collect()
    }

    pub fn is_contained(&self) -> bool {
        within_bounds(
            factorial(self.dimension),
            self.entropy,
            self.complexity,
            CONTAINMENT_TOLERANCE,
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlaneExport {
    pub rows: Vec<PlaneRow>,
}

impl PlaneExport {
    /// Location rows followed by the boundary curves for `dimension`.
    pub fn with_boundaries(
        mut rows: Vec<PlaneRow>,
        dimension: usize,
        resolution: usize,
    ) -> Result<Self> {
        let (min, max) = boundary_curves::<f64>(factorial(dimension), resolution)
            .map_err(|e| CliError::validation(e.to_string()))?;
        rows.extend(PlaneRow::boundary(&min, dimension));
        rows.extend(PlaneRow::boundary(&max, dimension));
        Ok(Self { rows })
    }

    pub fn points(&self) -> impl Iterator<Item = &PlaneRow> {
        self.rows.iter().filter(|r| !r.kind.is_boundary())
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Every row must lie between the boundary curves of its dimension.
    pub fn validate(&self) -> Result<()> {
        for row in &self.rows {
            if !(ceplane::ordinal::MIN_DIMENSION..=ceplane::ordinal::MAX_DIMENSION)
                .contains(&row.dimension)
            {
                return Err(CliError::validation(format!(
                    "{}: dimension {} out of range",
                    row.label, row.dimension
                )));
            }
            if !row.is_contained() {
                return Err(CliError::validation(format!(
                    "{} ({}) at H={}, C={} lies outside the plane",
                    row.label, row.kind, row.entropy, row.complexity
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(PLANE_HEADER).expect("in-memory write");
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.label.clone(),
                r.kind.to_string(),
                format_number(r.entropy),
                format_number(r.complexity),
                r.dimension.to_string(),
                opt(r.delay),
                opt(r.length),
            ])
            .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    /// Validates, then writes the export.
    pub fn write(&self, path: &Path) -> Result<()> {
        self.validate()?;
        write_file(path, &self.to_csv())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        Self::parse(&text).map_err(|reason| CliError::input(path, reason))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| e.to_string())?;
        if header.iter().ne(PLANE_HEADER) {
            return Err(format!("expected header {}", PLANE_HEADER.join(",")));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let r = record.map_err(|e| e.to_string())?;
            let line = i + 2;
            let bad = |field: &str| format!("line {line}: bad {field}");
            let opt = |s: &str, field: &str| -> std::result::Result<Option<usize>, String> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| bad(field))
                }
            };
            rows.push(PlaneRow {
                label: r[0].to_string(),
                kind: r[1].parse().map_err(|e| format!("line {line}: {e}"))?,
                entropy: r[2].parse().map_err(|_| bad("H"))?,
                complexity: r[3].parse().map_err(|_| bad("C"))?,
                dimension: r[4].parse().map_err(|_| bad("D"))?,
                delay: opt(&r[5], "tau")?,
                length: opt(&r[6], "M")?,
            });
        }
        Ok(Self { rows })
    }
}
