//! Self-contained SVG rendering of plane exports.
//!
//! Boundary curves are drawn once per dimension as `class="curve"` paths.
//! Every location is a `class="point"` glyph: noise rows are triangles joined,
//! in order of decreasing entropy, by a dashed `class="ladder"` polyline;
//! vehicle rows get one marker shape per export.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{CliError, Result};
use crate::export::{PlaneExport, RowKind};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 55.0;
const MARKERS: [&str; 4] = ["circle", "square", "diamond", "cross"];
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Frame {
    c_max: f64,
}

impl Frame {
    fn x(&self, h: f64) -> f64 {
        LEFT + h * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, c: f64) -> f64 {
        HEIGHT - BOTTOM - c / self.c_max * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn glyph(out: &mut String, shape: &str, x: f64, y: f64, color: &str, class: &str, title: &str) {
    let r = 4.0;
    let body = match shape {
        "circle" => {
            format!(r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{color}">"#)
        }
        "square" => format!(
            r#"<rect class="{class}" x="{:.2}" y="{:.2}" width="{}" height="{}" fill="{color}">"#,
            x - r,
            y - r,
            2.0 * r,
            2.0 * r
        ),
        "triangle" => format!(
            r#"<path class="{class}" d="M{x:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} Z" fill="{color}">"#,
            y - r,
            x + r,
            y + r,
            x - r,
            y + r
        ),
        "diamond" => format!(
            r#"<path class="{class}" d="M{x:.2},{:.2} L{:.2},{y:.2} L{x:.2},{:.2} L{:.2},{y:.2} Z" fill="{color}">"#,
            y - r,
            x + r,
            y + r,
            x - r
        ),
        _ => format!(
            r#"<path class="{class}" d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="{color}" stroke-width="2">"#,
            x - r,
            y - r,
            x + r,
            y + r,
            x - r,
            y + r,
            x + r,
            y - r
        ),
    };
    let tag = body[1..].split(' ').next().unwrap_or("path").to_string();
    let _ = writeln!(out, "{body}<title>{}</title></{tag}>", escape(title));
}

/// Renders named exports into one figure. Fails when there is nothing to draw.
pub fn render_svg(exports: &[(String, PlaneExport)]) -> Result<String> {
    if exports.iter().all(|(_, e)| e.is_empty()) {
        return Err(CliError::validation("nothing to plot: export is empty"));
    }
    let c_top = exports
        .iter()
        .flat_map(|(_, e)| e.rows.iter().map(|r| r.complexity))
        .fold(0.0f64, f64::max);
    let frame = Frame {
        c_max: ((c_top / 0.05).ceil() * 0.05).max(0.05),
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    axes(&mut out, &frame);

    // one curve per (dimension, kind), in sample order
    let mut curves: BTreeMap<(usize, RowKind), Vec<(f64, f64)>> = BTreeMap::new();
    for (_, export) in exports {
        for row in export.rows.iter().filter(|r| r.kind.is_boundary()) {
            curves
                .entry((row.dimension, row.kind))
                .or_default()
                .push((row.entropy, row.complexity));
        }
    }
    for ((d, kind), mut pts) in curves {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup();
        let d_attr: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, &(h, c))| {
                format!(
                    "{}{:.2},{:.2}",
                    if i == 0 { "M" } else { "L" },
                    frame.x(h),
                    frame.y(c)
                )
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<path class="curve {kind}" data-dimension="{d}" d="{}" fill="none" stroke="black" stroke-width="1"/>"#,
            d_attr.join(" ")
        );
    }

    let mut ladder: Vec<(f64, f64, String)> = exports
        .iter()
        .flat_map(|(_, e)| e.rows.iter().filter(|r| r.kind == RowKind::Noise))
        .map(|r| (r.entropy, r.complexity, r.label.clone()))
        .collect();
    ladder.sort_by(|a, b| b.0.total_cmp(&a.0));
    if ladder.len() > 1 {
        let pts: Vec<String> = ladder
            .iter()
            .map(|(h, c, _)| format!("{:.2},{:.2}", frame.x(*h), frame.y(*c)))
            .collect();
        let _ = writeln!(
            out,
            r##"<polyline class="ladder" points="{}" fill="none" stroke="#555555" stroke-dasharray="5,4"/>"##,
            pts.join(" ")
        );
    }
    for (h, c, label) in &ladder {
        glyph(
            &mut out,
            "triangle",
            frame.x(*h),
            frame.y(*c),
            "#555555",
            "point noise",
            label,
        );
    }

    let mut legend_y = TOP + 10.0;
    let legend_x = WIDTH - RIGHT + 20.0;
    if !ladder.is_empty() {
        legend(
            &mut out,
            "triangle",
            "#555555",
            legend_x,
            legend_y,
            "f^-k noise",
        );
        legend_y += 18.0;
    }
    for (i, (name, export)) in exports.iter().enumerate() {
        let shape = MARKERS[i % MARKERS.len()];
        let color = COLORS[i % COLORS.len()];
        let mut any = false;
        for row in export.rows.iter().filter(|r| r.kind == RowKind::Vehicle) {
            glyph(
                &mut out,
                shape,
                frame.x(row.entropy),
                frame.y(row.complexity),
                color,
                "point vehicle",
                &row.label,
            );
            any = true;
        }
        if any {
            legend(&mut out, shape, color, legend_x, legend_y, name);
            legend_y += 18.0;
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn legend(out: &mut String, shape: &str, color: &str, x: f64, y: f64, name: &str) {
    let mut g = String::new();
    glyph(&mut g, shape, x, y, color, "legend-marker", name);
    out.push_str(&g);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
        x + 10.0,
        y + 4.0,
        escape(name)
    );
}

fn axes(out: &mut String, frame: &Frame) {
    let (x0, x1) = (frame.x(0.0), frame.x(1.0));
    let (y0, y1) = (frame.y(0.0), frame.y(frame.c_max));
    let _ = writeln!(
        out,
        r#"<rect class="frame" x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for i in 0..=5 {
        let h = i as f64 * 0.2;
        let x = frame.x(h);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{h:.1}</text>"#,
            y0 + 5.0,
            y0 + 18.0
        );
    }
    let steps = (frame.c_max / 0.05).round() as usize;
    for i in 0..=steps {
        let c = i as f64 * 0.05;
        let y = frame.y(c);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{c:.2}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Permutation entropy H</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(18,{:.2}) rotate(-90)" text-anchor="middle">Statistical complexity C</text>"#,
        (y0 + y1) / 2.0
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::export::PlaneRow;

    fn row(label: &str, kind: RowKind, h: f64, c: f64) -> PlaneRow {
        PlaneRow {
            label: label.into(),
            kind,
            entropy: h,
            complexity: c,
            dimension: 4,
            delay: Some(1),
            length: Some(100),
        }
    }

    #[test]
    fn counts_glyphs_and_curves() {
        let rows = vec![
            row("a", RowKind::Vehicle, 0.7, 0.2),
            row("b<&>", RowKind::Vehicle, 0.9, 0.1),
        ];
        let export = PlaneExport::with_boundaries(rows, 4, 64).unwrap();
        let svg = render_svg(&[("mc".into(), export)]).unwrap();
        assert_eq!(svg.matches(r#"class="point"#).count(), 2);
        assert_eq!(svg.matches(r#"class="curve"#).count(), 2);
        assert!(svg.contains("b&lt;&amp;&gt;"));
        assert!(!svg.contains("class=\"ladder\""));
    }

    #[test]
    fn empty_export_is_an_error() {
        assert!(render_svg(&[("x".into(), PlaneExport::default())]).is_err());
        assert!(render_svg(&[]).is_err());
    }
}
