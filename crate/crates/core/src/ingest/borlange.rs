use std::collections::HashMap;
use std::path::Path;

use chrono::NaiveDateTime;

use super::{
    data_lines, displacement_velocity, geodesic_distance, read_text, reject, validate_coordinate,
    IngestError, Observation, ParseStats, Parsed, Result, Strictness, Trip,
};

pub const BORLANGE_TIME_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

struct Interval {
    vehicle: String,
    day: u32,
    trip: u32,
    start: f64,
    end: f64,
}

fn parse_time(s: &str) -> std::result::Result<f64, String> {
    NaiveDateTime::parse_from_str(s, BORLANGE_TIME_FORMAT)
        .map(|t| t.and_utc().timestamp() as f64)
        .map_err(|_| format!("bad timestamp {s:?}"))
}

fn parse_mobility_row(row: &str) -> std::result::Result<Interval, String> {
    let f: Vec<&str> = row.split(',').map(str::trim).collect();
    if f.len() != 5 {
        return Err(format!("expected 5 fields, found {}", f.len()));
    }
    let int = |s: &str| s.parse::<u32>().map_err(|_| format!("bad integer {s:?}"));
    Ok(Interval {
        vehicle: f[0].to_string(),
        day: int(f[1])?,
        trip: int(f[2])?,
        start: parse_time(f[3])?,
        end: parse_time(f[4])?,
    })
}

fn parse_nodes_row(row: &str) -> std::result::Result<(u64, u64), String> {
    match super::tokens(row).as_slice() {
        [a, b] => Ok((
            a.parse().map_err(|_| format!("bad node {a:?}"))?,
            b.parse().map_err(|_| format!("bad node {b:?}"))?,
        )),
        t => Err(format!("expected 2 node ids, found {}", t.len())),
    }
}

/// `node, lon, lat` rows into a node → `(lat, lon)` table.
fn read_node_positions(path: &Path, strictness: Strictness) -> Result<HashMap<u64, (f64, f64)>> {
    let text = read_text(path)?;
    let mut stats = ParseStats::default();
    let mut table = HashMap::new();
    for (line, row) in data_lines(&text) {
        let parsed = match super::tokens(row).as_slice() {
            [id, lon, lat] => (|| {
                let id = id.parse::<u64>().ok()?;
                let (lat, lon) = (lat.parse::<f64>().ok()?, lon.parse::<f64>().ok()?);
                validate_coordinate(lat, lon).ok()?;
                Some((id, (lat, lon)))
            })(),
            _ => None,
        };
        match parsed {
            Some((id, pos)) => {
                table.insert(id, pos);
            }
            None => reject(
                strictness,
                &mut stats,
                path,
                line,
                "expected `node, lon, lat`",
            )?,
        }
    }
    if table.is_empty() {
        return Err(IngestError::EmptyInput(path.to_path_buf()));
    }
    Ok(table)
}

/// Joins the three row-aligned files into per-`(vehicle, day, trip)` velocity trips.
///
/// Row `i` of `mobility` and row `i` of `nodes` describe the same interval; its
/// velocity is the geodesic displacement between the two nodes over the
/// interval length, stamped at the interval midpoint.
pub fn parse_borlange(
    mobility: &Path,
    nodes: &Path,
    nodepos: &Path,
    strictness: Strictness,
) -> Result<Parsed> {
    let positions = read_node_positions(nodepos, strictness)?;
    let mobility_text = read_text(mobility)?;
    let nodes_text = read_text(nodes)?;
    let mobility_rows: Vec<_> = data_lines(&mobility_text).collect();
    let node_rows: Vec<_> = data_lines(&nodes_text).collect();
    if mobility_rows.is_empty() {
        return Err(IngestError::EmptyInput(mobility.to_path_buf()));
    }
    if mobility_rows.len() != node_rows.len() {
        return Err(IngestError::RowCountMismatch {
            mobility: mobility_rows.len(),
            nodes: node_rows.len(),
        });
    }

    let mut stats = ParseStats::default();
    let mut trips: Vec<Trip> = Vec::new();
    let mut index: HashMap<(String, u32, u32), usize> = HashMap::new();
    let mut per_vehicle: HashMap<String, u32> = HashMap::new();

    for (&(mline, mrow), &(nline, nrow)) in mobility_rows.iter().zip(&node_rows) {
        stats.rows += 1;
        let interval = match parse_mobility_row(mrow) {
            Ok(i) => i,
            Err(reason) => {
                reject(strictness, &mut stats, mobility, mline, reason)?;
                continue;
            }
        };
        let (from, to) = match parse_nodes_row(nrow) {
            Ok(pair) => pair,
            Err(reason) => {
                reject(strictness, &mut stats, nodes, nline, reason)?;
                continue;
            }
        };
        let (Some(&a), Some(&b)) = (positions.get(&from), positions.get(&to)) else {
            if strictness == Strictness::Strict {
                return Err(IngestError::Malformed {
                    path: nodes.to_path_buf(),
                    line: nline,
                    reason: format!("node {from} or {to} missing from node positions"),
                });
            }
            stats.unknown_nodes += 1;
            continue;
        };

        let ds = geodesic_distance(a, b)?;
        let dt = interval.end - interval.start;
        let obs = Observation::new(
            0.5 * (interval.start + interval.end),
            displacement_velocity(ds, dt),
        );

        let key = (interval.vehicle.clone(), interval.day, interval.trip);
        let slot = *index.entry(key).or_insert_with(|| {
            let seq = per_vehicle.entry(interval.vehicle.clone()).or_insert(0);
            let mut trip = Trip::new(interval.vehicle.clone(), *seq, Vec::new());
            trip.day = Some(interval.day);
            trip.source_trip = Some(interval.trip);
            *seq += 1;
            trips.push(trip);
            trips.len() - 1
        });
        trips[slot].observations.push(obs);
    }

    Ok(Parsed { trips, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    const MOBILITY: &str = "...
4, 1, 2, 2000-11-10 14:24:11, 2000-11-10 14:24:19
4, 1, 2, 2000-11-10 14:24:19, 2000-11-10 14:24:33
4, 1, 2, 2000-11-10 14:24:33, 2000-11-10 14:24:59
4, 1, 2, 2000-11-10 14:24:59, 2000-11-10 14:25:18
4, 1, 2, 2000-11-10 14:25:18, 2000-11-10 14:25:23
4, 1, 2, 2000-11-10 14:25:23, 2000-11-10 14:26:17
4, 1, 2, 2000-11-10 14:26:17, 2000-11-10 14:26:32
...
";
    const NODES: &str = "...
316\t1076
1076\t316
316\t792
792 \t2611
2611\t321
321 \t1823
1823\t318
...
";
    const NODEPOS: &str = "...
316\t15.443687, 60.476045
1076\t15.445492, 60.474991
792\t15.442580, 60.475656
2611\t15.440816, 60.477419
321\t15.440701, 60.477410
1823\t15.438019, 60.476698
318\t15.441260, 60.475159
...
";

    fn files(dir: &Path, mobility: &str, nodes: &str, nodepos: &str) -> [PathBuf; 3] {
        let paths = [dir.join("mobility"), dir.join("nodes"), dir.join("nodepos")];
        for (p, body) in paths.iter().zip([mobility, nodes, nodepos]) {
            std::fs::write(p, body).unwrap();
        }
        paths
    }

    #[test]
    fn sample_excerpt() {
        let tmp = tempfile::tempdir().unwrap();
        let [m, n, p] = files(tmp.path(), MOBILITY, NODES, NODEPOS);
        let parsed = parse_borlange(&m, &n, &p, Strictness::Strict).unwrap();
        assert_eq!(parsed.trips.len(), 1);
        let trip = &parsed.trips[0];
        assert_eq!(trip.vehicle_id, "4");
        assert_eq!((trip.day, trip.source_trip), (Some(1), Some(2)));
        assert_eq!(trip.len(), 7);
        // 316 -> 1076 over 8 s
        let ds = geodesic_distance((60.476045, 15.443687), (60.474991, 15.445492)).unwrap();
        assert!((trip.observations[0].v - ds / 8.0).abs() < 1e-12);
        let t0 = parse_time("2000-11-10 14:24:11").unwrap();
        assert_eq!(trip.observations[0].t, t0 + 4.0);
        assert!(trip.observations.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn trips_grouped_by_vehicle_day_trip() {
        let tmp = tempfile::tempdir().unwrap();
        let mobility = "4, 1, 2, 2000-11-10 14:24:11, 2000-11-10 14:24:19
4, 1, 3, 2000-11-10 15:00:00, 2000-11-10 15:00:10
5, 1, 1, 2000-11-10 14:24:11, 2000-11-10 14:24:19
4, 1, 2, 2000-11-10 14:24:19, 2000-11-10 14:24:33
";
        let nodes = "316 1076\n1076 316\n316 792\n792 2611\n";
        let [m, n, p] = files(tmp.path(), mobility, nodes, NODEPOS);
        let parsed = parse_borlange(&m, &n, &p, Strictness::Strict).unwrap();
        let ids: Vec<_> = parsed
            .trips
            .iter()
            .map(|t| (t.vehicle_id.as_str(), t.trip_id, t.len()))
            .collect();
        assert_eq!(ids, vec![("4", 0, 2), ("4", 1, 1), ("5", 0, 1)]);
    }

    #[test]
    fn zero_interval_gives_nan() {
        let tmp = tempfile::tempdir().unwrap();
        let mobility = "4, 1, 2, 2000-11-10 14:26:32, 2000-11-10 14:26:32\n";
        let [m, n, p] = files(tmp.path(), mobility, "316 1076\n", NODEPOS);
        let parsed = parse_borlange(&m, &n, &p, Strictness::Lenient).unwrap();
        assert!(parsed.trips[0].observations[0].v.is_nan());
    }

    #[test]
    fn unknown_node_counted() {
        let tmp = tempfile::tempdir().unwrap();
        let mobility = "4, 1, 2, 2000-11-10 14:24:11, 2000-11-10 14:24:19
4, 1, 2, 2000-11-10 14:24:19, 2000-11-10 14:24:33
";
        let [m, n, p] = files(tmp.path(), mobility, "316 1076\n1076 9999\n", NODEPOS);
        let parsed = parse_borlange(&m, &n, &p, Strictness::Lenient).unwrap();
        assert_eq!(parsed.stats.unknown_nodes, 1);
        assert_eq!(parsed.trips[0].len(), 1);
        assert!(parse_borlange(&m, &n, &p, Strictness::Strict).is_err());
    }

    #[test]
    fn row_count_mismatch() {
        let tmp = tempfile::tempdir().unwrap();
        let [m, n, p] = files(tmp.path(), MOBILITY, "316 1076\n", NODEPOS);
        assert!(matches!(
            parse_borlange(&m, &n, &p, Strictness::Lenient),
            Err(IngestError::RowCountMismatch {
                mobility: 7,
                nodes: 1
            })
        ));
    }

    #[test]
    fn malformed_mobility_row() {
        let tmp = tempfile::tempdir().unwrap();
        let mobility = "4, 1, 2, 2000-11-10 14:24:11, 2000-11-10 14:24:19
4, 1, 2, yesterday, 2000-11-10 14:24:33
";
        let [m, n, p] = files(tmp.path(), mobility, "316 1076\n1076 316\n", NODEPOS);
        let parsed = parse_borlange(&m, &n, &p, Strictness::Lenient).unwrap();
        assert_eq!(parsed.stats.malformed_rows, 1);
        assert!(matches!(
            parse_borlange(&m, &n, &p, Strictness::Strict),
            Err(IngestError::Malformed { line: 2, .. })
        ));
    }
}
