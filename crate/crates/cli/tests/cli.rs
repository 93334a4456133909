use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ceplane_cli::{PlaneExport, RowKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ceplane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ceplane"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = ceplane(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Canonical trips file with one trip per vehicle sampled every second.
fn trips_file(dir: &Path, vehicles: &[(&str, Vec<f64>)]) -> PathBuf {
    let mut text = String::from("vehicle_id,trip_id,t,v\n");
    for (id, vs) in vehicles {
        for (i, v) in vs.iter().enumerate() {
            text.push_str(&format!("{id},0,{i},{v}\n"));
        }
    }
    let path = dir.join("trips.csv");
    std::fs::write(&path, text).unwrap();
    path
}

fn mobile_century_log(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    for i in 0..n {
        let ms = 1_202_497_202_837u64 + 3000 * i as u64;
        let mph: f64 = rng.random_range(0.0..70.0);
        text.push_str(&format!("{ms}, 37.60043, -122.06375, {mph:.3}\n"));
    }
    text
}

#[test]
fn ingest_mobile_century_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let logs = tmp.path().join("logs");
    std::fs::create_dir(&logs).unwrap();
    std::fs::write(logs.join("veh01.txt"), mobile_century_log(50, 1)).unwrap();
    std::fs::write(logs.join("veh02.txt"), mobile_century_log(60, 2)).unwrap();
    let out = tmp.path().join("out");
    ok(&[
        "ingest",
        "--dataset",
        "mobile-century",
        s(&logs),
        "--out",
        s(&out),
    ]);

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("cleaning_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["vehicles"], 2);
    assert_eq!(report["observations"]["parsed"], 110);
    assert_eq!(report["observations"]["retained"], 110);
    let trips = std::fs::read_to_string(out.join("trips.csv")).unwrap();
    assert!(trips.starts_with("vehicle_id,trip_id,t,v\nveh01,0,1202497202.837,"));
    assert_eq!(trips.lines().count(), 111);
}

#[test]
fn ingest_empty_directory_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let out = ceplane(&[
        "ingest",
        "--dataset",
        "mobile-century",
        s(&empty),
        "--out",
        s(&tmp.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lenient_skips_and_strict_aborts() {
    let tmp = tempfile::tempdir().unwrap();
    let log = tmp.path().join("veh.txt");
    let mut text = mobile_century_log(10, 3);
    text.push_str("1202497302837, 37.6, -122.06\n");
    std::fs::write(&log, text).unwrap();
    let out = tmp.path().join("out");
    ok(&[
        "ingest",
        "--dataset",
        "mobile-century",
        s(&log),
        "--lenient",
        "--out",
        s(&out),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("cleaning_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["parse"]["malformed_rows"], 1);

    let strict = ceplane(&[
        "ingest",
        "--dataset",
        "mobile-century",
        s(&log),
        "--strict",
        "--out",
        s(&out),
    ]);
    assert_eq!(strict.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&strict.stderr).contains(":11:"));
}

#[test]
fn increasing_trip_sits_at_origin() {
    let tmp = tempfile::tempdir().unwrap();
    let trips = trips_file(
        tmp.path(),
        &[("up", (0..200).map(|i| 0.5 * i as f64).collect())],
    );
    let out = tmp.path().join("out");
    ok(&[
        "analyze",
        "--dataset",
        "canonical",
        s(&trips),
        "--sample-interval",
        "1",
        "--out",
        s(&out),
    ]);
    let export = PlaneExport::read(&out.join("plane.csv")).unwrap();
    let p: Vec<_> = export.points().collect();
    assert_eq!(p.len(), 1);
    assert_eq!((p[0].entropy, p[0].complexity), (0.0, 0.0));
    assert_eq!(
        (p[0].dimension, p[0].delay, p[0].length),
        (4, Some(1), Some(200))
    );

    let pdf = std::fs::read_to_string(out.join("pdf").join("up.csv")).unwrap();
    assert_eq!(pdf.lines().count(), 25);
    assert!(pdf.contains("\n0123,0,197,1\n"));
}

#[test]
fn white_noise_trip_sits_near_full_entropy() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let vs: Vec<f64> = (0..20_000).map(|_| rng.random_range(0.0..30.0)).collect();
    let trips = trips_file(tmp.path(), &[("w", vs)]);
    let out = tmp.path().join("out");
    ok(&[
        "analyze",
        "--dataset",
        "canonical",
        s(&trips),
        "--sample-interval",
        "1",
        "--out",
        s(&out),
    ]);
    let export = PlaneExport::read(&out.join("plane.csv")).unwrap();
    let p = export.points().next().unwrap();
    assert!(p.entropy >= 0.99 && p.complexity <= 0.01, "{p:?}");
}

#[test]
fn analyze_is_byte_reproducible_and_contained() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let vehicles: Vec<(&str, Vec<f64>)> = ["a", "b", "c"]
        .iter()
        .map(|&id| (id, (0..500).map(|_| rng.random_range(0.0..20.0)).collect()))
        .collect();
    let trips = trips_file(tmp.path(), &vehicles);
    let run = |name: &str| {
        let out = tmp.path().join(name);
        ok(&[
            "analyze",
            "--dataset",
            "canonical",
            s(&trips),
            "--sample-interval",
            "2",
            "--out",
            s(&out),
        ]);
        std::fs::read(out.join("plane.csv")).unwrap()
    };
    let (a, b) = (run("one"), run("two"));
    assert_eq!(a, b);
    let export = PlaneExport::parse(std::str::from_utf8(&a).unwrap()).unwrap();
    export.validate().unwrap();
    assert!(export.rows.iter().all(|r| r.is_contained()));
    let labels: Vec<_> = export.points().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["a", "b", "c"]);
    assert_eq!(
        std::fs::read(tmp.path().join("one/pdf/b.csv")).unwrap(),
        std::fs::read(tmp.path().join("two/pdf/b.csv")).unwrap()
    );
}

#[test]
fn vehicle_subset_and_short_vehicles() {
    let tmp = tempfile::tempdir().unwrap();
    let trips = trips_file(
        tmp.path(),
        &[
            ("long", (0..100).map(|i| (i % 7) as f64).collect()),
            ("tiny", vec![1.0, 2.0]),
        ],
    );
    let out = tmp.path().join("out");
    ok(&[
        "analyze",
        "--dataset",
        "canonical",
        s(&trips),
        "--sample-interval",
        "1",
        "--out",
        s(&out),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("analysis_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["kept"].as_array().unwrap().len(), 1);
    assert_eq!(report["discarded"][0]["vehicle"], "tiny");

    let only = ceplane(&[
        "analyze",
        "--dataset",
        "canonical",
        s(&trips),
        "--sample-interval",
        "1",
        "--vehicles",
        "tiny",
        "--out",
        s(&out),
    ]);
    assert_eq!(only.status.code(), Some(2));
}

#[test]
fn noise_ladder_export_and_series() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        ok(&[
            "noise",
            "--ks",
            "0,1,2",
            "--length",
            "4096",
            "--seed",
            "3",
            "--out",
            s(&out),
        ]);
        out
    };
    let (a, b) = (run("a"), run("b"));
    let bytes = std::fs::read(a.join("plane.csv")).unwrap();
    assert_eq!(bytes, std::fs::read(b.join("plane.csv")).unwrap());
    let export = PlaneExport::parse(std::str::from_utf8(&bytes).unwrap()).unwrap();
    let noise: Vec<_> = export.points().collect();
    assert_eq!(
        noise.iter().map(|r| r.label.as_str()).collect::<Vec<_>>(),
        ["k=0", "k=1", "k=2"]
    );
    assert!(noise
        .iter()
        .all(|r| r.kind == RowKind::Noise && r.length == Some(4096)));
    assert!(noise[0].entropy > noise[1].entropy && noise[1].entropy > noise[2].entropy);
    let series = std::fs::read_to_string(a.join("series").join("noise_k1.csv")).unwrap();
    assert_eq!(series.lines().count(), 4097);
    assert_eq!(
        series,
        std::fs::read_to_string(b.join("series").join("noise_k1.csv")).unwrap()
    );
}

#[test]
fn sweep_coarser_sampling_raises_entropy() {
    let tmp = tempfile::tempdir().unwrap();
    let noise = ceplane::noisegen::generate_fk_noise::<f64>(&ceplane::noisegen::NoiseSpec::new(
        2.5,
        1 << 15,
        1,
    ))
    .unwrap();
    let floor = noise.values().iter().copied().fold(f64::INFINITY, f64::min);
    let vs: Vec<f64> = noise.values().iter().map(|x| x - floor).collect();
    let trips = trips_file(tmp.path(), &[("n", vs)]);
    let out = tmp.path().join("sweep");
    ok(&[
        "sweep",
        "--dataset",
        "canonical",
        s(&trips),
        "--sample-interval",
        "1,3",
        "--out",
        s(&out),
    ]);
    let point = |dir: &str| {
        let e = PlaneExport::read(&out.join(dir).join("plane.csv")).unwrap();
        let p = e.points().next().unwrap().clone();
        p
    };
    let (fine, coarse) = (point("ts_1"), point("ts_3"));
    assert!(coarse.entropy > fine.entropy, "{fine:?} {coarse:?}");
    assert!(coarse.complexity < fine.complexity);

    let single = tmp.path().join("single");
    let analyzed = tmp.path().join("analyzed");
    ok(&[
        "sweep",
        "--dataset",
        "canonical",
        s(&trips),
        "--sample-interval",
        "3",
        "--out",
        s(&single),
    ]);
    ok(&[
        "analyze",
        "--dataset",
        "canonical",
        s(&trips),
        "--sample-interval",
        "3",
        "--out",
        s(&analyzed),
    ]);
    assert_eq!(
        std::fs::read(single.join("ts_3").join("plane.csv")).unwrap(),
        std::fs::read(analyzed.join("plane.csv")).unwrap()
    );
}

fn polyline_xs(svg: &str) -> Vec<f64> {
    let start =
        svg.find(r#"class="ladder" points=""#).unwrap() + r#"class="ladder" points=""#.len();
    let rest = &svg[start..];
    rest[..rest.find('"').unwrap()]
        .split(' ')
        .map(|p| p.split(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn plot_structure() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let vehicles: Vec<(&str, Vec<f64>)> = ["p", "q"]
        .iter()
        .map(|&id| (id, (0..300).map(|_| rng.random_range(0.0..9.0)).collect()))
        .collect();
    let trips = trips_file(tmp.path(), &vehicles);
    let vout = tmp.path().join("v");
    ok(&[
        "analyze",
        "--dataset",
        "canonical",
        s(&trips),
        "--sample-interval",
        "1",
        "--out",
        s(&vout),
    ]);
    let svg_path = tmp.path().join("two.svg");
    ok(&["plot", s(&vout.join("plane.csv")), "--out", s(&svg_path)]);
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches(r#"class="point"#).count(), 2);
    assert_eq!(svg.matches(r#"class="curve"#).count(), 2);

    // boundary rows only
    let text = std::fs::read_to_string(vout.join("plane.csv")).unwrap();
    let boundary: String = text
        .lines()
        .filter(|l| !l.contains(",vehicle,"))
        .map(|l| format!("{l}\n"))
        .collect();
    let bpath = tmp.path().join("boundary.csv");
    std::fs::write(&bpath, boundary).unwrap();
    let bsvg = tmp.path().join("b.svg");
    ok(&["plot", s(&bpath), "--out", s(&bsvg)]);
    let svg = std::fs::read_to_string(&bsvg).unwrap();
    assert_eq!(svg.matches(r#"class="point"#).count(), 0);
    assert_eq!(svg.matches(r#"class="curve"#).count(), 2);

    // ladder: connector runs through decreasing entropy, i.e. leftwards
    let nout = tmp.path().join("n");
    ok(&["noise", "--length", "4096", "--out", s(&nout)]);
    let lsvg = tmp.path().join("l.svg");
    ok(&[
        "plot",
        s(&nout.join("plane.csv")),
        s(&vout.join("plane.csv")),
        "--names",
        "noise,cars",
        "--out",
        s(&lsvg),
    ]);
    let svg = std::fs::read_to_string(&lsvg).unwrap();
    let xs = polyline_xs(&svg);
    assert_eq!(xs.len(), 7);
    assert!(xs.windows(2).all(|w| w[1] < w[0]), "{xs:?}");
    assert_eq!(svg.matches(r#"class="point noise"#).count(), 7);
    assert_eq!(svg.matches(r#"class="point vehicle"#).count(), 2);
    assert_eq!(svg.matches(r#"class="curve"#).count(), 2);
}

#[test]
fn plot_of_empty_export_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.csv");
    std::fs::write(&empty, "label,kind,H,C,D,tau,M\n").unwrap();
    let out = ceplane(&["plot", s(&empty), "--out", s(&tmp.path().join("x.svg"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("x.svg").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing.csv");
    let out = ceplane(&[
        "analyze",
        "--dataset",
        "canonical",
        s(&missing),
        "--sample-interval",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let trips = trips_file(tmp.path(), &[("a", vec![1.0, 2.0, 3.0, 4.0, 5.0])]);
    let out = ceplane(&[
        "analyze",
        "--dataset",
        "canonical",
        s(&trips),
        "--dimension",
        "12",
        "--sample-interval",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = ceplane(&["noise", "--ks", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ceplane(&["analyze", "--dataset", "canonical", s(&trips)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let trips = trips_file(
        tmp.path(),
        &[("a", (0..200).map(|i| ((i * 7919) % 101) as f64).collect())],
    );
    let cfg = tmp.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "dataset = \"canonical\"\ninputs = [{:?}]\nsample_interval = [1.0]\ndimension = 5\nout = {:?}\n",
            s(&trips),
            s(&tmp.path().join("from_file"))
        ),
    )
    .unwrap();
    ok(&["analyze", "--config", s(&cfg)]);
    let e = PlaneExport::read(&tmp.path().join("from_file/plane.csv")).unwrap();
    assert_eq!(e.points().next().unwrap().dimension, 5);

    let over = tmp.path().join("over");
    ok(&[
        "analyze",
        "--config",
        s(&cfg),
        "--dimension",
        "3",
        "--out",
        s(&over),
    ]);
    let e = PlaneExport::read(&over.join("plane.csv")).unwrap();
    assert_eq!(e.points().next().unwrap().dimension, 3);
    assert_eq!(std::fs::read_dir(over.join("pdf")).unwrap().count(), 1);
    let pdf = std::fs::read_to_string(over.join("pdf/a.csv")).unwrap();
    assert_eq!(pdf.lines().count(), 7);
}

#[test]
fn ingest_borlange_sample() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(
        d.join("mobility"),
        "4, 1, 2, 2000-11-10 14:24:11, 2000-11-10 14:24:19\n\
         4, 1, 2, 2000-11-10 14:24:19, 2000-11-10 14:24:33\n\
         4, 1, 2, 2000-11-10 14:24:33, 2000-11-10 14:24:59\n\
         4, 1, 2, 2000-11-10 14:24:59, 2000-11-10 14:25:18\n",
    )
    .unwrap();
    std::fs::write(
        d.join("nodes"),
        "316\t1076\n1076\t316\n316\t792\n792\t2611\n",
    )
    .unwrap();
    std::fs::write(
        d.join("nodepos"),
        "316\t15.443687, 60.476045\n1076\t15.445492, 60.474991\n792\t15.442580, 60.475656\n2611\t15.440816, 60.477419\n",
    )
    .unwrap();
    let out = d.join("out");
    ok(&[
        "ingest",
        "--dataset",
        "borlange",
        s(&d.join("mobility")),
        s(&d.join("nodes")),
        s(&d.join("nodepos")),
        "--policy",
        "none",
        "--out",
        s(&out),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("cleaning_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["dataset"], "borlange");
    assert_eq!(report["policy"], "mobile-century");
    assert_eq!(report["observations"]["retained"], 4);

    let two = ceplane(&[
        "ingest",
        "--dataset",
        "borlange",
        s(&d.join("mobility")),
        "--out",
        s(&out),
    ]);
    assert_eq!(two.status.code(), Some(2));
}

#[test]
fn ingest_beijing_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let days = tmp.path().join("days");
    std::fs::create_dir(&days).unwrap();
    // vehicle 156 moves north between two stops, about 11 m per 10 s
    let mut rows = String::new();
    for (i, dlat) in [0, 0, 10, 20, 30, 30].iter().enumerate() {
        rows.push_str(&format!(
            "156, {}, {}, 11630912, 0\n",
            1_241_107_200 + 10 * i,
            4_000_311 + dlat
        ));
    }
    std::fs::write(days.join("20090501.txt"), rows).unwrap();
    let out = tmp.path().join("out");
    ok(&[
        "ingest",
        "--dataset",
        "beijing",
        s(&days),
        "--policy",
        "none",
        "--out",
        s(&out),
    ]);
    let trips = std::fs::read_to_string(out.join("trips.csv")).unwrap();
    let vs: Vec<f64> = trips
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(vs.len(), 5);
    assert_eq!((vs[0], vs[4]), (0.0, 0.0));
    assert!(vs[1..4].iter().all(|v| (v - 1.11).abs() < 0.01), "{vs:?}");
}
