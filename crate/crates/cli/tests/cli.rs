//! End-to-end tests of the addrmap binary: exit codes, output determinism,
//! and the geocode/revgeo round trip at the process level.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use addrmap::fixture::GridCity;
use addrmap::save_raster;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_addrmap"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Two crossing highways around (20.9, 74.77).
const FIXTURE_OSM: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<osm version="0.6">
  <node id="1" lat="20.900" lon="74.770"/>
  <node id="2" lat="20.902" lon="74.772"/>
  <node id="3" lat="20.904" lon="74.774"/>
  <node id="4" lat="20.904" lon="74.770"/>
  <node id="5" lat="20.900" lon="74.774"/>
  <way id="10">
    <nd ref="1"/><nd ref="2"/><nd ref="3"/>
    <tag k="highway" v="residential"/>
  </way>
  <way id="11">
    <nd ref="4"/><nd ref="2"/><nd ref="5"/>
    <tag k="highway" v="residential"/>
  </way>
</osm>
"#;

fn write_osm(dir: &Path) -> PathBuf {
    let path = dir.join("fixture.osm");
    std::fs::write(&path, FIXTURE_OSM).unwrap();
    path
}

fn write_grid_raster(dir: &Path) -> (PathBuf, PathBuf) {
    let raster = GridCity::default().raster();
    let pgm = dir.join("grid.pgm");
    let world = dir.join("grid.wld");
    save_raster(&raster, &pgm, &world).unwrap();
    (pgm, world)
}

fn generate_osm_map(dir: &Path) -> PathBuf {
    let osm = write_osm(dir);
    let index = dir.join("map.addr");
    let out = run(&[
        "generate",
        "--osm",
        osm.to_str().unwrap(),
        "--city",
        "Testville",
        "--country",
        "In",
        "--out",
        index.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    index
}

#[test]
fn generate_from_osm_writes_index_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let osm = write_osm(dir.path());
    let index = dir.path().join("map.addr");
    let out = run(&[
        "generate",
        "--osm",
        osm.to_str().unwrap(),
        "--city",
        "Testville",
        "--country",
        "In",
        "--out",
        index.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(index.exists());
    let text = stdout(&out);
    assert!(text.contains("regions: 1"), "stdout: {text}");
    assert!(text.contains("roads: 4"), "stdout: {text}");
}

#[test]
fn generate_rejects_two_input_sources() {
    let dir = tempfile::tempdir().unwrap();
    let osm = write_osm(dir.path());
    let (pgm, world) = write_grid_raster(dir.path());
    let out = run(&[
        "generate",
        "--raster",
        pgm.to_str().unwrap(),
        "--world",
        world.to_str().unwrap(),
        "--osm",
        osm.to_str().unwrap(),
        "--city",
        "X",
        "--country",
        "In",
        "--out",
        dir.path().join("m.addr").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_rejects_missing_input_sources() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "generate",
        "--city",
        "X",
        "--country",
        "In",
        "--out",
        dir.path().join("m.addr").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn all_zero_raster_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("zero.pgm");
    let world = dir.path().join("zero.wld");
    let mut bytes = b"P5\n64 64\n255\n".to_vec();
    bytes.extend(std::iter::repeat_n(0u8, 64 * 64));
    std::fs::write(&pgm, bytes).unwrap();
    std::fs::write(&world, "0.5\n0.5\n0\n0\n").unwrap();
    let out = run(&[
        "generate",
        "--raster",
        pgm.to_str().unwrap(),
        "--world",
        world.to_str().unwrap(),
        "--city",
        "X",
        "--country",
        "In",
        "--out",
        dir.path().join("m.addr").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn grid_raster_generates_12_roads() {
    let dir = tempfile::tempdir().unwrap();
    let (pgm, world) = write_grid_raster(dir.path());
    let index = dir.path().join("grid.addr");
    let chains = dir.path().join("chains.geojson");
    let out = run(&[
        "generate",
        "--raster",
        pgm.to_str().unwrap(),
        "--world",
        world.to_str().unwrap(),
        "--city",
        "Gridville",
        "--country",
        "In",
        "--max-region-edges",
        "6",
        "--ncut-stop",
        "0.65",
        "--out",
        index.to_str().unwrap(),
        "--dump-chains",
        chains.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("roads: 12"), "stdout: {text}");
    assert!(text.contains("regions: 2"), "stdout: {text}");
    assert!(chains.exists());
    let dump: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&chains).unwrap()).unwrap();
    assert_eq!(dump["type"], "FeatureCollection");
}

#[test]
fn geocode_malformed_address_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let index = generate_osm_map(dir.path());
    let out = run(&["geocode", "--index", index.to_str().unwrap(), "not-an-address"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn geocode_absent_road_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let index = generate_osm_map(dir.path());
    let out = run(&[
        "geocode",
        "--index",
        index.to_str().unwrap(),
        "0A.CA999.Testville.In",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn geocode_prints_coordinates_with_lat_lon_for_anchored_map() {
    let dir = tempfile::tempdir().unwrap();
    let index = generate_osm_map(dir.path());
    let out = run(&[
        "geocode",
        "--index",
        index.to_str().unwrap(),
        "0A.CA1.Testville.In",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let fields: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(fields.len(), 4, "expected x y lat lon, got {text:?}");
    let lat: f64 = fields[2].parse().unwrap();
    assert!((lat - 20.9).abs() < 0.05);
}

#[test]
fn revgeo_round_trips_50_addresses() {
    let dir = tempfile::tempdir().unwrap();
    let (pgm, world) = write_grid_raster(dir.path());
    let index = dir.path().join("grid.addr");
    let out = run(&[
        "generate",
        "--raster",
        pgm.to_str().unwrap(),
        "--world",
        world.to_str().unwrap(),
        "--city",
        "Gridville",
        "--country",
        "In",
        "--max-region-edges",
        "6",
        "--ncut-stop",
        "0.65",
        "--out",
        index.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Sample points slightly off the north-south roads, away from the
    // crossings so every unit cell stays nearest its own road.
    let mut checked = 0;
    'outer: for gx in 0..3 {
        for step in 0..18 {
            let x = gx as f64 * 100.0 + if step % 2 == 0 { 1.5 } else { -1.5 };
            let y = 12.0 + (step / 2) as f64 * 8.0;
            let out = run(&[
                "revgeo",
                "--index",
                index.to_str().unwrap(),
                "--x",
                &x.to_string(),
                "--y",
                &y.to_string(),
            ]);
            assert_eq!(out.status.code(), Some(0));
            let address = stdout(&out).trim().to_string();

            let geo = run(&["geocode", "--index", index.to_str().unwrap(), &address]);
            assert_eq!(geo.status.code(), Some(0), "address {address}");
            let text = stdout(&geo);
            let fields: Vec<f64> = text
                .split_whitespace()
                .map(|f| f.parse().unwrap())
                .collect();

            let back = run(&[
                "revgeo",
                "--index",
                index.to_str().unwrap(),
                "--x",
                &fields[0].to_string(),
                "--y",
                &fields[1].to_string(),
            ]);
            assert_eq!(back.status.code(), Some(0));
            assert_eq!(stdout(&back).trim(), address, "round trip at ({x}, {y})");
            checked += 1;
            if checked >= 50 {
                break 'outer;
            }
        }
    }
    assert!(checked >= 50);
}

#[test]
fn revgeo_lat_lon_against_unanchored_map_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let (pgm, world) = write_grid_raster(dir.path());
    let index = dir.path().join("grid.addr");
    let out = run(&[
        "generate",
        "--raster",
        pgm.to_str().unwrap(),
        "--world",
        world.to_str().unwrap(),
        "--city",
        "Gridville",
        "--country",
        "In",
        "--out",
        index.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "revgeo",
        "--index",
        index.to_str().unwrap(),
        "--lat",
        "20.9",
        "--lon",
        "74.77",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_and_stats_work_from_saved_index() {
    let dir = tempfile::tempdir().unwrap();
    let index = generate_osm_map(dir.path());
    let geojson = dir.path().join("map.geojson");
    let out = run(&[
        "export",
        "--index",
        index.to_str().unwrap(),
        "--geojson",
        geojson.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&geojson).unwrap()).unwrap();
    assert_eq!(parsed["type"], "FeatureCollection");

    let out = run(&["stats", "--index", index.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("city: Testville"));
    assert!(text.contains("roads: 4"));
}

#[test]
fn generate_is_deterministic_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let osm = write_osm(dir.path());
    let mut artifacts: Vec<(Vec<u8>, Vec<u8>, String)> = Vec::new();
    for run_idx in 0..2 {
        let index = dir.path().join(format!("m{run_idx}.addr"));
        let geojson = dir.path().join(format!("m{run_idx}.geojson"));
        let out = run(&[
            "generate",
            "--osm",
            osm.to_str().unwrap(),
            "--city",
            "Testville",
            "--country",
            "In",
            "--out",
            index.to_str().unwrap(),
            "--geojson",
            geojson.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        artifacts.push((
            std::fs::read(&index).unwrap(),
            std::fs::read(&geojson).unwrap(),
            stdout(&out),
        ));
    }
    assert_eq!(artifacts[0].0, artifacts[1].0, "index files differ");
    assert_eq!(artifacts[0].1, artifacts[1].1, "geojson files differ");
    assert_eq!(artifacts[0].2, artifacts[1].2, "summaries differ");
}

#[test]
fn corrupt_index_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let index = dir.path().join("bad.addr");
    std::fs::write(&index, "ADDRMAP v7\n").unwrap();
    let out = run(&["stats", "--index", index.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("ADDRMAP v7"), "stderr: {err}");
}
