use std::path::Path;
use std::process::Command;

use skyway::io;
use skyway::report::CompositionReport;
use skyway_core::synth;

fn skyway() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skyway"))
}

fn write_fixture(dir: &Path) {
    io::save_network(&synth::twelve_station_example(), &dir.join("nodes.csv"), &dir.join("edges.csv")).unwrap();
    let mut drones = Vec::new();
    io::write_fleet(&[synth::minute_drone()], &mut drones).unwrap();
    std::fs::write(dir.join("drones.csv"), drones).unwrap();
}

fn compose(dir: &Path, extra: &[&str]) -> std::process::Output {
    skyway()
        .current_dir(dir)
        .args(["compose", "--nodes", "nodes.csv", "--edges", "edges.csv", "--drones", "drones.csv"])
        .args(["--source", "1", "--dest", "12", "--start-min", "480"])
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn compose_writes_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let out = compose(dir.path(), &["--weight", "0", "--k", "3", "--rate", "0", "--json", "plan.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: CompositionReport =
        serde_json::from_reader(std::fs::File::open(dir.path().join("plan.json")).unwrap()).unwrap();
    assert_eq!(report.plans.len(), 3);
    assert_eq!(report.plans[0].nodes, [1, 2, 5, 9, 12]);
    assert_eq!(report.plans[0].service_time_min, 95.0);
    assert_eq!(report.plans[0].delivery_time_min, 95.0);
    assert_eq!(report.plans[0].stations.len(), 3);

    let out = compose(dir.path(), &["--weight", "0", "--exhaustive"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("1 -> "));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    // heavier than any drone can lift
    assert_eq!(compose(dir.path(), &["--weight", "50"]).status.code(), Some(2));
    // unknown destination
    let out = skyway()
        .current_dir(dir.path())
        .args(["compose", "--nodes", "nodes.csv", "--edges", "edges.csv", "--source", "1", "--dest", "99", "--weight", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // missing input file
    let out = skyway()
        .args(["compose", "--nodes", "nope.csv", "--edges", "nope.csv", "--source", "1", "--dest", "2", "--weight", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // bad config key
    let out = skyway().args(["experiment", "--out", "x", "--set", "colour=red"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn extract_then_experiment() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let out = skyway()
        .current_dir(dir.path())
        .args(["extract", "--nodes", "nodes.csv", "--edges", "edges.csv", "--n", "8", "--seed", "4", "--out-prefix", "sub"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sub = io::load_network(&dir.path().join("sub.nodes.csv"), &dir.path().join("sub.edges.csv")).unwrap();
    assert_eq!(sub.node_count(), 8);
    assert!(sub.is_connected());

    std::fs::write(
        dir.path().join("exp.cfg"),
        "node_counts = 6, 8\nnodes_file = sub.nodes.csv\nedges_file = sub.edges.csv\nweight_kg = 0.5\n",
    )
    .unwrap();
    let out = skyway()
        .current_dir(dir.path())
        .args(["experiment", "--config", "exp.cfg", "--out", "res", "--seed", "11"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = std::fs::read_to_string(dir.path().join("res/metrics.csv")).unwrap();
    // ceil(0.5 * 6) + ceil(0.5 * 8) runs, four methods each
    assert_eq!(metrics.lines().count(), 1 + (3 + 4) * 4);
    assert!(std::fs::read_to_string(dir.path().join("res/config.txt")).unwrap().contains("master_seed = 11"));
}
