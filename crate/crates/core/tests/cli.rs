use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ghz_multipath::harness::Table;
use ghz_multipath::topology::load_topology;

fn ghznet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghznet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const GRID: &str = "protocol = \"mp-c\"\nusers = \"corners\"\ntrials = 100\nseed = 3\n\n[topology]\nkind = \"grid\"\nm = 4\np = 0.7\n";

#[test]
fn gen_grid_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.topo");
    let o = ghznet(&["topo", "gen-grid", "--m", "5", "--p", "0.4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let t = load_topology(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((t.node_count(), t.edge_count()), (25, 40));
    assert!(t.edges().iter().all(|e| e.p_e == 0.4));

    let o = ghznet(&["topo", "gen-grid", "--m", "3", "--p", "0.4", "--format", "json"]);
    let t = load_topology(&stdout(&o)).unwrap();
    assert_eq!(t.edge_count(), 12);

    let o = ghznet(&["topo", "gen-grid", "--m", "3", "--format", "csv"]);
    let table = Table::from_csv(&stdout(&o)).unwrap();
    assert_eq!(table.rows.len(), 12);
    assert_eq!(table.columns, ["u", "v", "length_km", "p_op", "p_e"]);
}

#[test]
fn validate_reports_counts_and_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "ok.topo", "name = tri\nnodes = 3\n0 1 1\n1 2 2\n0 2 3\n");
    let o = ghznet(&["topo", "validate", &good, "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["edges"], 3);
    assert_eq!(v[0]["mean_edge_length_km"].as_f64().unwrap(), 2.0);

    let bad = write(dir.path(), "bad.topo", "name = x\nexpected_edges = 4\n0 1 1\n");
    assert_eq!(ghznet(&["topo", "validate", &bad]).status.code(), Some(2));
    let garbage = write(dir.path(), "junk.topo", "0 1 banana\n");
    assert_eq!(ghznet(&["topo", "validate", &garbage]).status.code(), Some(2));
    assert_eq!(ghznet(&["topo", "validate", "/nonexistent"]).status.code(), Some(2));
}

#[test]
fn run_applies_overrides_and_writes_out() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.toml", GRID);
    let out = dir.path().join("r.json");
    let o = ghznet(&["run", &s, "--trials", "40", "--seed", "9", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v[0]["trials"], 40);
    assert!(v[0]["ci95_low"].as_f64().unwrap() <= v[0]["er"].as_f64().unwrap());

    let again = ghznet(&["run", &s, "--trials", "40", "--seed", "9", "--format", "json"]);
    assert_eq!(stdout(&again), fs::read_to_string(&out).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let infeasible = write(
        dir.path(),
        "inf.toml",
        "protocol = \"sp\"\nusers = [0, 1, 2, 3]\n[topology]\nkind = \"grid\"\nm = 2\np = 0.5\n",
    );
    assert_eq!(ghznet(&["run", &infeasible]).status.code(), Some(3));
    let unknown = write(dir.path(), "u.toml", &format!("{GRID}colour = 1\n"));
    assert_eq!(ghznet(&["run", &unknown]).status.code(), Some(2));
    let s = write(dir.path(), "s.toml", GRID);
    assert_eq!(ghznet(&["run", &s, "--trials", "0"]).status.code(), Some(2));
    assert_eq!(
        ghznet(&["sweep", &s, "--axis", "colour", "--values", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(ghznet(&["run", &s, "--format", "xml"]).status.code(), Some(2));
    assert_eq!(
        ghznet(&["sweep", &infeasible, "--axis", "q_c", "--values", "1,2"]).status.code(),
        Some(3)
    );
}

#[test]
fn sweep_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = ghznet(&[
        "sweep",
        golden("sweep.toml").to_str().unwrap(),
        "--axis",
        "q_c",
        "--values",
        "1,2,inf",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(
        fs::read_to_string(out).unwrap(),
        fs::read_to_string(golden("sweep_q_c.csv")).unwrap()
    );
}

#[test]
fn sweep_ranges_expand() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.toml", GRID);
    let o = ghznet(&["sweep", &s, "--axis", "p", "--values", "0.3:0.9:0.3", "--trials", "20"]);
    let t = Table::from_csv(&stdout(&o)).unwrap();
    let values: Vec<String> = (0..t.rows.len())
        .map(|r| t.get(r, "value").unwrap().render())
        .collect();
    assert_eq!(values, ["0.3", "0.6", "0.9"]);
}

#[test]
fn speedup_uses_closed_form_at_unit_cutoff() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.toml", GRID);
    let o = ghznet(&[
        "speedup", &s, "--p-range", "0.6,0.8", "--qc-range", "1,3", "--analytic-sp", "--trials", "50",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = Table::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.rows.len(), 4);
    let sources: Vec<String> = (0..4).map(|r| t.get(r, "source_b").unwrap().render()).collect();
    assert_eq!(sources, ["analytic", "simulated", "analytic", "simulated"]);
    // Corners of a 4x4 grid through the best centre need 12 links.
    let er_b: f64 = t.get(0, "er_b").unwrap().render().parse().unwrap();
    assert!((er_b - 0.6f64.powi(12)).abs() < 1e-15);
}

#[test]
fn analyze_lists_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.toml", GRID);
    let o = ghznet(&["analyze", &s, "--samples", "500"]);
    assert!(o.status.success());
    let t = Table::from_csv(&stdout(&o)).unwrap();
    let names: Vec<String> = (0..t.rows.len())
        .map(|r| t.get(r, "quantity").unwrap().render())
        .collect();
    assert!(names.contains(&"er_upper_bound".to_string()));
    assert!(names.contains(&"analytic_er_estimate".to_string()));
}

#[test]
fn bundled_scenarios_are_valid() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let o = ghznet(&["run", path.to_str().unwrap(), "--trials", "20"]);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
    }
}
