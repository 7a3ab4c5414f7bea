use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relu-morse")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn gen_fixture_builds_three_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let weights = path(dir.path(), "net-b.json");
    assert!(run(&["gen", "--fixture", "net-b", "--output", &weights]).status.success());
    let complex = stdout_json(&run(&["build", "--input", &weights]));
    let cells = complex["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 19);
    let mut coords: Vec<Vec<f64>> = cells
        .iter()
        .filter_map(|c| c.get("coordinates"))
        .map(|c| serde_json::from_value(c.clone()).unwrap())
        .collect();
    coords.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(coords, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
}

#[test]
fn gen_is_deterministic() {
    let a = run(&["gen", "--arch", "2,3,1", "--seed", "7"]);
    let b = run(&["gen", "--arch", "2,3,1", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gen", "--arch", "2,3,1", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn outputs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for (i, name) in ["a.json", "b.json"].iter().enumerate() {
        let out = path(dir.path(), name);
        assert!(run(&["dgvf", "--fixture", "net-b", "--output", &out]).status.success(), "run {i}");
    }
    assert_eq!(fs::read(dir.path().join("a.json")).unwrap(), fs::read(dir.path().join("b.json")).unwrap());
    // no temporary files left behind
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn malformed_weights_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    fs::write(&bad, "{\"dims\": [2, 3").unwrap();
    assert_eq!(run(&["build", "--input", &bad]).status.code(), Some(1));
    fs::write(&bad, r#"{"dims": [2, 1], "layers": [], "final": {"weights": [[1.0]], "bias": [0.0]}}"#).unwrap();
    assert_eq!(run(&["build", "--input", &bad]).status.code(), Some(1));
    assert_eq!(run(&["build", "--input", &path(dir.path(), "missing.json")]).status.code(), Some(1));
    assert_eq!(run(&["build"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["build", "--fixture", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["build", "--fixture", "net-b", "--sign-tol", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn degenerate_network_exits_two_with_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let weights = path(dir.path(), "dup.json");
    // two identical hyperplanes
    let net = r#"{"dims": [2, 3, 1],
        "layers": [{"weights": [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], "bias": [0.0, 0.0, 0.5]}],
        "final": {"weights": [[1.0, 2.0, 3.0]], "bias": [0.0]}}"#;
    fs::write(&weights, net).unwrap();
    let out = run(&["build", "--input", &weights]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "genericity");
    assert!(err["message"].as_str().unwrap().contains("not generic"));
}

#[test]
fn flat_network_exits_two() {
    let out = run(&["gen", "--arch", "3,4,1", "--seed", "1"]);
    let dir = tempfile::tempdir().unwrap();
    let weights = path(dir.path(), "flat.json");
    fs::write(&weights, &out.stdout).unwrap();
    let out = run(&["dgvf", "--input", &weights]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "flat_cell");
}

#[test]
fn classify_fixtures() {
    let report = stdout_json(&run(&["classify", "--fixture", "net-b"]));
    assert_eq!(report["regular"], 2);
    assert_eq!(report["critical_by_index"], serde_json::json!([1, 0, 0]));
    assert_eq!(report["shallow"]["class"], "all_away");

    let report = stdout_json(&run(&["classify", "--fixture", "net-b-negated"]));
    assert_eq!(report["critical_by_index"], serde_json::json!([0, 0, 1]));
}

#[test]
fn classify_random_deeper_network() {
    let dir = tempfile::tempdir().unwrap();
    let weights = path(dir.path(), "w.json");
    assert!(run(&["gen", "--arch", "2,4,1", "--seed", "3", "--output", &weights]).status.success());
    let report = stdout_json(&run(&["classify", "--input", &weights]));
    assert!(report.get("shallow").is_none());
    let vertices = report["vertices"].as_array().unwrap();
    assert_eq!(vertices.len(), 6);
    let critical: u64 = report["critical_by_index"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(report["regular"].as_u64().unwrap() + critical, 6);
}

#[test]
fn dgvf_report_passes_on_fixture() {
    let report = stdout_json(&run(&["dgvf", "--fixture", "net-b", "--local-check"]));
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["local_check"]["mismatches"], serde_json::json!([]));
    assert_eq!(report["local_check"]["checked"], 7);
    let levels = report["relative_perfectness"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    assert!(levels.iter().all(|l| l["pass"] == true));
    assert_eq!(report["matching"]["critical"], serde_json::json!(["+00"]));
    assert_eq!(report["matching"]["basepoint"], true);
    assert_eq!(report["morse_homology"]["morse_betti"], serde_json::json!([2, 0, 0]));
}

#[test]
fn corrupted_matching_fails() {
    let report = stdout_json(&run(&["dgvf", "--fixture", "net-b", "--corrupt-pair", "0"]));
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["relative_perfectness"]["pass"], false);
    let failing: Vec<&Value> = report["relative_perfectness"]["levels"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|l| l["pass"] == false)
        .collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["level"], 4.0);
}

#[test]
fn full_pipeline_on_a_three_dimensional_network() {
    let dir = tempfile::tempdir().unwrap();
    let weights = path(dir.path(), "w.json");
    assert!(run(&["gen", "--arch", "3,4,1", "--seed", "40", "--output", &weights]).status.success());
    let report = stdout_json(&run(&["dgvf", "--input", &weights, "--local-check"]));
    assert_eq!(report["verdict"], "pass");
    let out = run(&["render", "--input", &weights]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "dimension");
}

#[test]
fn render_fixture_and_single_line() {
    let out = run(&["render", "--fixture", "net-b"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches(r#"class="edge""#).count(), 9);
    assert_eq!(svg.matches(r#"class="critical""#).count(), 1);

    let dir = tempfile::tempdir().unwrap();
    let weights = path(dir.path(), "line.json");
    let net = r#"{"dims": [2, 1, 1],
        "layers": [{"weights": [[1.0, 2.0]], "bias": [0.5]}],
        "final": {"weights": [[1.0]], "bias": [0.0]}}"#;
    fs::write(&weights, net).unwrap();
    let svg_path = path(dir.path(), "line.svg");
    assert!(run(&["render", "--input", &weights, "--output", &svg_path]).status.success());
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches(r#"class="edge""#).count(), 1);
    assert_eq!(svg.matches("<circle").count(), 0);

    let boxed = run(&["render", "--fixture", "net-b", "--render-box", "-0.4,-0.4,0.4,0.4"]);
    assert!(boxed.status.success());
    assert_eq!(String::from_utf8(boxed.stdout).unwrap().matches(r#"class="edge""#).count(), 4);
    assert_eq!(run(&["render", "--fixture", "net-b", "--render-box", "1,2"]).status.code(), Some(1));
}
