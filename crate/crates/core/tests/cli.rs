use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_locent");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn locent(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("locent runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL_MAP: &str = r#"{
  "mode": "map",
  "model": {"family": "coupled_oscillator", "n_com": 1, "n_rel": 1, "r_com": 4.0, "r_rel": 2.0},
  "region": {"q_a": [0.0], "q_b": [0.0], "a": 0.1, "b": 0.1},
  "sweep": {"axes": [
    {"coord": "q_a[0]", "lo": -3.0, "hi": 3.0, "count": 7},
    {"coord": "q_b[0]", "lo": -3.0, "hi": 3.0, "count": 5}
  ]}
}"#;

#[test]
fn models_lists_every_family() {
    let out = locent(&["models"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for family in ["coupled_oscillator", "hydrogen", "gaussian", "two_mode", "product", "normal_modes", "wkb"] {
        assert!(text.contains(family), "{family} missing");
    }
}

#[test]
fn point_reports_hydrogen_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("point.json");
    let cfg = configs().join("hydrogen_point.json");
    let out = locent(&["point", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    let eps = v["report"]["epsilon"].as_f64().unwrap();
    let want = 2.0 * (0.1f64 * 0.1 / 6.0).powi(2);
    assert!((eps - want).abs() < 1e-12 * want, "{eps} vs {want}");
    assert_eq!(v["report"]["validity"], "valid");
}

#[test]
fn map_output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "map.json", SMALL_MAP);
    let one = dir.path().join("one.csv");
    let many = dir.path().join("many.csv");
    assert!(locent(&["map", "--config", &cfg, "--out", one.to_str().unwrap(), "--threads", "1"]).status.success());
    assert!(locent(&["--threads", "4", "map", "--config", &cfg, "--out", many.to_str().unwrap()]).status.success());
    let a = std::fs::read_to_string(one).unwrap();
    assert_eq!(a, std::fs::read_to_string(many).unwrap());

    let mut reader = csv::Reader::from_reader(a.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["axis1", "axis2", "prob_density", "eps", "E_D", "E_ND", "p_ab", "validity"]
    );
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 35);
    // first axis varies slowest
    assert_eq!(&rows[0][0], &rows[4][0]);
    assert_ne!(&rows[4][0], &rows[5][0]);
}

#[test]
fn verify_passes_on_the_oscillator_ladder() {
    let cfg = configs().join("oscillator_verify.json");
    let out = locent(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["passed"], true);
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMALL_MAP.replace("\"a\": 0.1", "\"a\": \"wide\"");
    let cfg = write(dir.path(), "bad.json", &bad);
    let out = locent(&["map", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("region.a"), "{err}");
}

#[test]
fn mode_mismatch_is_rejected() {
    let cfg = configs().join("hydrogen_point.json");
    let out = locent(&["map", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cutoff_points_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "node.json",
        r#"{
  "model": {"family": "coupled_oscillator", "n_com": 1, "n_rel": 3, "r_com": 4.0, "r_rel": 2.0},
  "region": {"q_a": [0.7], "q_b": [-0.7], "a": 0.1, "b": 0.1}
}"#,
    );
    let out = locent(&["point", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["validity"], "near_node_cutoff");
}
