//! End-to-end checks of the `dho` binary: exit codes, headers, file layout.

use std::path::PathBuf;
use std::process::{Command, Output};

fn dho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dho")).args(args).output().unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dho-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn validate_passes_and_reports_residuals() {
    let o = dho(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).all(|l| l.contains("residual=")));
    assert!(!text.contains("FAIL"));
}

#[test]
fn validate_with_oversized_step_fails() {
    let o = dho(&["validate", "--dt", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL lindblad_cat_vs_analytic"));
    assert!(!o.stderr.is_empty());
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["coherence", "--dt", "0"],
        vec!["coherence", "--gamma0", "-1"],
        vec!["grid", "--preset", "fig5"],
        vec!["mss", "--stats", "XY"],
        vec!["detect", "--d", "-2"],
        vec!["spcoherence", "--alpha", "0", "--beta", "0", "--stats", "FD"],
        vec!["coherence", "--basis", "position", "--beta", "1"],
        vec!["frobnicate"],
    ] {
        let o = dho(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?} wrote to stdout");
        assert!(!o.stderr.is_empty(), "{args:?} printed no error");
    }
}

#[test]
fn missing_output_directory_leaves_nothing_behind() {
    let dir = scratch("missing");
    let out = dir.join("nope").join("x.csv");
    let o = dho(&["mss", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.join("nope").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn failing_run_removes_partial_files() {
    let dir = scratch("partial");
    let out = dir.join("sp.csv");
    // A truncation too small for α = 3 fails after argument checks passed;
    // output is only written once every panel is computed.
    let o = dho(&["spcoherence", "--alpha", "3", "--nmax", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 0);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn csv_header_contract() {
    let o = dho(&["mss", "--preset", "fig5", "--gamma0", "0", "--t-max", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), format!("# dho v{} preset=fig5", env!("CARGO_PKG_VERSION")));
    assert_eq!(lines.next().unwrap(), "t,MB,BE,FD");
}

#[test]
fn multi_panel_presets_write_one_file_per_panel() {
    let dir = scratch("panels");
    let out = dir.join("fig6.csv");
    let o = dho(&["detect", "--preset", "fig6", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut names: Vec<String> =
        std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names, ["fig6-d1.csv", "fig6-d2.csv"]);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn wide_detector_gives_unit_ratios() {
    let o = dho(&["detect", "--alpha", "1", "--d", "50", "--t-max", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][1..].iter().all(|&v| v == 1.0), "{:?}", rows[0]);
}

#[test]
fn undamped_mss_is_pi_periodic_with_maximum_nine() {
    let o = dho(&["mss", "--alpha", "1", "--stats", "MB", "--t-max", "6.3", "--dt", "0.01"]);
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header, ["t", "MB"]);
    let max = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    assert!((max - 9.0).abs() < 1e-9);
    // MB at γ0 = 0 is 1 + 8 cos² t.
    for r in &rows {
        let want = 1.0 + 8.0 * r[0].cos().powi(2);
        assert!((r[1] - want).abs() < 1e-10);
    }
}

#[test]
fn undamped_coherence_series_is_constant_and_damping_lowers_it() {
    let o = dho(&["coherence", "--preset", "fig1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let time_panel: String = text.split("# panel=alpha2").next().unwrap().to_string();
    let (header, rows) = table(&time_panel.replace("# panel=time\n", ""));
    assert_eq!(header, ["t", "g0", "g0.1", "g0.2", "g0.3"]);
    for r in &rows[1..] {
        assert!((r[1] - rows[0][1]).abs() < 1e-12);
        assert!(r[1] > r[2] && r[2] > r[3] && r[3] > r[4]);
    }
}

#[test]
fn json_output_echoes_config() {
    let o = dho(&["mss", "--alpha", "0.5", "--gamma0", "0.2", "--t-max", "0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["alpha"][0], 0.5);
    assert_eq!(v["config"]["gamma0"][0], 0.2);
    assert_eq!(v["panels"][0]["columns"][0], "t");
    assert_eq!(v["panels"][0]["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn precision_controls_digits() {
    let o = dho(&["coherence", "--alpha", "1", "--t-max", "0", "--precision", "4"]);
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert_eq!(last, "0,1.305");
}
