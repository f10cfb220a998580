//! CLI pipeline tests: verbs, exit codes, and the detached spectrum
//! round trip, driven through the installed binary.

use std::path::Path;
use std::process::{Command, Output};

fn mqte(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mqte"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).expect("config written");
    path.to_string_lossy().into_owned()
}

const SAMPLED_FOUR_SITE: &str = r#"seed = 31
reference = "neel"
shots = 200

[model]
kind = "heisenberg1d"
sites = 4
J = 1.0
h = 2.0

[grid]
delta = 0.1
N = 400

[configs]
list = ["0101"]
"#;

#[test]
fn run_verb_writes_artifacts_and_reports_peaks() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = write_config(dir.path(), SAMPLED_FOUR_SITE);
    let out = dir.path().join("out");
    let result = mqte(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("gap"), "peak report missing: {stdout}");
    for name in ["manifest.json", "peaks.json", "oracle.json", "signal_0101.csv", "spectrum_0101.csv"] {
        assert!(out.join(name).exists(), "{name} not written");
    }
}

#[test]
fn oracle_verb_writes_an_ascending_line_table() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = write_config(dir.path(), SAMPLED_FOUR_SITE);
    let out = dir.path().join("oracle");
    let result = mqte(&["oracle", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    let oracle: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("oracle.json")).expect("readable"))
            .expect("valid json");
    let energies: Vec<f64> = oracle["energies"]
        .as_array()
        .expect("energies array")
        .iter()
        .map(|v| v.as_f64().expect("numeric"))
        .collect();
    assert_eq!(energies.len(), 16);
    assert!(energies.windows(2).all(|w| w[0] <= w[1]), "energies not ascending");
    assert!(
        !oracle["peaks"].as_array().expect("peaks array").is_empty(),
        "line table empty"
    );
}

#[test]
fn spectrum_verb_round_trips_a_recorded_signal() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = write_config(dir.path(), SAMPLED_FOUR_SITE);
    let out = dir.path().join("out");
    let run = mqte(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(run.status.success());

    // Re-analyze from a copy so the detached path proves itself without
    // touching the run's own artifacts.
    let detached = dir.path().join("detached");
    std::fs::create_dir(&detached).expect("dir created");
    for name in ["signal_0101.csv", "signal_0101.json"] {
        std::fs::copy(out.join(name), detached.join(name)).expect("copy artifact");
    }
    let signal = detached.join("signal_0101.csv");
    let result = mqte(&["spectrum", "--signal", signal.to_str().unwrap()]);
    assert!(result.status.success(), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    assert!(detached.join("spectrum_0101.csv").exists());
    assert!(detached.join("peaks_0101.json").exists());

    // The 12-digit CSV round trip may move coefficients at the 1e-13
    // scale; detected bins must not move at all.
    let bins = |path: &Path, key: &str| -> Vec<u64> {
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).expect("readable")).expect("json");
        v[key]["0101"]
            .as_array()
            .expect("peaks for the recorded configuration")
            .iter()
            .map(|p| p["bin"].as_u64().expect("bin"))
            .collect()
    };
    let original = bins(&out.join("peaks.json"), "configs");
    let recovered = bins(&detached.join("peaks_0101.json"), "configs");
    assert!(!original.is_empty(), "run detected no peaks");
    assert_eq!(original, recovered, "detached analysis moved detected bins");

    let parse_spectrum = |path: &Path| -> Vec<f64> {
        std::fs::read_to_string(path)
            .expect("readable")
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().expect("numeric"))
            .collect()
    };
    let a = parse_spectrum(&out.join("spectrum_0101.csv"));
    let b = parse_spectrum(&detached.join("spectrum_0101.csv"));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9, "spectrum diverged: {x} vs {y}");
    }
}

#[test]
fn invalid_config_exits_with_code_one() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = write_config(dir.path(), &format!("bogus = 1\n{SAMPLED_FOUR_SITE}"));
    let result = mqte(&["run", "--config", &config]);
    assert_eq!(result.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("error:"), "no error report: {stderr}");
}

#[test]
fn infeasible_trajectory_budget_exits_with_code_two() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = write_config(
        dir.path(),
        r#"seed = 7
reference = "neel"
shots = 1000

[model]
kind = "heisenberg1d"
sites = 6
J = 1.0
h = 2.0

[evolution]
mode = "trotter"
tau = 0.01

[grid]
delta = 0.1
N = 2000

[noise]
gamma = 0.01
mode = "trajectory-independent"

[configs]
list = ["010101"]
"#,
    );
    let out = dir.path().join("out");
    let result = mqte(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(
        stderr.contains("trajectory-sequential") || stderr.contains("budget"),
        "no budget guidance: {stderr}"
    );
}
