use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dicke-corr")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows of a CSV without comment lines, split into fields.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|f| f.parse().unwrap_or(f64::NAN)).collect()).collect();
    (header, rows)
}

#[test]
fn symmetric_two_samples() {
    let o = run(&["--scenario", "symmetric", "--gamma", "0.5", "--tau-max", "1", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["tau", "concurrence", "tqd", "lqu", "p_plus", "p_minus"]);
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[0][1]), (0.0, 1.0));
    assert_eq!(rows[1][0], 1.0);
    assert!((rows[1][1] - 0.2231).abs() < 1e-4);
}

#[test]
fn uncoupled_single_excitation_has_no_entanglement() {
    let o = run(&["--scenario", "single-excitation", "--gamma", "0", "--eta", "0", "--samples", "57"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 57);
    assert!(rows.iter().all(|r| r[1] == 0.0));
}

#[test]
fn geometry_parameters_are_echoed() {
    let o = run(&[
        "--scenario",
        "bell-zero-double",
        "--separation",
        "0.5",
        "--dipole",
        "0,0,1",
        "--direction",
        "1,0,0",
        "--samples",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    let mut it = first.trim_start_matches("# ").split(' ');
    let gamma: f64 = it.next().unwrap().trim_start_matches("gamma=").parse().unwrap();
    let eta: f64 = it.next().unwrap().trim_start_matches("eta=").parse().unwrap();
    assert!((gamma + 0.1520).abs() < 1e-4, "{first}");
    assert!((eta - 0.2145).abs() < 1e-4, "{first}");
}

#[test]
fn config_errors_exit_with_one() {
    let o = run(&["--scenario", "symmetric", "--gamma", "0.5", "--separation", "0.5", "--dipole", "0,0,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--separation"));

    let o = run(&["--scenario", "symmetric", "--gamma", "0.5", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["--scenario", "symmetric", "--gamma", "0.5", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--samples"));
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("--sweep-gamma"));
}

#[test]
fn output_is_deterministic() {
    let args = ["--scenario", "bell-zero-double", "--gamma", "0.9", "--samples", "300", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let base = ["--scenario", "single-excitation", "--gamma", "-0.6", "--eta", "0.9", "--samples", "41"];
    let csv = run(&[&base[..], &["--format", "csv"]].concat());
    let json = run(&[&base[..], &["--format", "json"]].concat());
    let (header, rows) = csv_rows(&stdout(&csv));
    let doc: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(doc["scenario"], "single-excitation");
    let jrows = doc["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), rows.len());
    for (row, jrow) in rows.iter().zip(jrows) {
        for (name, v) in header.iter().zip(row) {
            let j = jrow[name.as_str()].as_f64().unwrap();
            let scale = v.abs().max(1e-300);
            assert!((j - v).abs() <= 1e-12 * scale, "{name}: {v} vs {j}");
        }
    }
}

#[test]
fn sweep_adds_gamma_column() {
    let o = run(&["--scenario", "symmetric", "--sweep-gamma", "-0.5:0.5:0.5", "--samples", "4", "--tau-max", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header.last().unwrap(), "gamma");
    assert_eq!(rows.len(), 12);
    let gammas: Vec<f64> = rows.iter().map(|r| r[6]).collect();
    assert_eq!(&gammas[..4], &[-0.5; 4]);
    assert_eq!(&gammas[8..], &[0.5; 4]);
    // C = e^{−(1+γ)τ} at τ = 2.
    assert!((rows[3][1] - (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("series.csv");
    fs::write(&cfg, r#"{"scenario": "symmetric", "gamma": 0.9, "tau-max": 1, "samples": 2}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--gamma", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let (_, rows) = csv_rows(&fs::read_to_string(&out).unwrap());
    assert!((rows[1][1] - (-1.5f64).exp()).abs() < 1e-15);

    fs::write(&cfg, "{\n  \"scenario\": \"symmetric\",\n  \"gama\": 0.5\n}").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("gama") && err.contains("line 3"), "{err}");
}

#[test]
fn cross_check_symmetric_default_grid_passes() {
    let o = run(&["--scenario", "symmetric", "--gamma", "0.5", "--cross-check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1000);
    let pass = header.iter().position(|h| h == "pass").unwrap();
    assert_eq!(pass, header.len() - 1);
    let brute = header.iter().position(|h| h == "tqd_bruteforce").unwrap();
    assert_eq!(rows.iter().filter(|r| !r[brute].is_nan()).count(), 11);
    assert!(stderr(&o).contains("passed"));
}

#[test]
fn cross_check_through_sudden_death() {
    let o = run(&["--scenario", "bell-zero-double", "--gamma", "0.9", "--cross-check", "--samples", "41"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = csv_rows(&stdout(&o));
    assert!(rows.iter().any(|r| r[1] == 0.0), "grid misses the dark period");
}

#[test]
fn impossible_tolerance_fails_with_named_offender() {
    let o = run(&[
        "--scenario",
        "symmetric",
        "--gamma",
        "0.5",
        "--samples",
        "5",
        "--cross-check",
        "--tol-generic",
        "1e-16",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("worst offender"));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["cross_check"]["pass"], false);
    assert!(doc["cross_check"]["worst"]["check"].as_str().unwrap().ends_with("generic"));
}
