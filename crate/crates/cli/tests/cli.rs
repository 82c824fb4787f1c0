use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sicwig(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sicwig"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env_remove("SICWIG_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect()
}

#[test]
fn tomo_singlet_tt() {
    let dir = tempfile::tempdir().unwrap();
    let out = sicwig(dir.path(), &["tomo", "--state", "psi-minus", "--config", "tt", "--shots", "40000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("tomo.json"));
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["meta", "inputs", "results"]);
    assert!(doc["results"]["fidelity"].as_f64().unwrap() >= 0.99);
    assert_eq!(doc["meta"]["seed"], 7);
    assert_eq!(doc["meta"]["tool"], "sicwig");
    assert!(doc["meta"]["version"].is_string());
    assert!(doc["meta"]["stream_algorithm"].as_str().unwrap().contains("chacha20"));
    assert_eq!(doc["inputs"]["shots"], 40000);
    assert_eq!(doc["inputs"]["config"], "tt");
    let counts = matrix(&doc["results"]["joint_counts"]);
    assert_eq!(counts.iter().flatten().sum::<f64>(), 40000.0);
    assert!((0..4).all(|k| counts[k][k] == 0.0));
    // complex matrices are rows of [re, im]
    assert_eq!(doc["results"]["rho_hat"][0][0].as_array().unwrap().len(), 2);
}

#[test]
fn tomo_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let zero = sicwig(dir.path(), &["tomo", "--state", "psi-minus", "--config", "ta", "--shots", "0"]);
    assert_eq!(zero.status.code(), Some(2));
    let unknown = sicwig(dir.path(), &["tomo", "--state", "bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
    let bad_flag = sicwig(dir.path(), &["tomo", "--state", "psi-minus", "--config", "xx"]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let bad_werner = sicwig(dir.path(), &["tomo", "--state", "werner:1.5"]);
    assert_eq!(bad_werner.status.code(), Some(2));
    let no_cmd = sicwig(dir.path(), &[]);
    assert_eq!(no_cmd.status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = sicwig(&blocker.join("sub"), &["tomo", "--state", "psi-minus", "--shots", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let missing = dir.path().join("missing.json");
    let arg = format!("file:{}", missing.display());
    let out = sicwig(dir.path(), &["tomo", "--state", &arg, "--shots", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn tomo_state_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let h = 0.5;
    // |Phi+><Phi+|
    let rows = serde_json::json!([
        [[h, 0.0], [0.0, 0.0], [0.0, 0.0], [h, 0.0]],
        [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        [[h, 0.0], [0.0, 0.0], [0.0, 0.0], [h, 0.0]]
    ]);
    let path = dir.path().join("state.json");
    std::fs::write(&path, rows.to_string()).unwrap();
    let arg = format!("file:{}", path.display());
    let out = sicwig(dir.path(), &["tomo", "--state", &arg, "--shots", "1000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let w = matrix(&read_json(&dir.path().join("tomo.json"))["results"]["W_theory"]);
    for k in 0..4 {
        for l in 0..4 {
            let expected = if k + l == 3 { -0.125 } else { 0.125 };
            assert!((w[k][l] - expected).abs() < 1e-12);
        }
    }
    std::fs::write(&path, "[[1]]").unwrap();
    let out = sicwig(dir.path(), &["tomo", "--state", &arg, "--shots", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tomo_phi_plus_theory_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = sicwig(dir.path(), &["tomo", "--state", "phi-plus", "--config", "tt", "--shots", "40000"]);
    assert_eq!(out.status.code(), Some(0));
    let w = matrix(&read_json(&dir.path().join("tomo.json"))["results"]["W_theory"]);
    for k in 0..4 {
        for l in 0..4 {
            let expected = if k + l == 3 { -0.125 } else { 0.125 };
            assert!((w[k][l] - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn csv_and_json_values_agree() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["tomo", "--state", "werner:0.9", "--config", "ta", "--shots", "5000", "--seed", "3"];
    assert_eq!(sicwig(dir.path(), &args).status.code(), Some(0));
    let mut csv_args = vec!["--format", "csv"];
    csv_args.extend_from_slice(&args);
    assert_eq!(sicwig(dir.path(), &csv_args).status.code(), Some(0));
    let json = matrix(&read_json(&dir.path().join("tomo.json"))["results"]["W_hat"]);
    let text = std::fs::read_to_string(dir.path().join("tomo_W_hat.csv")).unwrap();
    assert!(text.starts_with("# meta {"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "k,l,value");
    assert_eq!(rows.len(), 17);
    for row in &rows[1..] {
        let f: Vec<&str> = row.split(',').collect();
        let (k, l): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let v: f64 = f[2].parse().unwrap();
        assert_eq!(v.to_bits(), json[k][l].to_bits());
        assert_eq!(format!("{:.16e}", v), format!("{:.16e}", json[k][l]));
    }
}

#[test]
fn scan_correlations_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = sicwig(dir.path(), &["scan-correlations"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("A:12/B:0/C:0"));
    let doc = read_json(&dir.path().join("correlations.json"));
    assert_eq!(doc["results"]["summary"], "A:12/B:0/C:0");
    let candidates = doc["results"]["candidates"].as_array().unwrap();
    assert_eq!(candidates.len(), 96);
    let tt_corr_id = candidates
        .iter()
        .find(|c| {
            c["config"] == "tt"
                && c["mode"] == "correlated"
                && c["permutation"] == serde_json::json!([[0, 0], [0, 1], [1, 0], [1, 1]])
        })
        .unwrap();
    assert!((tt_corr_id["candidate"]["min_eigenvalue"].as_f64().unwrap() + 2.0).abs() < 1e-9);
    assert!(candidates.iter().all(|c| c["candidate"]["eigenvalues"].as_array().unwrap().len() == 4));
}

#[test]
fn wigner_sets_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = sicwig(dir.path(), &["wigner-sets"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = read_json(&dir.path().join("wigner_sets.json"));
    assert_eq!(doc["results"]["qubit_set_count"], 8);
    assert_eq!(doc["results"]["valid_product_count"], 32);
    let striations = doc["results"]["canonical_ta_striations"]["striations"].as_array().unwrap();
    assert_eq!(striations.iter().filter(|s| s["factorizable"] == true).count(), 3);
    assert_eq!(striations.iter().filter(|s| s["entangled"] == true).count(), 2);
}

#[test]
fn qkd_deny_and_grant() {
    let dir = tempfile::tempdir().unwrap();
    let out = sicwig(dir.path(), &["qkd", "--pairs", "100000", "--deny"]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("qkd_report.json"));
    assert!(report["results"]["capability"]["pre_announcement_mi"]["bits"].as_f64().unwrap() < 0.01);
    assert!(report["results"]["capability"]["post_announcement_mi"].is_null());
    let transcript = read_json(&dir.path().join("qkd_transcript.json"));
    assert!(transcript["results"]["announcements"].is_null());

    let out = sicwig(dir.path(), &["qkd", "--pairs", "100000", "--grant"]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("qkd_report.json"));
    let post = report["results"]["capability"]["post_announcement_mi"]["bits"].as_f64().unwrap();
    assert!((post - 0.415).abs() < 0.02);
    assert_eq!(report["results"]["capability"]["forbidden_coincidences"], 0);
    assert_eq!(report["results"]["tomographic_check"]["alarm"], false);

    let conflict = sicwig(dir.path(), &["qkd", "--grant", "--deny"]);
    assert_eq!(conflict.status.code(), Some(2));
    let bad = sicwig(dir.path(), &["qkd", "--pairs", "0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["qkd", "--pairs", "20000", "--seed", "5", "--noise", "0.9"],
        &["tomo", "--state", "werner:0.947", "--shots", "40000", "--seed", "9"],
        &["--format", "csv", "qkd", "--pairs", "2000", "--seed", "5"],
        &["scan-correlations"],
    ];
    for args in runs {
        assert_eq!(sicwig(a.path(), args).status.code(), Some(0));
        assert_eq!(sicwig(b.path(), args).status.code(), Some(0));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 6);
    for name in names {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
}

#[test]
fn output_directory_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sicwig"))
        .args(["tomo", "--state", "psi-plus", "--shots", "100"])
        .env("SICWIG_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("tomo.json").exists());
}
