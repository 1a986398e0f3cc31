use std::path::Path;
use std::process::{Command, Output};

use nrep::io::MatrixFile;
use nrep::operators::DensityOperator;
use nrep::sampling::{contracted_mixture, extreme_geminal};
use nrep::WaveFunction;

fn nrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_density(dir: &Path, name: &str, d: &DensityOperator) -> String {
    let path = dir.join(name);
    MatrixFile::from_operator(d.operator(), None)
        .write(&path)
        .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_passes_on_slater_contraction() {
    let dir = tempfile::tempdir().unwrap();
    let d = contracted_mixture(&[(1.0, WaveFunction::slater(5, &[0, 1, 2]).unwrap())]).unwrap();
    let file = write_density(dir.path(), "slater.json", &d);
    let out = nrep(&["check", "--file", &file, "--N", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for line in stdout(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn check_flags_extreme_projector() {
    let dir = tempfile::tempdir().unwrap();
    let d = DensityOperator::pure(&extreme_geminal(4).unwrap()).unwrap();
    let file = write_density(dir.path(), "extreme.json", &d);
    let out = nrep(&["check", "--file", &file, "--probes", "extreme"]);
    assert_eq!(code(&out), 2);
    let dual: serde_json::Value = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .find(|v| v["condition"] == "DualP")
        .unwrap();
    assert!((dual["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((dual["bound"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(dual["passed"], false);
}

#[test]
fn check_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = contracted_mixture(&[(1.0, WaveFunction::slater(4, &[0, 1, 2]).unwrap())]).unwrap();
    let mut file = MatrixFile::from_operator(d.operator(), None);
    for k in 0..6 {
        file.entries[k * 6 + k][0] *= 0.9;
    }
    let path = dir.path().join("trace.json");
    file.write(&path).unwrap();
    let out = nrep(&["check", "--file", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&nrep(&["check", "--file", garbage.to_str().unwrap()])), 1);
    assert_eq!(code(&nrep(&["check", "--file", "/nonexistent/file.json"])), 1);
    assert_eq!(code(&nrep(&["check"])), 1);
    assert_eq!(
        code(&nrep(&[
            "check",
            "--file",
            path.to_str().unwrap(),
            "--probes",
            "bogus"
        ])),
        1
    );
}

#[test]
fn check_csv_and_table_formats() {
    let dir = tempfile::tempdir().unwrap();
    let d = contracted_mixture(&[(1.0, WaveFunction::slater(4, &[0, 1, 3]).unwrap())]).unwrap();
    let file = write_density(dir.path(), "d.json", &d);
    let out = nrep(&[
        "check", "--file", &file, "--format", "csv", "--probes", "random:2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("condition,probe,value,bound,margin,passed,tol"));
    let out = nrep(&["check", "--file", &file, "--format", "table", "--probes", "eigen"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("OneParticleBound"));
}

#[test]
fn sample_then_check_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let p = path.to_str().unwrap();
    let out = nrep(&[
        "sample",
        "--kind",
        "pure_contracted",
        "--n",
        "5",
        "--seed",
        "7",
        "--out",
        p,
    ]);
    assert_eq!(code(&out), 0);
    let file = MatrixFile::read(&path).unwrap();
    let meta = file.metadata.clone().unwrap();
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["spec"]["kind"], "pure_contracted");
    assert!(meta["generator"].as_str().unwrap().contains("ChaCha20"));

    let again = MatrixFile::from_json(&file.to_json().unwrap()).unwrap();
    assert_eq!(again, file);
    let regenerated = dir.path().join("t.json");
    nrep(&[
        "sample",
        "--kind",
        "pure_contracted",
        "--n",
        "5",
        "--seed",
        "7",
        "--out",
        regenerated.to_str().unwrap(),
    ]);
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(&regenerated).unwrap()
    );

    assert_eq!(code(&nrep(&["check", "--file", p])), 0);
    assert_eq!(code(&nrep(&["sample", "--kind", "nonsense", "--n", "4"])), 1);
}

#[test]
fn verify_spectral_contract() {
    let out = nrep(&["verify-spectral", "--n", "6", "--count", "100", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let dev: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("max deviation"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(dev <= 1e-10, "deviation {dev}");

    let out = nrep(&["verify-spectral", "--n", "4", "--count", "1", "--seed", "5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("analytic"));

    assert_eq!(code(&nrep(&["verify-spectral", "--n", "3"])), 1);
    assert_eq!(code(&nrep(&["verify-spectral", "--n", "9"])), 1);
}

#[test]
fn compare_bounds_table() {
    let out = nrep(&["compare-bounds", "--n", "4,5,6,10", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd n = 5"));
    let rows: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 3);
    let get = |row: &serde_json::Value, k: &str| row[k].as_f64().unwrap();
    assert!((get(&rows[0], "dual_p") - 1.0 / 6.0).abs() < 1e-12);
    assert!((get(&rows[0], "b") - 0.375).abs() < 1e-12);
    assert!((get(&rows[0], "lambda_min_b") - 1.25).abs() < 1e-10);
    assert!((get(&rows[1], "dual_p") - 2.0 / 9.0).abs() < 1e-12);
    assert!((get(&rows[1], "b") - 5.0 / 12.0).abs() < 1e-12);
    assert!(get(&rows[2], "dual_p") < get(&rows[2], "b"));

    let out = nrep(&["compare-bounds", "--n", "4", "--format", "csv"]);
    assert!(stdout(&out).starts_with("n,dual_p,b_c"));
}

#[test]
fn witness_lines() {
    let out = nrep(&["witness", "--n", "4", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let lines: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(!lines.is_empty());
    assert!(lines
        .iter()
        .any(|v| v["condition"] == "DualP" && v["passed"] == false));

    let out = nrep(&["witness", "--n", "4", "--grid", "0.3"]);
    assert!(stdout(&out).contains("0.300000"));
    assert_eq!(code(&nrep(&["witness", "--n", "5"])), 1);
}
