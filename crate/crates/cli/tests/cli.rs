use std::path::Path;
use std::process::{Command, Output};

use renyi_core::testkit::{random_density, random_reference, GeneratorSeed};
use serde_json::Value;

fn renyi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renyi")).args(args).env_remove("RENYI_EPS").output().expect("spawn renyi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn ok_line(args: &[&str]) -> String {
    let o = renyi(args);
    assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o).trim_end().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const QUBIT: &str = r#"{"dim": 2, "entries": [[[0.7, 0], [0.1, -0.2]], [[0.1, 0.2], [0.3, 0]]]}"#;

#[test]
fn example1_value() {
    assert_eq!(ok_line(&["compute", "--example1", "p=0.25", "--alpha", "2", "--z", "1"]), "0.980829253012");
    let petz = ok_line(&["compute", "--example1", "p=0.25", "--alpha", "2", "--family", "petz"]);
    assert_eq!(petz, "0.980829253012");
}

#[test]
fn identical_files_give_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", QUBIT);
    assert_eq!(ok_line(&["compute", "--rho", &f, "--sigma", &f, "--alpha", "2", "--z", "1"]), "0");
}

#[test]
fn infinite_values_name_their_reason() {
    let spec = r#"{"generator": "support", "seed": 4, "dim": 3, "rank": 1, "branch": "orthogonal"}"#;
    let line = ok_line(&["compute", "--rho", spec, "--sigma", spec, "--alpha", "2", "--z", "1"]);
    assert_eq!(line, "inf support_violation");
    let spec = r#"{"generator": "support", "seed": 4, "dim": 3, "rank": 2, "branch": "violating"}"#;
    assert_eq!(
        ok_line(&["compute", "--rho", spec, "--sigma", spec, "--alpha", "1", "--z", "1"]),
        "inf support_violation"
    );
}

#[test]
fn bits_are_nats_over_ln2() {
    let rho = r#"{"generator": "density", "seed": 11, "dim": 4}"#;
    let sigma = r#"{"generator": "reference", "seed": 12, "dim": 4}"#;
    for family in ["petz", "sandwiched", "mo", "alphaz"] {
        for alpha in ["0.4", "1", "2.5"] {
            let base = ["compute", "--rho", rho, "--sigma", sigma, "--alpha", alpha, "--z", "0.7", "--family", family];
            let nats: f64 = ok_line(&base).parse().unwrap();
            let bits: f64 = ok_line(&[&base[..], &["--bits"]].concat()).parse().unwrap();
            // both values carry 12 significant digits
            assert!((bits - nats / std::f64::consts::LN_2).abs() <= 1e-12 + 1e-11 * bits.abs(), "{family} {alpha}");
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let assert_code = |args: &[&str], want: i32| {
        let o = renyi(args);
        assert_eq!(code(&o), want, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    };
    assert_code(&["compute", "--example1", "p=0.25", "--alpha", "2", "--z", "0"], 3);
    assert_code(&["compute", "--example1", "p=1.5", "--alpha", "2", "--z", "1"], 3);
    assert_code(&["compute", "--example1", "p=0.5", "--alpha", "2", "--z", "1"], 3);
    assert_code(&["compute", "--example1", "p=0.25", "--alpha", "2"], 2);
    assert_code(&["compute", "--example1", "p=x", "--alpha", "2", "--z", "1"], 2);
    assert_code(
        &["compute", "--rho", "/nonexistent.json", "--sigma", "/nonexistent.json", "--alpha", "2", "--z", "1"],
        2,
    );
    let bad = write(dir.path(), "bad.json", "{\"dim\": 2, \"entries\": [");
    assert_code(&["compute", "--rho", &bad, "--sigma", &bad, "--alpha", "2", "--z", "1"], 2);
    let skew = write(dir.path(), "skew.json", r#"{"dim": 2, "entries": [[[0.5, 0], [0.3, 0]], [[0, 0], [0.5, 0]]]}"#);
    assert_code(&["compute", "--rho", &skew, "--sigma", &skew, "--alpha", "2", "--z", "1"], 2);
    let trace2 = write(dir.path(), "t.json", r#"{"dim": 1, "entries": [[[2, 0]]]}"#);
    assert_code(&["compute", "--rho", &trace2, "--sigma", &trace2, "--alpha", "2", "--z", "1"], 2);
    let f = write(dir.path(), "f.json", QUBIT);
    let three = r#"{"generator": "density", "seed": 1, "dim": 3}"#;
    assert_code(&["compute", "--rho", &f, "--sigma", three, "--alpha", "2", "--z", "1"], 2);
    assert_code(
        &["compute", "--rho", r#"{"example1": {"p": 0.2}, "file": "x"}"#, "--sigma", &f, "--alpha", "2", "--z", "1"],
        2,
    );
    assert_code(&["verify", "--suite", "nope"], 2);
}

#[test]
fn small_defects_are_symmetrized_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"dim": 2, "entries": [[[0.7, 0], [0.1, -0.2]], [[0.1, 0.20000000001], [0.3, 0]]]}"#;
    let f = write(dir.path(), "f.json", text);
    let o = renyi(&["compute", "--rho", &f, "--sigma", &f, "--alpha", "2", "--z", "1"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let clean = write(dir.path(), "g.json", QUBIT);
    let o = renyi(&["compute", "--rho", &clean, "--sigma", &clean, "--alpha", "2", "--z", "1"]);
    assert!(o.stderr.is_empty());
}

#[test]
fn cutoff_from_environment() {
    let args = ["compute", "--example1", "p=0.25", "--alpha", "2", "--z", "1"];
    let run = |eps: &str| Command::new(env!("CARGO_BIN_EXE_renyi")).args(args).env("RENYI_EPS", eps).output().unwrap();
    assert_eq!(stdout(&run("1e-10")).trim(), "0.980829253012");
    assert_eq!(code(&run("zero")), 2);
    assert_eq!(code(&run("-1")), 2);
}

fn csv(args: &[&str]) -> Vec<Vec<String>> {
    let text = ok_line(args);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,z,divergence_nats,trace_functional,finite"));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn sweep_grid_shape_and_order() {
    let rows = csv(&["sweep", "--example1", "p=0.25", "--alpha-grid", "0.5:1.5:3", "--z-grid", "0.5:2:3"]);
    assert_eq!(rows.len(), 9);
    let pts: Vec<(&str, &str)> = rows.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
    assert_eq!(pts[..4], [("0.5", "0.5"), ("0.5", "1.25"), ("0.5", "2"), ("1", "0.5")]);
    assert!(rows.iter().all(|r| r[4] == "true"));
}

#[test]
fn sweep_curve_sets_z() {
    let rows = csv(&["sweep", "--example1", "p=0.25", "--alpha-grid", "0.2:3:8", "--z-grid", "curve:sandwiched"]);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[0] == r[1]));
}

#[test]
fn commuting_sweep_is_flat_in_z() {
    let spec = r#"{"generator": "commuting", "seed": 5, "dim": 4}"#;
    let rows = csv(&["sweep", "--rho", spec, "--sigma", spec, "--alpha-grid", "0.3:2.7:5", "--z-grid", "0.25:4:6"]);
    for chunk in rows.chunks(6) {
        let d: Vec<f64> = chunk.iter().map(|r| r[2].parse().unwrap()).collect();
        assert!(d.iter().all(|x| (x - d[0]).abs() <= 1e-10), "{d:?}");
    }
}

#[test]
fn sweep_marks_infinite_cells() {
    let spec = r#"{"generator": "support", "seed": 2, "dim": 3, "rank": 2, "branch": "violating"}"#;
    let rows = csv(&["sweep", "--rho", spec, "--sigma", spec, "--alpha-grid", "0.5:2:2", "--z-grid", "1:1:1"]);
    assert_eq!(rows[0][4], "true");
    assert_eq!(rows[1][2..], ["inf", "inf", "false"]);
}

#[test]
fn sweep_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let rho = r#"{"generator": "density", "seed": 8, "dim": 5}"#;
    let sigma = r#"{"generator": "reference", "seed": 9, "dim": 5}"#;
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let o = renyi(&[
            "sweep",
            "--rho",
            rho,
            "--sigma",
            sigma,
            "--alpha-grid",
            "0.1:4:40",
            "--z-grid",
            "0.2:5:25",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        assert!(o.stdout.is_empty());
        files.push(std::fs::read(out).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0].iter().filter(|&&b| b == b'\n').count(), 1 + 40 * 25);
}

#[test]
fn sweep_unwritable_output() {
    let o = renyi(&[
        "sweep",
        "--example1",
        "p=0.25",
        "--alpha-grid",
        "1:2:2",
        "--z-grid",
        "1:1:1",
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let gs = GeneratorSeed::new(21, 6).unwrap();
    let cases = [
        (r#"{"generator": "density", "seed": 21, "dim": 6}"#, random_density(gs).unwrap().op().matrix().clone()),
        (
            r#"{"generator": "reference", "seed": 21, "dim": 6}"#,
            random_reference(gs, true, None).unwrap().op().matrix().clone(),
        ),
    ];
    for (i, (spec, want)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("m{i}.json"));
        let o = renyi(&["dump", "--spec", spec, "--out", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["dim"], 6);
        let mut worst = 0.0f64;
        for (r, row) in want.rows().enumerate() {
            for (c, z) in row.iter().enumerate() {
                let e = &v["entries"][r][c];
                worst = worst.max((e[0].as_f64().unwrap() - z.re).abs()).max((e[1].as_f64().unwrap() - z.im).abs());
            }
        }
        assert!(worst <= 1e-15, "{worst}");
        // re-reading the dump through the tool reproduces it exactly
        let again = dir.path().join(format!("again{i}.json"));
        assert_eq!(code(&renyi(&["dump", "--spec", path.to_str().unwrap(), "--out", again.to_str().unwrap()])), 0);
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }
    let from_file = dir.path().join("m0.json");
    let a = ok_line(&[
        "compute",
        "--rho",
        from_file.to_str().unwrap(),
        "--sigma",
        cases[1].0,
        "--alpha",
        "1.7",
        "--z",
        "0.9",
    ]);
    let b = ok_line(&["compute", "--rho", cases[0].0, "--sigma", cases[1].0, "--alpha", "1.7", "--z", "0.9"]);
    assert_eq!(a, b);
}

#[test]
fn file_spec_and_example1_spec() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", QUBIT);
    let spec = format!(r#"{{"file": {f:?}}}"#);
    assert_eq!(ok_line(&["compute", "--rho", &spec, "--sigma", &f, "--alpha", "0.5", "--z", "2"]), "0");
    let e = r#"{"example1": {"p": 0.25}}"#;
    assert_eq!(ok_line(&["compute", "--rho", e, "--sigma", e, "--alpha", "2", "--z", "1"]), "0.980829253012");
}

#[test]
fn verify_example1_passes() {
    let o = renyi(&["verify", "--suite", "example1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("suite example1: PASS"));
}

#[test]
fn verify_json_summary() {
    let o = renyi(&["verify", "--suite", "dpi", "--seeds", "3", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["options"]["seeds"], 3);
    assert!(v["records"].as_array().unwrap().iter().all(|r| r["passed"] == true));
}

#[test]
fn injected_perturbation_fails() {
    let o = renyi(&["verify", "--suite", "limits", "--seeds", "2", "--inject-perturbation"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("FAIL"));
    assert!(out.contains("first failure: limits"), "{out}");
    let o = renyi(&["verify", "--suite", "limits", "--seeds", "2", "--inject-perturbation", "--json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(serde_json::from_slice::<Value>(&o.stdout).unwrap()["passed"], false);
    assert!(String::from_utf8_lossy(&o.stderr).contains("first failure"));
}
