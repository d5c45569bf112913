use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_reachkit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON object")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// CSV body without the leading `#` provenance line.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const SPEC2: &str = r#"{"schema":1,"r":[2],"alpha":[-1],"beta":[1],"x0":[0,0],"t":1}"#;
const SPEC3: &str = r#"{"schema":1,"r":[3],"alpha":[-1],"beta":[1],"x0":[0,0,0],"t":1}"#;

#[test]
fn size_prints_report_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "good.json", SPEC2);
    let out = run(&["size", "--spec", spec.to_str().unwrap(), "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys[0], "reachkit");
    assert_eq!(v["reachkit"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["reachkit"]["input_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["volume_exact"], "2/3");
    assert!((v["volume"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((v["diameter"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-14);
}

#[test]
fn alpha_above_beta_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "bad_alpha_gt_beta.json",
        r#"{"r":[2],"alpha":[2],"beta":[1],"x0":[0,0],"t":1}"#,
    );
    let out = run(&["size", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let e = stderr_json(&out);
    assert_eq!(e["field"], "alpha");
    assert_eq!(e["code"], "validation");
    assert!(e["detail"].as_str().unwrap().contains("alpha"));
}

#[test]
fn unknown_spec_fields_and_schema_versions_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let extra = write(
        dir.path(),
        "extra.json",
        r#"{"r":[2],"alpha":[-1],"beta":[1],"x0":[0,0],"t":1,"gain":2}"#,
    );
    let out = run(&["size", "--spec", extra.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["field"], "gain");

    let future = write(
        dir.path(),
        "future.json",
        r#"{"schema":2,"r":[2],"alpha":[-1],"beta":[1],"x0":[0,0],"t":1}"#,
    );
    let out = run(&["size", "--spec", future.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["field"], "schema");
}

#[test]
fn implicitize_beyond_envelope_is_a_capability_error() {
    let out = run(&["implicitize", "--r", "12"]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["code"], "capability");
    assert!(e["detail"].as_str().unwrap().contains("r <= 8"));
}

#[test]
fn implicitize_writes_canonical_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("poly.json");
    let out = run(&["--quiet", "implicitize", "--r", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["text"], "rho3^4 - 4*rho1*rho3 + 3*rho2^2");
    assert_eq!(v["degree"], 4);
    let p: reachkit::MultiPoly = serde_json::from_value(v["polynomial"].clone()).unwrap();
    assert_eq!(p, reachkit::implicitize(3).unwrap());
}

#[test]
fn unknown_flags_are_rejected() {
    let out = run(&["size", "--spec", "x.json", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let e = stderr_json(&out);
    assert_eq!(e["code"], "usage");
    assert_eq!(e["field"], "frobnicate");
}

#[test]
fn missing_spec_file_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("never.csv");
    let out = run(&[
        "boundary",
        "--spec",
        dir.path().join("absent.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["code"], "io");
    assert!(!out_path.exists());
}

#[test]
fn failed_run_leaves_existing_output_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s2.json", SPEC2);
    let target = write(dir.path(), "heat.csv", "previous");
    let out = run(&[
        "width-map",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(std::fs::read_to_string(&target).unwrap(), "previous");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn support_csv_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s2.json", SPEC2);
    let dirs = write(dir.path(), "dirs.csv", "y1,y2\n1,0\n0,1\n-0.3,2\n");
    let out = run(&[
        "support",
        "--spec",
        spec.to_str().unwrap(),
        "--dirs",
        dirs.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# reachkit "));
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["y1", "y2", "h", "argmax1", "argmax2"]);
    let lib = reachkit::ReachSpec::from_json(SPEC2).unwrap();
    for row in &rows[1..] {
        let v: Vec<f64> = row.iter().map(|c| c.parse().unwrap()).collect();
        let h = reachkit::support_box(&lib, &v[..2]).unwrap().value;
        assert_eq!(v[2], h);
        assert!((v[0] * v[3] + v[1] * v[4] - h).abs() < 1e-12);
    }
}

#[test]
fn numbers_use_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s3.json", SPEC3);
    let out = run(&["boundary", "--spec", spec.to_str().unwrap(), "--grid", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows[0], ["block", "sign", "x1", "x2", "x3"]);
    assert_eq!(rows.len() - 1, 2 * 10);
    for cell in rows[1..].iter().flat_map(|r| &r[2..]) {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{cell}");
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s2.json", SPEC2);
    let a = dir.path().join("a.csv");
    let args = |p: &Path| {
        vec![
            "--quiet".to_string(),
            "--threads".to_string(),
            "3".to_string(),
            "benchmark".to_string(),
            "--spec".to_string(),
            spec.to_str().unwrap().to_string(),
            "--t".to_string(),
            "0.5:0.25:1".to_string(),
            "--n".to_string(),
            "8,32".to_string(),
            "--out".to_string(),
            p.to_str().unwrap().to_string(),
        ]
    };
    assert!(bin().args(args(&a)).status().unwrap().success());
    let first = std::fs::read(&a).unwrap();
    assert!(bin().args(args(&a)).status().unwrap().success());
    assert_eq!(first, std::fs::read(&a).unwrap());

    let rows = csv_rows(&String::from_utf8(first).unwrap());
    assert_eq!(
        rows[0],
        ["t", "n_or_order", "vol_exact", "vol_approx", "ratio", "diam_exact", "diam_approx"]
    );
    assert_eq!(rows.len() - 1, 3 * 2);
    for row in &rows[1..] {
        let ratio: f64 = row[4].parse().unwrap();
        assert!(ratio > 0.0 && ratio < 1.0, "outer approximant ratio {ratio}");
    }
}

#[test]
fn monte_carlo_in_size_follows_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s2.json", SPEC2);
    let go = |seed: &str| {
        let out = run(&["size", "--spec", spec.to_str().unwrap(), "--mc-samples", "10000", "--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
        stdout_json(&out)["monte_carlo"]["estimate"]["estimate"].as_f64().unwrap()
    };
    assert_eq!(go("7"), go("7"));
    assert_ne!(go("7"), go("8"));
}

#[test]
fn hausdorff_reports_known_distance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "r11.json",
        r#"{"r":[1,1],"alpha":[-1,-1],"beta":[1,1],"x0":[0,0],"t":1}"#,
    );
    let out = run(&["hausdorff", "--spec", spec.to_str().unwrap(), "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["distance"].as_f64().unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-6);

    let out = run(&["hausdorff", "--spec", spec.to_str().unwrap(), "--p", "1,inf"]);
    let v = stdout_json(&out);
    assert_eq!(v["results"][1]["p"], "inf");
    assert!(v["results"][1]["distance"].as_f64().unwrap() < 1e-10);
}

#[test]
fn contains_classifies_points() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s2.json", SPEC2);
    let pts = write(dir.path(), "pts.csv", "0,0\n5,0\n0.5,1\n");
    let out = run(&["contains", "--spec", spec.to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let labels: Vec<&str> = rows[1..].iter().map(|r| r[2].as_str()).collect();
    assert_eq!(labels, ["inside", "outside", "boundary"]);

    let out = run(&["contains", "--spec", spec.to_str().unwrap(), "--point", "1,2,3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn curves_and_width_map_shapes() {
    let out = run(&["curves", "--kind", "volume", "--d-list", "2,3", "--t-max", "2", "--samples", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows[0], ["d", "t", "volume"]);
    assert_eq!(rows.len() - 1, 2 * 4);
    let last: f64 = rows[4][2].parse().unwrap();
    assert!((last - 2.0 / 3.0 * 8.0).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s3.json", SPEC3);
    let out = run(&[
        "width-map",
        "--spec",
        spec.to_str().unwrap(),
        "--phi-steps",
        "5",
        "--theta-steps",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len() - 1, 20);
    let lib = reachkit::ReachSpec::from_json(SPEC3).unwrap();
    let dia = reachkit::diameter(&lib).value;
    for row in &rows[1..] {
        let w: f64 = row[2].parse().unwrap();
        assert!(w > 0.0 && w <= dia + 1e-12);
    }
}

#[test]
fn render2d_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s2.json", SPEC2);
    let svg = dir.path().join("set.svg");
    let out = run(&["render2d", "--spec", spec.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<!-- reachkit "));
    assert_eq!(text.matches("<polyline").count(), 3);
    let upper = text.split("class=\"upper\"").nth(1).unwrap();
    let points = upper.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    assert_eq!(points.split(' ').count(), 512);
}
