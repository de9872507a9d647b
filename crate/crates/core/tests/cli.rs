use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn checkerboard(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_checkerboard"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn oracle_prints_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = checkerboard(&["oracle", "--k", "3", "--m", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("M[k=3, m=4, real] = 10"));
    let text = fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    assert!(text.starts_with("# checkerboard-rmt v1\nk,m,algebra,value,exact,stderr,method\n"));
}

#[test]
fn identities_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = checkerboard(&["verify-identities", "--max-m", "12"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("91 of 91 identities hold"));
    assert!(rows(&dir.path().join("identities.csv")).iter().all(|r| r[4] == "true"));
}

#[test]
fn invalid_values_leave_no_output() {
    let root = tempfile::tempdir().unwrap();
    for args in [
        &["bulk", "--N", "3", "--k", "4"][..],
        &["verify-split", "--exponent", "1.2"],
        &["blip", "--g", "0"],
        &["bulk", "--max-m", "40"],
    ] {
        let out = root.path().join("run");
        let o = checkerboard(args, &out);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("invalid parameter"));
        assert!(!out.exists(), "{args:?} left output behind");
    }
}

#[test]
fn unknown_flags_are_usage_errors() {
    let root = tempfile::tempdir().unwrap();
    let out = root.path().join("run");
    let o = checkerboard(&["bulk", "--size", "4"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn bad_thread_count_is_usage_error() {
    let root = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_checkerboard"))
        .args(["verify-identities", "--out"])
        .arg(root.path().join("run"))
        .env("CHECKERBOARD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_split_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = checkerboard(&["verify-split", "--N", "10", "--k", "2", "--trials", "3", "--exponent", "0.9"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(rows(&dir.path().join("split.csv")).iter().all(|r| r[1] == "overlap"));
}

#[test]
fn manifest_reruns_identically() {
    let root = tempfile::tempdir().unwrap();
    let first = root.path().join("first");
    let o = checkerboard(&["blip", "--N", "120", "--g", "6", "--seed", "17", "--max-m", "4"], &first);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(first.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["seed"], 17);
    assert_eq!(manifest["n"], 11);
    assert_eq!(manifest["g"], 6);

    let second = root.path().join("second");
    let o = checkerboard(&["--config", first.join("manifest.json").to_str().unwrap()], &second);
    assert_eq!(o.status.code(), Some(0));
    for name in ["moments.csv", "blip_histogram.csv", "blip_histogram.gp"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn histogram_bundle_renders_without_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = checkerboard(&["bulk", "--N", "100", "--trials", "10", "--bins", "40"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let bins = rows(&dir.path().join("bulk_histogram.csv"));
    assert_eq!(bins.len(), 40);
    let integral: f64 = bins
        .iter()
        .map(|r| (r[1].parse::<f64>().unwrap() - r[0].parse::<f64>().unwrap()) * r[3].parse::<f64>().unwrap())
        .sum();
    assert!((integral - 1.0).abs() < 1e-9);
    let gp = fs::read_to_string(dir.path().join("bulk_histogram.gp")).unwrap();
    assert!(gp.contains("plot \"bulk_histogram.csv\""));
}

#[test]
fn full_spectrum_has_bulk_and_blip() {
    let dir = tempfile::tempdir().unwrap();
    let o = checkerboard(&["sample", "--N", "100", "--trials", "50", "--bins", "50"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let eig = rows(&dir.path().join("eigenvalues.csv"));
    assert_eq!(eig.len(), 5000);
    let near_blip = eig.iter().filter(|r| (r[2].parse::<f64>().unwrap() - 50.0).abs() < 10.0).count();
    assert_eq!(near_blip, 100);
}

#[test]
fn hollow_moments_track_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let o = checkerboard(&["hollow", "--k", "2", "--trials", "20000", "--max-m", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    for r in rows(&dir.path().join("moments.csv")) {
        let (mean, se, oracle): (f64, f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap(), r[3].parse().unwrap());
        assert!((mean - oracle).abs() <= 4.0 * se + 1e-12, "{r:?}");
    }
}

#[test]
fn json_format_carries_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let o = checkerboard(&["oracle", "--k", "2", "--max-m", "4", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("oracle.json")).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert!(!dir.path().join("oracle.csv").exists());
}
