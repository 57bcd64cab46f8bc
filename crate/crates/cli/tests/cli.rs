use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn orbicat(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbicat"))
        .args(args)
        .current_dir(dir)
        .env_remove("ORBICAT_SAMPLES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gallery_file(dir: &TempDir, file: &str, args: &[&str]) -> PathBuf {
    let mut full = vec!["gallery"];
    full.extend_from_slice(args);
    let o = orbicat(&full, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = dir.path().join(file);
    std::fs::write(&p, &o.stdout).unwrap();
    p
}

#[test]
fn groupoid_on_cone3_passes() {
    let dir = TempDir::new().unwrap();
    gallery_file(&dir, "cone3.json", &["cone", "--p", "3"]);
    let o = orbicat(&["groupoid", "cone3.json", "--samples", "1000"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("overall: pass"));
}

#[test]
fn morita_on_cone_pair_passes() {
    let dir = TempDir::new().unwrap();
    gallery_file(&dir, "sub.json", &["cone", "--p", "3"]);
    gallery_file(&dir, "full.json", &["cone", "--p", "3", "--with-inner"]);
    let o = orbicat(&["morita", "sub.json", "full.json", "--samples", "50"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn bijection_reports_inequivalent_with_exit_zero() {
    let dir = TempDir::new().unwrap();
    gallery_file(&dir, "cone3.json", &["cone", "--p", "3"]);
    gallery_file(&dir, "cone2.json", &["cone", "--p", "2"]);
    let o = orbicat(&["bijection", "cone3.json", "cone2.json", "--out", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: inequivalent"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(doc["verdict"], "pass");
    assert_eq!(doc["result"]["bijection"]["atlas_verdict"], "inequivalent");
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = TempDir::new().unwrap();
    gallery_file(&dir, "fb.json", &["football", "--p", "2", "--q", "3"]);
    let run = |out: &str| {
        let o = orbicat(&["groupoid", "fb.json", "--samples", "60", "--seed", "9", "--out", out], dir.path());
        assert!(o.status.success());
        (stdout(&o), std::fs::read(dir.path().join(out)).unwrap())
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn usage_and_input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(orbicat(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(orbicat(&["validate"], dir.path()).status.code(), Some(2));
    assert_eq!(orbicat(&["validate", "missing.json"], dir.path()).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.json"), "{\"conductor\": 4,").unwrap();
    assert_eq!(orbicat(&["validate", "bad.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn invalid_atlas_exits_one() {
    let dir = TempDir::new().unwrap();
    let p = gallery_file(&dir, "cone3.json", &["cone", "--p", "3"]);
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    // drop the identity from the group: no longer a group
    doc["charts"][0]["group"].as_array_mut().unwrap().remove(0);
    std::fs::write(&p, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = orbicat(&["validate", "cone3.json"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn samples_default_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    gallery_file(&dir, "cone2.json", &["cone", "--p", "2"]);
    let o = Command::new(env!("CARGO_BIN_EXE_orbicat"))
        .args(["validate", "cone2.json", "--out", "v.json"])
        .current_dir(dir.path())
        .env("ORBICAT_SAMPLES", "7")
        .output()
        .unwrap();
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(doc["samples"], 7);
}

#[test]
fn strict_turns_warnings_into_failures() {
    // reconstruction reports skipped points as warnings; with none, strict still passes
    let dir = TempDir::new().unwrap();
    gallery_file(&dir, "cone3.json", &["cone", "--p", "3"]);
    let o = orbicat(&["reconstruct", "cone3.json", "--samples", "30", "--strict"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
