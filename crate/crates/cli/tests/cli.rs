use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/trott.json")
}

fn agm3(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_agm3")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, stdout, stderr) = agm3(args);
    let v = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout} {stderr}"));
    (code, v)
}

fn stage<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["stages"].as_array().unwrap().iter().find(|s| s["name"] == name).unwrap_or_else(|| panic!("no stage {name}"))
}

fn failing_checks(r: &Value) -> Vec<String> {
    r["verdict"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] != true)
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("agm3-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(agm3(&["--help"]).0, 0);
    assert_eq!(agm3(&["--version"]).0, 0);
    assert_eq!(agm3(&["frobnicate"]).0, 1);
    assert_eq!(agm3(&["step", "--config", "/no/such/file.json"]).0, 1);
    assert_eq!(agm3(&["step", "--precision", "quad"]).0, 1);
    let cfg = fixture();
    let (code, _, stderr) = agm3(&["step", "--config", cfg.to_str().unwrap(), "--flag", "pair=1,1"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("flag"));
}

#[test]
fn missing_flag_is_a_usage_error() {
    let path = temp("noflag.json");
    std::fs::write(&path, r#"{"quartic": {"4,0,0": "1", "0,4,0": "1", "0,0,4": "1"}, "alpha": {"indices": [0, 1]}}"#).unwrap();
    let (code, r) = report(&["step", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(r["verdict"]["status"], "invalid_input");
}

#[test]
fn flags_counts() {
    let (code, r) = report(&["flags"]);
    assert_eq!(code, 0);
    let d = &stage(&r, "flags")["data"];
    assert_eq!((d["pairs"].as_u64(), d["partitions"].as_u64(), d["flags"].as_u64()), (Some(15), Some(15), Some(45)));
}

#[test]
fn step_on_fixture() {
    let cfg = fixture();
    let (code, r) = report(&["step", "--config", cfg.to_str().unwrap(), "--flag", "pair=1,2;partition=3-4,5-6"]);
    assert_eq!(code, 0, "{:?}", failing_checks(&r));
    let s = stage(&r, "agm_step");
    assert_eq!(s["forms"]["E'"].as_object().unwrap().len(), 10);
    assert_eq!(s["forms"]["Q'"].as_object().unwrap().len(), 6);
    let certs: Vec<_> = s["certificates"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(certs.len(), 2);
    let extract = stage(&r, "extract_configuration");
    assert_eq!(extract["certificates"].as_array().unwrap().len(), 2);
    assert_eq!(r["input"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn roundtrip_on_fixture() {
    let cfg = fixture();
    let (code, r) = report(&["roundtrip", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{:?}", failing_checks(&r));
    let res = &stage(&r, "roundtrip")["residuals"];
    for key in ["E_distance", "Q_distance", "point_distance"] {
        assert!(res[key].as_f64().unwrap() < 1e-6, "{key}");
    }
}

#[test]
fn iterate_chains_dual_flags() {
    let cfg = fixture();
    let (code, r) = report(&["iterate", "--n", "3", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{:?}", failing_checks(&r));
    let mut expected = r["input"]["flag"].clone();
    for k in 1..=3 {
        let d = &stage(&r, &format!("step_{k}"))["data"];
        assert_eq!(d["flag"], expected);
        expected = d["dual_flag"].clone();
    }
    // dual chaining oscillates back to the input after two steps
    let back = stage(&r, "iterate")["data"]["E_distance_to_two_steps_back"].as_array().unwrap().clone();
    assert_eq!(back.len(), 2);
    assert!(back.iter().all(|x| x.as_f64().unwrap() < 1e-6));
}

#[test]
fn non_generic_flag_exits_two_with_stage() {
    let cfg = fixture();
    let (code, r) = report(&["step", "--config", cfg.to_str().unwrap(), "--flag", "pair=5,6;partition=1-2,3-4"]);
    assert_eq!(code, 2);
    assert_eq!(r["verdict"]["status"], "non_generic");
    assert_eq!(r["verdict"]["error"]["stages"][0], "verify_tower_pattern");
}

#[test]
fn report_is_deterministic_and_written_to_out() {
    let cfg = fixture();
    let a = temp("a.json");
    let b = temp("b.json");
    for p in [&a, &b] {
        let (code, stdout, _) = agm3(&["extract", "--config", cfg.to_str().unwrap(), "--out", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(stdout.is_empty());
    }
    let read = |p: &PathBuf| {
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timings_ms");
        v
    };
    assert_eq!(read(&a), read(&b));
}

#[test]
fn extracted_configuration_feeds_step() {
    let path = temp("config.json");
    let (code, _, _) = agm3(&["fixture", "random", "--seed", "4", "--extracted", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, r) = report(&["step", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{:?}", failing_checks(&r));
    assert!(r["stages"].as_array().unwrap().iter().all(|s| s["name"] != "bitangents"));
}

#[test]
fn tolerance_overrides_reach_the_report() {
    let cfg = fixture();
    let (_, r) = report(&["flags", "--config", cfg.to_str().unwrap(), "--seed", "9", "--eps-rank", "1e-7", "--precision", "extended"]);
    assert_eq!(r["input"]["seed"], 9);
    assert_eq!(r["input"]["eps_rank"], 1e-7);
    assert_eq!(r["input"]["precision"], "extended");
}
