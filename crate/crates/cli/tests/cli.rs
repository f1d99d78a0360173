mod common;

use std::fs;

use common::*;
use serde_json::Value;

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&bconv_ok(args)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    bconv(args).status.code().unwrap()
}

#[test]
fn documented_examples() {
    let v = json(&["classify", "--poly", "x^2-x-1", "--root-index", "1", "--inverse"]);
    assert_eq!(v["is_pisot"], true);
    assert!((v["mahler"].as_f64().unwrap() - 1.6180339887).abs() < 1e-9);
    let v = json(&["dimension", "--lambda-rational", "3/5", "--n", "16"]);
    assert_eq!((v["lower"].as_f64(), v["upper"].as_f64()), (Some(1.0), Some(1.0)));
    let v = json(&["atoms", "--lambda-rational", "1/2", "--n", "3"]);
    assert_eq!(v["atoms"], 8);
    assert_eq!(v["entropy_bits"], 3.0);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["dimension", "--lambda-rational", "1/2"]), 0);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["dimension"]), 2);
    assert_eq!(code(&["dimension", "--lambda-rational", "3/2"]), 2);
    assert_eq!(code(&["dimension", "--poly", "x^2+x+"]), 2);
    assert_eq!(code(&["classify", "--poly", "x^2-2", "--inverse", "--root-index", "0"]), 2);
    assert_eq!(code(&["atoms", "--lambda-rational", "1/2", "--n", "40"]), 3);
    assert_eq!(code(&["roots-audit", "--mode", "transversality", "--d", "40"]), 3);
    assert_eq!(code(&["cache", "stat"]), 2);
    let err = bconv(&["atoms", "--lambda-rational", "1/2", "--n", "40"]);
    let e: Value = serde_json::from_slice(&err.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "cap_exceeded");
}

#[test]
fn descriptors_agree() {
    let a = json(&["dimension", "--poly", "x^2+x-1", "--n", "8"]);
    let b = json(&["dimension", "--poly", "x^2-x-1", "--inverse", "--n", "8"]);
    let c = json(&["dimension", "--poly", "x^2+x-1", "--interval", "1/2,1", "--n", "8"]);
    for k in ["lower", "upper", "h_upper", "lambda_value"] {
        assert_eq!(a[k], b[k]);
        assert_eq!(a[k], c[k]);
    }
    let d = json(&["dimension", "--lambda-rational", "0.6"]);
    assert_eq!(d["lambda"], "3/5");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["entropy", "--poly", "x^3+x-1", "--n", "10"];
    assert_eq!(bconv_ok(&args), bconv_ok(&args));
}

#[test]
fn sweep_rows_follow_grid() {
    let out = bconv_ok(&["sweep", "--lambdas", "3/5,7/5,1/3", "--", "dimension", "--n", "8"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("index,lambda,lambda_value,status,message,"));
    assert!(lines[1].starts_with("0,3/5,0.6,ok,"));
    assert!(lines[2].starts_with("1,7/5,,usage_error,"));
    assert!(lines[3].starts_with("2,1/3,"));
    assert!(!out.contains('\r'));
}

#[test]
fn singleton_sweep_matches_run() {
    let v = json(&["dimension", "--lambda-rational", "5/8", "--n", "8"]);
    let out = bconv_ok(&["sweep", "--lambdas", "5/8", "--", "dimension", "--n", "8"]);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let row = rdr.records().next().unwrap().unwrap();
    for (h, cell) in headers.iter().zip(row.iter()) {
        if let Some(x) = v.get(h).filter(|x| !x.is_array() && !x.is_object()) {
            let want = match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            assert_eq!(cell, want, "{h}");
        }
    }
}

#[test]
fn sweep_errors() {
    assert_eq!(code(&["sweep", "--", "dimension"]), 2);
    assert_eq!(code(&["sweep", "--lambdas", "3/5", "--", "dimension", "--lambda-rational", "1/2"]), 2);
    assert_eq!(code(&["sweep", "--lambdas", "3/5", "--", "roots-audit", "--mode", "transversality", "--d", "3"]), 2);
}

#[test]
fn cache_operations() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().to_str().unwrap();
    let s = json(&["--cache-dir", root, "cache", "stat"]);
    assert_eq!(s["entries"], 0);
    bconv_ok(&["--cache-dir", root, "dimension", "--lambda-rational", "3/5", "--n", "6"]);
    let s = json(&["--cache-dir", root, "cache", "stat"]);
    assert_eq!(s["entries"], 1);
    assert_eq!(s["items"][0]["op"], "dimension");
    let key = s["items"][0]["key"].as_str().unwrap().to_string();
    let v = json(&["--cache-dir", root, "cache", "verify"]);
    assert_eq!(v["match_rate"], 1.0);
    assert_eq!(v["sampled"], 1);

    // a damaged entry is reported and skipped, and a run recomputes it
    let path = tmp.path().join(&key[..2]).join(format!("{key}.json"));
    fs::write(&path, "{ not json").unwrap();
    let v = json(&["--cache-dir", root, "cache", "verify"]);
    assert_eq!(v["corrupted"][0]["key"], key);
    let fresh = bconv_ok(&["dimension", "--lambda-rational", "3/5", "--n", "6"]);
    assert_eq!(bconv_ok(&["--cache-dir", root, "dimension", "--lambda-rational", "3/5", "--n", "6"]), fresh);

    // an entry from another version is ignored
    let mut e: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    e["version"] = "0.0.0".into();
    e["payload"]["upper"] = 0.5.into();
    fs::write(&path, e.to_string()).unwrap();
    assert_eq!(bconv_ok(&["--cache-dir", root, "dimension", "--lambda-rational", "3/5", "--n", "6"]), fresh);

    let c = json(&["--cache-dir", root, "cache", "clear"]);
    assert_eq!(c["removed"], 1);
    let c = json(&["--cache-dir", root, "cache", "clear"]);
    assert_eq!(c["removed"], 0);
}

#[test]
fn cache_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_bconv"))
        .args(["dimension", "--lambda-rational", "2/3", "--n", "6"])
        .env("BCONV_CACHE", tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let s = json(&["--cache-dir", tmp.path().to_str().unwrap(), "cache", "stat"]);
    assert_eq!(s["entries"], 1);
}

#[test]
fn density_csv() {
    let out = bconv_ok(&["density", "--lambda-rational", "3/5", "--depth", "5", "--csv"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("bin_center,mass,density"));
    let total: f64 = lines.map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}
