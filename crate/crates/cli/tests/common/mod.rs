#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// (name, arguments); output goes to `tests/golden/<name>.<ext>`.
pub const CORPUS: [(&str, &[&str]); 20] = [
    ("classify_golden", &["classify", "--poly", "x^2-x-1", "--root-index", "1", "--inverse"]),
    ("classify_lehmer", &["classify", "--poly", "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1", "--root-index", "1", "--inverse"]),
    ("classify_garsia", &["classify", "--poly", "x^3-x-2", "--inverse", "--separation-d", "8"]),
    ("classify_rational", &["classify", "--lambda-rational", "3/5"]),
    ("atoms_dyadic", &["atoms", "--lambda-rational", "1/2", "--n", "3"]),
    ("atoms_golden_list", &["atoms", "--poly", "x^2+x-1", "--n", "3", "--list"]),
    ("atoms_biased_window", &["atoms", "--lambda-rational", "0.6", "--n", "6", "--start", "2", "--bias", "1/3"]),
    ("entropy_golden", &["entropy", "--poly", "x^2+x-1", "--n", "12"]),
    ("scale_entropy_cantor", &["scale-entropy", "--lambda-rational", "1/3", "--depth", "12", "--window", "6", "--defect", "8"]),
    ("dimension_rational", &["dimension", "--lambda-rational", "3/5", "--n", "16"]),
    ("dimension_golden", &["dimension", "--poly", "x^2+x-1", "--n", "14"]),
    ("dimension_below_half", &["dimension", "--lambda-rational", "2/5"]),
    ("fourier_dyadic", &["fourier", "--lambda-rational", "1/2", "--t", "1/8"]),
    ("fourier_scan_golden", &["fourier", "--poly", "x^2-x-1", "--inverse", "--scan", "12"]),
    ("fourier_decay_dyadic", &["fourier", "--lambda-rational", "1/2", "--decay", "1,100,40"]),
    ("roots_transversality", &["roots-audit", "--mode", "transversality", "--d", "5"]),
    ("roots_nearest", &["roots-audit", "--mode", "nearest", "--d", "4", "--lambda-rational", "11/20"]),
    ("roots_small_values", &["roots-audit", "--mode", "small-values", "--x", "9/10", "--d", "6"]),
    ("sweep_dimension", &["sweep", "--range", "51/100:99/100:1/25", "--", "dimension", "--n", "10"]),
    ("sweep_pisot", &["sweep", "--polys", "x^2-x-1;x^3-x^2-1", "--inverse", "--", "fourier", "--scan", "15"]),
];

pub fn extension(args: &[&str]) -> &'static str {
    if args[0] == "sweep" || args.contains(&"--csv") {
        "csv"
    } else {
        "json"
    }
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub fn bconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bconv"))
        .args(args)
        .env_remove("BCONV_CACHE")
        .output()
        .expect("bconv runs")
}

pub fn bconv_ok(args: &[&str]) -> String {
    let out = bconv(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8 output")
}

/// Runs `args` with extra global flags in front.
pub fn with_flags(flags: &[&str], args: &[&str]) -> String {
    let all: Vec<&str> = flags.iter().chain(args).copied().collect();
    bconv_ok(&all)
}
