mod common;

use std::fs;

use common::*;

/// Set `BCONV_BLESS=1` to rewrite the expected files.
#[test]
fn corpus_matches_golden_files() {
    let bless = std::env::var_os("BCONV_BLESS").is_some_and(|v| v == "1");
    let dir = golden_dir();
    let mut stale = Vec::new();
    for (name, args) in CORPUS {
        let path = dir.join(format!("{name}.{}", extension(args)));
        let got = with_flags(&["--jobs", "1"], args);
        if bless {
            fs::write(&path, &got).unwrap();
            continue;
        }
        let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        if got != want {
            stale.push(name);
        }
    }
    assert!(stale.is_empty(), "outputs differ from golden files: {stale:?}");
}

#[test]
fn jobs_do_not_change_output() {
    for (name, args) in CORPUS.iter().filter(|c| c.1[0] == "sweep" || c.1[0] == "fourier") {
        let one = with_flags(&["--jobs", "1"], args);
        let many = with_flags(&["--jobs", "4"], args);
        assert_eq!(one, many, "{name}");
    }
}

#[test]
fn cached_outputs_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().to_str().unwrap();
    for (name, args) in CORPUS {
        let fresh = with_flags(&["--jobs", "2"], args);
        let first = with_flags(&["--cache-dir", root], args);
        let hit = with_flags(&["--cache-dir", root], args);
        assert_eq!(fresh, first, "{name}");
        assert_eq!(first, hit, "{name}");
    }
    let v: serde_json::Value = serde_json::from_str(&bconv_ok(&["--cache-dir", root, "cache", "verify", "--fraction", "1"])).unwrap();
    assert_eq!(v["match_rate"], 1.0);
    assert_eq!(v["sampled"], v["entries"]);
}
