//! End-to-end checks of the binary: exit codes, report formats, the cap
//! override, and byte-identical output across job counts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn findim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_findim")).args(args).output().expect("binary runs")
}

#[test]
fn run_reports_match_the_golden_fixtures() {
    for entry in std::fs::read_dir(fixtures().join("scripts")).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        let golden =
            std::fs::read_to_string(fixtures().join("golden").join(format!("{name}.json")))
                .unwrap();
        let o1 = findim(&["run", path.to_str().unwrap(), "--format", "json"]);
        let o4 = findim(&["run", path.to_str().unwrap(), "--format", "json", "--jobs", "4"]);
        assert_eq!(String::from_utf8_lossy(&o1.stdout), golden, "{name} (jobs=1)");
        assert_eq!(o1.stdout, o4.stdout, "{name}: output differs across --jobs");
    }
}

#[test]
fn exit_codes() {
    let clean = fixtures().join("scripts/02_integer_tor.fd");
    assert_eq!(findim(&["run", clean.to_str().unwrap()]).status.code(), Some(0));

    // a script with an engine-level error record exits 1
    let erring = fixtures().join("scripts/17_engine_errors.fd");
    assert_eq!(findim(&["run", erring.to_str().unwrap()]).status.code(), Some(1));

    // parse errors exit 2 and report the position on stderr
    let bad = fixtures().join("errors/e01.fd");
    let out = findim(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let expected = std::fs::read_to_string(fixtures().join("errors/e01.err")).unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stderr), expected);

    // unreadable input exits 2
    assert_eq!(findim(&["run", "no_such_file.fd"]).status.code(), Some(2));
}

#[test]
fn cap_env_variable_is_honored() {
    // with a zero cap no resolution steps run, so the infinite projective
    // dimension over the dual numbers becomes indeterminate
    let script = fixtures().join("scripts/10_fdalgebra.fd");
    let out = Command::new(env!("CARGO_BIN_EXE_findim"))
        .args(["run", script.to_str().unwrap()])
        .env("FINDIM_CAP", "0")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("unknown(>0)"), "got:\n{text}");

    // the explicit flag wins over the environment
    let out = Command::new(env!("CARGO_BIN_EXE_findim"))
        .args(["run", script.to_str().unwrap(), "--cap", "32"])
        .env("FINDIM_CAP", "0")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("infinite(period 1"), "got:\n{text}");

    // garbage in the variable is a usage error
    let out = Command::new(env!("CARGO_BIN_EXE_findim"))
        .args(["run", script.to_str().unwrap()])
        .env("FINDIM_CAP", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_format_is_the_default() {
    let script = fixtures().join("scripts/02_integer_tor.fd");
    let out = findim(&["run", script.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[ok] tor 1 (Z/4) (Z/6) over Z => Z/(2)"), "got:\n{text}");
    assert!(text.contains("summary: 4 statements"));
}
