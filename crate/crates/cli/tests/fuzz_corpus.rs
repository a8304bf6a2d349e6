//! Replays the checked-in fuzz seeds through the fuzzed entry points.

use std::fs;
use std::path::PathBuf;

use pdm_dirac_cli::config::parse_config;
use pdm_dirac_cli::output::{parse_report, report_json};
use pdm_dirac_cli::parse_invocation;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds() {
    for (name, data) in seeds("config_parse") {
        let parsed = parse_config(std::str::from_utf8(&data).unwrap());
        assert_eq!(parsed.is_ok(), name != "malformed", "{name}");
    }
}

#[test]
fn report_seeds() {
    for (name, data) in seeds("report_parse") {
        match parse_report(&data) {
            Ok(report) => {
                let again = parse_report(&report_json(&report).unwrap()).unwrap();
                assert_eq!(again, report, "{name}");
            }
            Err(_) => assert_eq!(name, "incomplete.json"),
        }
    }
}

#[test]
fn argv_seeds() {
    for (name, data) in seeds("cli_args") {
        let text = String::from_utf8(data).unwrap();
        let mut argv = vec!["pdm-dirac"];
        argv.extend(text.split('\0'));
        let resolved = parse_invocation(argv);
        let expect_ok = !name.contains("bad") && !name.contains("small_grid");
        assert_eq!(resolved.is_ok(), expect_ok, "{name}: {:?}", resolved.err());
    }
}
