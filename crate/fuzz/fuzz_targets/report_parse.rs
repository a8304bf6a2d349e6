#![no_main]
use libfuzzer_sys::fuzz_target;
use pdm_dirac_cli::output::{parse_report, report_csv, report_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(report) = parse_report(data) {
        let _ = report_csv(&report);
        let encoded = report_json(&report).expect("decoded report re-encodes");
        let again = parse_report(&encoded).expect("encoded report decodes");
        assert_eq!(again, report);
    }
});
