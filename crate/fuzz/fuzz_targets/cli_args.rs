#![no_main]
use libfuzzer_sys::fuzz_target;
use pdm_dirac_cli::parse_invocation;

// NUL-separated argv; resolution only, nothing is computed
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut argv = vec!["pdm-dirac"];
    argv.extend(text.split('\0'));
    if argv.iter().any(|a| a.starts_with("--config")) {
        return;
    }
    let _ = parse_invocation(argv);
});
