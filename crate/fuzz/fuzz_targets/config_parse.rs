#![no_main]
use libfuzzer_sys::fuzz_target;
use pdm_dirac_cli::config::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_config(text) {
        for (key, _) in cfg.iter() {
            let _ = cfg.parse::<f64>(key);
        }
    }
});
