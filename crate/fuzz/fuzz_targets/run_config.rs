#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = dmtlab::io::parse_config(text) {
        if let Ok(out) = dmtlab::io::config_to_toml(&cfg) {
            let _ = dmtlab::io::parse_config(&out);
        }
    }
});
