#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pts) = dmtlab::io::parse_curve_csv(text) {
        let _ = dmtlab::io::curve_to_csv(&pts);
    }
});
