#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = dmtlab::io::parse_results_csv(text) {
        // Whatever parses must survive a write and a second parse.
        let again = dmtlab::io::results_to_csv(&rows).unwrap();
        let back = dmtlab::io::parse_results_csv(&again).unwrap();
        assert_eq!(back.len(), rows.len());
    }
});
