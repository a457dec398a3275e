#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(lines) = dmtlab::io::parse_transcripts_jsonl(text) {
        let _ = dmtlab::io::transcripts_to_jsonl(&lines);
    }
});
