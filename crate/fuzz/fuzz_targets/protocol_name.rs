#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = text.parse::<dmtlab::protocol::ProtocolKind>();
    let _ = text.parse::<dmtlab::dmt::CurveKind>();
    let _ = text.parse::<dmtlab::montecarlo::Node>();
});
