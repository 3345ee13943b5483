#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = lff_core::corpus::Puzzle::from_parts(text, "", "", None);
        let _ = lff_core::corpus::parse_bounds(text);
    }
});
