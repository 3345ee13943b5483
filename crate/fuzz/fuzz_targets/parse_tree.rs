#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(node) = lff_core::parser::parse_tree(text) {
            let _ = lff_core::tree::render_parse_tree(&node);
        }
    }
});
