#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = lff_core::parse_problem(text) {
            // Rendering must parse back to the same problem.
            let again = lff_core::parse_problem(&lff_core::render_problem(&p)).expect("rendered problem parses");
            assert_eq!(lff_core::render_problem(&again), lff_core::render_problem(&p));
        }
    }
});
