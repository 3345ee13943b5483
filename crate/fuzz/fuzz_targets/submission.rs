#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = serde_json::from_slice::<lff_service::api::Submission>(data) {
        let _ = s.options.to_solve_options(lff_core::engine::Mode::Solve, std::time::Duration::from_secs(1));
        let _ = lff_core::parse_problem(&s.text());
    }
});
