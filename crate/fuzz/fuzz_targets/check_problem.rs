#![no_main]

use libfuzzer_sys::fuzz_target;

use std::time::Duration;

use lff_core::engine::{run, SolveOptions};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = run(text, &SolveOptions::check());
        let opts = SolveOptions { deadline: Duration::from_millis(200), size_cap: 20_000, ..Default::default() };
        let _ = run(text, &opts).report();
    }
});
