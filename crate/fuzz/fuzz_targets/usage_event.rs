#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(e) = serde_json::from_slice::<lff_service::usage::UsageEvent>(data) {
        let line = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<lff_service::usage::UsageEvent>(&line).unwrap(), e);
    }
});
