#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(data) else { return };
    if let Ok(t) = cpm_core::moves::RewriteTrace::from_json(&v) {
        let _ = t.to_json();
    }
});
