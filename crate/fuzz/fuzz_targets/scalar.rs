#![no_main]

use cpm_core::Field;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    for f in [Field::Q, Field::Fp(32003)] {
        if let Ok(x) = f.parse(s) {
            assert!(f.contains(&x));
        }
    }
});
