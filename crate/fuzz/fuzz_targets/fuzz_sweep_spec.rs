#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // a parsed sweep must also expand without panicking
        if let Ok(spec) = atrc::config::parse_sweep(text) {
            let _ = spec.expand();
        }
    }
});
