#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // parsing must never panic; a parsed config must also survive
        // validation without panicking
        if let Ok(cfg) = atrc::config::parse_scenario(text) {
            let _ = cfg.validate();
        }
    }
});
