#![no_main]

use bootstrap_core::lattice::parse_cover_manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_cover_manifest(text);
    }
});
