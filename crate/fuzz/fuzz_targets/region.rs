#![no_main]

use bootstrap_core::lattice::{parse_region, write_region};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(region) = parse_region(text) {
        let back = parse_region(&write_region(&region)).expect("written region parses");
        assert_eq!(back, region);
    }
});
