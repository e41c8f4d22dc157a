#![no_main]

use bootstrap_core::hamiltonian::{read_manifest, write_manifest};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((h, stamps)) = read_manifest(text) {
        let once = write_manifest(&h, &stamps);
        let (back, st) = read_manifest(&once).expect("written manifest reads back");
        assert_eq!(write_manifest(&back, &st), once);
    }
});
