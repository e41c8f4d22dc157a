#![no_main]

use bootstrap_core::pauli::PauliString;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = PauliString::parse(text) {
        assert_eq!(PauliString::parse(&p.to_string()).expect("display parses"), p);
    }
});
