#![no_main]

use bootstrap_core::stabilizer::{parse_stabilizer_state, write_stabilizer_state};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(state) = parse_stabilizer_state(text) {
        // Writing is canonical, so a second round trip must be a fixed point.
        let once = write_stabilizer_state(&state);
        let again = parse_stabilizer_state(&once).expect("written state parses");
        assert_eq!(write_stabilizer_state(&again), once);
    }
});
