#![no_main]

use bootstrap_core::markov::{read_decomposition, write_decomposition};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(d) = read_decomposition(data) {
        let bytes = write_decomposition(&d);
        read_decomposition(&bytes).expect("written decomposition reads back");
    }
});
