#![no_main]

use bootstrap_core::tensor::{read_matrix, write_matrix};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = read_matrix(data) {
        let bytes = write_matrix(m.kind, &m.space, &m.matrix);
        read_matrix(&bytes).expect("written matrix reads back");
    }
});
