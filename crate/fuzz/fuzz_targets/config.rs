#![no_main]

use bootstrap_cli::config::ScenarioConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = serde_json::from_slice::<ScenarioConfig>(data);
});
