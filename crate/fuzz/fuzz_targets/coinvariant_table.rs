#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = thompson_homology::fj::CoinvariantTable::from_json(text);
});
