#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = thompson_homology::fj::ThetaDimsTable::from_json(text);
});
