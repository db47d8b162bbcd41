#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(values) = thompson_homology_cli::parse_list(text) {
        assert!(!values.is_empty());
    }
});
