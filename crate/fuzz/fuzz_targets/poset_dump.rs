#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(p) = thompson_homology::PosetDump::parse(text) {
        assert!(thompson_homology::poset::validate_order(p.relation()).is_ok());
        let _ = p.longest_chain();
    }
});
