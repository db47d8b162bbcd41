#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(c) = thompson_homology::ComplexDump::parse(text) {
        assert!(c.is_closed_under_faces());
        if c.simplex_count() <= 2000 {
            assert!(thompson_homology::betti_reduced(&c).euler_identity_holds());
        }
    }
});
