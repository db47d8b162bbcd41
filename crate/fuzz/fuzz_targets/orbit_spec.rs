#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    for m in [1, 4, 6, 12] {
        if let Ok(v) = thompson_homology::conj::OrbitTypeVector::parse(m, text) {
            let again = thompson_homology::conj::OrbitTypeVector::parse(m, &v.to_string()).unwrap();
            assert_eq!(again, v);
        }
    }
});
