#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(sig) = thompson_homology::ColourSignature::from_json(text) {
        let back = thompson_homology::ColourSignature::from_json(&sig.to_json()).unwrap();
        assert_eq!(back, sig);
    }
});
