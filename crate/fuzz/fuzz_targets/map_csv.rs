#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = macrospin::phase_space::parse_map_csv(data) {
        for s in samples {
            assert!(s.weight >= 0.0 && s.value.is_finite());
        }
    }
});
