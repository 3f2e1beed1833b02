#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = macrospin_cli::parse_config(text) {
        // a validated config must expand to usable slot widths for every j
        for j in config.spins() {
            for dm in config.delta_ms(j) {
                assert!(dm >= 1 && dm <= j.dim());
            }
        }
        serde_json::to_string(&config).unwrap();
    }
});
