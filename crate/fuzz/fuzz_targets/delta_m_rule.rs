#![no_main]
use libfuzzer_sys::fuzz_target;
use macrospin::spin::SpinJ;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rule) = macrospin_cli::parse_delta_m_rule(text) {
        let again = macrospin_cli::parse_delta_m_rule(&rule.to_string()).expect("display output parses");
        assert_eq!(again.to_string(), rule.to_string());
        for twice in [1, 2, 7, 200] {
            let _ = rule.resolve(SpinJ::from_twice(twice));
        }
    }
});
