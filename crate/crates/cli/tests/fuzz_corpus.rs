//! Replays the checked-in fuzz seeds through the same entry points the fuzz
//! targets drive, so a seed that panics fails ordinary `cargo test`.

use std::fs;
use std::path::PathBuf;

use macrospin::spin::SpinJ;
use macrospin_cli::{parse_config, parse_delta_m_rule};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn config_seeds() {
    let mut accepted = 0;
    for (name, data) in seeds("parse_config") {
        let text = String::from_utf8(data).unwrap();
        match parse_config(&text) {
            Ok(config) => {
                accepted += 1;
                for j in config.spins() {
                    assert!(config.delta_ms(j).iter().all(|&dm| dm >= 1 && dm <= j.dim()), "{name}");
                }
            }
            Err(e) => assert!(!e.message.is_empty(), "{name}"),
        }
    }
    assert!(accepted >= 8);
}

#[test]
fn delta_m_rule_seeds() {
    for (name, data) in seeds("delta_m_rule") {
        let text = String::from_utf8(data).unwrap();
        if let Ok(rule) = parse_delta_m_rule(&text) {
            let again = parse_delta_m_rule(&rule.to_string()).unwrap();
            assert_eq!(again, rule, "{name}");
            let _ = rule.resolve(SpinJ::from_twice(7));
        }
    }
    assert!(parse_delta_m_rule("-3*sqrt(j)").is_err());
    assert!(parse_delta_m_rule("nan*sqrt(j)").is_err());
    assert!(
        parse_delta_m_rule("0").is_err() || parse_delta_m_rule("0").unwrap().resolve(SpinJ::from_twice(2)).is_err()
    );
}

#[test]
fn map_csv_seeds() {
    let mut accepted = 0;
    for (name, data) in seeds("map_csv") {
        if let Ok(samples) = macrospin::phase_space::parse_map_csv(&data[..]) {
            accepted += 1;
            assert!(samples.iter().all(|s| s.weight >= 0.0 && s.value.is_finite()), "{name}");
        }
    }
    assert_eq!(accepted, 2);
}
