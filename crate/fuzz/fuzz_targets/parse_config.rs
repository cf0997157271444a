#![no_main]

use libfuzzer_sys::fuzz_target;
use recollement_cli::config::{parse_range, RunConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json(s) {
        let _ = cfg.validate();
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
    if let Ok(ns) = parse_range(s) {
        assert!(!ns.is_empty());
    }
});
