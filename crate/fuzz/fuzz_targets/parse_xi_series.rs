#![no_main]

use libfuzzer_sys::fuzz_target;
use recollement::periodic::{parse_xi_series, TwoPeriodicPresentation};

fuzz_target!(|data: &[u8]| {
    let Some((&m, rest)) = data.split_first() else { return };
    let Ok(s) = std::str::from_utf8(rest) else { return };
    let order = 1 + (m as usize % 32);
    let _ = parse_xi_series(s, order);
    let _ = TwoPeriodicPresentation::parse(s, order);
});
