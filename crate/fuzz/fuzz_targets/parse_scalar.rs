#![no_main]

use libfuzzer_sys::fuzz_target;
use recollement::scalars::{ExactScalar, GaussianRational, PAdic};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(z) = s.parse::<GaussianRational>() {
        assert_eq!(z.to_string().parse::<GaussianRational>().unwrap(), z);
    }
    if let Ok(x) = s.parse::<PAdic>() {
        assert_eq!(x.to_string().parse::<PAdic>().unwrap(), x);
    }
    let _ = s.parse::<ExactScalar>();
});
