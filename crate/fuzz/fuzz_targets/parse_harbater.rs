#![no_main]

use libfuzzer_sys::fuzz_target;
use recollement::harbater::HarbaterElement;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = s.parse::<HarbaterElement>() {
        let text = f.to_string();
        assert_eq!(text.parse::<HarbaterElement>().unwrap(), f, "{text}");
    }
});
