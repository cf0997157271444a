#![no_main]

use libfuzzer_sys::fuzz_target;
use recollement::periodic::{Tps, Window};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(w) = Window::from_json_str(s) {
        let again = serde_json::to_string(&w.to_json()).unwrap();
        assert_eq!(Window::from_json_str(&again).unwrap(), w);
    }
    if let Ok(f) = s.parse::<Tps>() {
        assert_eq!(f.to_string().parse::<Tps>().unwrap(), f);
    }
});
