#![no_main]

use cm_torsion::parse::{ScanMode, Suite};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(suite) = s.parse::<Suite>() {
        assert_eq!(suite.as_str(), s);
    }
    if let Ok(mode) = s.parse::<ScanMode>() {
        assert_eq!(mode.as_str(), s);
    }
});
