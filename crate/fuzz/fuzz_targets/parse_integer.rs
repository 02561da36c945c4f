#![no_main]

use cm_torsion::parse::{parse_int, parse_uint};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(n) = parse_int(s) {
        assert_eq!(s.parse::<i64>(), Ok(n));
        assert!(s.bytes().skip(1).all(|b| b.is_ascii_digit()));
    }
    if let Ok(n) = parse_uint(s) {
        assert_eq!(s.strip_prefix('+').unwrap_or(s).parse::<u64>(), Ok(n));
    }
});
