#![no_main]

use cm_torsion::orders::{fundamental_part, is_valid_discriminant, make_order};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|delta: i64| {
    // form counting is O(|Δ|); keep single runs fast
    let delta = delta % 5_000_000;
    match make_order(delta) {
        Ok(order) => {
            assert!(is_valid_discriminant(delta));
            let f = order.conductor() as i64;
            assert_eq!(f * f * order.delta_k(), delta);
            assert_eq!(fundamental_part(delta).unwrap(), (order.delta_k(), order.conductor()));
            assert!(order.class_number() >= 1);
        }
        Err(_) => assert!(!is_valid_discriminant(delta)),
    }
});
