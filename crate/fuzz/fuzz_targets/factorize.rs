#![no_main]

use cm_torsion::arith::{factorize, is_prime};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|n: u32| {
    let n = n as u64;
    match factorize(n) {
        Ok(f) => {
            let mut product = 1u64;
            let mut last = 1;
            for &(p, e) in f.factors() {
                assert!(p > last && is_prime(p));
                last = p;
                product *= p.pow(e);
            }
            assert_eq!(product, n);
        }
        Err(_) => assert_eq!(n, 0),
    }
});
