#![no_main]

use cm_torsion::arith::kronecker;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|input: (i64, i64)| {
    let (a, n) = input;
    match kronecker(a, n) {
        Ok(k) => {
            assert!((-1..=1).contains(&k));
            if n > 0 && n % 2 == 1 {
                assert_eq!(Ok(k), kronecker(a.rem_euclid(n), n));
            }
        }
        Err(_) => assert_eq!(n, 0),
    }
});
