#![no_main]

use cm_torsion::degrees::{t_circ, TorsionLevel};
use cm_torsion::orders::make_order;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|input: (u16, u32, u16)| {
    let (d, n, m) = input;
    let Ok(order) = make_order(-(d as i64)) else { return };
    let Ok(level) = TorsionLevel::new(m as u64, n as u64) else { return };
    // overflow is reported as an error; consistency errors are bugs
    match t_circ(&order, level) {
        Ok(report) => assert_eq!(report.t_circ, report.t << report.epsilon),
        Err(e) => assert!(!e.is_internal(), "{e}"),
    }
});
