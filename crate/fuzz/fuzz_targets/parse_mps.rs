#![no_main]

use libfuzzer_sys::fuzz_target;
use qsimplex_core::lp::parse_mps;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(lp) = parse_mps(text) {
        assert_eq!(lp.rhs().len(), lp.num_rows());
        assert_eq!(lp.cost().len(), lp.num_cols());
        assert!(lp.rhs().iter().chain(lp.cost()).all(|v| v.is_finite()));
    }
});
