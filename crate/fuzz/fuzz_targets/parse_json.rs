#![no_main]

use libfuzzer_sys::fuzz_target;
use qsimplex_core::lp::{parse_json, to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // must never panic; accepted instances survive a write/read cycle
    if let Ok(lp) = parse_json(text) {
        let again = parse_json(&to_json(&lp)).expect("serialized instance parses");
        assert_eq!(again.num_rows(), lp.num_rows());
        assert_eq!(again.num_cols(), lp.num_cols());
        assert_eq!(again.rhs(), lp.rhs());
        assert_eq!(again.cost(), lp.cost());
    }
});
