//! Replays the fuzz corpus seeds through the parsers with the fuzz targets'
//! assertions, so the seeds stay meaningful on a stable toolchain.

use std::fs;
use std::path::Path;

use qsimplex_core::lp::{parse_json, parse_mps, to_json};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn json_seeds() {
    let seeds = seeds("parse_json");
    assert!(!seeds.is_empty());
    let mut accepted = 0;
    for (name, text) in &seeds {
        if let Ok(lp) = parse_json(text) {
            accepted += 1;
            let again = parse_json(&to_json(&lp)).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(again.rhs(), lp.rhs(), "{name}");
            assert_eq!(again.cost(), lp.cost(), "{name}");
        }
    }
    assert!(accepted > 0 && accepted < seeds.len(), "corpus should hold valid and invalid seeds");
}

#[test]
fn mps_seeds() {
    let seeds = seeds("parse_mps");
    let mut accepted = 0;
    for (name, text) in &seeds {
        if let Ok(lp) = parse_mps(text) {
            accepted += 1;
            assert_eq!(lp.rhs().len(), lp.num_rows(), "{name}");
            assert!(lp.rhs().iter().chain(lp.cost()).all(|v| v.is_finite()), "{name}");
        }
    }
    assert!(accepted > 0 && accepted < seeds.len(), "corpus should hold valid and invalid seeds");
}
