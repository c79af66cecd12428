//! JSON instance format:
//!
//! ```json
//! {"m": 2, "n": 3,
//!  "A": {"cols": [[[0, 1.0]], [[1, 1.0]], [[0, 1.0], [1, 2.0]]]},
//!  "b": [1.0, 2.0],
//!  "c": [0.0, 0.0, -1.0]}
//! ```
//!
//! Row indices are zero-based; `cols` holds one `[row, value]` list per column.

use serde::{Deserialize, Serialize};

use super::instance::LpInstance;
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    m: usize,
    n: usize,
    #[serde(rename = "A")]
    a: RawMatrix,
    b: Vec<f64>,
    c: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    cols: Vec<Vec<(usize, f64)>>,
}

pub fn parse_json(text: &str) -> Result<LpInstance> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.a.cols.len() != raw.n {
        return Err(Error::InvalidInstance(format!(
            "n = {} but A has {} columns",
            raw.n,
            raw.a.cols.len()
        )));
    }
    if raw.m == 0 || raw.n == 0 {
        return Err(Error::InvalidInstance("m and n must be positive".to_string()));
    }
    let a = SparseMatrix::from_columns(raw.m, &raw.a.cols)?;
    LpInstance::new(a, raw.b, raw.c)
}

pub fn to_json(instance: &LpInstance) -> String {
    let a = instance.matrix();
    let cols = (0..a.ncols())
        .map(|j| {
            let (rows, vals) = a.column(j);
            rows.iter().copied().zip(vals.iter().copied()).collect()
        })
        .collect();
    let raw = RawInstance {
        m: instance.num_rows(),
        n: instance.num_cols(),
        a: RawMatrix { cols },
        b: instance.rhs().to_vec(),
        c: instance.cost().to_vec(),
    };
    serde_json::to_string(&raw).expect("instance serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"{"m":2,"n":3,"A":{"cols":[[[0,1.0]],[[1,1.0]],[[0,1.0],[1,2.0]]]},"b":[1.0,2.0],"c":[0.0,0.0,-1.0]}"#;

    #[test]
    fn parses_toy_instance() {
        let lp = parse_json(TOY).unwrap();
        assert_eq!(lp.num_rows(), 2);
        assert_eq!(lp.num_cols(), 3);
        assert_eq!(lp.matrix().column_dense(2), vec![1.0, 2.0]);
        assert_eq!(parse_json(&to_json(&lp)).unwrap(), lp);
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_json("{\"m\": 2,\n \"n\": }").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn column_count_mismatch() {
        let text = r#"{"m":1,"n":2,"A":{"cols":[[[0,1.0]]]},"b":[1.0],"c":[0.0,0.0]}"#;
        assert!(matches!(parse_json(text), Err(Error::InvalidInstance(_))));
    }
}
