//! Reader for a fixed-MPS subset: `NAME`, `ROWS`, `COLUMNS`, `RHS`, `ENDATA`.
//!
//! Only one `N` (objective) row and `E` constraint rows are accepted, which
//! maps directly onto the standard form `Ax = b, x ≥ 0`. Fields are split on
//! whitespace, so names may not contain spaces.

use std::collections::HashMap;

use super::instance::LpInstance;
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Start,
    Rows,
    Columns,
    Rhs,
    End,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_value(line: usize, field: usize, text: &str) -> Result<f64> {
    let v: f64 = text
        .parse()
        .map_err(|_| err(line, field, format!("invalid number {text:?}")))?;
    if !v.is_finite() {
        return Err(err(line, field, format!("non-finite number {text:?}")));
    }
    Ok(v)
}

pub fn parse_mps(text: &str) -> Result<LpInstance> {
    let mut section = Section::Start;
    let mut objective: Option<String> = None;
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut row_names: Vec<String> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut col_names: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut costs: Vec<f64> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut last_col: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.starts_with('*') || raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let is_header = !raw.starts_with(' ') && !raw.starts_with('\t');
        if is_header {
            section = match (section, fields[0]) {
                (Section::Start, "NAME") => Section::Start,
                (Section::Start, "ROWS") => Section::Rows,
                (Section::Rows, "COLUMNS") => Section::Columns,
                (Section::Columns, "RHS") => Section::Rhs,
                (Section::Columns | Section::Rhs, "ENDATA") => Section::End,
                (_, name @ ("RANGES" | "BOUNDS" | "OBJSENSE" | "MARKER")) => {
                    return Err(err(line_no, 1, format!("unsupported section {name}")))
                }
                (_, name) => return Err(err(line_no, 1, format!("unexpected section {name}"))),
            };
            if section == Section::Columns {
                rhs = vec![0.0; row_names.len()];
            }
            continue;
        }
        match section {
            Section::Start | Section::End => {
                return Err(err(line_no, 1, "data line outside of a section"));
            }
            Section::Rows => {
                if fields.len() != 2 {
                    return Err(err(line_no, 1, "ROWS entries need a type and a name"));
                }
                let name = fields[1].to_string();
                match fields[0] {
                    "N" if objective.is_none() => objective = Some(name),
                    "N" => return Err(err(line_no, 1, "more than one objective row")),
                    "E" => {
                        if row_index.contains_key(&name) || objective.as_ref() == Some(&name) {
                            return Err(err(line_no, 2, format!("duplicate row {name}")));
                        }
                        row_index.insert(name.clone(), row_names.len());
                        row_names.push(name);
                    }
                    other => {
                        return Err(err(
                            line_no,
                            1,
                            format!("row type {other} unsupported; only E rows are accepted"),
                        ))
                    }
                }
            }
            Section::Columns => {
                if fields.iter().any(|f| f.contains("MARKER")) {
                    return Err(err(line_no, 2, "integer markers are unsupported"));
                }
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(err(line_no, 1, "COLUMNS entries need 3 or 5 fields"));
                }
                let name = fields[0];
                let j = match col_index.get(name) {
                    Some(&j) => {
                        if last_col != Some(j) {
                            return Err(err(line_no, 1, format!("column {name} is not contiguous")));
                        }
                        j
                    }
                    None => {
                        let j = col_names.len();
                        col_index.insert(name.to_string(), j);
                        col_names.push(name.to_string());
                        columns.push(Vec::new());
                        costs.push(0.0);
                        j
                    }
                };
                last_col = Some(j);
                for (p, pair) in fields[1..].chunks(2).enumerate() {
                    let field = 2 + 2 * p;
                    let value = parse_value(line_no, field + 1, pair[1])?;
                    if objective.as_deref() == Some(pair[0]) {
                        costs[j] = value;
                    } else if let Some(&i) = row_index.get(pair[0]) {
                        if columns[j].iter().any(|&(r, _)| r == i) {
                            return Err(err(line_no, field, format!("duplicate entry for row {}", pair[0])));
                        }
                        columns[j].push((i, value));
                    } else {
                        return Err(err(line_no, field, format!("unknown row {}", pair[0])));
                    }
                }
            }
            Section::Rhs => {
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(err(line_no, 1, "RHS entries need 3 or 5 fields"));
                }
                for (p, pair) in fields[1..].chunks(2).enumerate() {
                    let field = 2 + 2 * p;
                    let value = parse_value(line_no, field + 1, pair[1])?;
                    if objective.as_deref() == Some(pair[0]) {
                        // objective constant; it does not change the optimal basis
                        continue;
                    }
                    let &i = row_index
                        .get(pair[0])
                        .ok_or_else(|| err(line_no, field, format!("unknown row {}", pair[0])))?;
                    rhs[i] = value;
                }
            }
        }
    }
    if section != Section::End {
        return Err(err(text.lines().count().max(1), 1, "missing ENDATA"));
    }
    if row_names.is_empty() || col_names.is_empty() {
        return Err(Error::InvalidInstance("MPS file has no rows or no columns".to_string()));
    }
    let a = SparseMatrix::from_columns(row_names.len(), &columns)?;
    let mut lp = LpInstance::new(a, rhs, costs)?;
    lp.row_names = Some(row_names);
    lp.col_names = Some(col_names);
    Ok(lp)
}
