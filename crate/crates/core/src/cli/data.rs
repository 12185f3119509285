//! Reading user-supplied data files.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::models::PairedSample;

/// Fewest usable rows any loader accepts.
pub const MIN_ROWS: usize = 8;

/// Parses a delimited numeric file with `columns` columns. A first row that
/// does not parse as numbers is taken as a header; blank lines are skipped.
/// Errors carry 1-based line numbers.
pub fn read_numeric_columns(path: &Path, columns: usize) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    parse_numeric_columns(&text, columns, &[])
}

/// As [`read_numeric_columns`], but the columns listed in `skip` (such as a
/// date) are checked for presence only.
pub fn parse_numeric_columns(text: &str, columns: usize, skip: &[usize]) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut seen_data = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let sep = if line.contains(',') { ',' } else if line.contains(';') { ';' } else { '\t' };
        let fields: Vec<&str> = if line.contains(sep) {
            line.split(sep).map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        if fields.len() != columns {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {columns} column(s), found {}", fields.len()),
            });
        }
        let parsed: std::result::Result<Vec<f64>, String> = fields
            .iter()
            .enumerate()
            .filter(|(j, _)| !skip.contains(j))
            .map(|(_, f)| f.trim_matches('"').parse::<f64>().map_err(|_| format!("{f:?} is not a number")))
            .collect();
        match parsed {
            Ok(v) if v.iter().all(|x| x.is_finite()) => {
                seen_data = true;
                rows.push(v);
            }
            Ok(_) => return Err(Error::Parse { line: line_no, message: "non-finite value".into() }),
            Err(_) if !seen_data && rows.is_empty() && line_no == first_nonblank(text) => {}
            Err(message) => return Err(Error::Parse { line: line_no, message }),
        }
    }
    Ok(rows)
}

fn first_nonblank(text: &str) -> usize {
    text.lines().position(|l| !l.trim().is_empty()).map_or(0, |p| p + 1)
}

fn require_rows(got: usize) -> Result<()> {
    if got < MIN_ROWS {
        return Err(Error::InsufficientData { needed: MIN_ROWS, got });
    }
    Ok(())
}

fn single_column(text: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = parse_numeric_columns(text, 1, &[])?.into_iter().map(|r| r[0]).collect();
    require_rows(v.len())?;
    Ok(v)
}

/// Log returns from a file holding either one column of returns (optional
/// header such as `return`) or, with `prices`, two columns `date,price`
/// converted to rₜ = ln(pₜ/pₜ₋₁).
pub fn load_returns_csv(path: &Path, prices: bool) -> Result<Vec<f64>> {
    parse_returns(&fs::read_to_string(path)?, prices)
}

pub fn parse_returns(text: &str, prices: bool) -> Result<Vec<f64>> {
    if !prices {
        return single_column(text);
    }
    let p: Vec<f64> = parse_numeric_columns(text, 2, &[0])?.into_iter().map(|r| r[0]).collect();
    if let Some(bad) = p.iter().find(|&&x| x <= 0.0) {
        return Err(Error::InvalidParameter(format!("price {bad} is not positive")));
    }
    let r: Vec<f64> = p.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    require_rows(r.len())?;
    Ok(r)
}

/// One column of real observations.
pub fn load_series(path: &Path) -> Result<Vec<f64>> {
    single_column(&fs::read_to_string(path)?)
}

/// One column of non-negative integer counts.
pub fn load_counts(path: &Path) -> Result<Vec<u64>> {
    let v = load_series(path)?;
    v.iter()
        .map(|&x| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as u64)
            } else {
                Err(Error::InvalidParameter(format!("{x} is not a non-negative integer count")))
            }
        })
        .collect()
}

/// Two columns `x,y` of regressor and response.
pub fn load_pairs(path: &Path) -> Result<PairedSample> {
    let rows = read_numeric_columns(path, 2)?;
    require_rows(rows.len())?;
    Ok(PairedSample { x: rows.iter().map(|r| r[0]).collect(), y: rows.iter().map(|r| r[1]).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prices_become_log_returns() {
        let e = std::f64::consts::E;
        let mut text = String::from("date,price\n");
        for t in 0..10 {
            text.push_str(&format!("2020-01-{:02},{}\n", t + 1, e.powi(t)));
        }
        let r = parse_returns(&text, true).unwrap();
        assert_eq!(r.len(), 9);
        for x in r {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_column_verbatim_with_header_and_trailing_blank() {
        let vals = [0.01, -0.02, 0.003, 0.0, 0.5, -0.25, 1e-3, 0.04];
        let mut text = String::from("return\n");
        for v in vals {
            text.push_str(&format!("{v}\n"));
        }
        text.push_str("\n\n");
        assert_eq!(parse_returns(&text, false).unwrap(), vals);
    }

    #[test]
    fn bad_row_reports_its_line() {
        let text = "0.1\n0.2\nabc\n0.3\n";
        match parse_returns(text, false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(parse_returns("0.1\n0.2\n", false), Err(Error::InsufficientData { needed: 8, got: 2 })));
    }
}
