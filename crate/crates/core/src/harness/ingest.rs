use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralProblem;

/// What the second CSV column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    /// Solution coefficients `x_k`.
    Solution,
    /// Data coefficients `y_k`.
    Data,
}

/// Singular values with one coefficient each, sorted nonincreasingly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestedSvd {
    pub singular_values: Vec<f64>,
    pub values: Vec<f64>,
    /// `permutation[i]` is the 0-based input row of sorted entry `i`.
    pub permutation: Vec<usize>,
    /// True if the input had to be reordered.
    pub reordered: bool,
}

impl IngestedSvd {
    pub fn into_problem(self, kind: ValueKind) -> Result<SpectralProblem> {
        match kind {
            ValueKind::Solution => {
                let zeros = vec![0.0; self.values.len()];
                SpectralProblem::new(self.singular_values, self.values, &zeros, 0.0)
            }
            ValueKind::Data => SpectralProblem::from_data(self.singular_values, self.values),
        }
    }
}

/// Parses two-column comma-separated text `λ_k,value`. Blank lines and lines starting
/// with `#` are skipped. Rows out of order are sorted by decreasing `λ` and
/// the permutation is recorded.
pub fn parse_svd_csv(text: &str) -> Result<IngestedSvd> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let record: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("not a finite number: {s:?}"),
                })
        };
        let (l, v) = (parse(record[0])?, parse(record[1])?);
        if !(l > 0.0) {
            return Err(Error::Parse {
                line,
                message: format!("singular value must be positive, got {l}"),
            });
        }
        rows.push((l, v));
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    let mut permutation: Vec<usize> = (0..rows.len()).collect();
    // stable, so equal singular values keep their input order
    permutation.sort_by(|&a, &b| rows[b].0.total_cmp(&rows[a].0));
    let reordered = permutation.iter().enumerate().any(|(i, &p)| i != p);
    Ok(IngestedSvd {
        singular_values: permutation.iter().map(|&i| rows[i].0).collect(),
        values: permutation.iter().map(|&i| rows[i].1).collect(),
        permutation,
        reordered,
    })
}

pub fn ingest_svd(path: &Path) -> Result<IngestedSvd> {
    parse_svd_csv(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_lines() {
        let s = parse_svd_csv("1,2\n0.5,1").unwrap();
        assert_eq!(s.singular_values, vec![1.0, 0.5]);
        assert_eq!(s.values, vec![2.0, 1.0]);
        assert!(!s.reordered);
        let p = s.into_problem(ValueKind::Solution).unwrap();
        assert_eq!(p.x_true(), &[2.0, 1.0]);
    }

    #[test]
    fn unsorted_records_permutation() {
        let s = parse_svd_csv("0.5,1\n1,2\n0.25,3\n").unwrap();
        assert_eq!(s.singular_values, vec![1.0, 0.5, 0.25]);
        assert_eq!(s.values, vec![2.0, 1.0, 3.0]);
        assert_eq!(s.permutation, vec![1, 0, 2]);
        assert!(s.reordered);
    }

    #[test]
    fn malformed_row_reports_line() {
        match parse_svd_csv("1,2\n0.5,abc\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_svd_csv("1,2\n\n0.5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
