//! Matrix serialization: JSON nested arrays of `[re, im]` pairs and the
//! whitespace-separated `re+imj` text layout.

use densparam::ComplexMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Row-major nested rows of complex entries.
pub type Rows = Vec<Vec<Complex64>>;

pub fn to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Rebuilds a matrix from rows, requiring a rectangular shape.
pub fn from_rows(rows: &Rows, field: &str) -> CliResult<ComplexMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(CliError::input(format!(
            "{field}: row {i} has {} entries, expected {ncols}",
            row.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// `from_rows` that also demands a square matrix.
pub fn square_from_rows(rows: &Rows, field: &str) -> CliResult<ComplexMatrix> {
    let m = from_rows(rows, field)?;
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(CliError::input(format!(
            "{field}: expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m)
}

/// Document written by `generate --format json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub dims: (usize, usize),
    pub matrix: Rows,
}

pub fn format_complex(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}j", z.re, z.im)
}

pub fn to_matrix_text(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|z| format_complex(*z)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses one `re±imj` token; a bare real number is accepted too.
pub fn parse_complex(token: &str) -> Option<Complex64> {
    let Some(body) = token.strip_suffix('j') else {
        return token.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    // split at the last sign that does not belong to an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = body[..split].parse::<f64>().ok()?;
    let im = body[split..].parse::<f64>().ok()?;
    Some(Complex64::new(re, im))
}

pub fn parse_matrix_text(text: &str) -> CliResult<ComplexMatrix> {
    let mut rows: Rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                parse_complex(tok).ok_or_else(|| {
                    CliError::input(format!("line {}: cannot parse entry '{tok}'", line_no + 1))
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.push(row);
    }
    square_from_rows(&rows, "matrix")
}

/// A matrix read from disk, with the factorization if the file carried one.
pub struct LoadedMatrix {
    pub matrix: ComplexMatrix,
    pub dims: Option<(usize, usize)>,
}

/// Accepts a [`MatrixDoc`], a bare JSON array of rows, or matrix text.
pub fn parse_matrix_file(text: &str) -> CliResult<LoadedMatrix> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let doc: MatrixDoc = parse_json(text)?;
        Ok(LoadedMatrix {
            matrix: square_from_rows(&doc.matrix, "matrix")?,
            dims: Some(doc.dims),
        })
    } else if trimmed.starts_with('[') {
        let rows: Rows = parse_json(text)?;
        Ok(LoadedMatrix {
            matrix: square_from_rows(&rows, "matrix")?,
            dims: None,
        })
    } else {
        Ok(LoadedMatrix {
            matrix: parse_matrix_text(text)?,
            dims: None,
        })
    }
}

/// JSON deserialization whose error message names the offending field.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::input(format!("{path}: {}", e.into_inner()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_tokens_round_trip() {
        for z in [
            Complex64::new(0.25, 0.0),
            Complex64::new(-1.5e-17, 3.0e12),
            Complex64::new(1.0 / 3.0, -2.0 / 7.0),
            Complex64::new(-0.0, -0.0),
        ] {
            let tok = format_complex(z);
            assert_eq!(parse_complex(&tok), Some(z), "{tok}");
        }
        assert_eq!(parse_complex("0.5"), Some(Complex64::new(0.5, 0.0)));
        assert_eq!(
            parse_complex("1e-3-2e-3j"),
            Some(Complex64::new(1e-3, -2e-3))
        );
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex("1.0j"), None);
    }

    #[test]
    fn matrix_text_round_trip() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| {
            Complex64::new(i as f64 / 7.0, -(j as f64) / 3.0)
        });
        let back = parse_matrix_text(&to_matrix_text(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let rows = vec![vec![Complex64::new(1.0, 0.0)], vec![]];
        let err = from_rows(&rows, "payload.u").unwrap_err();
        assert!(err.message.starts_with("payload.u"));
        assert!(parse_matrix_text("1 2\n3\n").is_err());
    }

    #[test]
    fn json_errors_name_the_field() {
        let err =
            parse_json::<MatrixDoc>(r#"{"dims": [2, 2], "matrix": [[[1, 0], "x"]]}"#).unwrap_err();
        assert!(err.message.contains("matrix[0][1]"), "{}", err.message);
    }
}
