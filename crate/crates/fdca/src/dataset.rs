//! Numeric CSV ingestion: comma separated, header row required, `.` as the
//! decimal separator.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use fdca_core::godel::{Decimal, GodelError};
use fdca_core::NumericDataset;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("CSV error near data row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("no header row")]
    NoHeader,
    #[error("no data rows")]
    Empty,
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("row {row}, column '{column}': missing value")]
    Missing { row: usize, column: String },
    #[error("row {row}: {found} fields, header has {expected}")]
    Width { row: usize, found: usize, expected: usize },
    #[error("row {row}, column '{column}': '{text}' is not a decimal number")]
    NotNumber { row: usize, column: String, text: String },
    #[error(transparent)]
    Godel(#[from] GodelError),
}

/// Reads a dataset, dropping the named columns. Rows are numbered from 1,
/// not counting the header.
pub fn read_csv(path: &Path, ignore: &[String]) -> Result<NumericDataset, DataError> {
    let f = File::open(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_csv(f, ignore)
}

pub fn parse_csv<R: Read>(input: R, ignore: &[String]) -> Result<NumericDataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| DataError::Csv {
            row: 0,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(DataError::NoHeader);
    }
    if let Some(bad) = ignore.iter().find(|c| !header.contains(c)) {
        return Err(DataError::UnknownColumn(bad.clone()));
    }
    let keep: Vec<usize> = (0..header.len()).filter(|&j| !ignore.contains(&header[j])).collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| DataError::Csv {
            row,
            message: e.to_string(),
        })?;
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        if rec.len() > header.len() {
            return Err(DataError::Width {
                row,
                found: rec.len(),
                expected: header.len(),
            });
        }
        let mut values = Vec::with_capacity(keep.len());
        for &j in &keep {
            let text = rec.get(j).unwrap_or("");
            if text.is_empty() {
                return Err(DataError::Missing {
                    row,
                    column: header[j].clone(),
                });
            }
            let v: Decimal = text.parse().map_err(|_| DataError::NotNumber {
                row,
                column: header[j].clone(),
                text: text.to_string(),
            })?;
            values.push(v);
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    let columns = keep.iter().map(|&j| header[j].clone()).collect();
    Ok(NumericDataset::new(columns, rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_drops_columns() {
        let ds = parse_csv("a,b,class\n1.5,2,1\n3.25,4,2\n".as_bytes(), &["class".into()]).unwrap();
        assert_eq!(ds.columns, ["a", "b"]);
        assert_eq!(ds.n_rows(), 2);
        assert_eq!(ds.to_f64_rows(), [vec![1.5, 2.0], vec![3.25, 4.0]]);
    }

    #[test]
    fn reports_coordinates() {
        let e = parse_csv("a,b\n1,2\n3\n".as_bytes(), &[]).unwrap_err();
        assert_eq!(e.to_string(), "row 2, column 'b': missing value");
        let e = parse_csv("a,b\n1,x\n".as_bytes(), &[]).unwrap_err();
        assert!(matches!(e, DataError::NotNumber { row: 1, .. }));
        let e = parse_csv("a,b\n1,2,3\n".as_bytes(), &[]).unwrap_err();
        assert!(matches!(
            e,
            DataError::Width {
                row: 1,
                found: 3,
                expected: 2
            }
        ));
        assert!(matches!(parse_csv("a,b\n".as_bytes(), &[]), Err(DataError::Empty)));
        assert!(matches!(
            parse_csv("a\n1\n".as_bytes(), &["z".into()]),
            Err(DataError::UnknownColumn(_))
        ));
    }
}
