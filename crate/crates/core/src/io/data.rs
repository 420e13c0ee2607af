use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::types::DataMatrix;

/// Which CSV column holds integer class labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    /// Zero-based column position.
    Index(usize),
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Digits parse as an index, anything else as a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Loads a numeric CSV. Errors carry the 1-based file line; cell errors
/// also name the 1-based column.
pub fn load_csv(path: &Path, has_header: bool, label_column: Option<&LabelColumn>) -> Result<DataMatrix> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let label_idx = match label_column {
        None => None,
        Some(LabelColumn::Index(i)) => Some(*i),
        Some(LabelColumn::Name(name)) => {
            if !has_header {
                return Err(Error::Config(format!("label column '{name}' given by name but the file has no header")));
            }
            let headers = reader.headers().map_err(|e| parse_error(path, 1, e.to_string()))?;
            Some(
                headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| parse_error(path, 1, format!("no column named '{name}'")))?,
            )
        }
    };
    let mut width = None;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(parse_error(path, line, format!("expected {w} columns, found {}", record.len())));
            }
            _ => {}
        }
        if let Some(li) = label_idx {
            if li >= record.len() {
                return Err(parse_error(path, line, format!("label column {li} out of range")));
            }
        }
        for (c, cell) in record.iter().enumerate() {
            if Some(c) == label_idx {
                let label = cell
                    .parse::<i64>()
                    .or_else(|_| cell.parse::<f64>().ok().filter(|v| v.fract() == 0.0).map(|v| v as i64).ok_or(()))
                    .map_err(|_| parse_error(path, line, format!("column {}: label '{cell}' is not an integer", c + 1)))?;
                labels.push(label);
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_error(path, line, format!("column {}: '{cell}' is not a number", c + 1)))?;
            if !v.is_finite() {
                return Err(parse_error(path, line, format!("column {}: non-finite value", c + 1)));
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(parse_error(path, if has_header { 2 } else { 1 }, "no data rows"));
    }
    let cols = width.unwrap_or(0) - usize::from(label_idx.is_some());
    if cols == 0 {
        return Err(parse_error(path, 1, "no numeric columns"));
    }
    let data = DataMatrix::new(rows, cols, values)?;
    if label_idx.is_some() {
        data.with_labels(labels)
    } else {
        Ok(data)
    }
}
