//! Layout CSV: header `x,y` or `x,y,z`, one row per point.

use std::fmt::Write as _;
use std::path::Path;

use super::{read_text, write_atomic};
use crate::error::{Error, Result};
use crate::types::Layout;

const AXES: [&str; 3] = ["x", "y", "z"];

pub fn format_layout(layout: &Layout) -> String {
    let dim = layout.dim();
    let mut out = AXES[..dim].join(",");
    out.push('\n');
    for i in 0..layout.n_points() {
        let p = layout.point(i);
        for (a, v) in p.iter().enumerate() {
            if a > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses a layout; `expected_dim` rejects files of another dimension.
pub fn parse_layout(text: &str, path: &Path, expected_dim: Option<usize>) -> Result<Layout> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "empty layout file".into()))?;
    let dim = match header.trim() {
        "x,y" => 2,
        "x,y,z" => 3,
        other => return Err(err(1, format!("expected header 'x,y' or 'x,y,z', found '{other}'"))),
    };
    if let Some(want) = expected_dim {
        if want != dim {
            return Err(err(1, format!("layout is {dim}D, expected {want}D")));
        }
    }
    let mut coords = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != dim {
            return Err(err(lineno, format!("expected {dim} values, found {}", cells.len())));
        }
        for (c, cell) in cells.iter().enumerate() {
            coords.push(
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| err(lineno, format!("column {}: '{cell}' is not a number", c + 1)))?,
            );
        }
    }
    Layout::new(coords.len() / dim, dim, coords)
}

pub fn write_layout(layout: &Layout, path: &Path) -> Result<()> {
    write_atomic(path, format_layout(layout).as_bytes())
}

pub fn read_layout(path: &Path, expected_dim: Option<usize>) -> Result<Layout> {
    parse_layout(&read_text(path)?, path, expected_dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let l = Layout::from_points(&[[0.0, 1.5], [-2.0, 1e-17]]).unwrap();
        assert_eq!(format_layout(&l), "x,y\n0,1.5\n-2,0.00000000000000001\n");
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let l = Layout::from_points(&[[0.1 + 0.2, -1.0 / 3.0, 6.02e23], [f64::MIN_POSITIVE, 1.0, -0.0]]).unwrap();
        let text = format_layout(&l);
        assert!(text.starts_with("x,y,z\n"));
        let back = parse_layout(&text, Path::new("l"), Some(3)).unwrap();
        for (a, b) in back.coords().iter().zip(l.coords()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(parse_layout(&text, Path::new("l"), Some(2)).is_err());
    }
}
