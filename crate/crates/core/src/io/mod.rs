//! Reading and writing datasets, graphs, layouts and plots.
//!
//! Every writer goes through [`write_atomic`]: output is written to a
//! temporary file in the target directory and renamed into place, so a
//! failure never leaves a partial file behind.

mod data;
mod graph;
mod layout;
mod svg;

pub use data::{load_csv, LabelColumn};
pub use graph::{format_graph, parse_graph, read_graph, write_graph};
pub use layout::{format_layout, parse_layout, read_layout, write_layout};
pub use svg::{render_svg, write_svg, Coloring};

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Writes through a temporary file in the target directory, creating the
/// directory if needed.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
