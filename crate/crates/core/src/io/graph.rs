//! Edge-list format:
//!
//! ```text
//! #graphdr v1 N=3 semantics=similarity
//! 0 1 0.5
//! 1 2 1
//! ```
//!
//! Fields are tab-separated. Weights are written with the shortest decimal that round-trips.

use std::fmt::Write as _;
use std::path::Path;

use super::{read_text, write_atomic};
use crate::error::{Error, Result};
use crate::types::{RelationGraph, Semantics};

const MAGIC: &str = "#graphdr v1";

pub fn format_graph(g: &RelationGraph) -> String {
    let mut out = format!("{MAGIC} N={} semantics={}\n", g.n_vertices(), g.semantics());
    for e in g.edges() {
        writeln!(out, "{}\t{}\t{}", e.i, e.j, e.w).unwrap();
    }
    out
}

pub fn parse_graph(text: &str, path: &Path) -> Result<RelationGraph> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| err(1, format!("header must start with '{MAGIC}'")))?;
    let mut n = None;
    let mut semantics = None;
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("N=") {
            n = Some(v.parse::<usize>().map_err(|_| err(1, format!("bad vertex count '{v}'")))?);
        } else if let Some(v) = field.strip_prefix("semantics=") {
            semantics = Some(v.parse::<Semantics>().map_err(|e| err(1, e.to_string()))?);
        } else {
            return Err(err(1, format!("unexpected header field '{field}'")));
        }
    }
    let n = n.ok_or_else(|| err(1, "header lacks N=".into()))?;
    let semantics = semantics.ok_or_else(|| err(1, "header lacks semantics=".into()))?;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 {
            return Err(err(lineno, format!("expected 3 tab-separated fields, found {}", parts.len())));
        }
        let i: usize = parts[0].parse().map_err(|_| err(lineno, format!("bad vertex id '{}'", parts[0])))?;
        let j: usize = parts[1].parse().map_err(|_| err(lineno, format!("bad vertex id '{}'", parts[1])))?;
        let w: f64 = parts[2].parse().map_err(|_| err(lineno, format!("bad weight '{}'", parts[2])))?;
        if i >= j {
            return Err(err(lineno, format!("edge ({i}, {j}) must satisfy i < j")));
        }
        if j >= n {
            return Err(err(lineno, format!("vertex {j} out of range for N={n}")));
        }
        edges.push((i, j, w));
    }
    let mut keys: Vec<(usize, usize, usize)> = edges.iter().enumerate().map(|(l, e)| (e.0, e.1, l)).collect();
    keys.sort_unstable();
    if let Some(w) = keys.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
        return Err(err(w[1].2 + 2, format!("duplicate edge ({}, {})", w[1].0, w[1].1)));
    }
    RelationGraph::new(n, semantics, edges)
}

pub fn write_graph(g: &RelationGraph, path: &Path) -> Result<()> {
    write_atomic(path, format_graph(g).as_bytes())
}

pub fn read_graph(path: &Path) -> Result<RelationGraph> {
    parse_graph(&read_text(path)?, path)
}
