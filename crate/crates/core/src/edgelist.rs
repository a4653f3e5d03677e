//! Plain-text edge lists.
//!
//! ```text
//! n 4 directed 0
//! 1 2
//! 2 3
//! ```
//!
//! The header gives the node count and directedness; each following line is
//! a 1-indexed `i j` pair. Blank lines and lines starting with `#` are
//! ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Graph, Result};

pub fn parse(text: &str, source: &str) -> Result<Graph> {
    let err = |line: usize, msg: String| Error::Parse { path: source.to_string(), line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (n, directed) = match tokens.as_slice() {
        ["n", n, "directed", d] => {
            let n: usize = n.parse().map_err(|_| err(hline, format!("invalid node count {n:?}")))?;
            if n == 0 {
                return Err(err(hline, "node count must be positive".into()));
            }
            let d = match *d {
                "0" => false,
                "1" => true,
                other => return Err(err(hline, format!("directed flag must be 0 or 1, got {other:?}"))),
            };
            (n, d)
        }
        _ => return Err(err(hline, "expected header `n <N> directed <0|1>`".into())),
    };

    let mut g = Graph::new(n, directed);
    for (lineno, line) in lines {
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(err(lineno, format!("expected `i j`, got {line:?}")));
        };
        let parse_node = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| err(lineno, format!("invalid node index {s:?}")))?;
            if v == 0 || v > n {
                return Err(err(lineno, format!("node index {v} outside 1..={n}")));
            }
            Ok(v - 1)
        };
        let (i, j) = (parse_node(a)?, parse_node(b)?);
        if i == j {
            return Err(err(lineno, format!("self-loop at node {}", i + 1)));
        }
        if g.has_edge(i, j) {
            return Err(err(lineno, format!("duplicate edge {} {}", i + 1, j + 1)));
        }
        g.set_edge(i, j, true);
    }
    Ok(g)
}

pub fn read(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text, &path.display().to_string())
}

/// Serializes `g`; edges appear in row-major order.
pub fn to_string(g: &Graph) -> String {
    let mut out = format!("n {} directed {}\n", g.n(), u8::from(g.is_directed()));
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    out
}
