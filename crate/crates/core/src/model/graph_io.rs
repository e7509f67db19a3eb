//! Text format for transfer graphs.
//!
//! ```text
//! p <vertex_count> <edge_count>
//! <from> <to> <weight_seconds>
//! ...
//! ```
//!
//! Whitespace-separated, one edge per line, exactly `edge_count` edge lines.
//! Blank lines are ignored. Weights are non-negative seconds.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use super::TransferGraph;

/// Error reading a transfer-graph text file.
#[derive(Debug, Error)]
pub enum GraphParseError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: {message}")]
    Line { path: String, line: usize, message: String },
    #[error("{path}: header declares {declared} edges, file contains {found}")]
    EdgeCountMismatch { path: String, declared: usize, found: usize },
    #[error("{path}: missing 'p <vertices> <edges>' header")]
    MissingHeader { path: String },
}

/// Reads a transfer graph from the text format above.
pub fn parse_transfer_graph(path: &Path) -> Result<TransferGraph, GraphParseError> {
    let path_str = path.display().to_string();
    let io_err = |source| GraphParseError::Io { path: path_str.clone(), source };
    let line_err = |line: usize, message: String| GraphParseError::Line {
        path: path_str.clone(),
        line,
        message,
    };

    let file = std::fs::File::open(path).map_err(io_err)?;
    let reader = BufReader::new(file);

    let mut graph: Option<TransferGraph> = None;
    let mut declared_edges = 0usize;
    let mut found_edges = 0usize;

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(io_err)?;
        let mut fields = line.split_whitespace();
        let Some(first) = fields.next() else { continue };

        match graph {
            None => {
                if first != "p" {
                    return Err(GraphParseError::MissingHeader { path: path_str });
                }
                let vertices: usize = fields
                    .next()
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| line_err(line_no, "malformed vertex count".into()))?;
                declared_edges = fields
                    .next()
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| line_err(line_no, "malformed edge count".into()))?;
                if fields.next().is_some() {
                    return Err(line_err(line_no, "trailing fields after header".into()));
                }
                graph = Some(TransferGraph::new(vertices));
            }
            Some(ref mut g) => {
                let mut field = |what: &str| -> Result<i64, GraphParseError> {
                    fields
                        .next()
                        .ok_or_else(|| line_err(line_no, format!("missing {what}")))?
                        .parse()
                        .map_err(|_| line_err(line_no, format!("malformed {what}")))
                };
                let from = first
                    .parse::<i64>()
                    .map_err(|_| line_err(line_no, "malformed from-vertex".into()))?;
                let to = field("to-vertex")?;
                let weight = field("weight")?;
                if fields.next().is_some() {
                    return Err(line_err(line_no, "trailing fields after edge".into()));
                }
                if weight < 0 {
                    return Err(line_err(line_no, format!("negative weight {weight}")));
                }
                if weight > u32::MAX as i64 {
                    return Err(line_err(line_no, format!("weight {weight} too large")));
                }
                let vertices = g.vertex_count() as i64;
                for v in [from, to] {
                    if v < 0 || v >= vertices {
                        return Err(line_err(
                            line_no,
                            format!("vertex {v} out of range (graph has {vertices} vertices)"),
                        ));
                    }
                }
                found_edges += 1;
                if found_edges > declared_edges {
                    return Err(GraphParseError::EdgeCountMismatch {
                        path: path_str,
                        declared: declared_edges,
                        found: found_edges,
                    });
                }
                g.add_edge(from as u32, to as u32, weight as u32);
            }
        }
    }

    let graph = graph.ok_or(GraphParseError::MissingHeader { path: path_str.clone() })?;
    if found_edges != declared_edges {
        return Err(GraphParseError::EdgeCountMismatch {
            path: path_str,
            declared: declared_edges,
            found: found_edges,
        });
    }
    Ok(graph)
}

/// Writes a transfer graph in the text format read by
/// [`parse_transfer_graph`].
pub fn write_transfer_graph(graph: &TransferGraph, path: &Path) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "p {} {}", graph.vertex_count(), graph.edge_count())?;
    for u in 0..graph.vertex_count() as u32 {
        for &(v, w) in graph.edges(u) {
            writeln!(out, "{u} {v} {w}")?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(body: &str) -> Result<TransferGraph, GraphParseError> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("graph.txt");
        std::fs::write(&path, body).unwrap();
        parse_transfer_graph(&path)
    }

    #[test]
    fn parses_single_edge() {
        let g = parse_str("p 2 1\n0 1 300\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges(0), &[(1, 300)]);
        assert!(g.edges(1).is_empty());
    }

    #[test]
    fn parses_isolated_vertices() {
        let g = parse_str("p 3 0\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn rejects_negative_weight() {
        let err = parse_str("p 2 1\n0 1 -5\n").unwrap_err().to_string();
        assert!(err.contains("negative weight"), "{err}");
    }

    #[test]
    fn rejects_out_of_range_vertex() {
        let err = parse_str("p 2 1\n0 5 10\n").unwrap_err().to_string();
        assert!(err.contains("out of range"), "{err}");
    }

    #[test]
    fn rejects_edge_count_mismatch() {
        for body in ["p 2 2\n0 1 10\n", "p 2 0\n0 1 10\n"] {
            let err = parse_str(body).unwrap_err().to_string();
            assert!(err.contains("edges"), "{err}");
        }
    }

    #[test]
    fn round_trips_through_writer() {
        let mut g = TransferGraph::new(4);
        g.add_edge(0, 1, 10);
        g.add_edge(1, 2, 20);
        g.add_edge(3, 0, 5);
        g.normalize();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("graph.txt");
        write_transfer_graph(&g, &path).unwrap();
        let back = parse_transfer_graph(&path).unwrap();
        assert_eq!(back, g);
    }
}
