//! Plain-text edge lists.
//!
//! ```text
//! nipgraph v1 <n> <self_loops:0|1>
//! <u> <v>
//! ...
//! ```
//!
//! One undirected edge per line with `u < v`, lines sorted lexicographically.

use std::io::{BufRead, Write};

use crate::error::{NipError, Result};
use crate::graph::Graph;

const HEADER_TAG: &str = "nipgraph";
const HEADER_VERSION: &str = "v1";

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{HEADER_TAG} {HEADER_VERSION} {} {}", g.n(), u8::from(g.has_self_loops()))?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn to_edge_list_string(g: &Graph) -> String {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("edge list is ASCII")
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or(NipError::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let header = header?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = |msg: &str| NipError::Parse {
        line: 1,
        msg: msg.to_string(),
    };
    match fields.as_slice() {
        [tag, version, _, _] if *tag == HEADER_TAG && *version == HEADER_VERSION => {}
        [tag, version, ..] if *tag == HEADER_TAG => {
            return Err(bad_header(&format!("unsupported version {version}")))
        }
        _ => return Err(bad_header("expected `nipgraph v1 <n> <0|1>`")),
    }
    let n: usize = fields[2].parse().map_err(|_| bad_header("bad node count"))?;
    let self_loops = match fields[3] {
        "0" => false,
        "1" => true,
        _ => return Err(bad_header("self-loop flag must be 0 or 1")),
    };

    let mut edges = Vec::new();
    let mut prev: Option<(usize, usize)> = None;
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let err = |msg: &str| NipError::Parse {
            line: lineno,
            msg: msg.to_string(),
        };
        let mut parts = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected `<u> <v>`"));
        };
        let u: usize = a.parse().map_err(|_| err("bad node id"))?;
        let v: usize = b.parse().map_err(|_| err("bad node id"))?;
        if u >= v {
            return Err(err("edges must satisfy u < v"));
        }
        if v >= n {
            return Err(err("node id out of range"));
        }
        if prev.is_some_and(|p| p >= (u, v)) {
            return Err(err("edges must be sorted and unique"));
        }
        prev = Some((u, v));
        edges.push((u, v));
    }
    Graph::from_edges(n, edges, self_loops)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    read_edge_list(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build, Family, GraphSpec};

    #[test]
    fn writes_sorted_pairs() {
        let g = build(&GraphSpec::new(Family::Star, 4)).unwrap();
        assert_eq!(to_edge_list_string(&g), "nipgraph v1 4 0\n0 1\n0 2\n0 3\n");
    }

    #[test]
    fn round_trip_keeps_edges_and_loop_flag() {
        let spec = GraphSpec::new(Family::Hypercube, 16).with_self_loops(true);
        let g = build(&spec).unwrap();
        let back = parse_edge_list(&to_edge_list_string(&g)).unwrap();
        assert_eq!(back, g);
        assert!(back.spec().is_none());
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "graph v1 3 0\n",
            "nipgraph v2 3 0\n",
            "nipgraph v1 3 2\n",
            "nipgraph v1 3 0\n1 0\n",
            "nipgraph v1 3 0\n0 3\n",
            "nipgraph v1 3 0\n0 2\n0 1\n",
            "nipgraph v1 3 0\n0 1\n0 1\n",
            "nipgraph v1 3 0\n0 1 2\n",
        ] {
            assert!(parse_edge_list(bad).is_err(), "accepted {bad:?}");
        }
    }
}
