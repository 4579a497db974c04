//! Undirected simple graphs over 1-based node labels, and the edge-list format.
//!
//! ```text
//! # n=5
//! 1 2
//! 2 3
//! ```
//! Header lines start with `#`; an `n=<count>` token fixes the node count so
//! that isolated nodes can exist. Without it the largest label sets the count.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 1-based edges. Duplicate edges are merged with a
    /// warning; self-loops and out-of-range labels are errors.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::invalid(format!("edge ({u}, {v}) has a label outside 1..={n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at node {u}")));
            }
            adjacency[u - 1].push(v - 1);
            adjacency[v - 1].push(u - 1);
        }
        let mut duplicates = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            duplicates += before - list.len();
        }
        if duplicates > 0 {
            log::warn!("ignored {} duplicate edge(s)", duplicates / 2);
        }
        Ok(Self { adjacency })
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Self::from_edges(n, &edges).expect("valid path")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        if n > 2 {
            edges.push((n, 1));
        }
        Self::from_edges(n, &edges).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        Self::from_edges(n, &edges).expect("valid complete graph")
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Neighbours of the 0-based node `v`, ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Edges as 1-based pairs `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u + 1, v + 1)))
            .collect()
    }

    /// The graph with 0-based node `v` renamed to `mapping[v]`.
    pub fn relabeled(&self, mapping: &[usize]) -> Result<Self> {
        crate::designs::Permutation::from_players(mapping.to_vec())?;
        if mapping.len() != self.node_count() {
            return Err(Error::invalid("relabeling must cover every node"));
        }
        let edges: Vec<_> = self.edges().iter().map(|&(u, v)| (mapping[u - 1] + 1, mapping[v - 1] + 1)).collect();
        Self::from_edges(self.node_count(), &edges)
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        let mut max_label = 0;
        for (n, line) in text.lines().enumerate() {
            let lineno = n + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                for token in comment.split_whitespace() {
                    if let Some(value) = token.strip_prefix("n=") {
                        let count = value
                            .parse::<usize>()
                            .map_err(|e| Error::parse(lineno, format!("node count `{value}`: {e}")))?;
                        declared = Some(count);
                    }
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::parse(lineno, format!("expected `u v`, found `{line}`")));
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::parse(lineno, format!("node label `{s}`: {e}")))
            };
            let (u, v) = (parse(fields[0])?, parse(fields[1])?);
            if u == 0 || v == 0 {
                return Err(Error::parse(lineno, "node labels are 1-based"));
            }
            if u == v {
                return Err(Error::parse(lineno, format!("self-loop at node {u}")));
            }
            if let Some(n) = declared {
                if u > n || v > n {
                    return Err(Error::parse(lineno, format!("edge ({u}, {v}) exceeds declared n={n}")));
                }
            }
            max_label = max_label.max(u).max(v);
            edges.push((u, v));
        }
        let n = declared.unwrap_or(max_label);
        if max_label > n {
            return Err(Error::parse(0, format!("label {max_label} exceeds declared n={n}")));
        }
        Self::from_edges(n, &edges)
    }
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    Graph::parse_edge_list(&crate::error::read_text(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_paths_and_isolated_nodes() {
        assert_eq!(Graph::parse_edge_list("1 2\n2 3").unwrap(), Graph::path(3));
        let g = Graph::parse_edge_list("# n=4\n1 2\n").unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 1);
        assert!(g.neighbors(2).is_empty());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(Graph::parse_edge_list("2 2"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Graph::parse_edge_list("1 2\n1"), Err(Error::Parse { line: 2, .. })));
        assert!(Graph::parse_edge_list("1 x").is_err());
        assert!(Graph::parse_edge_list("0 1").is_err());
        assert!(Graph::parse_edge_list("# n=2\n1 3").is_err());
    }

    #[test]
    fn duplicate_edges_are_merged() {
        let g = Graph::parse_edge_list("1 2\n2 1\n1 2\n2 3").unwrap();
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn standard_graphs() {
        assert_eq!(Graph::complete(4).edge_count(), 6);
        assert_eq!(Graph::cycle(5).edge_count(), 5);
        assert_eq!(Graph::path(6).edges(), vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]);
        let r = Graph::path(3).relabeled(&[1, 0, 2]).unwrap();
        assert_eq!(r.edges(), vec![(1, 2), (1, 3)]);
    }

    #[test]
    fn loads_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        std::fs::write(&path, "# n=3\n1 2\n").unwrap();
        assert_eq!(load_graph(&path).unwrap().node_count(), 3);
        assert!(matches!(load_graph(dir.path().join("missing")), Err(Error::Io(_))));
    }
}
