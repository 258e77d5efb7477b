//! Finite labeled graphs.
//!
//! Vertices are dense indices `0..n`. Adjacency is kept as one bitset per
//! vertex so neighbourhood intersections in the search and evaluation code
//! are word operations. Generators record their native coordinates (grid
//! position, integer value, ...) as vertex names.

pub mod build;
pub mod search;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

/// A subset of the vertices of some graph.
pub type VertexSet = FixedBitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    UnexpectedDegree {
        vertex: usize,
        degree: usize,
        expected: &'static str,
    },
    #[error("malformed graph file: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    adj: Vec<FixedBitSet>,
    labels: BTreeMap<String, FixedBitSet>,
    names: Vec<Option<String>>,
}

impl LabeledGraph {
    pub fn new(n: usize) -> Self {
        LabeledGraph {
            adj: (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
            labels: BTreeMap::new(),
            names: vec![None; n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = LabeledGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = LabeledGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        LabeledGraph::from_edges(n, &edges).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = LabeledGraph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0).unwrap();
        }
        g
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.vertex_count() {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.vertex_count(),
            })
        } else {
            Ok(())
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].set(v, false);
        self.adj[v].set(u, false);
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, a)| a.ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn empty_set(&self) -> VertexSet {
        FixedBitSet::with_capacity(self.vertex_count())
    }

    pub fn full_set(&self) -> VertexSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn set_of<I: IntoIterator<Item = usize>>(&self, items: I) -> Result<VertexSet, GraphError> {
        let mut s = self.empty_set();
        for v in items {
            self.check(v)?;
            s.insert(v);
        }
        Ok(s)
    }

    pub fn set_label<I: IntoIterator<Item = usize>>(
        &mut self,
        name: &str,
        members: I,
    ) -> Result<(), GraphError> {
        let set = self.set_of(members)?;
        self.labels.insert(name.to_string(), set);
        Ok(())
    }

    pub fn set_label_set(&mut self, name: &str, set: VertexSet) -> Result<(), GraphError> {
        if let Some(v) = set.ones().find(|&v| v >= self.vertex_count()) {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.vertex_count(),
            });
        }
        let mut s = set;
        s.grow(self.vertex_count());
        self.labels.insert(name.to_string(), s);
        Ok(())
    }

    pub fn label(&self, name: &str) -> Option<&VertexSet> {
        self.labels.get(name)
    }

    pub fn labels(&self) -> &BTreeMap<String, VertexSet> {
        &self.labels
    }

    pub fn clear_labels(&mut self) {
        self.labels.clear();
    }

    pub fn has_label(&self, name: &str, v: usize) -> bool {
        self.labels.get(name).is_some_and(|s| s.contains(v))
    }

    pub fn set_name(&mut self, v: usize, name: impl Into<String>) {
        self.names[v] = Some(name.into());
    }

    /// The recorded name of `v`, or its index when none was recorded.
    pub fn name(&self, v: usize) -> String {
        self.names[v].clone().unwrap_or_else(|| v.to_string())
    }

    pub fn raw_name(&self, v: usize) -> Option<&str> {
        self.names[v].as_deref()
    }

    pub fn find_vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n.as_deref() == Some(name))
    }

    pub fn complement(&self) -> LabeledGraph {
        let n = self.vertex_count();
        let mut g = self.clone();
        for u in 0..n {
            g.adj[u].toggle_range(..);
            g.adj[u].set(u, false);
        }
        g
    }

    pub fn is_regular(&self, d: usize) -> bool {
        (0..self.vertex_count()).all(|v| self.degree(v) == d)
    }

    /// Two-colouring if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let n = self.vertex_count();
        let mut side: Vec<Option<bool>> = vec![None; n];
        for s in 0..n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                let su = side[u].unwrap();
                for w in self.adj[u].ones() {
                    match side[w] {
                        None => {
                            side[w] = Some(!su);
                            stack.push(w);
                        }
                        Some(sw) if sw == su => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap()).collect())
    }

    /// Breadth-first distances from `src`; `usize::MAX` marks unreachable vertices.
    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for w in self.adj[u].ones() {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.vertex_count(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
            labels: self
                .labels
                .iter()
                .map(|(k, s)| (k.clone(), s.ones().collect()))
                .collect(),
            names: self
                .names
                .iter()
                .enumerate()
                .filter_map(|(v, n)| n.as_ref().map(|n| (v.to_string(), n.clone())))
                .collect(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self, GraphError> {
        let mut g = LabeledGraph::new(j.n);
        for &[u, v] in &j.edges {
            g.add_edge(u, v)?;
        }
        for (name, members) in &j.labels {
            g.set_label(name, members.iter().copied())?;
        }
        for (v, name) in &j.names {
            let v: usize = v
                .parse()
                .map_err(|_| GraphError::Malformed(format!("bad vertex key {v:?} in names")))?;
            g.check(v)?;
            g.set_name(v, name.clone());
        }
        Ok(g)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("graph json serialization")
    }

    pub fn from_json_str(s: &str) -> Result<Self, GraphError> {
        let j: GraphJson =
            serde_json::from_str(s).map_err(|e| GraphError::Malformed(e.to_string()))?;
        LabeledGraph::from_json(&j)
    }

    /// Graphviz rendering; vertices are coloured by the first label they carry.
    pub fn to_dot(&self) -> String {
        const PALETTE: [&str; 8] = [
            "lightblue", "salmon", "palegreen", "gold", "plum", "orange", "cyan", "pink",
        ];
        let label_names: Vec<&String> = self.labels.keys().collect();
        let mut out = String::from("graph G {\n");
        for v in 0..self.vertex_count() {
            let colour = label_names
                .iter()
                .position(|l| self.labels[*l].contains(v))
                .map(|i| PALETTE[i % PALETTE.len()]);
            let tags: Vec<&str> = label_names
                .iter()
                .filter(|l| self.labels[**l].contains(v))
                .map(|l| l.as_str())
                .collect();
            let mut text = self.name(v);
            if !tags.is_empty() {
                text.push_str(&format!("\\n{}", tags.join(",")));
            }
            let _ = write!(out, "  {v} [label=\"{text}\"");
            if let Some(c) = colour {
                let _ = write!(out, ", style=filled, fillcolor={c}");
            }
            out.push_str("];\n");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

/// On-disk graph representation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub labels: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub names: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_are_canonical() {
        let mut g = LabeledGraph::new(3);
        g.add_edge(2, 0).unwrap();
        g.add_edge(0, 2).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2)]);
        assert!(g.has_edge(2, 0));
        assert_eq!(g.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
        assert!(matches!(
            g.add_edge(0, 3),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn json_round_trip_keeps_labels_and_names() {
        let mut g = LabeledGraph::cycle(4);
        g.set_label("top", [0, 1]).unwrap();
        g.set_name(2, "(2,1)");
        let back = LabeledGraph::from_json_str(&g.to_json_string()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn json_rejects_out_of_range_labels() {
        let s = r#"{"n": 2, "edges": [[0,1]], "labels": {"a": [5]}}"#;
        assert!(LabeledGraph::from_json_str(s).is_err());
    }

    #[test]
    fn complement_of_triangle_is_empty() {
        assert_eq!(LabeledGraph::complete(3).complement().edge_count(), 0);
    }

    #[test]
    fn dot_mentions_every_edge() {
        let mut g = LabeledGraph::path(3);
        g.set_label("end", [0]).unwrap();
        let dot = g.to_dot();
        assert!(dot.contains("0 -- 1;") && dot.contains("1 -- 2;"));
        assert!(dot.contains("fillcolor"));
    }
}
