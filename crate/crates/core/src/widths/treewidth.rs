//! Tree decompositions: verification, the subdivision extension, and exact
//! treewidth by dynamic programming over elimination prefixes.

use super::{WidthError, TWD_CAP};
use crate::graph::LabeledGraph;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;

/// Bags indexed by tree node, and the tree edges between nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TdViolation {
    NotATree,
    NodeOutOfRange(usize),
    VertexOutOfRange(usize),
    VertexUncovered(usize),
    EdgeUncovered(usize, usize),
    Disconnected(usize),
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdViolation::NotATree => write!(f, "the decomposition is not a tree"),
            TdViolation::NodeOutOfRange(a) => write!(f, "tree edge mentions missing node {a}"),
            TdViolation::VertexOutOfRange(v) => write!(f, "bag mentions missing vertex {v}"),
            TdViolation::VertexUncovered(v) => write!(f, "vertex {v} is in no bag"),
            TdViolation::EdgeUncovered(u, v) => write!(f, "edge {u}-{v} is in no bag"),
            TdViolation::Disconnected(v) => write!(f, "bags containing vertex {v} are not connected"),
        }
    }
}

impl TreeDecomposition {
    /// A single bag holding every vertex.
    pub fn trivial(g: &LabeledGraph) -> Self {
        TreeDecomposition {
            bags: vec![(0..g.vertex_count()).collect()],
            edges: vec![],
        }
    }

    /// Largest bag size minus one (0 for no bags).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![vec![]; self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }
}

/// Checks that the bags form a tree, cover every vertex and edge, and that
/// the bags containing each vertex are connected.
pub fn verify_tree_decomposition(g: &LabeledGraph, td: &TreeDecomposition) -> Result<(), TdViolation> {
    let m = td.bags.len();
    let n = g.vertex_count();
    if let Some(&(a, b)) = td.edges.iter().find(|&&(a, b)| a >= m || b >= m) {
        return Err(TdViolation::NodeOutOfRange(a.max(b)));
    }
    if m == 0 {
        return if n == 0 { Ok(()) } else { Err(TdViolation::VertexUncovered(0)) };
    }
    let adj = td.adjacency();
    if td.edges.len() != m - 1 || reach(&adj, 0, |_| true).iter().filter(|&&r| r).count() != m {
        return Err(TdViolation::NotATree);
    }
    let mut holders = vec![vec![]; n];
    for (a, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(TdViolation::VertexOutOfRange(v));
            }
            holders[v].push(a);
        }
    }
    if let Some(v) = (0..n).find(|&v| holders[v].is_empty()) {
        return Err(TdViolation::VertexUncovered(v));
    }
    for (u, v) in g.edges() {
        if !td.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return Err(TdViolation::EdgeUncovered(u, v));
        }
    }
    for (v, hs) in holders.iter().enumerate() {
        let seen = reach(&adj, hs[0], |a| td.bags[a].contains(&v));
        if hs.iter().any(|&a| !seen[a]) {
            return Err(TdViolation::Disconnected(v));
        }
    }
    Ok(())
}

fn reach(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            if !seen[b] && allowed(b) {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    seen
}

/// Decomposition of `subdivide(g, t)` from one of `g`: for every edge `uv`
/// of `g`, replaced by the path `u = p_0, ..., p_t = v`, a path of bags
/// `{u, v, p_i, p_(i+1)}` is attached to a node whose bag holds `u` and `v`.
/// Path vertices are numbered as [`crate::graph::build::subdivide`] numbers them.
pub fn extend_decomposition_for_subdivision(
    g: &LabeledGraph,
    td: &TreeDecomposition,
    t: usize,
) -> Result<TreeDecomposition, WidthError> {
    verify_tree_decomposition(g, td).map_err(WidthError::InvalidDecomposition)?;
    if t == 0 {
        return Err(WidthError::Malformed("t must be at least 1".into()));
    }
    let mut out = td.clone();
    if t == 1 {
        return Ok(out);
    }
    let mut next = g.vertex_count();
    for (u, v) in g.edges() {
        let host = td
            .bags
            .iter()
            .position(|b| b.contains(&u) && b.contains(&v))
            .expect("verified decomposition covers every edge");
        let path: Vec<usize> = std::iter::once(u)
            .chain(next..next + t - 1)
            .chain(std::iter::once(v))
            .collect();
        next += t - 1;
        let mut prev = host;
        for i in 0..t {
            let mut bag = vec![u, v, path[i], path[i + 1]];
            bag.sort_unstable();
            bag.dedup();
            out.bags.push(bag);
            let node = out.bags.len() - 1;
            out.edges.push((prev, node));
            prev = node;
        }
    }
    Ok(out)
}

/// Exact treewidth with a witnessing decomposition, for at most `cap`
/// vertices (default [`TWD_CAP`]).
pub fn treewidth_exact(g: &LabeledGraph, cap: Option<usize>) -> Result<(usize, TreeDecomposition), WidthError> {
    let n = g.vertex_count();
    let cap = cap.unwrap_or(TWD_CAP);
    if n > cap || n > 24 {
        return Err(WidthError::Cap { n, cap: cap.min(24) });
    }
    if n == 0 {
        return Ok((0, TreeDecomposition { bags: vec![], edges: vec![] }));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).ones().fold(0u32, |m, w| m | 1 << w))
        .collect();
    // q(s, v): vertices outside s and v reachable from v through s
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut stack = vec![v];
        let mut out = 0u32;
        while let Some(x) = stack.pop() {
            let fresh = adj[x] & !seen;
            seen |= fresh;
            out |= fresh & !s;
            let mut inner = fresh & s;
            while inner != 0 {
                stack.push(inner.trailing_zeros() as usize);
                inner &= inner - 1;
            }
        }
        out
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![usize::MAX; 1 << n];
    let mut last = vec![0u8; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let cost = tw[prev as usize].max(q(prev, v).count_ones() as usize);
            if cost < tw[s as usize] {
                tw[s as usize] = cost;
                last[s as usize] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    let td = from_elimination(&adj, &order);
    Ok((tw[full as usize], td))
}

/// Decomposition from an elimination ordering: node `i` holds `order[i]` and
/// its later neighbours in the filled graph.
fn from_elimination(adj: &[u32], order: &[usize]) -> TreeDecomposition {
    let n = order.len();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut filled = adj.to_vec();
    let mut bags = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = (0..n).filter(|&w| filled[v] >> w & 1 == 1 && pos[w] > i).collect();
        for &a in &later {
            for &b in &later {
                if a != b {
                    filled[a] |= 1 << b;
                }
            }
        }
        parent[i] = later.iter().map(|&w| pos[w]).min();
        let mut bag = later;
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut root: Option<usize> = None;
    for i in 0..n {
        match parent[i] {
            Some(p) => edges.push((i, p)),
            None => {
                if let Some(r) = root {
                    edges.push((r, i));
                }
                root = Some(i);
            }
        }
    }
    TreeDecomposition { bags, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build::{grid, subdivide};

    fn tree7() -> LabeledGraph {
        LabeledGraph::from_edges(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap()
    }

    #[test]
    fn verifier_examples() {
        let k4 = LabeledGraph::complete(4);
        let one = TreeDecomposition::trivial(&k4);
        assert_eq!(verify_tree_decomposition(&k4, &one), Ok(()));
        assert_eq!(one.width(), 3);
        let p = LabeledGraph::path(5);
        let td = TreeDecomposition {
            bags: (0..4).map(|i| vec![i, i + 1]).collect(),
            edges: (0..3).map(|i| (i, i + 1)).collect(),
        };
        assert_eq!(verify_tree_decomposition(&p, &td), Ok(()));
        assert_eq!(td.width(), 1);
        let mut bad = td.clone();
        bad.bags[2] = vec![2];
        assert_eq!(verify_tree_decomposition(&p, &bad), Err(TdViolation::EdgeUncovered(2, 3)));
        let mut split = td.clone();
        split.bags[3] = vec![1, 3, 4];
        assert!(matches!(verify_tree_decomposition(&p, &split), Err(TdViolation::Disconnected(_))));
        let mut cyc = td;
        cyc.edges.push((0, 3));
        assert_eq!(verify_tree_decomposition(&p, &cyc), Err(TdViolation::NotATree));
    }

    #[test]
    fn exact_values() {
        for (g, w) in [
            (tree7(), 1),
            (LabeledGraph::complete(4), 3),
            (grid(3, 3), 3),
            (LabeledGraph::cycle(6), 2),
            (LabeledGraph::new(3), 0),
            (grid(2, 4), 2),
        ] {
            let (tw, td) = treewidth_exact(&g, None).unwrap();
            assert_eq!(tw, w);
            assert_eq!(td.width(), w);
            assert_eq!(verify_tree_decomposition(&g, &td), Ok(()));
        }
        assert!(treewidth_exact(&LabeledGraph::new(13), None).is_err());
    }

    #[test]
    fn subdivision_extension() {
        let k4 = LabeledGraph::complete(4);
        let ext = extend_decomposition_for_subdivision(&k4, &TreeDecomposition::trivial(&k4), 2).unwrap();
        assert_eq!(verify_tree_decomposition(&subdivide(&k4, 2).unwrap(), &ext), Ok(()));
        assert_eq!(ext.width(), 3);
        let t = tree7();
        let (_, td) = treewidth_exact(&t, None).unwrap();
        let ext = extend_decomposition_for_subdivision(&t, &td, 3).unwrap();
        assert_eq!(verify_tree_decomposition(&subdivide(&t, 3).unwrap(), &ext), Ok(()));
        assert!(ext.width() <= 3);
        assert_eq!(extend_decomposition_for_subdivision(&t, &td, 1).unwrap(), td);
        let bad = TreeDecomposition { bags: vec![vec![0]], edges: vec![] };
        assert!(extend_decomposition_for_subdivision(&t, &bad, 2).is_err());
    }
}
