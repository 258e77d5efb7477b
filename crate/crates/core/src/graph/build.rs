//! Non-logical graph constructions: grids, upper triangular grids and their
//! uniform subdivisions, the cubic graphs `T_n`, edge subdivision, and the
//! small antichain families.

use super::{GraphError, LabeledGraph, VertexSet};
use std::collections::BTreeMap;

/// 1-based grid coordinate `(row, column)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridCoord {
    pub row: usize,
    pub col: usize,
}

impl GridCoord {
    pub fn new(row: usize, col: usize) -> Self {
        GridCoord { row, col }
    }
}

impl std::fmt::Display for GridCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// The `m x n` grid, vertices in row-major order named `(i,j)`.
pub fn grid(m: usize, n: usize) -> LabeledGraph {
    let mut g = LabeledGraph::new(m * n);
    let idx = |i: usize, j: usize| (i - 1) * n + (j - 1);
    for i in 1..=m {
        for j in 1..=n {
            g.set_name(idx(i, j), GridCoord::new(i, j).to_string());
            if j < n {
                g.add_edge(idx(i, j), idx(i, j + 1)).unwrap();
            }
            if i < m {
                g.add_edge(idx(i, j), idx(i + 1, j)).unwrap();
            }
        }
    }
    g
}

/// Row-major index of `u_{i,j}` (1 <= i <= j <= t) in [`upper_tri_grid`].
pub fn utg_index(t: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i <= j && j <= t);
    // rows 1..i-1 hold t, t-1, ..., t-i+2 vertices
    let before: usize = (1..i).map(|r| t - r + 1).sum();
    before + (j - i)
}

/// The upper triangular grid `U_t` on `{u_{i,j} : 1 <= i <= j <= t}`.
pub fn upper_tri_grid(t: usize) -> LabeledGraph {
    let count = t * (t + 1) / 2;
    let mut g = LabeledGraph::new(count);
    for i in 1..=t {
        for j in i..=t {
            let v = utg_index(t, i, j);
            g.set_name(v, GridCoord::new(i, j).to_string());
            if j < t {
                g.add_edge(v, utg_index(t, i, j + 1)).unwrap();
            }
            if i < j {
                g.add_edge(v, utg_index(t, i + 1, j)).unwrap();
            }
        }
    }
    g
}

/// Which horizontal columns of `U_r` are subdivided and into how many vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionPlan {
    pub r: usize,
    /// column `j` (1-based, `< r`) mapped to the path size `k_j >= 2`
    pub columns: BTreeMap<usize, usize>,
}

impl SubdivisionPlan {
    pub fn new(r: usize, columns: impl IntoIterator<Item = (usize, usize)>) -> Self {
        SubdivisionPlan {
            r,
            columns: columns.into_iter().collect(),
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.r == 0 {
            return Err(GraphError::InvalidParameter("r must be at least 1".into()));
        }
        for (&j, &k) in &self.columns {
            if j == 0 || j >= self.r {
                return Err(GraphError::InvalidParameter(format!(
                    "subdivided column {j} outside 1..{}",
                    self.r - 1
                )));
            }
            if k < 2 {
                return Err(GraphError::InvalidParameter(format!(
                    "path size k_{j} = {k} is below 2"
                )));
            }
        }
        Ok(())
    }
}

/// Uniform subdivision of `U_r`: every horizontal edge `u_{i,j} u_{i,j+1}` with
/// `j` in the plan becomes a path on `k_j` vertices. Returns the graph and the
/// set of vertices that come from `U_r` itself.
pub fn uniform_subdivide_utg(
    plan: &SubdivisionPlan,
) -> Result<(LabeledGraph, VertexSet), GraphError> {
    plan.validate()?;
    let base = upper_tri_grid(plan.r);
    let base_n = base.vertex_count();
    let extra: usize = plan
        .columns
        .iter()
        .map(|(&j, &k)| j * (k - 2))
        .sum();
    let mut g = LabeledGraph::new(base_n + extra);
    for v in 0..base_n {
        g.set_name(v, base.name(v));
    }
    let mut next = base_n;
    for (u, v) in base.edges() {
        let (a, b) = (coord_of(&base, u), coord_of(&base, v));
        let horizontal = a.row == b.row;
        let k = if horizontal {
            plan.columns.get(&a.col.min(b.col)).copied().unwrap_or(2)
        } else {
            2
        };
        let (left, right) = if a.col <= b.col { (u, v) } else { (v, u) };
        let mut prev = left;
        for step in 1..k - 1 {
            g.set_name(
                next,
                format!("s{}.{}", coord_of(&base, left), step),
            );
            g.add_edge(prev, next)?;
            prev = next;
            next += 1;
        }
        g.add_edge(prev, right)?;
    }
    let mut originals = g.empty_set();
    originals.insert_range(..base_n);
    Ok((g, originals))
}

fn coord_of(g: &LabeledGraph, v: usize) -> GridCoord {
    parse_coord(&g.name(v)).expect("generator names are coordinates")
}

/// Parses a `(i,j)` vertex name.
pub fn parse_coord(name: &str) -> Option<GridCoord> {
    let inner = name.strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some(GridCoord::new(a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Suppresses every vertex outside `originals`: the result is the graph on
/// `originals` where `x ~ y` iff some `x..y` path has all interior vertices
/// outside `originals`. Non-original vertices must have degree 2.
pub fn contract_subdivision(
    h: &LabeledGraph,
    originals: &VertexSet,
) -> Result<LabeledGraph, GraphError> {
    let n = h.vertex_count();
    for v in 0..n {
        if !originals.contains(v) && h.degree(v) != 2 {
            return Err(GraphError::UnexpectedDegree {
                vertex: v,
                degree: h.degree(v),
                expected: "2 for a suppressed vertex",
            });
        }
    }
    let keep: Vec<usize> = originals.ones().filter(|&v| v < n).collect();
    let mut new_index = vec![usize::MAX; n];
    for (i, &v) in keep.iter().enumerate() {
        new_index[v] = i;
    }
    let mut out = LabeledGraph::new(keep.len());
    for (i, &v) in keep.iter().enumerate() {
        out.set_name(i, h.name(v));
        for (label, set) in h.labels() {
            if set.contains(v) {
                let mut s = out.label(label).cloned().unwrap_or_else(|| out.empty_set());
                s.insert(i);
                out.set_label_set(label, s)?;
            }
        }
    }
    for &x in &keep {
        for first in h.neighbors(x).ones() {
            let (mut prev, mut cur) = (x, first);
            let mut steps = 0;
            while !originals.contains(cur) && steps <= n {
                let next = h
                    .neighbors(cur)
                    .ones()
                    .find(|&w| w != prev)
                    .expect("degree-2 vertex has a second neighbour");
                prev = cur;
                cur = next;
                steps += 1;
            }
            if originals.contains(cur) && cur != x {
                out.add_edge(new_index[x], new_index[cur])?;
            }
        }
    }
    Ok(out)
}

/// Repeatedly deletes vertices outside `originals` of degree at most 1, so
/// that dangling paths hanging off a subdivision disappear. Returns the
/// remaining vertices in increasing order.
pub fn prune_pendant(h: &LabeledGraph, originals: &VertexSet) -> Vec<usize> {
    let n = h.vertex_count();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| !originals.contains(v) && degree[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for w in h.neighbors(v).ones() {
            if alive[w] {
                degree[w] -= 1;
                if !originals.contains(w) && degree[w] <= 1 {
                    stack.push(w);
                }
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

/// The cubic graph `T_n` built from the `n x n` grid: corners are suppressed
/// and every degree-4 vertex is blown up into a 4-cycle.
pub fn make_tn(n: usize) -> Result<LabeledGraph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidParameter(format!(
            "T_n needs n >= 3, got {n}"
        )));
    }
    let interior = |i: usize, j: usize| 1 < i && i < n && 1 < j && j < n;
    let corner = |i: usize, j: usize| (i == 1 || i == n) && (j == 1 || j == n);
    // directions: 0 up, 1 right, 2 down, 3 left
    const DIRS: [&str; 4] = ["N", "E", "S", "W"];
    let mut names = Vec::new();
    let mut index: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n {
            if corner(i, j) {
                continue;
            }
            if interior(i, j) {
                for (d, tag) in DIRS.iter().enumerate() {
                    index.insert((i, j, d), names.len());
                    names.push(format!("({i},{j}){tag}"));
                }
            } else {
                let v = names.len();
                for d in 0..4 {
                    index.insert((i, j, d), v);
                }
                names.push(format!("({i},{j})"));
            }
        }
    }
    let mut g = LabeledGraph::new(names.len());
    for (v, name) in names.into_iter().enumerate() {
        g.set_name(v, name);
    }
    for i in 2..n {
        for j in 2..n {
            for d in 0..4 {
                g.add_edge(index[&(i, j, d)], index[&(i, j, (d + 1) % 4)])?;
            }
        }
    }
    let port = |i: usize, j: usize, d: usize| index[&(i, j, d)];
    for i in 1..=n {
        for j in 1..=n {
            if corner(i, j) {
                continue;
            }
            if j < n && !corner(i, j + 1) {
                g.add_edge(port(i, j, 1), port(i, j + 1, 3))?;
            }
            if i < n && !corner(i + 1, j) {
                g.add_edge(port(i, j, 2), port(i + 1, j, 0))?;
            }
        }
    }
    for (ci, cj) in [(1, 1), (1, n), (n, 1), (n, n)] {
        let row_nb = if cj == 1 { (ci, 2) } else { (ci, n - 1) };
        let col_nb = if ci == 1 { (2, cj) } else { (n - 1, cj) };
        g.add_edge(port(row_nb.0, row_nb.1, 0), port(col_nb.0, col_nb.1, 0))?;
    }
    Ok(g)
}

/// The `t`-subdivision `G^t`: each edge becomes a path of length `t`.
/// Original vertices keep their indices; new vertices follow.
pub fn subdivide(g: &LabeledGraph, t: usize) -> Result<LabeledGraph, GraphError> {
    if t < 1 {
        return Err(GraphError::InvalidParameter("t must be at least 1".into()));
    }
    let n = g.vertex_count();
    let edges: Vec<_> = g.edges().collect();
    let mut out = LabeledGraph::new(n + (t - 1) * edges.len());
    for v in 0..n {
        if let Some(name) = g.raw_name(v) {
            out.set_name(v, name);
        }
    }
    for (label, set) in g.labels() {
        out.set_label(label, set.ones())?;
    }
    let mut next = n;
    for (u, v) in edges {
        let mut prev = u;
        for step in 1..t {
            out.set_name(next, format!("e[{},{}].{step}", g.name(u), g.name(v)));
            out.add_edge(prev, next)?;
            prev = next;
            next += 1;
        }
        out.add_edge(prev, v)?;
    }
    Ok(out)
}

/// Degree-3 vertices of a graph whose degrees are all 2 or 3.
pub fn branch_vertices(h: &LabeledGraph) -> Result<VertexSet, GraphError> {
    let mut out = h.empty_set();
    for v in 0..h.vertex_count() {
        match h.degree(v) {
            2 => {}
            3 => out.insert(v),
            d => {
                return Err(GraphError::UnexpectedDegree {
                    vertex: v,
                    degree: d,
                    expected: "2 or 3 (graph is not shaped like a member of the class)",
                })
            }
        }
    }
    Ok(out)
}

/// Shortest distance between two distinct branch vertices.
pub fn min_branch_distance(h: &LabeledGraph) -> Result<usize, GraphError> {
    let branch: Vec<usize> = branch_vertices(h)?.ones().collect();
    if branch.len() < 2 {
        return Err(GraphError::InvalidParameter(format!(
            "need at least two branch vertices, found {}",
            branch.len()
        )));
    }
    branch
        .iter()
        .flat_map(|&b| {
            let dist = h.distances_from(b);
            branch
                .iter()
                .filter(move |&&c| c != b)
                .map(move |&c| dist[c])
                .collect::<Vec<_>>()
        })
        .filter(|&d| d != usize::MAX)
        .min()
        .ok_or_else(|| {
            GraphError::InvalidParameter("no two branch vertices are connected".into())
        })
}

/// `I_n`: a path `c_1..c_n` with two pendant vertices at each end.
pub fn antichain_member_in(n: usize) -> Result<LabeledGraph, GraphError> {
    if n < 1 {
        return Err(GraphError::InvalidParameter("I_n needs n >= 1".into()));
    }
    let mut g = LabeledGraph::new(n + 4);
    for e in 0..4 {
        g.set_name(e, format!("e{e}"));
    }
    let c = |i: usize| 3 + i;
    for i in 1..=n {
        g.set_name(c(i), format!("c{i}"));
        if i < n {
            g.add_edge(c(i), c(i + 1))?;
        }
    }
    g.add_edge(0, c(1))?;
    g.add_edge(1, c(1))?;
    g.add_edge(2, c(n))?;
    g.add_edge(3, c(n))?;
    Ok(g)
}

/// `n x n` grid with a triangle hung on every corner: two new adjacent
/// vertices, both adjacent to the corner.
pub fn tri_corner_grid(n: usize) -> Result<LabeledGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidParameter(
            "triangle-cornered grid needs n >= 2".into(),
        ));
    }
    let base = grid(n, n);
    let mut g = LabeledGraph::new(n * n + 8);
    for v in 0..n * n {
        g.set_name(v, base.name(v));
    }
    for (u, v) in base.edges() {
        g.add_edge(u, v)?;
    }
    let corners = [0, n - 1, n * (n - 1), n * n - 1];
    for (k, &c) in corners.iter().enumerate() {
        let (a, b) = (n * n + 2 * k, n * n + 2 * k + 1);
        g.set_name(a, format!("t{k}a"));
        g.set_name(b, format!("t{k}b"));
        g.add_edge(a, b)?;
        g.add_edge(a, c)?;
        g.add_edge(b, c)?;
    }
    Ok(g)
}

/// `G[S]`, reindexed in increasing vertex order. Names carry the original
/// vertex names (or indices) and labels are restricted to `S`.
pub fn induced_subgraph(g: &LabeledGraph, s: &VertexSet) -> Result<LabeledGraph, GraphError> {
    let keep: Vec<usize> = s.ones().collect();
    induced_subgraph_ordered(g, &keep)
}

/// `G[S]` with vertex `i` of the result being `keep[i]`.
pub fn induced_subgraph_ordered(
    g: &LabeledGraph,
    keep: &[usize],
) -> Result<LabeledGraph, GraphError> {
    let n = g.vertex_count();
    if let Some(&v) = keep.iter().find(|&&v| v >= n) {
        return Err(GraphError::VertexOutOfRange { vertex: v, n });
    }
    let mut out = LabeledGraph::new(keep.len());
    for (i, &v) in keep.iter().enumerate() {
        out.set_name(i, g.name(v));
        for (j, &w) in keep.iter().enumerate().skip(i + 1) {
            if g.has_edge(v, w) {
                out.add_edge(i, j)?;
            }
        }
    }
    for (label, set) in g.labels() {
        let members = keep
            .iter()
            .enumerate()
            .filter(|(_, &v)| set.contains(v))
            .map(|(i, _)| i);
        out.set_label(label, members)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::search::is_isomorphic;

    #[test]
    fn grid_counts() {
        let g = grid(2, 2);
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        assert!(g.is_regular(2));
        let p = grid(1, 3);
        assert_eq!((p.vertex_count(), p.edge_count()), (3, 2));
        let g3 = grid(3, 3);
        assert_eq!((g3.vertex_count(), g3.edge_count()), (9, 12));
        assert_eq!(grid(1, 1).vertex_count(), 1);
    }

    #[test]
    fn upper_triangular_counts() {
        let u1 = upper_tri_grid(1);
        assert_eq!((u1.vertex_count(), u1.edge_count()), (1, 0));
        let u4 = upper_tri_grid(4);
        assert_eq!((u4.vertex_count(), u4.edge_count()), (10, 12));
        assert_eq!(u4.name(utg_index(4, 2, 3)), "(2,3)");
    }

    #[test]
    fn empty_subdivision_is_the_base_grid() {
        let (g, orig) = uniform_subdivide_utg(&SubdivisionPlan::new(4, [])).unwrap();
        assert!(is_isomorphic(&g, &upper_tri_grid(4), None).is_found());
        assert_eq!(orig.count_ones(..), g.vertex_count());
    }

    #[test]
    fn subdivision_counts() {
        let (g, orig) = uniform_subdivide_utg(&SubdivisionPlan::new(3, [(1, 3)])).unwrap();
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(orig.count_ones(..), 6);
        let (g2, _) = uniform_subdivide_utg(&SubdivisionPlan::new(3, [(1, 3), (2, 3)])).unwrap();
        // column 1 has one horizontal edge, column 2 has two
        assert_eq!(g2.vertex_count(), 6 + 3);
        assert_eq!(g2.edge_count(), upper_tri_grid(3).edge_count() + 3);
    }

    #[test]
    fn subdivision_rejects_short_paths() {
        assert!(uniform_subdivide_utg(&SubdivisionPlan::new(3, [(1, 1)])).is_err());
        assert!(uniform_subdivide_utg(&SubdivisionPlan::new(3, [(3, 2)])).is_err());
    }

    #[test]
    fn contraction_inverts_subdivision() {
        let (g, orig) = uniform_subdivide_utg(&SubdivisionPlan::new(3, [(1, 3)])).unwrap();
        let c = contract_subdivision(&g, &orig).unwrap();
        assert!(is_isomorphic(&c, &upper_tri_grid(3), None).is_found());
        let p = LabeledGraph::path(3);
        let orig = p.set_of([0, 2]).unwrap();
        let c = contract_subdivision(&p, &orig).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (2, 1));
        let all = g.full_set();
        assert_eq!(contract_subdivision(&g, &all).unwrap().edge_count(), g.edge_count());
    }

    #[test]
    fn contraction_rejects_branching_interior() {
        let star = LabeledGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let orig = star.set_of([1, 2, 3]).unwrap();
        assert!(matches!(
            contract_subdivision(&star, &orig),
            Err(GraphError::UnexpectedDegree { vertex: 0, .. })
        ));
    }

    #[test]
    fn tn_is_cubic_and_small() {
        let t3 = make_tn(3).unwrap();
        // 9 grid vertices, minus 4 corners, centre split into 4
        assert_eq!(t3.vertex_count(), 8);
        for n in 3..=8 {
            let t = make_tn(n).unwrap();
            assert!(t.is_regular(3), "T_{n} not cubic");
            assert!(t.vertex_count() < 4 * n * n);
        }
        assert!(make_tn(2).is_err());
    }

    #[test]
    fn subdivide_counts_and_shapes() {
        let tri = LabeledGraph::cycle(3);
        assert_eq!(subdivide(&tri, 1).unwrap(), tri);
        let k2 = LabeledGraph::path(2);
        assert!(is_isomorphic(&subdivide(&k2, 3).unwrap(), &LabeledGraph::path(4), None).is_found());
        assert!(is_isomorphic(&subdivide(&tri, 2).unwrap(), &LabeledGraph::cycle(6), None).is_found());
        let g = grid(3, 3);
        let s = subdivide(&g, 4).unwrap();
        assert_eq!(s.vertex_count(), 9 + 3 * 12);
        assert!(subdivide(&g, 0).is_err());
    }

    #[test]
    fn branch_vertices_and_min_distance() {
        let c6 = LabeledGraph::cycle(6);
        assert_eq!(branch_vertices(&c6).unwrap().count_ones(..), 0);
        let t3 = make_tn(3).unwrap();
        assert_eq!(branch_vertices(&t3).unwrap().count_ones(..), 8);
        assert_eq!(min_branch_distance(&t3).unwrap(), 1);
        let s = subdivide(&t3, 3).unwrap();
        let b: Vec<usize> = branch_vertices(&s).unwrap().ones().collect();
        assert_eq!(b, (0..8).collect::<Vec<_>>());
        assert_eq!(min_branch_distance(&s).unwrap(), 3);
        assert!(branch_vertices(&LabeledGraph::path(3)).is_err());
    }

    #[test]
    fn hubs_joined_by_long_path() {
        // hubs 0 and 1 joined by a path of length 5, each closed up by a
        // pendant cycle so every vertex has degree 2 or 3
        let mut edges = vec![];
        let mut next = 2;
        let mut prev = 0;
        for _ in 0..4 {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, 1));
        for hub in [0, 1] {
            let (a, b) = (next, next + 1);
            next += 2;
            edges.extend([(hub, a), (a, b), (b, hub)]);
        }
        let g = LabeledGraph::from_edges(next, &edges).unwrap();
        assert_eq!(min_branch_distance(&g).unwrap(), 5);
        assert!(min_branch_distance(&LabeledGraph::cycle(5)).is_err());
    }

    #[test]
    fn in_family() {
        let i1 = antichain_member_in(1).unwrap();
        assert_eq!(i1.vertex_count(), 5);
        assert_eq!(i1.degree(4), 4);
        for n in 1..7 {
            assert_eq!(antichain_member_in(n).unwrap().vertex_count(), n + 4);
        }
    }

    #[test]
    fn tri_corner_counts() {
        for n in 2..6 {
            let g = tri_corner_grid(n).unwrap();
            assert_eq!(g.vertex_count(), n * n + 8);
            assert_eq!(g.edge_count(), 2 * n * (n - 1) + 12);
        }
        assert!(tri_corner_grid(1).is_err());
    }

    #[test]
    fn induced_subgraph_basics() {
        let g = grid(3, 3);
        let row = g.set_of([0, 1, 2]).unwrap();
        let r = induced_subgraph(&g, &row).unwrap();
        assert!(is_isomorphic(&r, &LabeledGraph::path(3), None).is_found());
        assert_eq!(r.name(2), "(1,3)");
        let none = induced_subgraph(&g, &g.empty_set()).unwrap();
        assert_eq!(none.vertex_count(), 0);
        let all = induced_subgraph(&g, &g.full_set()).unwrap();
        assert!(is_isomorphic(&all, &g, None).is_found());
        assert!(induced_subgraph_ordered(&g, &[9]).is_err());
    }

    #[test]
    fn prune_removes_dangling_paths_only() {
        // a 4-cycle 0-1-2-3 with a path 3-4-5 hanging off and originals {0, 2}
        let g = LabeledGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5)]).unwrap();
        let mut o = g.empty_set();
        o.extend([0, 2]);
        assert_eq!(prune_pendant(&g, &o), [0, 1, 2, 3]);
        o.insert(5);
        assert_eq!(prune_pendant(&g, &o), [0, 1, 2, 3, 4, 5]);
    }
}
