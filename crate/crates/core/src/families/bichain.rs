//! Bichain graphs `Z_n` and their first-order grid interpretation, split
//! permutation graphs obtained by filling in one side of a bipartite graph,
//! and the bipartite permutation graphs `P_n`.

use super::{Expected, FamilyError};
use crate::graph::{LabeledGraph, VertexSet};
use crate::interpret::Interpretation;
use crate::logic::{PredicateLibrary, Table};

pub const BICHAIN_LIBRARY_SOURCE: &str = include_str!("../../mso/bichain.mso");

/// Label names carried by labelled `Z_n`, in parameter order.
pub const ZN_LABELS: [&str; 5] = ["Top", "Bottom", "Even", "First", "Last"];

/// Index of `z_{i,j}` (1-based) in `Z_n`: row-major.
pub fn zn_index(n: usize, i: usize, j: usize) -> usize {
    (i - 1) * n + (j - 1)
}

/// `(i, j)` of each vertex of `Z_n`.
pub fn zn_coords(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).collect()
}

fn zn_edge((i, j): (usize, usize), (k, l): (usize, usize)) -> bool {
    let ((i, j), (k, l)) = if j <= l { ((i, j), (k, l)) } else { ((k, l), (i, j)) };
    (j % 2 == 1 && l == j + 1 && i < k)
        || (j % 2 == 0 && l == j + 1 && k <= i)
        || (j % 2 == 0 && l % 2 == 1 && l >= j + 3)
}

/// The universal bichain graph `Z_n` on `z_{i,j}`, `1 <= i,j <= n`, named
/// `z{i},{j}`. With `labels`, adds `Top` (i = 1), `Bottom` (i = n),
/// `Even` (j even), `First` (j = 1) and `Last` (j = n).
pub fn build_zn(n: usize, labels: bool) -> Result<LabeledGraph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::InvalidParameter("n must be at least 1".into()));
    }
    let coords = zn_coords(n);
    let mut g = LabeledGraph::new(n * n);
    for (a, &p) in coords.iter().enumerate() {
        g.set_name(a, format!("z{},{}", p.0, p.1));
        for (b, &q) in coords.iter().enumerate().skip(a + 1) {
            if zn_edge(p, q) {
                g.add_edge(a, b)?;
            }
        }
    }
    if labels {
        let pick = |f: &dyn Fn(usize, usize) -> bool| -> Vec<usize> {
            (0..coords.len()).filter(|&v| f(coords[v].0, coords[v].1)).collect()
        };
        g.set_label("Top", pick(&|i, _| i == 1))?;
        g.set_label("Bottom", pick(&|i, _| i == n))?;
        g.set_label("Even", pick(&|_, j| j % 2 == 0))?;
        g.set_label("First", pick(&|_, j| j == 1))?;
        g.set_label("Last", pick(&|_, j| j == n))?;
    }
    Ok(g)
}

pub fn bichain_predicates() -> PredicateLibrary {
    PredicateLibrary::parse(BICHAIN_LIBRARY_SOURCE).expect("shipped library parses")
}

/// `Psi`: domain vertices, joined by `hedge` and `vedge` in either direction.
pub fn psi_bichain() -> Interpretation {
    Interpretation::new(
        &ZN_LABELS,
        "domain(x)",
        "hedge(x,y) | hedge(y,x) | vedge(x,y) | vedge(y,x)",
        bichain_predicates(),
    )
    .expect("fixed formulas parse")
}

/// Expected extensions of the library predicates on labelled `Z_n`.
pub fn ground_truth(n: usize) -> Vec<Expected> {
    let c = zn_coords(n);
    let m = c.len();
    let bottom = |v: usize| c[v].0 == n;
    let domain = |v: usize| {
        let (i, j) = c[v];
        i > 1 && i < n && j > 1 && j < n
    };
    let both = |x: usize, y: usize| domain(x) && domain(y);
    let t2 = |f: &dyn Fn(usize, usize) -> bool| Table::from_fn(2, m, |a| f(a[0], a[1]));
    vec![
        Expected::exact("samecolumn", t2(&|x, y| c[x].1 == c[y].1 && !bottom(x) && !bottom(y))),
        Expected::exact(
            "adjcolumn",
            t2(&|x, y| c[x].1.abs_diff(c[y].1) == 1 && !bottom(x) && !bottom(y)),
        ),
        Expected::exact("domain", Table::from_fn(1, m, |a| domain(a[0]))),
        Expected::exact("rightnext", t2(&|x, y| c[y].1 == c[x].1 + 1 && !bottom(x) && !bottom(y))),
        Expected::exact("rightcolumn", t2(&|x, y| both(x, y) && c[y].1 == c[x].1 + 1)),
        Expected::exact("linorder", t2(&|x, y| both(x, y) && c[x].1 == c[y].1 && c[x].0 <= c[y].0)),
        Expected::exact("hedge", t2(&|x, y| both(x, y) && c[y].1 == c[x].1 + 1 && c[x].0 == c[y].0)),
        Expected::exact("vedge", t2(&|x, y| both(x, y) && c[x].1 == c[y].1 && c[y].0 == c[x].0 + 1)),
    ]
}

/// Adds every edge inside `a` and labels it `P`: the split graph whose
/// clique side is `a` and whose bipartite part is `b`.
pub fn split_from_bichain(b: &LabeledGraph, a: &VertexSet) -> Result<LabeledGraph, FamilyError> {
    let n = b.vertex_count();
    if let Some(v) = a.ones().find(|&v| v >= n) {
        return Err(FamilyError::InvalidParameter(format!("vertex {v} out of range")));
    }
    if let Some((u, v)) = b.edges().find(|&(u, v)| a.contains(u) == a.contains(v)) {
        return Err(FamilyError::InvalidParameter(format!(
            "edge {}-{} lies inside one side of the declared bipartition",
            b.name(u),
            b.name(v)
        )));
    }
    let mut g = b.clone();
    let members: Vec<usize> = a.ones().collect();
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            g.add_edge(u, v)?;
        }
    }
    g.set_label("P", members)?;
    Ok(g)
}

/// Deletes the edges inside the label `P`.
pub fn psi_split() -> Interpretation {
    Interpretation::new(&[], "true", "E(x,y) & !(P(x) & P(y))", PredicateLibrary::default())
        .expect("fixed formulas parse")
}

/// Index of `v_{i,j}` (1-based) in `P_n`: row-major.
pub fn pn_index(n: usize, i: usize, j: usize) -> usize {
    (i - 1) * n + (j - 1)
}

/// The bipartite permutation graph `P_n`: `v_{i,j}` joined to `v_{i+1,j'}`
/// whenever `j' <= j`. Vertices are named `v{i},{j}`.
pub fn build_pn(n: usize) -> Result<LabeledGraph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::InvalidParameter("n must be at least 1".into()));
    }
    let mut g = LabeledGraph::new(n * n);
    for i in 1..=n {
        for j in 1..=n {
            g.set_name(pn_index(n, i, j), format!("v{i},{j}"));
            if i < n {
                for k in 1..=j {
                    g.add_edge(pn_index(n, i, j), pn_index(n, i + 1, k))?;
                }
            }
        }
    }
    Ok(g)
}

/// Embedding of `P_n` into `palpha_segment(2^n, n, n)`: `v_{i,j}` goes to
/// row `n - j` of column `i - 1`.
pub fn pn_word_embedding(n: usize) -> Vec<usize> {
    let mut map = vec![0; n * n];
    for i in 1..=n {
        for j in 1..=n {
            map[pn_index(n, i, j)] = (i - 1) * n + (n - j);
        }
    }
    map
}
