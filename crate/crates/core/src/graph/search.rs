//! Induced-subgraph and isomorphism search.
//!
//! A plain backtracking matcher over bitset adjacency. Pattern vertices are
//! visited in a fixed order (highest degree first, then the vertex with the
//! most already-placed neighbours, ties broken by degree and index), and the
//! candidate set for each pattern vertex is the intersection of the target
//! neighbourhoods of its placed neighbours minus those of its placed
//! non-neighbours.

use super::{LabeledGraph, VertexSet};

/// Result of a bounded search. Running out of budget is never a negative answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    NotFound,
    BudgetExhausted,
}

impl<T> SearchOutcome<T> {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Mode {
    bijective: bool,
    labels: bool,
}

struct Matcher<'a> {
    pattern: &'a LabeledGraph,
    target: &'a LabeledGraph,
    mode: Mode,
    order: Vec<usize>,
    pattern_sig: Vec<Vec<bool>>,
    target_sig: Vec<Vec<bool>>,
    budget: Option<u64>,
    expanded: u64,
}

impl<'a> Matcher<'a> {
    fn new(
        pattern: &'a LabeledGraph,
        target: &'a LabeledGraph,
        mode: Mode,
        budget: Option<u64>,
    ) -> Self {
        let (pattern_sig, target_sig) = if mode.labels {
            let names: Vec<&String> = pattern.labels().keys().collect();
            let sig = |g: &LabeledGraph| {
                (0..g.vertex_count())
                    .map(|v| names.iter().map(|l| g.has_label(l, v)).collect())
                    .collect()
            };
            (sig(pattern), sig(target))
        } else {
            (Vec::new(), Vec::new())
        };
        Matcher {
            pattern,
            target,
            mode,
            order: search_order(pattern),
            pattern_sig,
            target_sig,
            budget,
            expanded: 0,
        }
    }

    fn run(&mut self) -> SearchOutcome<Vec<usize>> {
        let k = self.pattern.vertex_count();
        let mut map = vec![usize::MAX; k];
        let mut used = self.target.empty_set();
        match self.extend(0, &mut map, &mut used) {
            Some(true) => SearchOutcome::Found(map),
            Some(false) => SearchOutcome::NotFound,
            None => SearchOutcome::BudgetExhausted,
        }
    }

    /// `Some(true)` found, `Some(false)` exhausted subtree, `None` out of budget.
    fn extend(&mut self, depth: usize, map: &mut [usize], used: &mut VertexSet) -> Option<bool> {
        if depth == self.order.len() {
            return Some(true);
        }
        let h = self.order[depth];
        let mut cand = self.target.full_set();
        cand.difference_with(used);
        for &p in &self.order[..depth] {
            let tp = map[p];
            if self.pattern.has_edge(h, p) {
                cand.intersect_with(self.target.neighbors(tp));
            } else {
                cand.difference_with(self.target.neighbors(tp));
            }
        }
        let dh = self.pattern.degree(h);
        for c in cand.ones() {
            let dc = self.target.degree(c);
            if dc < dh || (self.mode.bijective && dc != dh) {
                continue;
            }
            if self.mode.labels && self.pattern_sig[h] != self.target_sig[c] {
                continue;
            }
            self.expanded += 1;
            if self.budget.is_some_and(|b| self.expanded > b) {
                return None;
            }
            map[h] = c;
            used.insert(c);
            match self.extend(depth + 1, map, used) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            used.set(c, false);
            map[h] = usize::MAX;
        }
        Some(false)
    }
}

fn search_order(g: &LabeledGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by(|&a, &b| {
                (links[a], g.degree(a), std::cmp::Reverse(a))
                    .cmp(&(links[b], g.degree(b), std::cmp::Reverse(b)))
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
        for w in g.neighbors(next).ones() {
            links[w] += 1;
        }
    }
    order
}

/// Searches for an injective `V(H) -> V(G)` preserving edges and non-edges.
/// Labels are ignored. `budget` caps the number of candidate placements.
pub fn is_induced_subgraph_of(
    h: &LabeledGraph,
    g: &LabeledGraph,
    budget: Option<u64>,
) -> SearchOutcome<Vec<usize>> {
    if h.vertex_count() > g.vertex_count() || h.edge_count() > g.edge_count() {
        return SearchOutcome::NotFound;
    }
    Matcher::new(h, g, Mode::default(), budget).run()
}

/// Edge-preserving bijection between two graphs, ignoring labels.
pub fn is_isomorphic(
    g: &LabeledGraph,
    h: &LabeledGraph,
    budget: Option<u64>,
) -> SearchOutcome<Vec<usize>> {
    isomorphism(g, h, budget, false)
}

/// Isomorphism that must also carry each label onto the equally named label.
pub fn is_isomorphic_labeled(
    g: &LabeledGraph,
    h: &LabeledGraph,
    budget: Option<u64>,
) -> SearchOutcome<Vec<usize>> {
    let same_names = g.labels().keys().eq(h.labels().keys());
    let same_sizes = g
        .labels()
        .iter()
        .zip(h.labels())
        .all(|((_, a), (_, b))| a.count_ones(..) == b.count_ones(..));
    if !same_names || !same_sizes {
        return SearchOutcome::NotFound;
    }
    isomorphism(g, h, budget, true)
}

fn isomorphism(
    g: &LabeledGraph,
    h: &LabeledGraph,
    budget: Option<u64>,
    labels: bool,
) -> SearchOutcome<Vec<usize>> {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return SearchOutcome::NotFound;
    }
    let mut dg: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    let mut dh: Vec<usize> = (0..h.vertex_count()).map(|v| h.degree(v)).collect();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return SearchOutcome::NotFound;
    }
    let mode = Mode {
        bijective: true,
        labels,
    };
    Matcher::new(g, h, mode, budget).run()
}

/// Re-checks that `map` is an induced embedding of `h` into `g`.
pub fn check_induced_embedding(h: &LabeledGraph, g: &LabeledGraph, map: &[usize]) -> bool {
    if map.len() != h.vertex_count() || map.iter().any(|&t| t >= g.vertex_count()) {
        return false;
    }
    let mut seen = g.empty_set();
    for &t in map {
        if seen.put(t) {
            return false;
        }
    }
    (0..map.len()).all(|a| {
        (a + 1..map.len()).all(|b| h.has_edge(a, b) == g.has_edge(map[a], map[b]))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AntichainVerdict {
    Antichain,
    /// `graphs[0]` embeds induced into `graphs[1]`.
    Comparable(usize, usize),
    BudgetExhausted(usize, usize),
}

/// Checks that no listed graph embeds induced into another.
pub fn is_antichain(graphs: &[LabeledGraph], budget: Option<u64>) -> AntichainVerdict {
    for (i, a) in graphs.iter().enumerate() {
        for (j, b) in graphs.iter().enumerate() {
            if i == j {
                continue;
            }
            match is_induced_subgraph_of(a, b, budget) {
                SearchOutcome::Found(_) => return AntichainVerdict::Comparable(i, j),
                SearchOutcome::BudgetExhausted => return AntichainVerdict::BudgetExhausted(i, j),
                SearchOutcome::NotFound => {}
            }
        }
    }
    AntichainVerdict::Antichain
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build::{antichain_member_in, grid, upper_tri_grid};
    use proptest::prelude::*;

    #[test]
    fn small_containments() {
        let c4 = LabeledGraph::cycle(4);
        let m = is_induced_subgraph_of(&c4, &grid(2, 2), None).found().unwrap();
        assert!(check_induced_embedding(&c4, &grid(2, 2), &m));
        assert_eq!(
            is_induced_subgraph_of(&LabeledGraph::complete(3), &grid(3, 3), None),
            SearchOutcome::NotFound
        );
        assert!(is_induced_subgraph_of(&grid(2, 2), &upper_tri_grid(4), None).is_found());
    }

    #[test]
    fn isomorphism_examples() {
        let g = grid(3, 3);
        let id = is_isomorphic(&g, &g, None).found().unwrap();
        assert!(check_induced_embedding(&g, &g, &id));
        assert!(is_isomorphic(&LabeledGraph::cycle(4), &grid(2, 2), None).is_found());
        assert_eq!(
            is_isomorphic(&LabeledGraph::cycle(4), &LabeledGraph::path(4), None),
            SearchOutcome::NotFound
        );
    }

    #[test]
    fn labeled_isomorphism_respects_labels() {
        let mut a = LabeledGraph::path(3);
        a.set_label("end", [0]).unwrap();
        let mut b = LabeledGraph::path(3);
        b.set_label("end", [2]).unwrap();
        assert!(is_isomorphic_labeled(&a, &b, None).is_found());
        let mut c = LabeledGraph::path(3);
        c.set_label("end", [1]).unwrap();
        assert_eq!(is_isomorphic_labeled(&a, &c, None), SearchOutcome::NotFound);
        assert!(is_isomorphic(&a, &c, None).is_found());
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let big = grid(4, 4);
        assert_eq!(
            is_induced_subgraph_of(&grid(3, 3), &big, Some(1)),
            SearchOutcome::BudgetExhausted
        );
    }

    #[test]
    fn antichain_examples() {
        let ins: Vec<_> = (1..=3).map(|n| antichain_member_in(n).unwrap()).collect();
        assert_eq!(is_antichain(&ins, None), AntichainVerdict::Antichain);
        assert_eq!(
            is_antichain(&[grid(2, 2), grid(3, 3)], None),
            AntichainVerdict::Comparable(0, 1)
        );
        assert_eq!(is_antichain(&[grid(2, 2)], None), AntichainVerdict::Antichain);
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = LabeledGraph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut g = LabeledGraph::new(n);
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[k] {
                            g.add_edge(u, v).unwrap();
                        }
                        k += 1;
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn embeddings_recheck_and_compose(a in arb_graph(4), b in arb_graph(6), c in arb_graph(8)) {
            prop_assert!(is_induced_subgraph_of(&a, &a, None).is_found());
            let ab = is_induced_subgraph_of(&a, &b, None).found();
            let bc = is_induced_subgraph_of(&b, &c, None).found();
            if let Some(m) = &ab {
                prop_assert!(check_induced_embedding(&a, &b, m));
            }
            if let (Some(m1), Some(m2)) = (&ab, &bc) {
                let composed: Vec<usize> = m1.iter().map(|&x| m2[x]).collect();
                prop_assert!(check_induced_embedding(&a, &c, &composed));
                prop_assert!(is_induced_subgraph_of(&a, &c, None).is_found());
            }
        }

        #[test]
        fn permuted_graph_is_isomorphic(g in arb_graph(7), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let n = g.vertex_count();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let mut h = LabeledGraph::new(n);
            for (u, v) in g.edges() {
                h.add_edge(perm[u], perm[v]).unwrap();
            }
            let m = is_isomorphic(&g, &h, None).found();
            prop_assert!(m.is_some());
            prop_assert!(check_induced_embedding(&g, &h, &m.unwrap()));
        }
    }
}
