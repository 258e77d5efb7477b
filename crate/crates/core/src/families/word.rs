//! Word-defined graphs: finite pieces of the infinite graph `P_alpha`, the
//! labelled graphs `H_n`, their predicate library and the interpretations
//! `Delta` (to a uniform subdivision of `U_2n`) and `Gamma` (contraction).
//!
//! Vertex `v_{i,j}` sits in row `i` of column `j`. Consecutive columns `j`,
//! `j+1` are joined according to the letter `alpha_j`:
//! `0` gives `i = k`, `1` gives `i != k`, `2` gives `i <= k`.

use super::{closure, Expected, FamilyError};
use crate::graph::build::{contract_subdivision, induced_subgraph_ordered, prune_pendant};
use crate::graph::{LabeledGraph, VertexSet};
use crate::interpret::{Applied, Interpretation};
use crate::logic::{PredicateLibrary, Table};
use std::fmt;
use std::str::FromStr;

pub const WORD_LIBRARY_SOURCE: &str = include_str!("../../mso/word.mso");
pub const GAMMA_SOURCE: &str = include_str!("../../mso/gamma.interp");

/// Label names carried by `H_n`, in parameter order.
pub const HN_LABELS: [&str; 8] = [
    "Colour1",
    "Colour2",
    "Top",
    "Bottom",
    "Penult",
    "Prepenult",
    "First",
    "Last",
];

/// A finite prefix of an infinite word over `{0,1,2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaPrefix {
    letters: Vec<u8>,
}

impl AlphaPrefix {
    pub fn new(letters: Vec<u8>) -> Result<Self, FamilyError> {
        if letters.is_empty() {
            return Err(FamilyError::InvalidParameter("empty word".into()));
        }
        if let Some(b) = letters.iter().find(|&&b| b > 2) {
            return Err(FamilyError::InvalidParameter(format!("letter {b} is not in {{0,1,2}}")));
        }
        Ok(AlphaPrefix { letters })
    }

    /// `pattern` repeated until the prefix has `len` letters.
    pub fn repeat(pattern: &str, len: usize) -> Result<Self, FamilyError> {
        let p: AlphaPrefix = pattern.parse()?;
        Self::new(p.letters.iter().copied().cycle().take(len).collect())
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl FromStr for AlphaPrefix {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0'..='2' => Ok(c as u8 - b'0'),
                _ => Err(FamilyError::InvalidParameter(format!("letter `{c}` is not in {{0,1,2}}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(letters)
    }
}

impl fmt::Display for AlphaPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.letters {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

fn joined(letter: u8, i: usize, k: usize) -> bool {
    match letter {
        0 => i == k,
        1 => i != k,
        _ => i <= k,
    }
}

/// The subgraph of `P_alpha` induced on rows `0..rows` of columns `0..cols`.
/// Vertex `v_{i,j}` is named `v{i},{j}` and numbered `j*rows + i`.
pub fn palpha_segment(alpha: &AlphaPrefix, rows: usize, cols: usize) -> Result<LabeledGraph, FamilyError> {
    if cols > alpha.len() + 1 {
        return Err(FamilyError::PrefixTooShort(format!(
            "{cols} columns need {} letters, have {}",
            cols - 1,
            alpha.len()
        )));
    }
    let mut g = LabeledGraph::new(rows * cols);
    for j in 0..cols {
        for i in 0..rows {
            g.set_name(j * rows + i, format!("v{i},{j}"));
            if j + 1 < cols {
                for k in 0..rows {
                    if joined(alpha.letters[j], i, k) {
                        g.add_edge(j * rows + i, (j + 1) * rows + k)?;
                    }
                }
            }
        }
    }
    Ok(g)
}

/// Column layout of `G_n`: window `beta = alpha[p..p+l]` and the column sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnPlan {
    pub n: usize,
    pub p: usize,
    pub l: usize,
    pub beta: Vec<u8>,
    pub sizes: Vec<usize>,
}

impl ColumnPlan {
    /// Number of letters of the prefix the plan reads.
    pub fn consumed(&self) -> usize {
        self.p + self.l
    }

    pub fn vertex_count(&self) -> usize {
        self.sizes.iter().sum()
    }
}

pub fn plan_gn(alpha: &AlphaPrefix, n: usize) -> Result<ColumnPlan, FamilyError> {
    if n == 0 {
        return Err(FamilyError::InvalidParameter("n must be at least 1".into()));
    }
    let p = alpha
        .letters
        .iter()
        .position(|&b| b != 0)
        .ok_or_else(|| FamilyError::PrefixTooShort("the word has no non-zero letter".into()))?;
    let want = 2 * n + 2;
    let mut seen = 0;
    let mut l = None;
    for (i, &b) in alpha.letters[p..].iter().enumerate() {
        if b != 0 {
            seen += 1;
            if seen == want {
                l = Some(i + 1);
                break;
            }
        }
    }
    let l = l.ok_or_else(|| {
        FamilyError::PrefixTooShort(format!(
            "need {want} non-zero letters from position {p}, found {seen} ({} missing)",
            want - seen
        ))
    })?;
    let beta = alpha.letters[p..p + l].to_vec();
    let mut sizes = vec![3];
    for i in 0..l - 1 {
        let grow = usize::from(beta[i] != 0);
        sizes.push(sizes[i] + grow);
    }
    Ok(ColumnPlan { n, p, l, beta, sizes })
}

/// `H_n` with the provenance of its vertices.
#[derive(Clone, Debug)]
pub struct WordGraph {
    pub graph: LabeledGraph,
    pub plan: ColumnPlan,
    /// `(row, column)` of each vertex, the column counted from the window start.
    pub coords: Vec<(usize, usize)>,
}

impl WordGraph {
    pub fn vertex(&self, row: usize, col: usize) -> Option<usize> {
        self.coords.iter().position(|&c| c == (row, col))
    }
}

/// `G_n` expanded with the eight labels of [`HN_LABELS`]. Vertex names are
/// `v{i},{j}` with `j` the column of `P_alpha`.
pub fn build_hn(alpha: &AlphaPrefix, n: usize) -> Result<WordGraph, FamilyError> {
    let plan = plan_gn(alpha, n)?;
    let mut coords = Vec::new();
    for (c, &s) in plan.sizes.iter().enumerate() {
        coords.extend((0..s).map(|r| (r, c)));
    }
    let mut g = LabeledGraph::new(coords.len());
    for (v, &(r, c)) in coords.iter().enumerate() {
        g.set_name(v, format!("v{r},{}", plan.p + c));
    }
    for (a, &(r, c)) in coords.iter().enumerate() {
        for (b, &(k, d)) in coords.iter().enumerate() {
            if d == c + 1 && joined(plan.beta[c], r, k) {
                g.add_edge(a, b)?;
            }
        }
    }
    let last = plan.l - 1;
    let pick = |f: &dyn Fn(usize, usize) -> bool| -> Vec<usize> {
        (0..coords.len()).filter(|&v| f(coords[v].0, coords[v].1)).collect()
    };
    let s = &plan.sizes;
    let b = &plan.beta;
    let labels: [(&str, Vec<usize>); 8] = [
        ("Colour1", pick(&|_, c| b[c] == 1)),
        ("Colour2", pick(&|_, c| b[c] == 2)),
        ("Top", pick(&|r, _| r == 0)),
        ("Bottom", pick(&|r, c| r + 1 == s[c])),
        ("Penult", pick(&|r, c| r + 2 == s[c])),
        ("Prepenult", pick(&|r, c| r + 3 == s[c])),
        ("First", pick(&|_, c| c == 0)),
        ("Last", pick(&|_, c| c == last)),
    ];
    for (name, vs) in labels {
        g.set_label(name, vs)?;
    }
    Ok(WordGraph { graph: g, plan, coords })
}

/// The library of the word family, as shipped in `mso/word.mso`.
pub fn word_predicates() -> PredicateLibrary {
    PredicateLibrary::parse(WORD_LIBRARY_SOURCE).expect("shipped library parses")
}

/// `Delta`: domain vertices, joined by horizontal and vertical grid edges.
pub fn delta_interp() -> Interpretation {
    let params: Vec<&str> = HN_LABELS.to_vec();
    Interpretation::new(
        &params,
        "domain(x)",
        "hedge(x,y) | hedge(y,x) | vedge(x,y) | vedge(y,x)",
        word_predicates(),
    )
    .expect("fixed formulas parse")
}

/// `Gamma` with parameter `O`: keeps `O` and joins two of its vertices when
/// a path between them has no interior vertex in `O`.
pub fn gamma_contract_interp() -> Interpretation {
    Interpretation::parse(GAMMA_SOURCE, &PredicateLibrary::default()).expect("shipped interpretation parses")
}

/// The vertices of `Delta(H_n)` that are vertices of `U_2n` rather than
/// subdivision vertices: the domain vertices outside colour-0 columns.
pub fn delta_originals(w: &WordGraph, delta_source: &[usize]) -> VertexSet {
    let mut o = VertexSet::with_capacity(delta_source.len());
    for (i, &v) in delta_source.iter().enumerate() {
        let (_, c) = w.coords[v];
        if w.plan.beta[c] != 0 {
            o.insert(i);
        }
    }
    o
}

/// The stages of `Psi = Gamma . Delta` on one `H_n`.
#[derive(Clone, Debug)]
pub struct PsiOutcome {
    pub delta: Applied,
    /// Vertices of `Delta(H_n)` standing for vertices of `U_2n`.
    pub originals: VertexSet,
    /// Non-original vertices on dangling paths, removed before contraction.
    pub pruned: usize,
    /// Combinatorial contraction of the pruned `Delta(H_n)`.
    pub contracted: LabeledGraph,
    /// `Gamma(Delta(H_n))` with parameter `originals`.
    pub gamma: LabeledGraph,
}

pub fn run_psi(w: &WordGraph) -> Result<PsiOutcome, FamilyError> {
    let d = delta_interp();
    let params = d.bind_from_labels(&w.graph)?;
    let delta = d.apply(&w.graph, &params)?;
    let originals = delta_originals(w, &delta.source);
    let keep = prune_pendant(&delta.graph, &originals);
    let pruned_graph = induced_subgraph_ordered(&delta.graph, &keep)?;
    let mut kept_originals = pruned_graph.empty_set();
    kept_originals.extend((0..keep.len()).filter(|&i| originals.contains(keep[i])));
    let contracted = contract_subdivision(&pruned_graph, &kept_originals)?;
    let gamma = gamma_contract_interp()
        .apply(&delta.graph, std::slice::from_ref(&originals))?
        .graph;
    Ok(PsiOutcome {
        pruned: delta.graph.vertex_count() - keep.len(),
        delta,
        originals,
        contracted,
        gamma,
    })
}

/// Expected extensions of the library predicates on `H_n`, computed from
/// the row/column provenance of each vertex.
///
/// `adjcolumn` is compared only for second arguments in the domain: on
/// boundary vertices the formula is narrower than the description, and it
/// is only ever applied to domain vertices.
pub fn ground_truth(w: &WordGraph) -> Vec<Expected> {
    let n = w.graph.vertex_count();
    let plan = &w.plan;
    let (beta, sizes, l) = (&plan.beta, &plan.sizes, plan.l);
    let rc = |v: usize| w.coords[v];
    let col0 = |v: usize| beta[rc(v).1] == 0;
    let boundary = |v: usize| {
        let (r, c) = rc(v);
        r + 2 >= sizes[c] || c == l - 1
    };
    let domain = |v: usize| {
        let (r, c) = rc(v);
        r >= 1 && c >= 1 && !boundary(v)
    };
    let samecolumn = |x: usize, y: usize| rc(x).1 == rc(y).1 && !col0(x) && !boundary(x) && !boundary(y);
    let adjcolumn = |x: usize, y: usize| !col0(x) && !boundary(x) && rc(x).1.abs_diff(rc(y).1) == 1;
    let rhs = |x: usize, y: usize, i: u8, s: &[u8]| {
        domain(x) && domain(y) && rc(y).1 == rc(x).1 + 1 && beta[rc(x).1] == i && s.contains(&beta[rc(y).1])
    };
    let hedge = |x: usize, y: usize| {
        let ((r, c), (k, d)) = (rc(x), rc(y));
        domain(x) && domain(y) && r == k && (d == c + 1 || (c == d + 1 && beta[c] == beta[d] && beta[c] != 2))
    };
    let prepenult = |v: usize| rc(v).0 + 3 == sizes[rc(v).1];
    let prepenultedge = |u: usize, v: usize| {
        let ((r, c), (k, d)) = (rc(u), rc(v));
        prepenult(u) && prepenult(v) && domain(u) && domain(v) && c.abs_diff(d) == 1 && r != k
    };
    let vedge = |x: usize, y: usize| {
        let ((r, c), (k, d)) = (rc(x), rc(y));
        c == d && beta[c] != 0 && r.abs_diff(k) == 1 && domain(x) && domain(y)
    };
    let hedge_table = Table::from_fn(2, n, |a| hedge(a[0], a[1]));
    vec![
        Expected::exact("colour0", Table::from_fn(1, n, |a| col0(a[0]))),
        Expected::exact("rlboundary", Table::from_fn(1, n, |a| boundary(a[0]))),
        Expected::exact("samecolumn", Table::from_fn(2, n, |a| samecolumn(a[0], a[1]))),
        Expected::within(
            "adjcolumn",
            Table::from_fn(2, n, |a| adjcolumn(a[0], a[1])),
            Table::from_fn(2, n, |a| domain(a[1])),
        ),
        Expected::exact("domain", Table::from_fn(1, n, |a| domain(a[0]))),
        Expected::exact("rhscolumn2", Table::from_fn(2, n, |a| rhs(a[0], a[1], 2, &[0, 1, 2]))),
        Expected::exact("rhscolumn1", Table::from_fn(2, n, |a| rhs(a[0], a[1], 1, &[0, 2]))),
        Expected::exact("rhscolumn0", Table::from_fn(2, n, |a| rhs(a[0], a[1], 0, &[1, 2]))),
        Expected::exact("tchedge", closure(&hedge_table)),
        Expected::exact("hedge", hedge_table),
        Expected::exact("prepenultedge", Table::from_fn(2, n, |a| prepenultedge(a[0], a[1]))),
        Expected::exact("vedge", Table::from_fn(2, n, |a| vedge(a[0], a[1]))),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build::{uniform_subdivide_utg, upper_tri_grid, SubdivisionPlan};
    use crate::graph::search::{check_induced_embedding, is_isomorphic};

    fn alpha(s: &str) -> AlphaPrefix {
        s.parse().unwrap()
    }

    fn iso(a: &LabeledGraph, b: &LabeledGraph) -> bool {
        is_isomorphic(a, b, None).is_found()
    }

    #[test]
    fn segment_rules() {
        let edges = |a: &str| {
            let g = palpha_segment(&alpha(a), 2, 2).unwrap();
            let mut e: Vec<(String, String)> = g.edges().map(|(u, v)| (g.name(u), g.name(v))).collect();
            e.sort();
            e
        };
        assert_eq!(edges("0").len(), 2);
        assert_eq!(
            edges("1"),
            [("v0,0".into(), "v1,1".into()), ("v1,0".into(), "v0,1".into())]
        );
        assert_eq!(edges("2").len(), 3);
        assert!(palpha_segment(&alpha("1"), 2, 3).is_err());
    }

    #[test]
    fn alpha_parsing() {
        assert!("".parse::<AlphaPrefix>().is_err());
        assert!("013".parse::<AlphaPrefix>().is_err());
        assert_eq!(AlphaPrefix::repeat("102", 7).unwrap().to_string(), "1021021");
    }

    #[test]
    fn plan_examples() {
        let p = plan_gn(&alpha("121212"), 1).unwrap();
        assert_eq!((p.p, p.l), (0, 4));
        assert_eq!(p.beta, [1, 2, 1, 2]);
        assert_eq!(p.sizes, [3, 4, 5, 6]);
        assert_eq!(p.vertex_count(), 18);
        assert_eq!(p.consumed(), 4);
        assert_eq!(plan_gn(&alpha("00121212"), 1).unwrap().p, 2);
        assert!(plan_gn(&alpha("000"), 1).is_err());
        let err = plan_gn(&alpha("12"), 1).unwrap_err().to_string();
        assert!(err.contains("2 missing"), "{err}");
    }

    #[test]
    fn hn_labels() {
        let w = build_hn(&alpha("121212"), 1).unwrap();
        let count = |l: &str| w.graph.label(l).unwrap().count_ones(..);
        assert_eq!(count("Colour1"), 8);
        assert_eq!(count("Top"), w.plan.l);
        assert_eq!(count("First"), 3);
        assert_eq!(count("Last"), 6);
        let mut both = w.graph.label("Bottom").unwrap().clone();
        both.intersect_with(w.graph.label("Penult").unwrap());
        assert_eq!(both.count_ones(..), 0);
        assert_eq!(w.graph.name(w.vertex(2, 1).unwrap()), "v2,1");
    }

    #[test]
    fn hn_embeds_in_segment() {
        let a = alpha("121212");
        let w = build_hn(&a, 1).unwrap();
        let seg = palpha_segment(&a, 6, 4).unwrap();
        let map: Vec<usize> = (0..w.graph.vertex_count())
            .map(|v| seg.find_vertex(&w.graph.name(v)).unwrap())
            .collect();
        assert!(check_induced_embedding(&w.graph, &seg, &map));
    }

    #[test]
    fn library_matches_provenance() {
        for a in ["121212", "0012121212"] {
            let w = build_hn(&alpha(a), 1).unwrap();
            let diffs = super::super::compare_library(&w.graph, &word_predicates(), &ground_truth(&w)).unwrap();
            for d in diffs {
                assert!(d.is_empty(), "{}", d.describe(&w.graph, 5));
            }
        }
    }

    #[test]
    fn delta_gives_triangular_grid() {
        let w = build_hn(&AlphaPrefix::repeat("12", 12).unwrap(), 2).unwrap();
        let out = run_psi(&w).unwrap();
        assert_eq!(out.pruned, 0);
        assert!(iso(&out.delta.graph, &upper_tri_grid(4)));
        assert!(iso(&out.gamma, &upper_tri_grid(4)));
        let d = delta_interp();
        let w1 = build_hn(&alpha("121212"), 1).unwrap();
        let a = d.apply(&w1.graph, &d.bind_from_labels(&w1.graph).unwrap()).unwrap();
        assert!(iso(&a.graph, &upper_tri_grid(2)));
        for &v in &a.source {
            let (r, c) = w1.coords[v];
            assert!(r >= 1 && c >= 1 && r + 3 <= w1.plan.sizes[c] && c + 1 < w1.plan.l);
        }
    }

    #[test]
    fn zeros_subdivide_and_dangle() {
        let w = build_hn(&AlphaPrefix::repeat("102", 20).unwrap(), 1).unwrap();
        let out = run_psi(&w).unwrap();
        assert!(out.pruned > 0);
        assert!(iso(&out.contracted, &upper_tri_grid(2)));
        assert!(iso(&out.gamma, &out.contracted));
    }

    #[test]
    fn gamma_on_subdivisions() {
        let u3 = upper_tri_grid(3);
        let all = u3.full_set();
        let out = gamma_contract_interp().apply(&u3, &[all]).unwrap();
        assert!(iso(&out.graph, &u3));
        let (g, o) = uniform_subdivide_utg(&SubdivisionPlan::new(3, [(1, 3)])).unwrap();
        let out = gamma_contract_interp().apply(&g, &[o.clone()]).unwrap();
        assert!(iso(&out.graph, &u3));
        assert!(iso(&out.graph, &contract_subdivision(&g, &o).unwrap()));
    }
}
