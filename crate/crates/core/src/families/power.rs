//! Power graphs `D_n`: a path on `1..n` plus a clique on each set of
//! numbers sharing the exponent of their largest power-of-2 divisor.

use super::bichain::pn_index;
use super::{Expected, FamilyError};
use crate::graph::build::induced_subgraph_ordered;
use crate::graph::LabeledGraph;
use crate::interpret::{Applied, Interpretation};
use crate::logic::{PredicateLibrary, Table};

pub const POWER_LIBRARY_SOURCE: &str = include_str!("../../mso/power.mso");

/// Smallest `n` accepted by [`apply_phi`].
pub const PHI_MIN_N: usize = 10;

/// Exponent of the largest power of 2 dividing `i` (`i >= 1`).
pub fn level(i: usize) -> u32 {
    i.trailing_zeros()
}

/// Vertex count and power level of each number of `D_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerGraphMeta {
    pub n: usize,
    /// `levels[i - 1]` is the level of `i`.
    pub levels: Vec<u32>,
}

impl PowerGraphMeta {
    pub fn new(n: usize) -> Self {
        PowerGraphMeta {
            n,
            levels: (1..=n).map(level).collect(),
        }
    }

    pub fn level_of(&self, i: usize) -> u32 {
        self.levels[i - 1]
    }

    /// Numbers of the power clique for level `k`, ascending.
    pub fn clique(&self, k: u32) -> Vec<usize> {
        (1..=self.n).filter(|&i| self.level_of(i) == k).collect()
    }

    /// Levels with a non-empty power clique.
    pub fn levels_present(&self) -> Vec<u32> {
        (0..usize::BITS).take_while(|&k| 1usize << k <= self.n).collect()
    }
}

/// `D_n` with vertex `i` at index `i - 1`, named `"i"`.
pub fn build_dn(n: usize) -> Result<LabeledGraph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::InvalidParameter("n must be at least 1".into()));
    }
    let mut g = LabeledGraph::new(n);
    for i in 1..=n {
        g.set_name(i - 1, i.to_string());
        for j in i + 1..=n {
            if j == i + 1 || level(i) == level(j) {
                g.add_edge(i - 1, j - 1)?;
            }
        }
    }
    Ok(g)
}

/// Original numbers of the vertices of an induced subgraph of some `D_n`,
/// read from the vertex names.
pub fn provenance(g: &LabeledGraph) -> Result<Vec<usize>, FamilyError> {
    (0..g.vertex_count())
        .map(|v| {
            g.raw_name(v)
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&i| i >= 1)
                .ok_or_else(|| {
                    FamilyError::InvalidParameter(format!("vertex {v} has no numeric provenance"))
                })
        })
        .collect()
}

/// Length of the longest run of consecutive numbers among the vertices.
pub fn longest_factor_length(g: &LabeledGraph) -> Result<usize, FamilyError> {
    let mut nums = provenance(g)?;
    nums.sort_unstable();
    nums.dedup();
    let mut best = 0;
    let mut run = 0;
    for (k, &x) in nums.iter().enumerate() {
        run = if k > 0 && nums[k - 1] + 1 == x { run + 1 } else { 1 };
        best = best.max(run);
    }
    Ok(best)
}

/// The factor of `D_n` induced by the interval `lo..=hi`.
pub fn factor(n: usize, lo: usize, hi: usize) -> Result<LabeledGraph, FamilyError> {
    if lo == 0 || lo > hi || hi > n {
        return Err(FamilyError::InvalidParameter(format!(
            "interval {lo}..={hi} is not inside 1..={n}"
        )));
    }
    let d = build_dn(n)?;
    let keep: Vec<usize> = (lo - 1..hi).collect();
    Ok(induced_subgraph_ordered(&d, &keep)?)
}

/// Clique-width bound `2(log2 t + 4)` for graphs whose longest factor has length `t`.
pub fn factor_cwd_bound(t: usize) -> f64 {
    2.0 * ((t.max(1) as f64).log2() + 4.0)
}

pub fn power_predicates() -> PredicateLibrary {
    PredicateLibrary::parse(POWER_LIBRARY_SOURCE).expect("shipped library parses")
}

/// `Phi`: every vertex, joined by `forward` in either direction.
pub fn phi_power() -> Interpretation {
    Interpretation::new(&[], "true", "forward(x,y) | forward(y,x)", power_predicates())
        .expect("fixed formulas parse")
}

/// Applies [`phi_power`] to `g = D_n`, refusing odd `n` and `n < 10`.
pub fn apply_phi(g: &LabeledGraph) -> Result<Applied, FamilyError> {
    let n = g.vertex_count();
    if n % 2 == 1 || n < PHI_MIN_N {
        return Err(FamilyError::InvalidParameter(format!(
            "Phi needs an even n >= {PHI_MIN_N}, got {n}"
        )));
    }
    Ok(phi_power().apply(g, &[])?)
}

/// `v_{i,j} = j 2^(k+1) + 2^(i+1)` for `0 <= i,j < k`, listed as
/// `((i, j), number)` in row-major order of `(i, j)`.
pub fn expected_embedding(k: usize, n: usize) -> Result<Vec<((usize, usize), usize)>, FamilyError> {
    if k == 0 {
        return Err(FamilyError::InvalidParameter("k must be at least 1".into()));
    }
    let need = (1usize << k) * (2 * k - 1);
    if need > n {
        return Err(FamilyError::InvalidParameter(format!(
            "2^{k}(2*{k}-1) = {need} exceeds n = {n}"
        )));
    }
    Ok((0..k)
        .flat_map(|i| (0..k).map(move |j| ((i, j), j * (1 << (k + 1)) + (1 << (i + 1)))))
        .collect())
}

/// The embedding as a map from `P_k` vertex indices to `D_n` vertex indices:
/// `v_{i,j}` plays the role of the `P_k` vertex in column `i + 1`, row `k - j`.
pub fn embedding_map(k: usize, emb: &[((usize, usize), usize)]) -> Vec<usize> {
    let mut map = vec![0; k * k];
    for &((i, j), x) in emb {
        map[pn_index(k, i + 1, k - j)] = x - 1;
    }
    map
}

/// Expected extensions of the library predicates on `D_n` for even `n >= 10`.
pub fn ground_truth(n: usize) -> Vec<Expected> {
    let num = |v: usize| v + 1;
    let lv = |v: usize| level(num(v));
    let odd = |v: usize| num(v) % 2 == 1;
    let path = |x: usize, y: usize| x.abs_diff(y) == 1;
    let same = |x: usize, y: usize| x != y && lv(x) == lv(y);
    let t1 = |f: &dyn Fn(usize) -> bool| Table::from_fn(1, n, |a| f(a[0]));
    let t2 = |f: &dyn Fn(usize, usize) -> bool| Table::from_fn(2, n, |a| f(a[0], a[1]));
    vec![
        Expected::exact("odd", t1(&odd)),
        Expected::exact("pathedge", t2(&path)),
        Expected::exact("clique", t2(&same)),
        Expected::exact(
            "between",
            Table::from_fn(3, n, |a| a[0] != a[2] && a[0].min(a[2]) <= a[1] && a[1] <= a[0].max(a[2])),
        ),
        Expected::exact("one", t1(&|x| x == 0)),
        Expected::exact("succ", t2(&|x, y| y == x + 1)),
        Expected::exact("linord", t2(&|x, y| x <= y)),
        Expected::exact("cliquemin", t1(&|x| num(x).is_power_of_two())),
        Expected::exact("sameclique", t2(&|x, y| lv(x) == lv(y))),
        Expected::exact("cliqueord", t2(&|x, y| lv(x) < lv(y))),
        Expected::exact("cliquemin_succ", t2(&|x, y| lv(y) == lv(x) + 1)),
        Expected::exact("forward", t2(&|x, y| lv(y) == lv(x) + 1 && x < y)),
    ]
}
