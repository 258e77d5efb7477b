//! k-expressions and exact clique-width.
//!
//! The search enumerates realizable labelled states `(S, blocks)`: a
//! k-expression producing exactly `G[S]` whose label classes are `blocks`.
//! Vertices sharing a label must have the same neighbours outside `S`, so
//! only such partitions are kept. Across a union every edge that some pair
//! of label classes can add without creating a non-edge is added at once;
//! an edge added later would join supersets of the same two classes, so
//! nothing is lost. Classes with no neighbours outside `S` are merged.

use super::{WidthError, CWD_CAP, CWD_EXTENDED_CAP};
use crate::graph::search::is_isomorphic;
use crate::graph::LabeledGraph;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A clique-width expression. Labels are `1..=k`; `vertex` is the index of
/// the created vertex in the target graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum KExpression {
    Create { vertex: usize, label: usize },
    Union { left: Box<KExpression>, right: Box<KExpression> },
    Join { a: usize, b: usize, inner: Box<KExpression> },
    Relabel { from: usize, to: usize, inner: Box<KExpression> },
}

/// The labelled graph an expression evaluates to.
#[derive(Clone, Debug, Default)]
pub struct Evaluated {
    /// Created vertex ids, in creation order.
    pub vertices: Vec<usize>,
    /// Current label of each entry of `vertices`.
    pub labels: Vec<usize>,
    /// Edges between positions in `vertices`.
    pub edges: Vec<(usize, usize)>,
}

impl KExpression {
    pub fn create(vertex: usize, label: usize) -> Self {
        KExpression::Create { vertex, label }
    }

    pub fn union(left: KExpression, right: KExpression) -> Self {
        KExpression::Union {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn join(self, a: usize, b: usize) -> Self {
        KExpression::Join {
            a,
            b,
            inner: Box::new(self),
        }
    }

    pub fn relabel(self, from: usize, to: usize) -> Self {
        KExpression::Relabel {
            from,
            to,
            inner: Box::new(self),
        }
    }

    /// Largest label mentioned.
    pub fn max_label(&self) -> usize {
        match self {
            KExpression::Create { label, .. } => *label,
            KExpression::Union { left, right } => left.max_label().max(right.max_label()),
            KExpression::Join { a, b, inner } | KExpression::Relabel { from: a, to: b, inner } => {
                (*a).max(*b).max(inner.max_label())
            }
        }
    }

    /// Evaluates the expression, rejecting label 0, self-joins and repeated vertices.
    pub fn evaluate(&self) -> Result<Evaluated, WidthError> {
        let bad = |m: String| Err(WidthError::Malformed(m));
        match self {
            KExpression::Create { vertex, label } => {
                if *label == 0 {
                    return bad("label 0".into());
                }
                Ok(Evaluated {
                    vertices: vec![*vertex],
                    labels: vec![*label],
                    edges: vec![],
                })
            }
            KExpression::Union { left, right } => {
                let mut l = left.evaluate()?;
                let r = right.evaluate()?;
                if let Some(v) = r.vertices.iter().find(|v| l.vertices.contains(v)) {
                    return bad(format!("vertex {v} created twice"));
                }
                let off = l.vertices.len();
                l.vertices.extend(r.vertices);
                l.labels.extend(r.labels);
                l.edges.extend(r.edges.into_iter().map(|(a, b)| (a + off, b + off)));
                Ok(l)
            }
            KExpression::Join { a, b, inner } => {
                if a == b || *a == 0 || *b == 0 {
                    return bad(format!("join of labels {a} and {b}"));
                }
                let mut e = inner.evaluate()?;
                let m = e.vertices.len();
                for x in 0..m {
                    for y in x + 1..m {
                        let (lx, ly) = (e.labels[x], e.labels[y]);
                        if (lx == *a && ly == *b) || (lx == *b && ly == *a) {
                            e.edges.push((x, y));
                        }
                    }
                }
                Ok(e)
            }
            KExpression::Relabel { from, to, inner } => {
                if *from == 0 || *to == 0 {
                    return bad("label 0".into());
                }
                let mut e = inner.evaluate()?;
                for l in &mut e.labels {
                    if l == from {
                        *l = *to;
                    }
                }
                Ok(e)
            }
        }
    }

    /// The unlabelled graph built, vertex `i` being the `i`-th smallest id.
    pub fn to_graph(&self) -> Result<LabeledGraph, WidthError> {
        let e = self.evaluate()?;
        let mut ids = e.vertices.clone();
        ids.sort_unstable();
        let pos = |v: usize| ids.binary_search(&v).expect("created vertex");
        let mut g = LabeledGraph::new(ids.len());
        for (i, &v) in ids.iter().enumerate() {
            g.set_name(i, v.to_string());
        }
        for (a, b) in e.edges {
            let (x, y) = (pos(e.vertices[a]), pos(e.vertices[b]));
            if !g.has_edge(x, y) {
                g.add_edge(x, y).map_err(|err| WidthError::Malformed(err.to_string()))?;
            }
        }
        Ok(g)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("expression serializes")
    }
}

/// Whether `e` uses labels in `1..=k` and builds `g`. When the created ids
/// are exactly `0..n` the edge sets are compared directly; otherwise up to
/// isomorphism.
pub fn verify_k_expression(g: &LabeledGraph, e: &KExpression, k: usize) -> Result<bool, WidthError> {
    if e.max_label() > k {
        return Err(WidthError::Malformed(format!("label {} exceeds k = {k}", e.max_label())));
    }
    let built = e.to_graph()?;
    let n = g.vertex_count();
    if built.vertex_count() != n {
        return Ok(false);
    }
    let ids = e.evaluate()?.vertices;
    if ids.iter().all(|&v| v < n) {
        return Ok(built.edge_count() == g.edge_count() && g.edges().all(|(u, v)| built.has_edge(u, v)));
    }
    Ok(is_isomorphic(&built, g, None).is_found())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CwdConfig {
    pub cap: usize,
    /// Maximum number of stored states per value of k.
    pub budget: usize,
}

impl Default for CwdConfig {
    fn default() -> Self {
        CwdConfig {
            cap: CWD_CAP,
            budget: 2_000_000,
        }
    }
}

impl CwdConfig {
    pub fn extended() -> Self {
        CwdConfig {
            cap: CWD_EXTENDED_CAP,
            budget: 20_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CwdResult {
    pub k: usize,
    pub expr: KExpression,
}

/// Least k with a k-expression for `g`, and one such expression. Every
/// smaller k is refuted by exhaustive search.
pub fn cliquewidth_exact(g: &LabeledGraph, config: &CwdConfig) -> Result<CwdResult, WidthError> {
    let n = g.vertex_count();
    if n > config.cap || n > 31 {
        return Err(WidthError::Cap { n, cap: config.cap.min(31) });
    }
    if n == 0 {
        return Err(WidthError::Malformed("empty graph".into()));
    }
    for k in 1..=n.max(1) {
        if let Some(expr) = k_expression(g, k, config)? {
            return Ok(CwdResult { k, expr });
        }
    }
    unreachable!("n labels always suffice")
}

/// A k-expression for `g` if one exists.
pub fn k_expression(g: &LabeledGraph, k: usize, config: &CwdConfig) -> Result<Option<KExpression>, WidthError> {
    let n = g.vertex_count();
    if n > config.cap || n > 31 {
        return Err(WidthError::Cap { n, cap: config.cap.min(31) });
    }
    if k == 0 {
        return Ok(None);
    }
    Search::new(g, k, config.budget).run()
}

#[derive(Clone, Debug)]
enum How {
    Base(usize),
    /// `a_pre[i]`/`b_pre[i]`: class of the union holding block `i` of a / b;
    /// `joins` pairs of those classes; `pre_final[c]`: block of the result.
    Union {
        a: usize,
        b: usize,
        a_pre: Vec<usize>,
        b_pre: Vec<usize>,
        joins: Vec<(usize, usize)>,
        pre_final: Vec<usize>,
    },
    Merge {
        from: usize,
        pre_final: Vec<usize>,
    },
}

struct Rec {
    s: u32,
    blocks: Vec<u32>,
    how: How,
}

struct Search {
    n: usize,
    k: usize,
    budget: usize,
    adj: Vec<u32>,
    recs: Vec<Rec>,
    index: HashMap<(u32, Vec<u32>), usize>,
    by_subset: HashMap<u32, Vec<usize>>,
}

fn bits(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

/// Sorts blocks by lowest member and returns the permutation applied:
/// `perm[old] = new`.
fn canonical(blocks: Vec<u32>) -> (Vec<u32>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..blocks.len()).collect();
    idx.sort_by_key(|&i| blocks[i].trailing_zeros());
    let mut perm = vec![0; blocks.len()];
    for (new, &old) in idx.iter().enumerate() {
        perm[old] = new;
    }
    (idx.iter().map(|&i| blocks[i]).collect(), perm)
}

impl Search {
    fn new(g: &LabeledGraph, k: usize, budget: usize) -> Self {
        let n = g.vertex_count();
        let adj = (0..n)
            .map(|v| g.neighbors(v).ones().fold(0u32, |m, w| m | 1 << w))
            .collect();
        Search {
            n,
            k,
            budget,
            adj,
            recs: vec![],
            index: HashMap::new(),
            by_subset: HashMap::new(),
        }
    }

    fn full(&self) -> u32 {
        if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        }
    }

    /// Neighbours outside `s` of the members of `block` (equal for all members).
    fn key(&self, block: u32, s: u32) -> u32 {
        self.adj[block.trailing_zeros() as usize] & !s
    }

    fn insert(&mut self, s: u32, blocks: Vec<u32>, how: How) -> Result<Option<usize>, WidthError> {
        let key = (s, blocks);
        if self.index.contains_key(&key) {
            return Ok(None);
        }
        if self.recs.len() >= self.budget {
            return Err(WidthError::Budget(self.budget));
        }
        let id = self.recs.len();
        self.recs.push(Rec {
            s,
            blocks: key.1.clone(),
            how,
        });
        self.index.insert(key, id);
        self.by_subset.entry(s).or_default().push(id);
        Ok(Some(id))
    }

    /// Inserts the state and every coarsening that merges blocks with equal
    /// outside neighbourhoods. Returns a state covering all of V if reached.
    fn insert_closed(&mut self, s: u32, blocks: Vec<u32>, how: How) -> Result<Option<usize>, WidthError> {
        let Some(first) = self.insert(s, blocks, how)? else {
            return Ok(None);
        };
        if s == self.full() {
            return Ok(Some(first));
        }
        let mut stack = vec![first];
        while let Some(id) = stack.pop() {
            let blocks = self.recs[id].blocks.clone();
            let keys: Vec<u32> = blocks.iter().map(|&b| self.key(b, s)).collect();
            for i in 0..blocks.len() {
                for j in i + 1..blocks.len() {
                    if keys[i] != keys[j] {
                        continue;
                    }
                    let mut merged: Vec<u32> = blocks.clone();
                    merged[i] |= merged[j];
                    merged.remove(j);
                    let pre_final: Vec<usize> = (0..blocks.len())
                        .map(|p| match p.cmp(&j) {
                            std::cmp::Ordering::Less => p,
                            std::cmp::Ordering::Equal => i,
                            std::cmp::Ordering::Greater => p - 1,
                        })
                        .collect();
                    let (merged, perm) = canonical(merged);
                    let pre_final = pre_final.iter().map(|&p| perm[p]).collect();
                    if let Some(new) = self.insert(s, merged, How::Merge { from: id, pre_final })? {
                        stack.push(new);
                    }
                }
            }
        }
        Ok(None)
    }

    fn run(mut self) -> Result<Option<KExpression>, WidthError> {
        for v in 0..self.n {
            if let Some(done) = self.insert_closed(1 << v, vec![1 << v], How::Base(v))? {
                return Ok(Some(self.witness(done)));
            }
        }
        let mut sizes: Vec<Vec<u32>> = vec![vec![]; self.n + 1];
        for v in 0..self.n {
            sizes[1].push(1 << v);
        }
        for s in 2..=self.n {
            for s1 in 1..=s / 2 {
                let left = sizes[s1].clone();
                let right = sizes[s - s1].clone();
                for &x in &left {
                    for &y in &right {
                        if x & y != 0 || (s1 == s - s1 && x.trailing_zeros() > y.trailing_zeros()) {
                            continue;
                        }
                        if let Some(done) = self.unions(x, y)? {
                            return Ok(Some(self.witness(done)));
                        }
                    }
                }
            }
            let mut found: Vec<u32> = self
                .by_subset
                .keys()
                .copied()
                .filter(|m| m.count_ones() as usize == s)
                .collect();
            found.sort_unstable();
            sizes[s] = found;
        }
        Ok(None)
    }

    fn unions(&mut self, x: u32, y: u32) -> Result<Option<usize>, WidthError> {
        let s = x | y;
        let xa = self.by_subset[&x].clone();
        let yb = self.by_subset[&y].clone();
        for &a in &xa {
            for &b in &yb {
                let ab = self.recs[a].blocks.clone();
                let bb = self.recs[b].blocks.clone();
                if ab.len() + bb.len() > self.k + bb.len().min(ab.len()) {
                    continue;
                }
                let ka: Vec<u32> = ab.iter().map(|&m| self.key(m, s)).collect();
                let kb: Vec<u32> = bb.iter().map(|&m| self.key(m, s)).collect();
                let mut matching = vec![None; ab.len()];
                let mut used = vec![false; bb.len()];
                if let Some(done) = self.matchings(a, b, s, &ab, &bb, &ka, &kb, 0, &mut matching, &mut used)? {
                    return Ok(Some(done));
                }
            }
        }
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    fn matchings(
        &mut self,
        a: usize,
        b: usize,
        s: u32,
        ab: &[u32],
        bb: &[u32],
        ka: &[u32],
        kb: &[u32],
        i: usize,
        matching: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> Result<Option<usize>, WidthError> {
        if i == ab.len() {
            let pairs = matching.iter().filter(|m| m.is_some()).count();
            if ab.len() + bb.len() - pairs > self.k {
                return Ok(None);
            }
            return self.combine(a, b, s, ab, bb, ka, matching);
        }
        matching[i] = None;
        if let Some(done) = self.matchings(a, b, s, ab, bb, ka, kb, i + 1, matching, used)? {
            return Ok(Some(done));
        }
        for j in 0..bb.len() {
            if !used[j] && ka[i] == kb[j] {
                used[j] = true;
                matching[i] = Some(j);
                let r = self.matchings(a, b, s, ab, bb, ka, kb, i + 1, matching, used)?;
                used[j] = false;
                matching[i] = None;
                if r.is_some() {
                    return Ok(r);
                }
            }
        }
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    fn combine(
        &mut self,
        a: usize,
        b: usize,
        s: u32,
        ab: &[u32],
        bb: &[u32],
        ka: &[u32],
        matching: &[Option<usize>],
    ) -> Result<Option<usize>, WidthError> {
        let mut pre: Vec<u32> = Vec::with_capacity(self.k);
        let mut pre_key: Vec<u32> = Vec::with_capacity(self.k);
        let mut b_pre = vec![usize::MAX; bb.len()];
        let mut a_pre = vec![0; ab.len()];
        for (i, &blk) in ab.iter().enumerate() {
            a_pre[i] = pre.len();
            let mut m = blk;
            if let Some(j) = matching[i] {
                m |= bb[j];
                b_pre[j] = pre.len();
            }
            pre.push(m);
            pre_key.push(ka[i]);
        }
        for (j, &blk) in bb.iter().enumerate() {
            if b_pre[j] == usize::MAX {
                b_pre[j] = pre.len();
                pre.push(blk);
                pre_key.push(self.key(blk, s));
            }
        }
        let class_of = |v: usize| pre.iter().position(|&m| m >> v & 1 == 1).expect("v in s");
        let x = self.recs[a].s;
        let y = self.recs[b].s;
        let mut joins: Vec<(usize, usize)> = vec![];
        for u in bits(x) {
            for v in bits(self.adj[u] & y) {
                let (cu, cv) = (class_of(u), class_of(v));
                if cu == cv {
                    return Ok(None);
                }
                let pair = (cu.min(cv), cu.max(cv));
                if !joins.contains(&pair) {
                    let full = bits(pre[pair.0]).all(|p| pre[pair.1] & !self.adj[p] == 0);
                    if !full {
                        return Ok(None);
                    }
                    joins.push(pair);
                }
            }
        }
        // merge classes with no neighbours outside s
        let mut finals: Vec<u32> = vec![];
        let mut pre_final = vec![0; pre.len()];
        let mut dead: Option<usize> = None;
        for (c, &m) in pre.iter().enumerate() {
            if pre_key[c] == 0 {
                if let Some(d) = dead {
                    finals[d] |= m;
                    pre_final[c] = d;
                    continue;
                }
                dead = Some(finals.len());
            }
            pre_final[c] = finals.len();
            finals.push(m);
        }
        let (finals, perm) = canonical(finals);
        let pre_final = pre_final.iter().map(|&p| perm[p]).collect();
        self.insert_closed(
            s,
            finals,
            How::Union {
                a,
                b,
                a_pre,
                b_pre,
                joins,
                pre_final,
            },
        )
    }

    /// Labels for the classes before a merge: the first class of each final
    /// block takes the block's label, the others take unused labels.
    fn assign(&self, pre_final: &[usize], labels: &[usize]) -> Vec<usize> {
        let mut free = (1..=self.k).filter(|l| !labels.contains(l));
        let mut seen = vec![false; labels.len()];
        pre_final
            .iter()
            .map(|&f| {
                if seen[f] {
                    free.next().expect("at most k classes")
                } else {
                    seen[f] = true;
                    labels[f]
                }
            })
            .collect()
    }

    fn relabel_into(&self, mut e: KExpression, pre: &[usize], pre_final: &[usize], labels: &[usize]) -> KExpression {
        for (p, &f) in pre_final.iter().enumerate() {
            if pre[p] != labels[f] {
                e = e.relabel(pre[p], labels[f]);
            }
        }
        e
    }

    fn build(&self, id: usize, labels: &[usize]) -> KExpression {
        match &self.recs[id].how {
            How::Base(v) => KExpression::create(*v, labels[0]),
            How::Merge { from, pre_final } => {
                let pre = self.assign(pre_final, labels);
                let e = self.build(*from, &pre);
                self.relabel_into(e, &pre, pre_final, labels)
            }
            How::Union {
                a,
                b,
                a_pre,
                b_pre,
                joins,
                pre_final,
            } => {
                let pre = self.assign(pre_final, labels);
                let la: Vec<usize> = a_pre.iter().map(|&c| pre[c]).collect();
                let lb: Vec<usize> = b_pre.iter().map(|&c| pre[c]).collect();
                let mut e = KExpression::union(self.build(*a, &la), self.build(*b, &lb));
                for &(c, d) in joins {
                    e = e.join(pre[c], pre[d]);
                }
                self.relabel_into(e, &pre, pre_final, labels)
            }
        }
    }

    fn witness(&self, id: usize) -> KExpression {
        let labels: Vec<usize> = (1..=self.recs[id].blocks.len()).collect();
        self.build(id, &labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build::grid;

    fn cwd(g: &LabeledGraph) -> usize {
        let r = cliquewidth_exact(g, &CwdConfig::default()).unwrap();
        assert!(verify_k_expression(g, &r.expr, r.k).unwrap(), "witness for k = {}", r.k);
        r.k
    }

    fn clique_expr(n: usize) -> KExpression {
        let mut e = KExpression::create(0, 1);
        for v in 1..n {
            e = KExpression::union(e, KExpression::create(v, 2)).join(1, 2).relabel(2, 1);
        }
        e
    }

    #[test]
    fn verifier_examples() {
        let k1 = LabeledGraph::new(1);
        assert!(verify_k_expression(&k1, &KExpression::create(0, 1), 1).unwrap());
        for n in 2..=6 {
            assert!(verify_k_expression(&LabeledGraph::complete(n), &clique_expr(n), 2).unwrap());
        }
        // path a-b-c-d
        let ab = KExpression::union(KExpression::create(0, 1), KExpression::create(1, 2)).join(1, 2);
        let abc = KExpression::union(ab.relabel(1, 3), KExpression::create(2, 1)).join(1, 2);
        let abcd = KExpression::union(abc.relabel(2, 3).relabel(1, 2), KExpression::create(3, 1)).join(1, 2);
        assert!(verify_k_expression(&LabeledGraph::path(4), &abcd, 3).unwrap());
        assert!(!verify_k_expression(&LabeledGraph::cycle(4), &abcd, 3).unwrap());
        assert!(verify_k_expression(&LabeledGraph::path(4), &abcd, 2).is_err());
        let twice = KExpression::union(KExpression::create(0, 1), KExpression::create(0, 2));
        assert!(verify_k_expression(&LabeledGraph::new(2), &twice, 2).is_err());
        assert!(KExpression::create(0, 1).join(1, 1).evaluate().is_err());
    }

    #[test]
    fn exact_values() {
        assert_eq!(cwd(&LabeledGraph::new(1)), 1);
        assert_eq!(cwd(&LabeledGraph::new(4)), 1);
        assert_eq!(cwd(&LabeledGraph::complete(3)), 2);
        assert_eq!(cwd(&LabeledGraph::cycle(5)), 3);
        assert_eq!(cwd(&LabeledGraph::cycle(4)), 2);
        assert_eq!(cwd(&LabeledGraph::path(4)), 3);
        assert_eq!(cwd(&LabeledGraph::path(3)), 2);
        assert_eq!(cwd(&grid(2, 3)), 3);
    }

    #[test]
    fn json_round_trip() {
        let e = clique_expr(3);
        let back: KExpression = serde_json::from_str(&e.to_json_string()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn caps() {
        assert!(matches!(
            cliquewidth_exact(&LabeledGraph::new(9), &CwdConfig::default()),
            Err(WidthError::Cap { .. })
        ));
        let tiny = CwdConfig { cap: 8, budget: 3 };
        assert_eq!(cliquewidth_exact(&LabeledGraph::cycle(5), &tiny), Err(WidthError::Budget(3)));
    }
}
