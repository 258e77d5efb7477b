//! Model checking of compiled formulas over a fixed [`LabeledGraph`].
//!
//! An [`Evaluator`] owns the compiled library for one graph. Before a query
//! runs, every predicate it can reach is materialized into a [`Table`] (when
//! small enough) and every closed `TC`/`BETWEEN` node is solved once, in
//! dependency order. Evaluation itself is then read-only and can be shared
//! between threads.

use super::ast::Formula;
use super::compile::{ArgSlot, Closure, Compiler, Node, Unit};
use super::library::{PredicateLibrary, VarKind};
use crate::graph::{LabeledGraph, VertexSet};
use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

pub const DEFAULT_SET_CAP: usize = 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable `{0}` has no value")]
    Unassigned(String),
    #[error("set quantifier over {n} vertices exceeds the cap of {cap}")]
    SetCap { n: usize, cap: usize },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("`{name}` takes {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("argument for parameter `{param}` of `{name}` has the wrong kind")]
    ArgumentKind { name: String, param: String },
    #[error("graph has no label `{0}`")]
    MissingLabel(String),
    #[error("BETWEEN relation is not a disjoint union of paths: {0}")]
    NotPathLike(String),
    #[error("cannot materialize `{name}`: {reason}")]
    NotMaterializable { name: String, reason: String },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct EvalConfig {
    /// Largest vertex count over which set quantifiers may range.
    pub set_cap: usize,
    /// Predicates are tabulated up front when `n^arity` is at most this.
    pub table_cells: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            set_cap: DEFAULT_SET_CAP,
            table_cells: 1 << 21,
        }
    }
}

/// Assignment of vertices and vertex sets to free variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    pub vertices: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, VertexSet>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, name: &str, v: usize) -> Self {
        self.vertices.insert(name.to_string(), v);
        self
    }

    pub fn set(mut self, name: &str, s: VertexSet) -> Self {
        self.sets.insert(name.to_string(), s);
        self
    }

    /// Parses `x=3, Y={1,2}`. Values are vertex names, falling back to indices.
    pub fn parse(text: &str, g: &LabeledGraph) -> Result<Self, String> {
        let mut out = Valuation::new();
        let resolve = |tok: &str| -> Result<usize, String> {
            let tok = tok.trim();
            g.find_vertex(tok)
                .or_else(|| tok.parse::<usize>().ok().filter(|&v| v < g.vertex_count()))
                .ok_or_else(|| format!("no vertex `{tok}`"))
        };
        let mut rest = text.trim();
        while !rest.is_empty() {
            let eq = rest.find('=').ok_or_else(|| format!("expected `name=value` in `{rest}`"))?;
            let name = rest[..eq].trim().to_string();
            rest = rest[eq + 1..].trim_start();
            if let Some(body) = rest.strip_prefix('{') {
                let close = body.find('}').ok_or("unclosed `{`")?;
                let mut s = g.empty_set();
                for tok in body[..close].split(',').filter(|t| !t.trim().is_empty()) {
                    s.insert(resolve(tok)?);
                }
                out.sets.insert(name, s);
                rest = body[close + 1..].trim_start();
            } else {
                let end = rest.find(',').unwrap_or(rest.len());
                out.vertices.insert(name, resolve(&rest[..end])?);
                rest = &rest[end..];
            }
            rest = rest.trim_start().strip_prefix(',').unwrap_or(rest).trim_start();
        }
        Ok(out)
    }
}

/// Extension of a vertex-only predicate, indexed by `Σ args[i]·n^(k-1-i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub arity: usize,
    pub n: usize,
    bits: FixedBitSet,
}

impl Table {
    fn index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.n + a)
    }

    pub fn get(&self, args: &[usize]) -> bool {
        self.bits.contains(self.index(args))
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All tuples in the relation, in lexicographic order.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        self.bits
            .ones()
            .map(|mut i| {
                let mut t = vec![0; self.arity];
                for slot in t.iter_mut().rev() {
                    *slot = i % self.n;
                    i /= self.n;
                }
                t
            })
            .collect()
    }

    pub fn from_fn(arity: usize, n: usize, mut f: impl FnMut(&[usize]) -> bool) -> Table {
        let cells = n.pow(arity as u32);
        let mut t = Table {
            arity,
            n,
            bits: FixedBitSet::with_capacity(cells),
        };
        let mut args = vec![0; arity];
        for i in 0..cells {
            let mut r = i;
            for slot in args.iter_mut().rev() {
                *slot = r % n;
                r /= n;
            }
            if f(&args) {
                t.bits.insert(i);
            }
        }
        t
    }
}

/// Connected components of a BETWEEN relation, each a path, with positions.
#[derive(Debug)]
struct PathIndex {
    comp: Vec<usize>,
    pos: Vec<usize>,
}

impl PathIndex {
    fn between(&self, x: usize, y: usize, z: usize) -> bool {
        if x == z || self.comp[x] != self.comp[z] || self.comp[y] != self.comp[x] {
            return false;
        }
        let (lo, hi) = if self.pos[x] < self.pos[z] {
            (self.pos[x], self.pos[z])
        } else {
            (self.pos[z], self.pos[x])
        };
        (lo..=hi).contains(&self.pos[y])
    }
}

#[derive(Debug)]
enum Solved {
    Reach(Vec<VertexSet>),
    Paths(PathIndex),
}

/// A compiled top-level formula and the order of its free variables.
#[derive(Clone, Debug)]
pub struct Query {
    unit: usize,
    pub free: Vec<(String, VarKind)>,
}

struct Frame {
    v: Vec<usize>,
    s: Vec<VertexSet>,
}

impl Frame {
    fn new(unit: &Unit, n: usize) -> Frame {
        Frame {
            v: vec![0; unit.vslots],
            s: vec![FixedBitSet::with_capacity(n); unit.sslots],
        }
    }
}

pub struct Evaluator<'a> {
    graph: &'a LabeledGraph,
    lib: &'a PredicateLibrary,
    config: EvalConfig,
    n: usize,
    label_ids: HashMap<String, usize>,
    label_sets: Vec<VertexSet>,
    units: Vec<Unit>,
    prepared: Vec<bool>,
    tables: Vec<Option<Table>>,
    solved: HashMap<(usize, usize), Solved>,
}

impl<'a> Evaluator<'a> {
    pub fn new(graph: &'a LabeledGraph, lib: &'a PredicateLibrary) -> Result<Self, EvalError> {
        Self::with_config(graph, lib, EvalConfig::default())
    }

    pub fn with_config(
        graph: &'a LabeledGraph,
        lib: &'a PredicateLibrary,
        config: EvalConfig,
    ) -> Result<Self, EvalError> {
        let mut label_ids = HashMap::new();
        let mut label_sets = Vec::new();
        for (name, set) in graph.labels() {
            label_ids.insert(name.clone(), label_sets.len());
            label_sets.push(set.clone());
        }
        let mut units = Vec::with_capacity(lib.len());
        for def in lib.defs() {
            let params: Vec<_> = def.params.iter().map(|p| (p.name.clone(), p.kind)).collect();
            units.push(Compiler::new(lib, &label_ids).unit(&def.body, &params)?);
        }
        let k = units.len();
        Ok(Evaluator {
            graph,
            lib,
            config,
            n: graph.vertex_count(),
            label_ids,
            label_sets,
            units,
            prepared: vec![false; k],
            tables: vec![None; k],
            solved: HashMap::new(),
        })
    }

    pub fn graph(&self) -> &LabeledGraph {
        self.graph
    }

    pub fn library(&self) -> &PredicateLibrary {
        self.lib
    }

    /// Compiles a formula whose free variables are exactly `free` (in that order).
    pub fn compile(&mut self, f: &Formula, free: &[(String, VarKind)]) -> Result<Query, EvalError> {
        let unit = Compiler::new(self.lib, &self.label_ids).unit(f, free)?;
        self.units.push(unit);
        self.prepared.push(false);
        let id = self.units.len() - 1;
        self.prepare(id)?;
        Ok(Query {
            unit: id,
            free: free.to_vec(),
        })
    }

    /// Compiles a formula, taking its free variables in sorted order.
    pub fn compile_open(&mut self, f: &Formula) -> Result<Query, EvalError> {
        let (vs, ss) = f.free_vars();
        let mut free: Vec<_> = vs.into_iter().map(|v| (v, VarKind::Vertex)).collect();
        free.extend(ss.into_iter().map(|s| (s, VarKind::Set)));
        self.compile(f, &free)
    }

    /// One-shot evaluation of `f` under `val`.
    pub fn evaluate(&mut self, f: &Formula, val: &Valuation) -> Result<bool, EvalError> {
        let q = self.compile_open(f)?;
        self.eval(&q, val)
    }

    pub fn eval(&self, q: &Query, val: &Valuation) -> Result<bool, EvalError> {
        let mut vs = Vec::new();
        let mut ss = Vec::new();
        for (name, kind) in &q.free {
            match kind {
                VarKind::Vertex => vs.push(
                    *val.vertices
                        .get(name)
                        .ok_or_else(|| EvalError::Unassigned(name.clone()))?,
                ),
                VarKind::Set => ss.push(
                    val.sets
                        .get(name)
                        .ok_or_else(|| EvalError::Unassigned(name.clone()))?,
                ),
            }
        }
        self.eval_args(q, &vs, &ss)
    }

    /// Evaluates with vertex and set arguments given in the query's free-variable order.
    pub fn eval_args(&self, q: &Query, vs: &[usize], ss: &[&VertexSet]) -> Result<bool, EvalError> {
        let unit = &self.units[q.unit];
        let mut fr = Frame::new(unit, self.n);
        let (mut vi, mut si) = (0, 0);
        for p in &unit.params {
            match *p {
                ArgSlot::V(slot) => {
                    let v = *vs.get(vi).ok_or_else(|| EvalError::Unassigned(format!("#{vi}")))?;
                    if v >= self.n {
                        return Err(EvalError::VertexOutOfRange { vertex: v, n: self.n });
                    }
                    fr.v[slot] = v;
                    vi += 1;
                }
                ArgSlot::S(slot) => {
                    let s = ss.get(si).ok_or_else(|| EvalError::Unassigned(format!("#S{si}")))?;
                    if let Some(v) = s.ones().find(|&v| v >= self.n) {
                        return Err(EvalError::VertexOutOfRange { vertex: v, n: self.n });
                    }
                    let mut set = FixedBitSet::with_capacity(self.n);
                    set.extend(s.ones());
                    fr.s[slot] = set;
                    si += 1;
                }
            }
        }
        self.node(q.unit, &unit.root, &mut fr)
    }

    /// The full extension of a vertex-only predicate of arity ≤ 3.
    pub fn materialize(&mut self, name: &str) -> Result<&Table, EvalError> {
        let p = self
            .lib
            .position(name)
            .ok_or_else(|| EvalError::UnknownPredicate(name.to_string()))?;
        let def = &self.lib.defs()[p];
        if !def.vertex_only() || def.arity() > 3 {
            return Err(EvalError::NotMaterializable {
                name: name.to_string(),
                reason: if def.vertex_only() {
                    format!("arity {} > 3", def.arity())
                } else {
                    "has set parameters".into()
                },
            });
        }
        self.prepare(p)?;
        if self.tables[p].is_none() {
            let t = self.fill(p)?;
            self.tables[p] = Some(t);
        }
        Ok(self.tables[p].as_ref().expect("filled above"))
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.lib.position(name).and_then(|p| self.tables[p].as_ref())
    }

    fn tabulates(&self, p: usize) -> bool {
        let def = &self.lib.defs()[p];
        def.vertex_only()
            && def.arity() <= 3
            && self.n.checked_pow(def.arity() as u32).is_some_and(|c| c <= self.config.table_cells)
    }

    fn prepare(&mut self, unit: usize) -> Result<(), EvalError> {
        if self.prepared[unit] {
            return Ok(());
        }
        let mut calls = Vec::new();
        self.units[unit].root.calls(&mut calls);
        calls.sort_unstable();
        calls.dedup();
        for p in calls {
            self.prepare(p)?;
            if self.tables[p].is_none() && self.tabulates(p) {
                let t = self.fill(p)?;
                self.tables[p] = Some(t);
            }
        }
        let mut closed = Vec::new();
        self.units[unit].root.closed_closures(&mut closed);
        let ids: Vec<usize> = closed.iter().map(|c| c.id).collect();
        for id in ids {
            let c = find_closure(&self.units[unit].root, id).expect("closure id from this unit");
            let fr = Frame::new(&self.units[unit], self.n);
            let solved = self.solve(unit, c, &fr)?;
            self.solved.insert((unit, id), solved);
        }
        self.prepared[unit] = true;
        Ok(())
    }

    fn fill(&self, p: usize) -> Result<Table, EvalError> {
        let unit = &self.units[p];
        let k = unit.params.len();
        let n = self.n;
        let cells = n.pow(k as u32);
        let hits: Vec<bool> = (0..cells)
            .into_par_iter()
            .map_init(
                || Frame::new(unit, n),
                |fr, mut i| {
                    for a in unit.params.iter().rev() {
                        if let ArgSlot::V(slot) = a {
                            fr.v[*slot] = i % n;
                        }
                        i /= n.max(1);
                    }
                    self.node(p, &unit.root, fr)
                },
            )
            .collect::<Result<_, _>>()?;
        let mut bits = FixedBitSet::with_capacity(cells);
        for (i, h) in hits.into_iter().enumerate() {
            bits.set(i, h);
        }
        Ok(Table { arity: k, n, bits })
    }

    /// The relation defined by a closure body, as adjacency rows.
    fn relation(&self, unit: usize, c: &Closure, fr: &Frame) -> Result<Vec<VertexSet>, EvalError> {
        let n = self.n;
        (0..n)
            .into_par_iter()
            .map_init(
                || Frame {
                    v: fr.v.clone(),
                    s: fr.s.clone(),
                },
                |f, a| {
                    let mut row = FixedBitSet::with_capacity(n);
                    f.v[c.u] = a;
                    for b in 0..n {
                        f.v[c.v] = b;
                        if self.node(unit, &c.body, f)? {
                            row.insert(b);
                        }
                    }
                    Ok(row)
                },
            )
            .collect()
    }

    fn solve(&self, unit: usize, c: &Closure, fr: &Frame) -> Result<Solved, EvalError> {
        let rel = self.relation(unit, c, fr)?;
        if c.tc {
            Ok(Solved::Reach(reach_all(&rel)))
        } else {
            Ok(Solved::Paths(path_index(&rel)?))
        }
    }

    fn closure_value(&self, unit: usize, c: &Closure, fr: &mut Frame) -> Result<bool, EvalError> {
        let args: Vec<usize> = c.args.iter().map(|&s| fr.v[s]).collect();
        if let Some(s) = self.solved.get(&(unit, c.id)) {
            return Ok(match s {
                Solved::Reach(r) => r[args[0]].contains(args[1]),
                Solved::Paths(p) => p.between(args[0], args[1], args[2]),
            });
        }
        let (su, sv) = (fr.v[c.u], fr.v[c.v]);
        let out = if c.tc {
            self.reach_from(unit, c, fr, args[0]).map(|r| r.contains(args[1]))
        } else {
            let rel = self.relation(unit, c, fr)?;
            path_index(&rel).map(|p| p.between(args[0], args[1], args[2]))
        };
        fr.v[c.u] = su;
        fr.v[c.v] = sv;
        out
    }

    fn reach_from(&self, unit: usize, c: &Closure, fr: &mut Frame, a: usize) -> Result<VertexSet, EvalError> {
        let mut seen = FixedBitSet::with_capacity(self.n);
        seen.insert(a);
        let mut stack = vec![a];
        while let Some(w) = stack.pop() {
            for t in 0..self.n {
                if seen.contains(t) {
                    continue;
                }
                fr.v[c.u] = w;
                fr.v[c.v] = t;
                if self.node(unit, &c.body, fr)? {
                    seen.insert(t);
                    stack.push(t);
                }
            }
        }
        Ok(seen)
    }

    fn call(&self, pred: usize, args: &[ArgSlot], fr: &Frame) -> Result<bool, EvalError> {
        if let Some(t) = &self.tables[pred] {
            let mut idx = 0;
            for a in args {
                if let ArgSlot::V(s) = a {
                    idx = idx * self.n + fr.v[*s];
                }
            }
            return Ok(t.bits.contains(idx));
        }
        let callee = &self.units[pred];
        let mut inner = Frame::new(callee, self.n);
        for (p, a) in callee.params.iter().zip(args) {
            match (p, a) {
                (ArgSlot::V(d), ArgSlot::V(s)) => inner.v[*d] = fr.v[*s],
                (ArgSlot::S(d), ArgSlot::S(s)) => inner.s[*d].clone_from(&fr.s[*s]),
                _ => unreachable!("argument kinds are checked at compile time"),
            }
        }
        self.node(pred, &callee.root, &mut inner)
    }

    fn set_cap_ok(&self) -> Result<(), EvalError> {
        if self.n > self.config.set_cap {
            Err(EvalError::SetCap {
                n: self.n,
                cap: self.config.set_cap,
            })
        } else {
            Ok(())
        }
    }

    fn node(&self, unit: usize, node: &Node, fr: &mut Frame) -> Result<bool, EvalError> {
        Ok(match node {
            Node::Const(b) => *b,
            Node::Edge(x, y) => self.graph.has_edge(fr.v[*x], fr.v[*y]),
            Node::Label(l, x) => self.label_sets[*l].contains(fr.v[*x]),
            Node::MissingLabel(l) => return Err(EvalError::MissingLabel(l.clone())),
            Node::InSet(s, x) => fr.s[*s].contains(fr.v[*x]),
            Node::Eq(x, y) => fr.v[*x] == fr.v[*y],
            Node::Not(a) => !self.node(unit, a, fr)?,
            Node::And(a, b) => self.node(unit, a, fr)? && self.node(unit, b, fr)?,
            Node::Or(a, b) => self.node(unit, a, fr)? || self.node(unit, b, fr)?,
            Node::Implies(a, b) => !self.node(unit, a, fr)? || self.node(unit, b, fr)?,
            Node::ExistsV(x, a) => {
                for v in 0..self.n {
                    fr.v[*x] = v;
                    if self.node(unit, a, fr)? {
                        return Ok(true);
                    }
                }
                false
            }
            Node::ForallV(x, a) => {
                for v in 0..self.n {
                    fr.v[*x] = v;
                    if !self.node(unit, a, fr)? {
                        return Ok(false);
                    }
                }
                true
            }
            Node::ExistsS(s, a) | Node::ForallS(s, a) => {
                self.set_cap_ok()?;
                let want = matches!(node, Node::ExistsS(..));
                fr.s[*s].clear();
                loop {
                    if self.node(unit, a, fr)? == want {
                        return Ok(want);
                    }
                    if !increment(&mut fr.s[*s], self.n) {
                        return Ok(!want);
                    }
                }
            }
            Node::Tc(c) | Node::Between(c) => self.closure_value(unit, c, fr)?,
            Node::Call { pred, args } => self.call(*pred, args, fr)?,
        })
    }
}

/// Advances `s` to the next subset of `0..n` in binary counting order.
/// Returns false once every subset has been visited (and `s` is empty again).
fn increment(s: &mut FixedBitSet, n: usize) -> bool {
    for i in 0..n {
        if s.contains(i) {
            s.set(i, false);
        } else {
            s.insert(i);
            return true;
        }
    }
    false
}

fn reach_all(rel: &[VertexSet]) -> Vec<VertexSet> {
    let n = rel.len();
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut seen = FixedBitSet::with_capacity(n);
            seen.insert(a);
            let mut stack = vec![a];
            while let Some(w) = stack.pop() {
                for t in rel[w].ones() {
                    if !seen.contains(t) {
                        seen.insert(t);
                        stack.push(t);
                    }
                }
            }
            seen
        })
        .collect()
}

fn path_index(rel: &[VertexSet]) -> Result<PathIndex, EvalError> {
    let n = rel.len();
    let mut nb = vec![FixedBitSet::with_capacity(n); n];
    for (a, row) in rel.iter().enumerate() {
        for b in row.ones() {
            if a != b {
                nb[a].insert(b);
                nb[b].insert(a);
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| nb[v].count_ones(..) > 2) {
        return Err(EvalError::NotPathLike(format!("vertex {v} has degree > 2")));
    }
    let mut comp = vec![usize::MAX; n];
    let mut pos = vec![0; n];
    let mut next = 0;
    for start in 0..n {
        if comp[start] != usize::MAX || nb[start].count_ones(..) == 2 {
            continue;
        }
        let (mut prev, mut cur, mut i) = (usize::MAX, start, 0);
        loop {
            comp[cur] = next;
            pos[cur] = i;
            i += 1;
            match nb[cur].ones().find(|&w| w != prev) {
                Some(w) => {
                    prev = cur;
                    cur = w;
                }
                None => break,
            }
        }
        next += 1;
    }
    if let Some(v) = comp.iter().position(|&c| c == usize::MAX) {
        return Err(EvalError::NotPathLike(format!("vertex {v} lies on a cycle")));
    }
    Ok(PathIndex { comp, pos })
}

fn find_closure(node: &Node, id: usize) -> Option<&Closure> {
    match node {
        Node::Tc(c) | Node::Between(c) => {
            if c.id == id {
                Some(c)
            } else {
                find_closure(&c.body, id)
            }
        }
        Node::Not(a)
        | Node::ExistsV(_, a)
        | Node::ForallV(_, a)
        | Node::ExistsS(_, a)
        | Node::ForallS(_, a) => find_closure(a, id),
        Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) => {
            find_closure(a, id).or_else(|| find_closure(b, id))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{graph_corpus, rng, FormulaGen};
    use crate::logic::{parse_formula, parse_formula_in, reference_eval, tc_naive_encoding, FreeVars};

    fn eval_str(g: &LabeledGraph, lib: &PredicateLibrary, f: &str, val: &Valuation) -> Result<bool, EvalError> {
        let f = parse_formula_in(f, lib, FreeVars::Any).unwrap();
        Evaluator::new(g, lib)?.evaluate(&f, val)
    }

    #[test]
    fn edge_and_equality() {
        let k2 = LabeledGraph::complete(2);
        let lib = PredicateLibrary::default();
        let val = Valuation::new().vertex("x", 0).vertex("y", 1);
        assert!(eval_str(&k2, &lib, "E(x,y)", &val).unwrap());
        assert!(!eval_str(&k2, &lib, "E(x,x)", &val).unwrap());
        let p = LabeledGraph::path(5);
        assert!(eval_str(&p, &lib, "x = x", &Valuation::new().vertex("x", 3)).unwrap());
    }

    #[test]
    fn unassigned_variable_is_an_error() {
        let g = LabeledGraph::path(3);
        let e = eval_str(&g, &PredicateLibrary::default(), "E(x,y)", &Valuation::new().vertex("x", 0));
        assert_eq!(e, Err(EvalError::Unassigned("y".into())));
    }

    #[test]
    fn set_cap_is_enforced() {
        let g = LabeledGraph::path(23);
        let e = eval_str(&g, &PredicateLibrary::default(), "exists S. S(x)", &Valuation::new().vertex("x", 0));
        assert_eq!(e, Err(EvalError::SetCap { n: 23, cap: 22 }));
        let small = LabeledGraph::path(4);
        let lib = PredicateLibrary::default();
        let cfg = EvalConfig {
            set_cap: 3,
            ..EvalConfig::default()
        };
        let f = parse_formula("exists S. S(x)").unwrap();
        let mut ev = Evaluator::with_config(&small, &lib, cfg).unwrap();
        assert!(ev.evaluate(&f, &Valuation::new().vertex("x", 0)).is_err());
    }

    #[test]
    fn set_quantifiers_express_connectivity() {
        // Every set containing x and closed under edges contains y.
        let f = "forall S. (S(x) & forall u. forall v. (S(u) & E(u,v) -> S(v))) -> S(y)";
        let mut g = LabeledGraph::path(3);
        g.add_edge(3, 4).ok();
        let g = {
            let mut h = LabeledGraph::new(5);
            for (u, v) in [(0, 1), (1, 2), (3, 4)] {
                h.add_edge(u, v).unwrap();
            }
            h
        };
        let lib = PredicateLibrary::default();
        let at = |x, y| Valuation::new().vertex("x", x).vertex("y", y);
        assert!(eval_str(&g, &lib, f, &at(0, 2)).unwrap());
        assert!(!eval_str(&g, &lib, f, &at(0, 3)).unwrap());
    }

    #[test]
    fn tc_false_body_is_equality() {
        let g = LabeledGraph::complete(4);
        let lib = PredicateLibrary::default();
        for a in 0..4 {
            for b in 0..4 {
                let val = Valuation::new().vertex("a", a).vertex("b", b);
                assert_eq!(eval_str(&g, &lib, "TC[u,v: false](a,b)", &val).unwrap(), a == b);
            }
        }
    }

    #[test]
    fn tc_on_path_is_connectivity() {
        let mut g = LabeledGraph::path(4);
        g.remove_edge(1, 2);
        let lib = PredicateLibrary::default();
        let val = |a, b| Valuation::new().vertex("a", a).vertex("b", b);
        assert!(eval_str(&g, &lib, "TC[u,v: E(u,v)](a,b)", &val(0, 1)).unwrap());
        assert!(!eval_str(&g, &lib, "TC[u,v: E(u,v)](a,b)", &val(0, 3)).unwrap());
    }

    #[test]
    fn between_on_a_path() {
        let g = LabeledGraph::path(6);
        let lib = PredicateLibrary::default();
        let f = parse_formula("BETWEEN[u,v: E(u,v)](x,y,z)").unwrap();
        let mut ev = Evaluator::new(&g, &lib).unwrap();
        let q = ev.compile_open(&f).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                for z in 0..6 {
                    let want = x != z && x.min(z) <= y && y <= x.max(z);
                    assert_eq!(ev.eval_args(&q, &[x, y, z], &[]).unwrap(), want, "{x} {y} {z}");
                }
            }
        }
    }

    #[test]
    fn between_rejects_branching_relation() {
        let mut star = LabeledGraph::new(4);
        for v in 1..4 {
            star.add_edge(0, v).unwrap();
        }
        let lib = PredicateLibrary::default();
        let f = parse_formula("BETWEEN[u,v: E(u,v)](x,y,z)").unwrap();
        assert!(matches!(
            Evaluator::new(&star, &lib).unwrap().compile_open(&f),
            Err(EvalError::NotPathLike(_))
        ));
        let f = parse_formula("exists a. BETWEEN[u,v: E(u,v) & E(u,a)](x,y,z)").unwrap();
        let mut ev = Evaluator::new(&star, &lib).unwrap();
        let q = ev.compile_open(&f).unwrap();
        assert!(ev.eval_args(&q, &[1, 0, 2], &[]).is_err());
    }

    #[test]
    fn open_closures_see_outer_variables() {
        // Reachability avoiding the vertex `c`.
        let g = LabeledGraph::cycle(5);
        let lib = PredicateLibrary::default();
        let f = parse_formula("TC[u,v: E(u,v) & !u = c & !v = c](a,b)").unwrap();
        let mut ev = Evaluator::new(&g, &lib).unwrap();
        let q = ev.compile_open(&f).unwrap();
        assert_eq!(q.free.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(), ["a", "b", "c"]);
        assert!(ev.eval_args(&q, &[0, 2, 4], &[]).unwrap());
        assert!(ev.eval_args(&q, &[0, 2, 1], &[]).unwrap());
        assert!(!ev.eval_args(&q, &[1, 3, 1], &[]).unwrap());
        assert!(ev.eval_args(&q, &[1, 1, 1], &[]).unwrap());
    }

    #[test]
    fn missing_label_is_reported() {
        let g = LabeledGraph::path(2);
        let lib = PredicateLibrary::default();
        let e = eval_str(&g, &lib, "exists x. nope(x)", &Valuation::new());
        assert_eq!(e, Err(EvalError::MissingLabel("nope".into())));
    }

    #[test]
    fn materialize_diagonal_and_pointwise() {
        let lib = PredicateLibrary::parse(
            "def same(x,y) := x = y\n\
             def common(x,y) := exists z. E(x,z) & E(z,y)\n\
             def tri(x,y,z) := E(x,y) & E(y,z) & E(x,z)\n\
             def inside(P, x) := P(x)",
        )
        .unwrap();
        for g in graph_corpus(3, 7, 2, &[]) {
            let n = g.vertex_count();
            let mut ev = Evaluator::new(&g, &lib).unwrap();
            let same = ev.materialize("same").unwrap().clone();
            assert_eq!(same.tuples(), (0..n).map(|v| vec![v, v]).collect::<Vec<_>>());
            let tri = ev.materialize("tri").unwrap().clone();
            let common = ev.materialize("common").unwrap().clone();
            for x in 0..n {
                for y in 0..n {
                    let f = parse_formula_in("common(x,y)", &lib, FreeVars::Any).unwrap();
                    let val = Valuation::new().vertex("x", x).vertex("y", y);
                    assert_eq!(common.get(&[x, y]), reference_eval(&g, &lib, &f, &val).unwrap());
                    for z in 0..n {
                        let want = g.has_edge(x, y) && g.has_edge(y, z) && g.has_edge(x, z);
                        assert_eq!(tri.get(&[x, y, z]), want);
                    }
                }
            }
            assert!(matches!(ev.materialize("inside"), Err(EvalError::NotMaterializable { .. })));
        }
    }

    #[test]
    fn library_tables_are_reused_by_queries() {
        let lib = PredicateLibrary::parse("def adj(x,y) := E(x,y)\ndef deg2(x) := exists y, z. adj(x,y) & adj(x,z) & !y = z").unwrap();
        let g = LabeledGraph::path(5);
        let mut ev = Evaluator::new(&g, &lib).unwrap();
        let f = parse_formula_in("deg2(x)", &lib, FreeVars::Any).unwrap();
        let q = ev.compile_open(&f).unwrap();
        assert!(ev.table("adj").is_some() && ev.table("deg2").is_some());
        let hits: Vec<usize> = (0..5).filter(|&v| ev.eval_args(&q, &[v], &[]).unwrap()).collect();
        assert_eq!(hits, [1, 2, 3]);
    }

    #[test]
    fn valuation_parse() {
        let mut g = LabeledGraph::path(4);
        g.set_name(2, "c");
        let v = Valuation::parse("x=3, Y={0, c}, z = c", &g).unwrap();
        assert_eq!(v.vertices["x"], 3);
        assert_eq!(v.vertices["z"], 2);
        assert_eq!(v.sets["Y"].ones().collect::<Vec<_>>(), [0, 2]);
        assert!(Valuation::parse("x=9", &g).is_err());
    }

    #[test]
    fn subset_counter_visits_all() {
        let mut s = FixedBitSet::with_capacity(4);
        let mut seen = 1;
        while increment(&mut s, 4) {
            seen += 1;
        }
        assert_eq!(seen, 16);
        assert_eq!(s.count_ones(..), 0);
    }

    #[test]
    fn agrees_with_reference_on_random_sentences() {
        let gen = FormulaGen {
            closures: true,
            ..FormulaGen::default()
        };
        let graphs = graph_corpus(11, 6, 2, &["a"]);
        let lib = PredicateLibrary::default();
        let mut r = rng(5);
        for i in 0..300 {
            let f = gen.sentence(&mut r);
            let g = &graphs[i % graphs.len()];
            let fast = Evaluator::new(g, &lib).unwrap().evaluate(&f, &Valuation::new()).unwrap();
            let slow = reference_eval(g, &lib, &f, &Valuation::new()).unwrap();
            assert_eq!(fast, slow, "{f} on {}", g.to_json_string());
            let dual = Formula::not(f.clone());
            let fast_dual = Evaluator::new(g, &lib).unwrap().evaluate(&dual, &Valuation::new()).unwrap();
            assert_eq!(fast_dual, !fast);
        }
    }

    #[test]
    fn de_morgan_duality() {
        let gen = FormulaGen::default();
        let graphs = graph_corpus(12, 6, 1, &["a"]);
        let lib = PredicateLibrary::default();
        let mut r = rng(6);
        for i in 0..100 {
            let body = gen.open(&mut r, &["x"]);
            let lhs = Formula::not(Formula::exists_v("x", body.clone()));
            let rhs = Formula::forall_v("x", Formula::not(body));
            let g = &graphs[i % graphs.len()];
            let mut ev = Evaluator::new(g, &lib).unwrap();
            assert_eq!(
                ev.evaluate(&lhs, &Valuation::new()).unwrap(),
                ev.evaluate(&rhs, &Valuation::new()).unwrap()
            );
        }
    }

    #[test]
    fn tc_matches_naive_encoding_on_small_graphs() {
        let lib = PredicateLibrary::default();
        let body = parse_formula("E(u,v) & !a(v)").unwrap();
        let tc = Formula::Tc {
            u: "u".into(),
            v: "v".into(),
            body: Box::new(body.clone()),
            a: "x".into(),
            b: "y".into(),
        };
        let naive = tc_naive_encoding("u", "v", &body, "x", "y").unwrap();
        for g in graph_corpus(13, 7, 2, &["a"]) {
            let mut ev = Evaluator::new(&g, &lib).unwrap();
            let q1 = ev.compile_open(&tc).unwrap();
            let q2 = ev.compile_open(&naive).unwrap();
            let n = g.vertex_count();
            for x in 0..n {
                for y in 0..n {
                    assert_eq!(ev.eval_args(&q1, &[x, y], &[]), ev.eval_args(&q2, &[x, y], &[]));
                }
            }
        }
    }
}
