//! Interpretations with set parameters: a domain formula `domain(x)` and an
//! edge formula `edge(x,y)`, both over the parameters, define a new graph on
//! the vertices of an input graph.
//!
//! File format:
//!
//! ```text
//! params: [Z]
//! loops: drop          # optional: ignore edge(x,x) instead of rejecting it
//! def helper(x) := ...
//! domain(x) := Z(x)
//! edge(x,y) := E(x,y)
//! ```
//!
//! During evaluation each parameter is bound as a free set variable of the
//! domain and edge formulas and also installed as a label of the same name,
//! so library predicates can read it as `Z(x)`.

use crate::graph::search::{is_isomorphic, SearchOutcome};
use crate::graph::{LabeledGraph, VertexSet};
use crate::logic::library::{chunks, parse_header};
use crate::logic::parser::{error_at, is_set_name, parse_span, ParseErrorKind};
use crate::logic::{
    EvalConfig, EvalError, Evaluator, Formula, FreeVars, ParseError, PredicateLibrary, VarKind,
};
use rayon::prelude::*;
use thiserror::Error;

pub const DEFAULT_PARAM_CAP: usize = 22;

#[derive(Debug, Error)]
pub enum InterpretError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expected {expected} parameter value(s), got {found}")]
    ParamCount { expected: usize, found: usize },
    #[error("edge formula is not symmetric: holds for ({x}, {y}) but not ({y}, {x})")]
    Asymmetric { x: String, y: String },
    #[error("edge formula holds for ({0}, {0})")]
    Reflexive(String),
    #[error("enumerating parameters needs 2^{bits} tuples, over the cap of 2^{cap}")]
    Cap { bits: usize, cap: usize },
    #[error("graph has no label `{0}` to bind parameter from")]
    MissingLabel(String),
    #[error("parameter set contains vertex {vertex}, graph has {n}")]
    OutOfRange { vertex: usize, n: usize },
}

#[derive(Clone, Debug)]
pub struct Interpretation {
    pub params: Vec<String>,
    pub domain_var: String,
    pub domain: Formula,
    pub edge_vars: (String, String),
    pub edge: Formula,
    pub library: PredicateLibrary,
    /// Silently drop `edge(x,x)` instead of treating it as an error.
    pub drop_loops: bool,
}

/// Output of [`Interpretation::apply`]: the new graph and, for each of its
/// vertices, the input vertex it came from.
#[derive(Clone, Debug)]
pub struct Applied {
    pub graph: LabeledGraph,
    pub source: Vec<usize>,
}

impl Interpretation {
    /// Builds an interpretation from formula text, against `library`.
    pub fn new(
        params: &[&str],
        domain: &str,
        edge: &str,
        library: PredicateLibrary,
    ) -> Result<Self, ParseError> {
        let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        let d = parse_span(domain, 0..domain.len(), &library, declared(&["x"], &params))?;
        let e = parse_span(edge, 0..edge.len(), &library, declared(&["x", "y"], &params))?;
        Ok(Interpretation {
            params,
            domain_var: "x".into(),
            domain: d,
            edge_vars: ("x".into(), "y".into()),
            edge: e,
            library,
            drop_loops: false,
        })
    }

    /// Parses the file format; inline definitions extend `base`.
    pub fn parse(text: &str, base: &PredicateLibrary) -> Result<Self, ParseError> {
        let mut library = base.clone();
        let mut params: Vec<String> = Vec::new();
        let mut drop_loops = false;
        let mut domain = None;
        let mut edge = None;
        let starters = ["params", "loops", "def", "domain", "edge"];
        for span in chunks(text, &starters)? {
            let chunk = &text[span.clone()];
            let word_len = chunk
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(chunk.len());
            let syntax = |at: usize, msg: &str| error_at(text, at, ParseErrorKind::Syntax(msg.to_string()));
            match &chunk[..word_len] {
                "params" => {
                    let body = strip_comments(&chunk[word_len..]);
                    let inner = body
                        .trim()
                        .strip_prefix(':')
                        .map(str::trim)
                        .and_then(|s| s.strip_prefix('['))
                        .and_then(|s| s.strip_suffix(']'))
                        .ok_or_else(|| syntax(span.start, "expected `params: [A, B, ...]`"))?;
                    for p in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                        if !is_set_name(p) || params.iter().any(|q| q == p) {
                            return Err(syntax(span.start, &format!("bad parameter name `{p}`")));
                        }
                        params.push(p.to_string());
                    }
                }
                "loops" => {
                    let body = strip_comments(&chunk[word_len..]);
                    match body.trim().strip_prefix(':').map(str::trim) {
                        Some("drop") => drop_loops = true,
                        Some("reject") => drop_loops = false,
                        _ => return Err(syntax(span.start, "expected `loops: drop` or `loops: reject`")),
                    }
                }
                "def" => library.define_span(text, parse_header(text, span, true)?)?,
                "domain" => {
                    let h = parse_header(text, span, false)?;
                    if h.params.len() != 1 || is_set_name(&h.params[0]) {
                        return Err(syntax(h.body.start, "domain takes one vertex variable"));
                    }
                    let f = parse_span(text, h.body, &library, declared(&[&h.params[0]], &params))?;
                    domain = Some((h.params[0].clone(), f));
                }
                "edge" => {
                    let h = parse_header(text, span, false)?;
                    if h.params.len() != 2 || h.params.iter().any(|p| is_set_name(p)) {
                        return Err(syntax(h.body.start, "edge takes two vertex variables"));
                    }
                    let f = parse_span(
                        text,
                        h.body,
                        &library,
                        declared(&[&h.params[0], &h.params[1]], &params),
                    )?;
                    edge = Some(((h.params[0].clone(), h.params[1].clone()), f));
                }
                _ => unreachable!("chunks only start with known words"),
            }
        }
        let (domain_var, domain) = domain.ok_or_else(|| error_at(text, text.len(), ParseErrorKind::Syntax("missing `domain(x) :=`".into())))?;
        let (edge_vars, edge) = edge.ok_or_else(|| error_at(text, text.len(), ParseErrorKind::Syntax("missing `edge(x,y) :=`".into())))?;
        Ok(Interpretation {
            params,
            domain_var,
            domain,
            edge_vars,
            edge,
            library,
            drop_loops,
        })
    }

    /// Renders the interpretation in the file format.
    pub fn to_source(&self) -> String {
        let mut out = format!("params: [{}]\n", self.params.join(", "));
        if self.drop_loops {
            out.push_str("loops: drop\n");
        }
        out.push_str(&self.library.to_source());
        out.push_str(&format!("domain({}) := {}\n", self.domain_var, self.domain));
        out.push_str(&format!(
            "edge({}, {}) := {}\n",
            self.edge_vars.0, self.edge_vars.1, self.edge
        ));
        out
    }

    pub fn apply(&self, g: &LabeledGraph, params: &[VertexSet]) -> Result<Applied, InterpretError> {
        self.apply_with(g, params, EvalConfig::default())
    }

    pub fn apply_with(
        &self,
        g: &LabeledGraph,
        params: &[VertexSet],
        config: EvalConfig,
    ) -> Result<Applied, InterpretError> {
        if params.len() != self.params.len() {
            return Err(InterpretError::ParamCount {
                expected: self.params.len(),
                found: params.len(),
            });
        }
        let n = g.vertex_count();
        let mut expanded = g.clone();
        for (name, set) in self.params.iter().zip(params) {
            if let Some(v) = set.ones().find(|&v| v >= n) {
                return Err(InterpretError::OutOfRange { vertex: v, n });
            }
            let mut s = g.empty_set();
            s.extend(set.ones());
            expanded.set_label_set(name, s).expect("range checked");
        }
        let mut ev = Evaluator::with_config(&expanded, &self.library, config)?;
        let sets: Vec<(String, VarKind)> = self.params.iter().map(|p| (p.clone(), VarKind::Set)).collect();
        let mut dfree = vec![(self.domain_var.clone(), VarKind::Vertex)];
        dfree.extend(sets.iter().cloned());
        let mut efree = vec![
            (self.edge_vars.0.clone(), VarKind::Vertex),
            (self.edge_vars.1.clone(), VarKind::Vertex),
        ];
        efree.extend(sets.iter().cloned());
        let qd = ev.compile(&self.domain, &dfree)?;
        let qe = ev.compile(&self.edge, &efree)?;
        let refs: Vec<&VertexSet> = params.iter().collect();

        let keep: Vec<bool> = (0..n)
            .into_par_iter()
            .map(|v| ev.eval_args(&qd, &[v], &refs))
            .collect::<Result<_, _>>()?;
        let source: Vec<usize> = (0..n).filter(|&v| keep[v]).collect();
        let m = source.len();
        let rows: Vec<Vec<usize>> = (0..m)
            .into_par_iter()
            .map(|i| -> Result<Vec<usize>, InterpretError> {
                let a = source[i];
                let mut row = Vec::new();
                if ev.eval_args(&qe, &[a, a], &refs)? && !self.drop_loops {
                    return Err(InterpretError::Reflexive(g.name(a)));
                }
                for (j, &b) in source.iter().enumerate().skip(i + 1) {
                    let ab = ev.eval_args(&qe, &[a, b], &refs)?;
                    let ba = ev.eval_args(&qe, &[b, a], &refs)?;
                    if ab != ba {
                        let (x, y) = if ab { (a, b) } else { (b, a) };
                        return Err(InterpretError::Asymmetric {
                            x: g.name(x),
                            y: g.name(y),
                        });
                    }
                    if ab {
                        row.push(j);
                    }
                }
                Ok(row)
            })
            .collect::<Result<_, _>>()?;

        let mut out = LabeledGraph::new(m);
        for (i, row) in rows.iter().enumerate() {
            for &j in row {
                out.add_edge(i, j).expect("distinct in-range vertices");
            }
        }
        for (i, &v) in source.iter().enumerate() {
            match g.raw_name(v) {
                Some(name) => out.set_name(i, name),
                None if i != v => out.set_name(i, v.to_string()),
                None => {}
            }
        }
        for (name, set) in g.labels() {
            let members: Vec<usize> = (0..m).filter(|&i| set.contains(source[i])).collect();
            out.set_label(name, members).expect("in range");
        }
        Ok(Applied { graph: out, source })
    }

    /// Values for the parameters read off the labels of `g` with the same names.
    pub fn bind_from_labels(&self, g: &LabeledGraph) -> Result<Vec<VertexSet>, InterpretError> {
        self.params
            .iter()
            .map(|p| {
                g.label(p)
                    .cloned()
                    .ok_or_else(|| InterpretError::MissingLabel(p.clone()))
            })
            .collect()
    }

    /// Applies the interpretation under every tuple of parameter values.
    pub fn apply_all_params(
        &self,
        g: &LabeledGraph,
        cap: usize,
        dedup: bool,
    ) -> Result<Vec<Applied>, InterpretError> {
        let n = g.vertex_count();
        let bits = n * self.params.len();
        if bits > cap || bits >= 64 {
            return Err(InterpretError::Cap { bits, cap });
        }
        let p = self.params.len();
        let outs: Vec<Applied> = (0u64..1 << bits)
            .into_par_iter()
            .map(|mask| {
                let sets: Vec<VertexSet> = (0..p)
                    .map(|k| {
                        let mut s = g.empty_set();
                        s.extend((0..n).filter(|v| mask >> (k * n + v) & 1 == 1));
                        s
                    })
                    .collect();
                self.apply(g, &sets)
            })
            .collect::<Result<_, _>>()?;
        Ok(if dedup { dedup_isomorphic(outs) } else { outs })
    }
}

/// Keeps one representative per isomorphism class, in first-seen order.
pub fn dedup_isomorphic(graphs: Vec<Applied>) -> Vec<Applied> {
    let mut reps: Vec<Applied> = Vec::new();
    for a in graphs {
        let dup = reps.iter().any(|r| {
            matches!(is_isomorphic(&r.graph, &a.graph, None), SearchOutcome::Found(_))
        });
        if !dup {
            reps.push(a);
        }
    }
    reps
}

fn strip_comments(s: &str) -> String {
    s.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn declared(vertex: &[&str], sets: &[String]) -> FreeVars {
    FreeVars::Declared {
        vertex: vertex.iter().map(|s| s.to_string()).collect(),
        set: sets.to_vec(),
    }
}

/// Graph complementation: `domain(x) := x = x`, `edge(x,y) := !E(x,y)`.
/// The edge formula holds on the diagonal, so loops are dropped.
pub fn builtin_complement() -> Interpretation {
    let mut i = Interpretation::new(&[], "x = x", "!E(x,y)", PredicateLibrary::default())
        .expect("fixed formulas parse");
    i.drop_loops = true;
    i
}

/// Induced subgraph on the parameter: `domain(x) := Z(x)`, `edge(x,y) := E(x,y)`.
pub fn builtin_induced() -> Interpretation {
    Interpretation::new(&["Z"], "Z(x)", "E(x,y)", PredicateLibrary::default())
        .expect("fixed formulas parse")
}

/// How a pipeline stage obtains its parameter values.
#[derive(Clone, Debug)]
pub enum Binding {
    Explicit(Vec<VertexSet>),
    /// Read from the labels of the stage's input graph.
    FromLabels,
    /// Every tuple of parameter values; the stage fans out.
    All,
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub interp: Interpretation,
    pub binding: Binding,
}

/// Interpretations applied left to right; `source` maps back to the input graph.
#[derive(Clone, Debug, Default)]
pub struct Pipeline {
    pub stages: Vec<Stage>,
}

impl Pipeline {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn then(mut self, interp: Interpretation, binding: Binding) -> Self {
        self.stages.push(Stage { interp, binding });
        self
    }

    pub fn run(&self, g: &LabeledGraph) -> Result<Vec<Applied>, InterpretError> {
        let mut current = vec![Applied {
            graph: g.clone(),
            source: (0..g.vertex_count()).collect(),
        }];
        for stage in &self.stages {
            let mut next = Vec::new();
            for a in &current {
                let outs = match &stage.binding {
                    Binding::Explicit(sets) => vec![stage.interp.apply(&a.graph, sets)?],
                    Binding::FromLabels => {
                        let sets = stage.interp.bind_from_labels(&a.graph)?;
                        vec![stage.interp.apply(&a.graph, &sets)?]
                    }
                    Binding::All => stage.interp.apply_all_params(&a.graph, DEFAULT_PARAM_CAP, false)?,
                };
                for o in outs {
                    let source = o.source.iter().map(|&v| a.source[v]).collect();
                    next.push(Applied {
                        graph: o.graph,
                        source,
                    });
                }
            }
            current = next;
        }
        Ok(current)
    }
}

/// Runs a pipeline whose stages all have a single outcome.
pub fn compose_pipeline(p: &Pipeline, g: &LabeledGraph) -> Result<Applied, InterpretError> {
    let mut outs = p.run(g)?;
    Ok(outs.swap_remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, vs: &[usize]) -> VertexSet {
        let mut s = VertexSet::with_capacity(n);
        s.extend(vs.iter().copied());
        s
    }

    fn iso(a: &LabeledGraph, b: &LabeledGraph) -> bool {
        is_isomorphic(a, b, None).is_found()
    }

    #[test]
    fn complement_of_complete_is_empty() {
        let out = builtin_complement().apply(&LabeledGraph::complete(3), &[]).unwrap();
        assert_eq!(out.graph.vertex_count(), 3);
        assert_eq!(out.graph.edge_count(), 0);
    }

    #[test]
    fn complement_of_c5_is_c5() {
        let c5 = LabeledGraph::cycle(5);
        let out = builtin_complement().apply(&c5, &[]).unwrap();
        assert!(iso(&out.graph, &c5));
    }

    #[test]
    fn complement_twice_is_identity() {
        for g in crate::corpus::graph_corpus(3, 7, 3, &["a"]) {
            let c = builtin_complement();
            let once = c.apply(&g, &[]).unwrap();
            let twice = c.apply(&once.graph, &[]).unwrap();
            assert_eq!(twice.graph.to_json_string(), g.to_json_string());
        }
    }

    #[test]
    fn loops_rejected_unless_dropped() {
        let mut c = builtin_complement();
        c.drop_loops = false;
        assert!(matches!(
            c.apply(&LabeledGraph::path(2), &[]),
            Err(InterpretError::Reflexive(_))
        ));
    }

    #[test]
    fn induced_subgraph_of_path() {
        let g = LabeledGraph::path(4);
        let out = builtin_induced().apply(&g, &[set(4, &[0, 1])]).unwrap();
        assert!(iso(&out.graph, &LabeledGraph::complete(2)));
        assert_eq!(out.source, [0, 1]);
        let out = builtin_induced().apply(&g, &[set(4, &[0, 2])]).unwrap();
        assert_eq!(out.graph.edge_count(), 0);
    }

    #[test]
    fn false_domain_gives_empty_graph() {
        let i = Interpretation::new(&[], "false", "E(x,y)", PredicateLibrary::default()).unwrap();
        let out = i.apply(&LabeledGraph::complete(4), &[]).unwrap();
        assert_eq!(out.graph.vertex_count(), 0);
    }

    #[test]
    fn asymmetric_edge_formula_is_rejected() {
        let mut g = LabeledGraph::path(3);
        g.set_label("a", [0]).unwrap();
        let i = Interpretation::new(&[], "true", "a(x) & !x = y", PredicateLibrary::default()).unwrap();
        assert!(matches!(i.apply(&g, &[]), Err(InterpretError::Asymmetric { .. })));
    }

    #[test]
    fn parameter_count_and_range_checked() {
        let g = LabeledGraph::path(3);
        assert!(matches!(
            builtin_induced().apply(&g, &[]),
            Err(InterpretError::ParamCount { expected: 1, found: 0 })
        ));
        assert!(matches!(
            builtin_induced().apply(&g, &[set(8, &[5])]),
            Err(InterpretError::OutOfRange { vertex: 5, n: 3 })
        ));
    }

    #[test]
    fn induced_over_all_params_on_k2() {
        let outs = builtin_induced()
            .apply_all_params(&LabeledGraph::complete(2), DEFAULT_PARAM_CAP, false)
            .unwrap();
        assert_eq!(outs.len(), 4);
        let classes = dedup_isomorphic(outs);
        let sizes: Vec<usize> = classes.iter().map(|a| a.graph.vertex_count()).collect();
        assert_eq!(sizes, [0, 1, 2]);
        assert!(matches!(
            builtin_induced().apply_all_params(&LabeledGraph::path(30), DEFAULT_PARAM_CAP, false),
            Err(InterpretError::Cap { .. })
        ));
    }

    #[test]
    fn parses_file_with_defs_and_labels() {
        let text = "# induced subgraph, then squared\n\
                    params: [Z]\n\
                    def near(x, y) := E(x,y) | exists w. (Z(w) & E(x,w) & E(w,y))\n\
                    domain(x) := Z(x)\n\
                    edge(x, y) := !x = y & near(x, y)\n";
        let i = Interpretation::parse(text, &PredicateLibrary::default()).unwrap();
        assert_eq!(i.params, ["Z"]);
        let g = LabeledGraph::path(4);
        let out = i.apply(&g, &[set(4, &[0, 1, 2])]).unwrap();
        assert!(iso(&out.graph, &LabeledGraph::complete(3)));
        let again = Interpretation::parse(&i.to_source(), &PredicateLibrary::default()).unwrap();
        assert_eq!(again.edge, i.edge);
        assert_eq!(again.domain, i.domain);
    }

    #[test]
    fn parse_errors() {
        let lib = PredicateLibrary::default();
        assert!(Interpretation::parse("params: [Z]\ndomain(x) := Z(x)\n", &lib).is_err());
        assert!(Interpretation::parse("params: [z]\ndomain(x) := true\nedge(x,y) := E(x,y)\n", &lib).is_err());
        assert!(Interpretation::parse("domain(x) := Q(y)\nedge(x,y) := E(x,y)\n", &lib).is_err());
        let ok = Interpretation::parse("loops: drop\ndomain(v) := true\nedge(a,b) := !E(a,b)\n", &lib).unwrap();
        assert!(ok.drop_loops && ok.params.is_empty());
    }

    #[test]
    fn bind_from_labels_reads_matching_labels() {
        let mut g = LabeledGraph::path(3);
        g.set_label("Z", [1, 2]).unwrap();
        let i = builtin_induced();
        let sets = i.bind_from_labels(&g).unwrap();
        let out = i.apply(&g, &sets).unwrap();
        assert_eq!(out.source, [1, 2]);
        assert_eq!(out.graph.label("Z").unwrap().count_ones(..), 2);
        assert!(matches!(
            i.bind_from_labels(&LabeledGraph::path(2)),
            Err(InterpretError::MissingLabel(_))
        ));
    }

    #[test]
    fn pipeline_composes_sources() {
        let g = LabeledGraph::path(5);
        let p = Pipeline::new()
            .then(builtin_induced(), Binding::Explicit(vec![set(5, &[1, 2, 3, 4])]))
            .then(builtin_induced(), Binding::Explicit(vec![set(4, &[1, 3])]))
            .then(builtin_complement(), Binding::Explicit(vec![]));
        let out = compose_pipeline(&p, &g).unwrap();
        assert_eq!(out.source, [2, 4]);
        assert_eq!(out.graph.edge_count(), 1);
        let fan = Pipeline::new().then(builtin_induced(), Binding::All).run(&LabeledGraph::path(3)).unwrap();
        assert_eq!(fan.len(), 8);
    }
}
