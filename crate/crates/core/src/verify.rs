//! Named verification suites. Each runs the mechanical checks of one part
//! of the workbench and returns a [`VerificationReport`].

use crate::corpus::{graph_corpus, rng, FormulaGen, DEFAULT_SEED};
use crate::families::{bichain, compare_library, power, word, Expected, TableDiff};
use crate::graph::build::{
    antichain_member_in, branch_vertices, grid, induced_subgraph, induced_subgraph_ordered, make_tn,
    min_branch_distance, subdivide, tri_corner_grid, uniform_subdivide_utg, upper_tri_grid, SubdivisionPlan,
};
use crate::graph::search::{
    check_induced_embedding, is_antichain, is_induced_subgraph_of, is_isomorphic, AntichainVerdict, SearchOutcome,
};
use crate::graph::LabeledGraph;
use crate::logic::{parse_formula, relativize, tc_naive_encoding, Evaluator, Formula, PredicateLibrary, Valuation};
use crate::report::{CheckRecord, Status, VerificationReport};
use crate::widths::{self, CwdConfig, WidthError};
use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Relativize,
    Tc,
    Word,
    Bichain,
    Split,
    Bpg,
    Power,
    Widths,
    GammaClass,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Relativize,
        Suite::Tc,
        Suite::Word,
        Suite::Bichain,
        Suite::Split,
        Suite::Bpg,
        Suite::Power,
        Suite::Widths,
        Suite::GammaClass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Relativize => "relativize",
            Suite::Tc => "tc",
            Suite::Word => "word",
            Suite::Bichain => "bichain",
            Suite::Split => "split",
            Suite::Bpg => "bpg",
            Suite::Power => "power",
            Suite::Widths => "widths",
            Suite::GammaClass => "gamma-class",
        }
    }

    /// Default for `--max-n`.
    pub fn default_max_n(self) -> usize {
        match self {
            Suite::Relativize => 6,
            Suite::Tc => 10,
            Suite::Word => 3,
            Suite::Bichain => 5,
            Suite::Split => 6,
            Suite::Bpg => 5,
            Suite::Power => 14,
            Suite::Widths => 8,
            Suite::GammaClass => 8,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Size knob; meaning per suite, see [`Suite::default_max_n`].
    pub max_n: Option<usize>,
    /// Number of random cases for randomized suites.
    pub samples: Option<usize>,
    /// Larger budgets: enables the clique-width stretch check.
    pub extended: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            max_n: None,
            samples: None,
            extended: false,
        }
    }
}

/// Result of one check.
pub enum Outcome {
    Observed { observed: String, pass: bool },
    Exhausted(String),
}

impl Outcome {
    pub fn compare<T: PartialEq + fmt::Debug>(expected: &T, observed: &T) -> Self {
        Outcome::Observed {
            observed: format!("{observed:?}"),
            pass: expected == observed,
        }
    }

    pub fn truth(pass: bool, observed: impl Into<String>) -> Self {
        Outcome::Observed {
            observed: observed.into(),
            pass,
        }
    }

    /// Errors count as failures, except budget and cap exhaustion.
    pub fn from_error(e: impl fmt::Display) -> Self {
        let text = e.to_string();
        if text.contains("budget") || text.contains("cap") {
            Outcome::Exhausted(text)
        } else {
            Outcome::truth(false, format!("error: {text}"))
        }
    }
}

struct Runner {
    report: VerificationReport,
}

impl Runner {
    fn new(suite: Suite, opts: &VerifyOptions, max_n: usize) -> Self {
        let mut report = VerificationReport::new(suite.name(), opts.seed);
        report.params.insert("max_n".into(), max_n.to_string());
        report.params.insert("extended".into(), opts.extended.to_string());
        if let Some(s) = opts.samples {
            report.params.insert("samples".into(), s.to_string());
        }
        Runner { report }
    }

    fn check(&mut self, id: String, params: &[(&str, String)], expected: impl Into<String>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = f();
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let (observed, status) = match out {
            Outcome::Observed { observed, pass } => (observed, if pass { Status::Pass } else { Status::Fail }),
            Outcome::Exhausted(why) => (why, Status::Exhausted),
        };
        self.report.push(CheckRecord {
            id,
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>(),
            expected: expected.into(),
            observed,
            status,
            wall_ms,
        });
    }
}

/// Runs one suite.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> VerificationReport {
    let max_n = opts.max_n.unwrap_or(suite.default_max_n());
    let mut r = Runner::new(suite, opts, max_n);
    match suite {
        Suite::Relativize => relativize_suite(&mut r, opts, max_n),
        Suite::Tc => tc_suite(&mut r, opts, max_n),
        Suite::Word => word_suite(&mut r, max_n),
        Suite::Bichain => bichain_suite(&mut r, max_n),
        Suite::Split => split_suite(&mut r, max_n),
        Suite::Bpg => bpg_suite(&mut r, max_n),
        Suite::Power => power_suite(&mut r, max_n),
        Suite::Widths => widths_suite(&mut r, opts, max_n),
        Suite::GammaClass => gamma_suite(&mut r, max_n),
    }
    r.report.finish()
}

fn iso(a: &LabeledGraph, b: &LabeledGraph) -> Outcome {
    match is_isomorphic(a, b, None) {
        SearchOutcome::Found(_) => Outcome::truth(true, "isomorphic"),
        SearchOutcome::NotFound => Outcome::truth(
            false,
            format!("not isomorphic ({} vertices, {} edges)", a.vertex_count(), a.edge_count()),
        ),
        SearchOutcome::BudgetExhausted => Outcome::Exhausted("isomorphism search budget".into()),
    }
}

fn embeds(h: &LabeledGraph, g: &LabeledGraph) -> Outcome {
    match is_induced_subgraph_of(h, g, None) {
        SearchOutcome::Found(_) => Outcome::truth(true, "embeds"),
        SearchOutcome::NotFound => Outcome::truth(false, "no induced copy"),
        SearchOutcome::BudgetExhausted => Outcome::Exhausted("embedding search budget".into()),
    }
}

fn table_outcome(diffs: Result<Vec<TableDiff>, impl fmt::Display>, g: &LabeledGraph) -> Outcome {
    match diffs {
        Err(e) => Outcome::from_error(e),
        Ok(diffs) => {
            let bad: Vec<String> = diffs.iter().filter(|d| !d.is_empty()).map(|d| d.describe(g, 3)).collect();
            if bad.is_empty() {
                Outcome::truth(true, format!("{} predicates equal", diffs.len()))
            } else {
                Outcome::truth(false, bad.join("; "))
            }
        }
    }
}

fn ground_truth_check(r: &mut Runner, id: String, g: &LabeledGraph, lib: &PredicateLibrary, expected: &[Expected]) {
    let names: Vec<&str> = expected.iter().map(|e| e.name).collect();
    r.check(id, &[("predicates", names.join(","))], "tables equal provenance", || {
        table_outcome(compare_library(g, lib, expected), g)
    });
}

fn relativize_suite(r: &mut Runner, opts: &VerifyOptions, max_n: usize) {
    let samples = opts.samples.unwrap_or(200);
    r.check(
        "relativize/random".into(),
        &[("samples", samples.to_string()), ("depth", "3".into()), ("max_vertices", max_n.to_string())],
        "0 disagreements",
        || {
            let mut rg = rng(opts.seed);
            let gen = FormulaGen {
                depth: 3,
                labels: vec!["a".into()],
                set_quantifiers: true,
                closures: false,
            };
            let lib = PredicateLibrary::default();
            let mut failures = vec![];
            let mut satisfied = 0;
            for case in 0..samples {
                let n = rg.gen_range(1..=max_n.max(1));
                let g = crate::corpus::random_graph(&mut rg, n, 0.4, &["a"]);
                let mut a = g.empty_set();
                a.extend((0..n).filter(|_| rg.gen_bool(0.6)));
                let phi = gen.sentence(&mut rg);
                let outcome = (|| -> Result<(bool, bool), String> {
                    let rel = relativize(&phi, "X").map_err(|e| e.to_string())?;
                    let lhs = Evaluator::new(&g, &lib)
                        .and_then(|mut ev| ev.evaluate(&rel, &Valuation::new().set("X", a.clone())))
                        .map_err(|e| e.to_string())?;
                    let sub = induced_subgraph(&g, &a).map_err(|e| e.to_string())?;
                    let rhs = Evaluator::new(&sub, &lib)
                        .and_then(|mut ev| ev.evaluate(&phi, &Valuation::new()))
                        .map_err(|e| e.to_string())?;
                    Ok((lhs == rhs, rhs))
                })();
                match outcome {
                    Ok((true, holds)) => satisfied += usize::from(holds),
                    Ok((false, _)) => failures.push(format!("case {case}: {phi}")),
                    Err(e) => failures.push(format!("case {case}: error {e}")),
                }
            }
            let observed = match failures.first() {
                None => format!("0 of {samples} disagree ({satisfied} true)"),
                Some(first) => format!("{} of {samples} disagree, first {first}", failures.len()),
            };
            Outcome::truth(failures.is_empty(), observed)
        },
    );
}

/// Compares `TC[u,v: body](x,y)` with its set-quantified encoding on all pairs.
pub fn tc_agreement(g: &LabeledGraph, body: &Formula) -> Result<usize, String> {
    let lib = PredicateLibrary::default();
    let tc = Formula::Tc {
        u: "u".into(),
        v: "v".into(),
        body: Box::new(body.clone()),
        a: "x".into(),
        b: "y".into(),
    };
    let naive = tc_naive_encoding("u", "v", body, "x", "y").map_err(|e| e.to_string())?;
    let mut ev = Evaluator::new(g, &lib).map_err(|e| e.to_string())?;
    let q1 = ev.compile_open(&tc).map_err(|e| e.to_string())?;
    let q2 = ev.compile_open(&naive).map_err(|e| e.to_string())?;
    let n = g.vertex_count();
    let mut disagree = 0;
    for x in 0..n {
        for y in 0..n {
            let val = Valuation::new().vertex("x", x).vertex("y", y);
            let a = ev.eval(&q1, &val).map_err(|e| e.to_string())?;
            let b = ev.eval(&q2, &val).map_err(|e| e.to_string())?;
            disagree += usize::from(a != b);
        }
    }
    Ok(disagree)
}

pub const TC_BODIES: [&str; 3] = ["E(u,v)", "E(u,v) & !a(v)", "E(u,v) & a(u) & !u = v"];

fn tc_suite(r: &mut Runner, opts: &VerifyOptions, max_n: usize) {
    let per_size = opts.samples.unwrap_or(2);
    let graphs = graph_corpus(opts.seed, max_n, per_size, &["a"]);
    for (bi, text) in TC_BODIES.iter().enumerate() {
        let body = parse_formula(text).expect("fixed body parses");
        r.check(
            format!("tc/body{bi}"),
            &[("body", text.to_string()), ("graphs", graphs.len().to_string()), ("max_vertices", max_n.to_string())],
            "0 disagreements",
            || {
                let mut total = 0;
                for g in &graphs {
                    match tc_agreement(g, &body) {
                        Ok(d) => total += d,
                        Err(e) => return Outcome::from_error(e),
                    }
                }
                Outcome::truth(total == 0, format!("{total} disagreeing pairs"))
            },
        );
    }
}

/// Patterns whose repetitions the word suite exercises.
pub const WORD_PATTERNS: [&str; 4] = ["12", "102", "2", "01"];

/// `H_n` for the shortest prefix of `pattern^omega` that supports it.
pub fn hn_for_pattern(pattern: &str, n: usize) -> Result<word::WordGraph, crate::families::FamilyError> {
    let mut len = 1;
    loop {
        match word::build_hn(&word::AlphaPrefix::repeat(pattern, len)?, n) {
            Err(crate::families::FamilyError::PrefixTooShort(_)) if len < 4096 => len += 1,
            other => return other,
        }
    }
}

fn word_suite(r: &mut Runner, max_n: usize) {
    let lib = word::word_predicates();
    for pat in WORD_PATTERNS {
        for n in 1..=max_n {
            let key = format!("word/({pat})/n={n:02}");
            let params = [("alpha", format!("({pat})*")), ("n", n.to_string())];
            let w = match hn_for_pattern(pat, n) {
                Ok(w) => w,
                Err(e) => {
                    r.check(format!("{key}/build"), &params, "H_n", || Outcome::from_error(e));
                    continue;
                }
            };
            if n <= 2 {
                ground_truth_check(r, format!("{key}/ground-truth"), &w.graph, &lib, &word::ground_truth(&w));
            }
            let mut psi = None;
            r.check(format!("{key}/delta"), &params, "Delta and Gamma apply", || match word::run_psi(&w) {
                Ok(out) => {
                    let observed = format!(
                        "Delta: {} vertices, {} pruned; contracted: {} vertices",
                        out.delta.graph.vertex_count(),
                        out.pruned,
                        out.contracted.vertex_count()
                    );
                    psi = Some(out);
                    Outcome::truth(true, observed)
                }
                Err(e) => Outcome::from_error(e),
            });
            let Some(out) = psi else { continue };
            let u = upper_tri_grid(2 * n);
            r.check(format!("{key}/contracted-is-U"), &params, format!("U_{}", 2 * n), || iso(&out.contracted, &u));
            r.check(format!("{key}/gamma-is-U"), &params, format!("U_{}", 2 * n), || iso(&out.gamma, &u));
            r.check(format!("{key}/gamma-agrees"), &params, "Gamma result = combinatorial contraction", || {
                iso(&out.gamma, &out.contracted)
            });
            r.check(format!("{key}/grid-embeds"), &params, format!("grid({n},{n}) induced"), || {
                embeds(&grid(n, n), &out.gamma)
            });
        }
    }
}

fn bichain_suite(r: &mut Runner, max_n: usize) {
    let lib = bichain::bichain_predicates();
    for n in 4..=7 {
        let params = [("n", n.to_string())];
        match bichain::build_zn(n, true) {
            Ok(z) => ground_truth_check(r, format!("bichain/ground-truth/Z{n:02}"), &z, &lib, &bichain::ground_truth(n)),
            Err(e) => r.check(format!("bichain/ground-truth/Z{n:02}"), &params, "Z_n", || Outcome::from_error(e)),
        }
    }
    for n in 1..=max_n {
        let params = [("n", n.to_string())];
        r.check(format!("bichain/psi/n={n:02}"), &params, format!("Psi(Z_{}) = grid({n},{n})", n + 2), || {
            let run = || -> Result<LabeledGraph, crate::families::FamilyError> {
                let z = bichain::build_zn(n + 2, true)?;
                let psi = bichain::psi_bichain();
                Ok(psi.apply(&z, &psi.bind_from_labels(&z)?)?.graph)
            };
            match run() {
                Ok(g) => iso(&g, &grid(n, n)),
                Err(e) => Outcome::from_error(e),
            }
        });
    }
}

/// The side of `Z_n` holding `z_{1,1}` in its bipartition.
pub fn zn_side(z: &LabeledGraph) -> crate::graph::VertexSet {
    let colour = z.bipartition().expect("Z_n is bipartite");
    let mut side = z.empty_set();
    side.extend((0..z.vertex_count()).filter(|&v| colour[v] == colour[0]));
    side
}

fn split_suite(r: &mut Runner, max_n: usize) {
    for n in 1..=max_n {
        let params = [("n", n.to_string())];
        r.check(format!("split/round-trip/n={n:02}"), &params, "E(Z_n)", || {
            let run = || -> Result<(LabeledGraph, LabeledGraph), crate::families::FamilyError> {
                let z = bichain::build_zn(n, false)?;
                let s = bichain::split_from_bichain(&z, &zn_side(&z))?;
                let back = bichain::psi_split().apply(&s, &[])?.graph;
                Ok((z, back))
            };
            match run() {
                Ok((z, back)) => {
                    let same = back.vertex_count() == z.vertex_count()
                        && back.edge_count() == z.edge_count()
                        && z.edges().all(|(u, v)| back.has_edge(u, v));
                    Outcome::truth(same, format!("{} edges, equal = {same}", back.edge_count()))
                }
                Err(e) => Outcome::from_error(e),
            }
        });
    }
}

fn bpg_suite(r: &mut Runner, max_n: usize) {
    for n in 1..=max_n {
        let params = [("n", n.to_string()), ("alpha", "(2)*".into())];
        let run = || -> Result<(LabeledGraph, LabeledGraph), crate::families::FamilyError> {
            let seg = word::palpha_segment(&word::AlphaPrefix::repeat("2", n)?, n, n)?;
            Ok((bichain::build_pn(n)?, seg))
        };
        match run() {
            Ok((p, seg)) => {
                r.check(format!("bpg/explicit/n={n:02}"), &params, "P_n induced via explicit map", || {
                    let ok = check_induced_embedding(&p, &seg, &bichain::pn_word_embedding(n));
                    Outcome::truth(ok, if ok { "valid" } else { "map breaks an edge or non-edge" })
                });
                r.check(format!("bpg/search/n={n:02}"), &params, "P_n induced", || embeds(&p, &seg));
            }
            Err(e) => r.check(format!("bpg/build/n={n:02}"), &params, "graphs", || Outcome::from_error(e)),
        }
    }
}

/// `(k, n)` pairs for the explicit bipartite permutation embedding.
pub const POWER_EMBEDDINGS: [(usize, usize); 3] = [(2, 12), (2, 20), (3, 40)];

fn power_suite(r: &mut Runner, max_n: usize) {
    let lib = power::power_predicates();
    r.check("power/D12-edges".into(), &[("n", "12".into())], "30", || {
        match power::build_dn(12) {
            Ok(d) => Outcome::compare(&30, &d.edge_count()),
            Err(e) => Outcome::from_error(e),
        }
    });
    r.check("power/odd".into(), &[("n", "9..=30".into())], "odd = the odd numbers", || {
        let mut bad = vec![];
        for n in 9..=30 {
            let d = power::build_dn(n).expect("n >= 1");
            let got = Evaluator::new(&d, &lib).and_then(|mut ev| ev.materialize("odd").map(|t| t.tuples()));
            let want: Vec<Vec<usize>> = (0..n).step_by(2).map(|v| vec![v]).collect();
            match got {
                Ok(t) if t == want => {}
                Ok(_) => bad.push(n.to_string()),
                Err(e) => return Outcome::from_error(e),
            }
        }
        Outcome::truth(bad.is_empty(), format!("wrong for n in [{}]", bad.join(",")))
    });
    for n in (10..=20).step_by(2) {
        let d = power::build_dn(n).expect("n >= 1");
        ground_truth_check(r, format!("power/ground-truth/D{n:02}"), &d, &lib, &power::ground_truth(n));
    }
    for n in 1..=max_n {
        r.check(format!("power/between/n={n:02}"), &[("n", n.to_string())], "BETWEEN = exists-P form", || {
            let d = power::build_dn(n).expect("n >= 1");
            let run = || -> Result<usize, crate::logic::EvalError> {
                let mut ev = Evaluator::new(&d, &lib)?;
                let fast = ev.materialize("between")?.clone();
                let slow = ev.materialize("between_sets")?;
                Ok((0..n)
                    .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| [x, y, z])))
                    .filter(|t| fast.get(t) != slow.get(t))
                    .count())
            };
            match run() {
                Ok(m) => Outcome::truth(m == 0, format!("{m} disagreeing triples")),
                Err(e) => Outcome::from_error(e),
            }
        });
    }
    for (k, n) in POWER_EMBEDDINGS {
        let params = [("k", k.to_string()), ("n", n.to_string())];
        r.check(format!("power/embedding/k={k}/n={n:02}"), &params, format!("P_{k} induced in Phi(D_{n})"), || {
            let run = || -> Result<bool, crate::families::FamilyError> {
                let out = power::apply_phi(&power::build_dn(n)?)?;
                let map = power::embedding_map(k, &power::expected_embedding(k, n)?);
                Ok(check_induced_embedding(&bichain::build_pn(k)?, &out.graph, &map))
            };
            match run() {
                Ok(ok) => Outcome::truth(ok, if ok { "valid" } else { "map breaks an edge or non-edge" }),
                Err(e) => Outcome::from_error(e),
            }
        });
    }
    r.check("power/search/k=2/n=12".into(), &[("k", "2".into()), ("n", "12".into())], "P_2 induced", || {
        match power::build_dn(12).map_err(|e| e.to_string()).and_then(|d| power::apply_phi(&d).map_err(|e| e.to_string())) {
            Ok(out) => embeds(&bichain::build_pn(2).expect("k >= 1"), &out.graph),
            Err(e) => Outcome::from_error(e),
        }
    });
    r.check("power/cwd-factor-bound".into(), &[("n", "16".into()), ("max_vertices", "7".into())], "cwd <= 2(log2 t + 4)", || {
        let d = power::build_dn(16).expect("n >= 1");
        let mut pieces: Vec<Vec<usize>> = vec![];
        for lo in 0..10 {
            let window: Vec<usize> = (lo..lo + 7).collect();
            pieces.push(window.clone());
            pieces.push(window.iter().copied().filter(|&v| v != lo + 3).collect());
            pieces.push((lo..16).step_by(2).take(7).collect());
        }
        let mut worst = 0.0f64;
        for keep in &pieces {
            let h = induced_subgraph_ordered(&d, keep).expect("in range");
            let t = match power::longest_factor_length(&h) {
                Ok(t) => t,
                Err(e) => return Outcome::from_error(e),
            };
            let k = match widths::cliquewidth_exact(&h, &CwdConfig::default()) {
                Ok(res) => res.k,
                Err(e) => return Outcome::from_error(e),
            };
            worst = worst.max(k as f64 - power::factor_cwd_bound(t));
        }
        Outcome::truth(worst <= 0.0, format!("{} pieces, max(cwd - bound) = {worst:.2}", pieces.len()))
    });
}

fn binary_tree(n: usize) -> LabeledGraph {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
    LabeledGraph::from_edges(n, &edges).expect("in range")
}

fn twd_outcome(g: &LabeledGraph, want: usize) -> Outcome {
    match widths::treewidth_exact(g, None) {
        Ok((w, td)) => match widths::verify_tree_decomposition(g, &td) {
            Ok(()) if td.width() == w => Outcome::compare(&want, &w),
            Ok(()) => Outcome::truth(false, format!("{w}, witness width {}", td.width())),
            Err(v) => Outcome::truth(false, format!("{w}, invalid witness: {v}")),
        },
        Err(e) => Outcome::from_error(e),
    }
}

/// Exact clique-width whose witness verifies.
pub fn checked_cwd(g: &LabeledGraph, config: &CwdConfig) -> Result<usize, WidthError> {
    let res = widths::cliquewidth_exact(g, config)?;
    if widths::verify_k_expression(g, &res.expr, res.k)? {
        Ok(res.k)
    } else {
        Err(WidthError::Malformed(format!("witness for k = {} does not build the graph", res.k)))
    }
}

fn cwd_outcome(g: &LabeledGraph, want: usize, config: &CwdConfig) -> Outcome {
    match checked_cwd(g, config) {
        Ok(k) => Outcome::compare(&want, &k),
        Err(e) => Outcome::from_error(e),
    }
}

fn widths_suite(r: &mut Runner, opts: &VerifyOptions, max_n: usize) {
    let twd_cases = [("tree7", binary_tree(7), 1), ("K4", LabeledGraph::complete(4), 3), ("grid3x3", grid(3, 3), 3)];
    for (name, g, want) in &twd_cases {
        r.check(format!("widths/twd/{name}"), &[("graph", name.to_string())], want.to_string(), || twd_outcome(g, *want));
    }
    let cwd_cases = [
        ("K1", LabeledGraph::new(1), 1),
        ("K3", LabeledGraph::complete(3), 2),
        ("C5", LabeledGraph::cycle(5), 3),
        ("C4", LabeledGraph::cycle(4), 2),
    ];
    for (name, g, want) in &cwd_cases {
        r.check(format!("widths/cwd/{name}"), &[("graph", name.to_string())], want.to_string(), || {
            cwd_outcome(g, *want, &CwdConfig::default())
        });
    }
    let corpus = graph_corpus(opts.seed, max_n, opts.samples.unwrap_or(10), &[]);
    for t in 1..=3 {
        let params = [("t", t.to_string()), ("graphs", corpus.len().to_string())];
        r.check(format!("widths/subdivision-extension/t={t}"), &params, "valid, width <= max(k,3)", || {
            for (i, g) in corpus.iter().enumerate() {
                let run = || -> Result<Option<String>, String> {
                    let (k, td) = widths::treewidth_exact(g, None).map_err(|e| e.to_string())?;
                    let ext = widths::extend_decomposition_for_subdivision(g, &td, t).map_err(|e| e.to_string())?;
                    let h = subdivide(g, t).map_err(|e| e.to_string())?;
                    if let Err(v) = widths::verify_tree_decomposition(&h, &ext) {
                        return Ok(Some(format!("graph {i}: {v}")));
                    }
                    Ok((ext.width() > k.max(3)).then(|| format!("graph {i}: width {} > max({k},3)", ext.width())))
                };
                match run() {
                    Ok(None) => {}
                    Ok(Some(why)) => return Outcome::truth(false, why),
                    Err(e) => return Outcome::from_error(e),
                }
            }
            Outcome::truth(true, format!("{} decompositions verified", corpus.len()))
        });
    }
    let mut twd_cwd: Vec<(usize, usize)> = vec![];
    r.check(
        "widths/cwd-twd-bound".into(),
        &[("graphs", corpus.len().to_string()), ("max_vertices", max_n.to_string())],
        "cwd <= 4*2^(twd-1)+1",
        || {
            for g in &corpus {
                let tw = match widths::treewidth_exact(g, None) {
                    Ok((w, _)) => w,
                    Err(e) => return Outcome::from_error(e),
                };
                let cw = match checked_cwd(g, &CwdConfig::default()) {
                    Ok(k) => k,
                    Err(e) => return Outcome::from_error(e),
                };
                twd_cwd.push((tw, cw));
            }
            let bad = twd_cwd.iter().filter(|&&(tw, cw)| cw as f64 > widths::cwd_bound_from_twd(tw)).count();
            Outcome::truth(bad == 0, format!("{bad} of {} violate", twd_cwd.len()))
        },
    );
    r.check(
        "widths/monotone".into(),
        &[("graphs", corpus.len().min(12).to_string())],
        "widths do not grow under vertex deletion",
        || {
            for g in corpus.iter().rev().take(12) {
                let n = g.vertex_count();
                let whole = (widths::treewidth_exact(g, None), checked_cwd(g, &CwdConfig::default()));
                let (Ok((tw, _)), Ok(cw)) = whole else {
                    return Outcome::truth(false, "width computation failed");
                };
                for drop in 0..n {
                    let keep: Vec<usize> = (0..n).filter(|&v| v != drop).collect();
                    if keep.is_empty() {
                        continue;
                    }
                    let h = induced_subgraph_ordered(g, &keep).expect("in range");
                    let part = (widths::treewidth_exact(&h, None), checked_cwd(&h, &CwdConfig::default()));
                    match part {
                        (Ok((t2, _)), Ok(c2)) if t2 <= tw && c2 <= cw => {}
                        _ => return Outcome::truth(false, format!("deleting {drop} from a {n}-vertex graph")),
                    }
                }
            }
            Outcome::truth(true, "monotone")
        },
    );
    if opts.extended {
        r.check("widths/cwd/grid3x3".into(), &[("graph", "grid3x3".into()), ("budget", "extended".into())], "4", || {
            cwd_outcome(&grid(3, 3), 4, &CwdConfig::extended())
        });
    }
}

/// Connected pieces of `g`: the first `size` vertices in breadth-first order from each vertex.
fn bfs_pieces(g: &LabeledGraph, size: usize) -> Vec<Vec<usize>> {
    (0..g.vertex_count())
        .map(|s| {
            let mut seen = vec![false; g.vertex_count()];
            let mut order = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < order.len() && order.len() < size {
                for w in g.neighbors(order[i]).ones() {
                    if !seen[w] && order.len() < size {
                        seen[w] = true;
                        order.push(w);
                    }
                }
                i += 1;
            }
            order.sort_unstable();
            order
        })
        .collect()
}

fn gamma_suite(r: &mut Runner, max_n: usize) {
    for n in 3..=max_n.max(3) {
        r.check(format!("gamma/Tn/n={n:02}"), &[("n", n.to_string())], format!("3-regular, < {}", 4 * n * n), || {
            match make_tn(n) {
                Ok(t) => Outcome::truth(
                    t.is_regular(3) && t.vertex_count() < 4 * n * n,
                    format!("{} vertices, 3-regular = {}", t.vertex_count(), t.is_regular(3)),
                ),
                Err(e) => Outcome::from_error(e),
            }
        });
    }
    let antichain = |graphs: Result<Vec<LabeledGraph>, crate::graph::GraphError>| match graphs {
        Err(e) => Outcome::from_error(e),
        Ok(gs) => match is_antichain(&gs, None) {
            AntichainVerdict::Antichain => Outcome::truth(true, "antichain"),
            AntichainVerdict::Comparable(i, j) => Outcome::truth(false, format!("member {i} embeds in member {j}")),
            AntichainVerdict::BudgetExhausted(i, j) => Outcome::Exhausted(format!("search budget on ({i},{j})")),
        },
    };
    r.check("gamma/antichain/I".into(), &[("n", "1..=6".into())], "antichain", || {
        antichain((1..=6).map(antichain_member_in).collect())
    });
    r.check("gamma/antichain/tri-corner".into(), &[("n", "3..=5".into())], "antichain", || {
        antichain((3..=5).map(tri_corner_grid).collect())
    });
    for n in 3..=4 {
        for t in 2..=4 {
            let params = [("n", n.to_string()), ("t", t.to_string())];
            r.check(format!("gamma/branch/n={n}/t={t}"), &params, format!("originals, mn = {t}"), || {
                let run = || -> Result<(bool, usize), crate::graph::GraphError> {
                    let tn = make_tn(n)?;
                    let h = subdivide(&tn, t)?;
                    let b: Vec<usize> = branch_vertices(&h)?.ones().collect();
                    Ok((b == (0..tn.vertex_count()).collect::<Vec<_>>(), min_branch_distance(&h)?))
                };
                match run() {
                    Ok((same, mn)) => Outcome::truth(same && mn == t, format!("branch = originals: {same}, mn = {mn}")),
                    Err(e) => Outcome::from_error(e),
                }
            });
        }
    }
    r.check("gamma/utg-contraction".into(), &[("r", "3".into())], "contracts to U_3", || {
        match uniform_subdivide_utg(&SubdivisionPlan::new(3, [(1, 3), (2, 4)])) {
            Ok((g, o)) => match crate::graph::build::contract_subdivision(&g, &o) {
                Ok(c) => iso(&c, &upper_tri_grid(3)),
                Err(e) => Outcome::from_error(e),
            },
            Err(e) => Outcome::from_error(e),
        }
    });
    r.check("gamma/cwd-branch-bound".into(), &[("host", "T_3 subdivided 3 times".into()), ("piece", "8".into())], "cwd <= 3*2^(m-1)", || {
        let h = match make_tn(3).and_then(|t| subdivide(&t, 3)) {
            Ok(h) => h,
            Err(e) => return Outcome::from_error(e),
        };
        let mut checked = 0;
        for keep in bfs_pieces(&h, 8) {
            let piece = induced_subgraph_ordered(&h, &keep).expect("in range");
            let b = (0..piece.vertex_count()).filter(|&v| piece.degree(v) == 3).count();
            let m = b.max(3);
            match checked_cwd(&piece, &CwdConfig::default()) {
                Ok(k) if k <= 3 * (1 << (m - 1)) => checked += 1,
                Ok(k) => return Outcome::truth(false, format!("cwd {k} with {b} branch vertices")),
                Err(e) => return Outcome::from_error(e),
            }
        }
        Outcome::truth(true, format!("{checked} pieces within bound"))
    });
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>(), Ok(s));
        }
        assert!("gamma".parse::<Suite>().is_err());
    }

    #[test]
    fn from_error_separates_exhaustion() {
        assert!(matches!(Outcome::from_error(WidthError::Budget(5)), Outcome::Exhausted(_)));
        assert!(matches!(Outcome::from_error("bad input"), Outcome::Observed { pass: false, .. }));
    }

    #[test]
    fn small_suites_pass_and_are_deterministic() {
        let opts = VerifyOptions {
            max_n: Some(4),
            samples: Some(20),
            ..VerifyOptions::default()
        };
        for suite in [Suite::Relativize, Suite::Split, Suite::Widths, Suite::GammaClass] {
            let a = run_suite(suite, &opts);
            assert!(a.passed(), "{}", a.summary());
            let b = run_suite(suite, &opts);
            let key = |r: &VerificationReport| {
                r.records.iter().map(|c| (c.id.clone(), c.observed.clone(), c.status)).collect::<Vec<_>>()
            };
            assert_eq!(key(&a), key(&b));
        }
    }

    #[test]
    fn zn_side_is_a_colour_class() {
        let z = bichain::build_zn(3, false).unwrap();
        let side = zn_side(&z);
        assert!(side.contains(0));
        for (u, v) in z.edges() {
            assert_ne!(side.contains(u), side.contains(v));
        }
    }
}
