//! `msogrid`: build graph families, evaluate formulas, apply interpretations,
//! compute widths and run the verification suites.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or input error, 3 budget or cap exhausted.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use msogrid::corpus::DEFAULT_SEED;
use msogrid::families::{bichain, power, word};
use msogrid::graph::build;
use msogrid::graph::LabeledGraph;
use msogrid::interpret::{self, Interpretation, InterpretError};
use msogrid::logic::{parse_formula_in, EvalError, Evaluator, FreeVars, PredicateLibrary, Table, Valuation};
use msogrid::verify::{self, Suite, VerifyOptions};
use msogrid::widths::{self, CwdConfig, KExpression, TreeDecomposition, WidthError};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "msogrid", version, about = "Graph families, MSO evaluation, interpretations and width oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph from one of the families.
    Gen(GenArgs),
    /// Evaluate a formula or dump a predicate table.
    Eval(EvalArgs),
    /// Apply an interpretation or a pipeline of them.
    Apply(ApplyArgs),
    /// Run a verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Compute or certify treewidth or clique-width.
    Width(WidthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Grid,
    Utg,
    Word,
    Bichain,
    Split,
    Bpg,
    Power,
    #[value(name = "Tn", alias = "tn")]
    Tn,
    Subdiv,
    #[value(name = "In", alias = "in")]
    In,
    TriGrid,
}

#[derive(Args)]
struct Output {
    /// Output file; standard output if absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Emit DOT: to standard output, or next to `--out` with a `.dot` extension.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Main size parameter.
    #[arg(long)]
    n: usize,
    /// Number of grid rows (defaults to `n`).
    #[arg(long)]
    m: Option<usize>,
    /// Word pattern over {0,1,2}, repeated to the shortest prefix that builds `H_n`.
    #[arg(long)]
    alpha: Option<String>,
    /// Subdivision count for `subdiv`.
    #[arg(long, default_value_t = 1)]
    t: usize,
    /// Graph to subdivide for `subdiv`; `T_n` if absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Attach the construction labels (bichain family).
    #[arg(long)]
    labels: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Predicate library: a `.mso` file, or one of `word`, `bichain`, `power`.
    #[arg(long)]
    library: Option<String>,
    /// Formula text.
    #[arg(long, conflicts_with = "predicate")]
    formula: Option<String>,
    /// Library predicate; without `--at` its full table is printed.
    #[arg(long)]
    predicate: Option<String>,
    /// Assignment such as `x=3, Y={1,2}`; values are vertex names or indices.
    #[arg(long, default_value = "")]
    at: String,
}

#[derive(Args)]
struct ApplyArgs {
    /// Interpretation file or builtin (`complement`, `induced`, `psi-bichain`,
    /// `psi-split`, `phi-power`, `delta`, `gamma`); repeat for a pipeline.
    #[arg(long = "interp", required_unless_present = "pipeline")]
    interps: Vec<String>,
    /// Comma-separated pipeline, applied left to right.
    #[arg(long, value_delimiter = ',', conflicts_with = "interps")]
    pipeline: Vec<String>,
    #[arg(long)]
    graph: PathBuf,
    /// Parameter values such as `A={1,2}, B={3}` for a single stage;
    /// otherwise parameters are read from labels of the same name.
    #[arg(long)]
    bind: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: Suite,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of random samples or graphs per size, where a suite uses them.
    #[arg(long)]
    samples: Option<usize>,
    /// Include the checks that need the extended search budget.
    #[arg(long)]
    extended: bool,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Do not print the per-check summary on standard error.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    Twd,
    Cwd,
}

#[derive(Args)]
struct WidthArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    measure: Measure,
    /// Compute the exact width and print a certificate.
    #[arg(long, conflicts_with = "certify")]
    exact: bool,
    /// Check a certificate file: a tree decomposition or a k-expression.
    #[arg(long)]
    certify: Option<PathBuf>,
    /// Label bound for `--certify` with cwd; the certificate's own label count if absent.
    #[arg(long)]
    k: Option<usize>,
    /// Use the extended clique-width cap and budget.
    #[arg(long)]
    extended: bool,
    /// Write the certificate from `--exact` here.
    #[arg(long)]
    witness: Option<PathBuf>,
}

/// Errors that map to exit code 3 rather than 2.
fn is_exhaustion(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(c.downcast_ref::<WidthError>(), Some(WidthError::Cap { .. } | WidthError::Budget(_)))
            || matches!(c.downcast_ref::<EvalError>(), Some(EvalError::SetCap { .. }))
            || matches!(c.downcast_ref::<InterpretError>(), Some(InterpretError::Cap { .. }))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Width(a) => cmd_width(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_exhaustion(&e) { 3 } else { 2 })
        }
    }
}

fn read_graph(path: &Path) -> Result<LabeledGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    LabeledGraph::from_json_str(&text).with_context(|| format!("parsing graph {}", path.display()))
}

fn write_graph(g: &LabeledGraph, out: &Output) -> Result<()> {
    match &out.out {
        Some(path) => {
            fs::write(path, g.to_json_string()).with_context(|| format!("writing {}", path.display()))?;
            if out.dot {
                let dot = path.with_extension("dot");
                fs::write(&dot, g.to_dot()).with_context(|| format!("writing {}", dot.display()))?;
            }
        }
        None if out.dot => print!("{}", g.to_dot()),
        None => println!("{}", g.to_json_string()),
    }
    eprintln!("{} vertices, {} edges", g.vertex_count(), g.edge_count());
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<u8> {
    let n = a.n;
    let g = match a.family {
        Family::Grid => build::grid(a.m.unwrap_or(n), n),
        Family::Utg => build::upper_tri_grid(n),
        Family::Word => {
            let alpha = a.alpha.as_deref().ok_or_else(|| anyhow!("--family word needs --alpha"))?;
            verify::hn_for_pattern(alpha, n)?.graph
        }
        Family::Bichain => bichain::build_zn(n, a.labels)?,
        Family::Split => {
            let z = bichain::build_zn(n, false)?;
            bichain::split_from_bichain(&z, &verify::zn_side(&z))?
        }
        Family::Bpg => bichain::build_pn(n)?,
        Family::Power => power::build_dn(n)?,
        Family::Tn => build::make_tn(n)?,
        Family::Subdiv => {
            let base = match &a.input {
                Some(p) => read_graph(p)?,
                None => build::make_tn(n)?,
            };
            build::subdivide(&base, a.t)?
        }
        Family::In => build::antichain_member_in(n)?,
        Family::TriGrid => build::tri_corner_grid(n)?,
    };
    write_graph(&g, &a.output)?;
    Ok(0)
}

fn load_library(spec: Option<&str>) -> Result<PredicateLibrary> {
    Ok(match spec {
        None => PredicateLibrary::default(),
        Some("word") => word::word_predicates(),
        Some("bichain") => bichain::bichain_predicates(),
        Some("power") => power::power_predicates(),
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            PredicateLibrary::parse(&text).with_context(|| format!("parsing {path}"))?
        }
    })
}

fn format_table(g: &LabeledGraph, t: &Table) -> String {
    let items: Vec<String> = t
        .tuples()
        .iter()
        .map(|tuple| {
            let names: Vec<String> = tuple.iter().map(|&v| g.name(v)).collect();
            if names.len() == 1 {
                names[0].clone()
            } else {
                format!("({})", names.join(","))
            }
        })
        .collect();
    format!("{{{}}}", items.join(", "))
}

fn cmd_eval(a: EvalArgs) -> Result<u8> {
    let g = read_graph(&a.graph)?;
    let lib = load_library(a.library.as_deref())?;
    let mut ev = Evaluator::new(&g, &lib)?;
    let val = Valuation::parse(&a.at, &g).map_err(|e| anyhow!("bad assignment: {e}"))?;
    let text = match (&a.formula, &a.predicate) {
        (Some(f), _) => f.clone(),
        (None, Some(p)) => {
            let def = lib.get(p).ok_or_else(|| anyhow!("library has no predicate `{p}`"))?;
            if a.at.trim().is_empty() {
                let table = ev.materialize(p)?;
                if table.arity == 0 {
                    println!("{}", table.get(&[]));
                } else {
                    println!("{}", format_table(&g, table));
                }
                return Ok(0);
            }
            let params: Vec<&str> = def.params.iter().map(|q| q.name.as_str()).collect();
            format!("{p}({})", params.join(", "))
        }
        (None, None) => bail!("give --formula or --predicate"),
    };
    let f = parse_formula_in(&text, &lib, FreeVars::Any).context("parsing formula")?;
    println!("{}", ev.evaluate(&f, &val)?);
    Ok(0)
}

fn load_interp(spec: &str) -> Result<Interpretation> {
    Ok(match spec {
        "complement" => interpret::builtin_complement(),
        "induced" => interpret::builtin_induced(),
        "psi-bichain" => bichain::psi_bichain(),
        "psi-split" => bichain::psi_split(),
        "phi-power" => power::phi_power(),
        "delta" => word::delta_interp(),
        "gamma" => word::gamma_contract_interp(),
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            Interpretation::parse(&text, &PredicateLibrary::default()).with_context(|| format!("parsing {path}"))?
        }
    })
}

fn cmd_apply(a: ApplyArgs) -> Result<u8> {
    let g = read_graph(&a.graph)?;
    let names = if a.pipeline.is_empty() { &a.interps } else { &a.pipeline };
    let stages = names.iter().map(|s| load_interp(s)).collect::<Result<Vec<_>>>()?;
    if a.bind.is_some() && stages.len() != 1 {
        bail!("--bind applies to a single interpretation");
    }
    let mut current = g;
    for (i, interp) in stages.iter().enumerate() {
        let params = match &a.bind {
            Some(text) => {
                let val = Valuation::parse(text, &current).map_err(|e| anyhow!("bad binding: {e}"))?;
                interp
                    .params
                    .iter()
                    .map(|p| val.sets.get(p).cloned().ok_or_else(|| anyhow!("no value for parameter `{p}`")))
                    .collect::<Result<Vec<_>>>()?
            }
            None => interp.bind_from_labels(&current)?,
        };
        current = interp
            .apply(&current, &params)
            .with_context(|| format!("stage {} ({})", i + 1, names[i]))?
            .graph;
    }
    write_graph(&current, &a.output)?;
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let opts = VerifyOptions {
        seed: a.seed,
        max_n: a.max_n,
        samples: a.samples,
        extended: a.extended,
    };
    let report = verify::run_suite(a.suite, &opts);
    if !a.quiet {
        eprint!("{}", report.summary());
    }
    match &a.out {
        Some(path) => fs::write(path, report.to_json_string()).with_context(|| format!("writing {}", path.display()))?,
        None => println!("{}", report.to_json_string()),
    }
    Ok(report.exit_code() as u8)
}

fn cmd_width(a: WidthArgs) -> Result<u8> {
    let g = read_graph(&a.graph)?;
    let config = if a.extended { CwdConfig::extended() } else { CwdConfig::default() };
    if let Some(path) = &a.certify {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let ok = match a.measure {
            Measure::Twd => {
                let td: TreeDecomposition = serde_json::from_str(&text).context("parsing tree decomposition")?;
                match widths::verify_tree_decomposition(&g, &td) {
                    Ok(()) => {
                        println!("valid tree decomposition of width {}", td.width());
                        true
                    }
                    Err(v) => {
                        println!("invalid: {v}");
                        false
                    }
                }
            }
            Measure::Cwd => {
                let e: KExpression = serde_json::from_str(&text).context("parsing k-expression")?;
                let k = a.k.unwrap_or_else(|| e.max_label());
                match widths::verify_k_expression(&g, &e, k) {
                    Ok(true) => {
                        println!("valid {k}-expression");
                        true
                    }
                    Ok(false) => {
                        println!("invalid: the expression builds a different graph");
                        false
                    }
                    Err(WidthError::Malformed(why)) => {
                        println!("invalid: {why}");
                        false
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        };
        return Ok(if ok { 0 } else { 1 });
    }
    if !a.exact {
        bail!("give --exact or --certify");
    }
    let (width, witness) = match a.measure {
        Measure::Twd => {
            let (w, td) = widths::treewidth_exact(&g, None)?;
            (w, td.to_json_string())
        }
        Measure::Cwd => {
            let r = widths::cliquewidth_exact(&g, &config)?;
            (r.k, r.expr.to_json_string())
        }
    };
    println!("{width}");
    if let Some(path) = &a.witness {
        fs::write(path, witness).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}
