//! A direct, unoptimized evaluator used to cross-check [`Evaluator`](super::Evaluator).
//!
//! Predicates are expanded at every call, nothing is tabulated, and `TC` /
//! `BETWEEN` are evaluated through their set-quantified encodings. Only
//! suitable for graphs of a dozen vertices or so.

use super::ast::{Arg, Formula};
use super::eval::{EvalError, Valuation};
use super::library::PredicateLibrary;
use super::transform::{between_encoding, tc_encoding};
use crate::graph::{LabeledGraph, VertexSet};

struct Env {
    vertices: Vec<(String, usize)>,
    sets: Vec<(String, VertexSet)>,
}

impl Env {
    fn v(&self, name: &str) -> Result<usize, EvalError> {
        self.vertices
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| EvalError::Unassigned(name.to_string()))
    }

    fn s(&self, name: &str) -> Result<&VertexSet, EvalError> {
        self.sets
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| EvalError::Unassigned(name.to_string()))
    }
}

pub fn reference_eval(
    g: &LabeledGraph,
    lib: &PredicateLibrary,
    f: &Formula,
    val: &Valuation,
) -> Result<bool, EvalError> {
    let mut env = Env {
        vertices: val.vertices.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        sets: val.sets.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
    };
    go(g, lib, f, &mut env)
}

fn subsets(n: usize) -> impl Iterator<Item = VertexSet> {
    (0u64..1 << n).map(move |mask| {
        let mut s = VertexSet::with_capacity(n);
        s.extend((0..n).filter(|i| mask >> i & 1 == 1));
        s
    })
}

fn go(g: &LabeledGraph, lib: &PredicateLibrary, f: &Formula, env: &mut Env) -> Result<bool, EvalError> {
    let n = g.vertex_count();
    Ok(match f {
        Formula::Bool(b) => *b,
        Formula::Edge(x, y) => g.has_edge(env.v(x)?, env.v(y)?),
        Formula::Label(l, x) => g
            .label(l)
            .ok_or_else(|| EvalError::MissingLabel(l.clone()))?
            .contains(env.v(x)?),
        Formula::InSet(s, x) => env.s(s)?.contains(env.v(x)?),
        Formula::Eq(x, y) => env.v(x)? == env.v(y)?,
        Formula::Not(a) => !go(g, lib, a, env)?,
        Formula::And(a, b) => go(g, lib, a, env)? && go(g, lib, b, env)?,
        Formula::Or(a, b) => go(g, lib, a, env)? || go(g, lib, b, env)?,
        Formula::Implies(a, b) => !go(g, lib, a, env)? || go(g, lib, b, env)?,
        Formula::ExistsV(x, a) | Formula::ForallV(x, a) => {
            let want = matches!(f, Formula::ExistsV(..));
            for v in 0..n {
                env.vertices.push((x.clone(), v));
                let r = go(g, lib, a, env);
                env.vertices.pop();
                if r? == want {
                    return Ok(want);
                }
            }
            !want
        }
        Formula::ExistsS(x, a) | Formula::ForallS(x, a) => {
            let want = matches!(f, Formula::ExistsS(..));
            for s in subsets(n) {
                env.sets.push((x.clone(), s));
                let r = go(g, lib, a, env);
                env.sets.pop();
                if r? == want {
                    return Ok(want);
                }
            }
            !want
        }
        Formula::Tc { u, v, body, a, b } => {
            go(g, lib, &tc_encoding(u, v, body, a, b), env)?
        }
        Formula::Between {
            u,
            v,
            body,
            x,
            y,
            z,
        } => {
            go(g, lib, &between_encoding(u, v, body, x, y, z), env)?
        }
        Formula::Pred { name, args } => {
            let def = lib
                .get(name)
                .ok_or_else(|| EvalError::UnknownPredicate(name.clone()))?;
            let mut inner = Env {
                vertices: Vec::new(),
                sets: Vec::new(),
            };
            for (p, a) in def.params.iter().zip(args) {
                match a {
                    Arg::Vertex(x) => inner.vertices.push((p.name.clone(), env.v(x)?)),
                    Arg::Set(s) => inner.sets.push((p.name.clone(), env.s(s)?.clone())),
                }
            }
            go(g, lib, &def.body, &mut inner)?
        }
    })
}
