//! The graph families whose predicate libraries and interpretations produce grids.

pub mod bichain;
pub mod power;
pub mod word;

use crate::graph::LabeledGraph;
use crate::logic::{EvalError, Evaluator, PredicateLibrary, Table};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("prefix too short: {0}")]
    PrefixTooShort(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Interpret(#[from] crate::interpret::InterpretError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A relation that differs from its expected value, with the offending tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableDiff {
    pub predicate: String,
    pub missing: Vec<Vec<usize>>,
    pub extra: Vec<Vec<usize>>,
}

impl TableDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }

    /// Tuples rendered with vertex names, at most `limit` of each kind.
    pub fn describe(&self, g: &LabeledGraph, limit: usize) -> String {
        let show = |ts: &[Vec<usize>]| {
            ts.iter()
                .take(limit)
                .map(|t| {
                    let names: Vec<String> = t.iter().map(|&v| g.name(v)).collect();
                    format!("({})", names.join(" "))
                })
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!(
            "{}: {} missing [{}], {} extra [{}]",
            self.predicate,
            self.missing.len(),
            show(&self.missing),
            self.extra.len(),
            show(&self.extra)
        )
    }
}

/// Expected extension of a library predicate. With a `scope`, only tuples
/// inside the scope are compared.
#[derive(Clone, Debug)]
pub struct Expected {
    pub name: &'static str,
    pub table: Table,
    pub scope: Option<Table>,
}

impl Expected {
    pub fn exact(name: &'static str, table: Table) -> Self {
        Expected { name, table, scope: None }
    }

    pub fn within(name: &'static str, table: Table, scope: Table) -> Self {
        Expected {
            name,
            table,
            scope: Some(scope),
        }
    }
}

/// Compares the materialized table of `e.name` against its expectation.
pub fn compare_table(ev: &mut Evaluator<'_>, e: &Expected) -> Result<TableDiff, EvalError> {
    let got = ev.materialize(e.name)?;
    let in_scope = |t: &[usize]| e.scope.as_ref().map_or(true, |s| s.get(t));
    let mut diff = TableDiff {
        predicate: e.name.to_string(),
        missing: Vec::new(),
        extra: Vec::new(),
    };
    for t in e.table.tuples() {
        if in_scope(&t) && !got.get(&t) {
            diff.missing.push(t);
        }
    }
    for t in got.tuples() {
        if in_scope(&t) && !e.table.get(&t) {
            diff.extra.push(t);
        }
    }
    Ok(diff)
}

/// Compares every listed predicate against its expected table.
pub fn compare_library(
    g: &LabeledGraph,
    lib: &PredicateLibrary,
    expected: &[Expected],
) -> Result<Vec<TableDiff>, EvalError> {
    let mut ev = Evaluator::new(g, lib)?;
    expected.iter().map(|e| compare_table(&mut ev, e)).collect()
}

/// Reflexive-transitive closure of a binary table.
pub fn closure(t: &Table) -> Table {
    let n = t.n;
    let mut reach = vec![vec![false; n]; n];
    for (s, row) in reach.iter_mut().enumerate() {
        let mut stack = vec![s];
        row[s] = true;
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if t.get(&[a, b]) && !row[b] {
                    row[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    Table::from_fn(2, n, |a| reach[a[0]][a[1]])
}
