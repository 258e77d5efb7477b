//! The MSO formula language.
//!
//! Formulas are parsed from a small text DSL ([`parser`]), optionally against a
//! [`PredicateLibrary`] of named definitions, and evaluated over a
//! [`LabeledGraph`](crate::graph::LabeledGraph) by an [`Evaluator`].

pub mod ast;
mod compile;
pub mod eval;
pub mod library;
pub mod parser;
pub mod reference;
pub mod transform;

pub use ast::{Arg, Formula};
pub use eval::{EvalConfig, EvalError, Evaluator, Query, Table, Valuation};
pub use library::{Param, PredDef, PredicateLibrary, VarKind};
pub use parser::{parse_formula, parse_formula_in, FreeVars, ParseError};
pub use reference::reference_eval;
pub use transform::{between_naive_encoding, relativize, tc_naive_encoding, TransformError};
