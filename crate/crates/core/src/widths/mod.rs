//! Exact treewidth and clique-width for small graphs, with certificates.

pub mod cliquewidth;
pub mod treewidth;

pub use cliquewidth::{cliquewidth_exact, verify_k_expression, CwdConfig, CwdResult, KExpression};
pub use treewidth::{
    extend_decomposition_for_subdivision, treewidth_exact, verify_tree_decomposition, TdViolation,
    TreeDecomposition,
};

use thiserror::Error;

pub const TWD_CAP: usize = 12;
pub const CWD_CAP: usize = 8;
pub const CWD_EXTENDED_CAP: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WidthError {
    #[error("graph has {n} vertices, above the cap of {cap}")]
    Cap { n: usize, cap: usize },
    #[error("search budget of {0} states exhausted")]
    Budget(usize),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(TdViolation),
    #[error("malformed k-expression: {0}")]
    Malformed(String),
}

/// `4 * 2^(twd - 1) + 1`, the clique-width bound in terms of treewidth.
pub fn cwd_bound_from_twd(twd: usize) -> f64 {
    4.0 * 2f64.powi(twd as i32 - 1) + 1.0
}
