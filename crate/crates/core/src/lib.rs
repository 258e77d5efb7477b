//! Workbench for MSO interpretations over hereditary graph families.
//!
//! * [`graph`]: labeled graphs, constructions, induced-subgraph search
//! * [`logic`]: the MSO formula language, evaluator and predicate libraries
//! * [`interpret`]: interpretations with set parameters and pipelines
//! * [`families`]: the word-defined, bichain/split/bipartite-permutation and power graph families
//! * [`widths`]: exact treewidth and clique-width with checkable certificates
//! * [`verify`]: named verification suites producing [`report::VerificationReport`]s

pub mod corpus;
pub mod families;
pub mod graph;
pub mod interpret;
pub mod logic;
pub mod report;
pub mod verify;
pub mod widths;
