use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` occurs more than once")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("variable sets overlap on `{0}`")]
    OverlappingVariables(String),
    #[error("sets of an independence triple are not pairwise disjoint")]
    NonDisjoint,
    #[error("{what}: {requested} exceeds the configured limit of {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),
    #[error("invalid assignment key `{key}` for {expected} variable(s)")]
    InvalidAssignmentKey { key: String, expected: usize },
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("GBN failed validation:\n{0}")]
    Validation(ValidationReport),
    #[error("graph contains a directed cycle")]
    CyclicGraph,
    #[error("{0} is not a cutset")]
    NotACutset(String),
    #[error(
        "cutset contains initial node `{0}`; the dissection's initial distribution would overlap"
    )]
    CutsetContainsInitialNode(String),
    #[error("distribution is over {found}, expected {expected}")]
    DomainMismatch { expected: String, found: String },
    #[error("node `{0}` is initial and carries no CPT")]
    InitialNode(String),
    #[error("independence triple must have a single variable on the left, got {0}")]
    MalformedTriple(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
