//! Exact semantics for generalized Bayesian networks, i.e. Bayesian networks
//! whose graph may contain directed cycles and whose initial nodes carry a
//! (possibly correlated) joint distribution.
//!
//! Every probability is an arbitrary-precision rational. The crate covers
//!
//! * the classical chain-rule semantics and independence checking ([`inference`]),
//! * the constraint semantics built from strong and weak CPT-consistency
//!   ([`constraints`]) on top of an exact linear-programming core ([`linalg`]),
//! * cutset dissection, the cutset Markov chain and the limit, limit-average
//!   and Markov-chain semantics derived from it ([`chain`]),
//! * graph machinery: SCCs, cutsets, the initial-node closure and
//!   d-separation ([`graph`]),
//! * brute-force oracles used to cross-check the analytic routes ([`oracle`]).
//!
//! Assignments are indexed canonically: variables are sorted by name and the
//! first variable is the most significant bit, `F = 0`, `T = 1`. For `{X, Y}`
//! the order is `FF, FT, TF, TT`.

pub mod chain;
pub mod constraints;
mod error;
mod exec;
pub mod fixtures;
pub mod graph;
pub mod inference;
mod limits;
pub mod linalg;
pub mod model;
pub mod oracle;
mod rational;

pub use error::{Error, Result};
pub use exec::Execution;
pub use limits::{limits, set_limits, Limits};
pub use rational::{format_rational, parse_rational, Rational};

pub use chain::{CutsetChain, CutsetSemantics, LimStatus};
pub use constraints::{FamilyShape, SemanticsFamily, SemanticsKind};
pub use graph::DiGraph;
pub use inference::IndependenceTriple;
pub use model::{Assignment, Cpt, Gbn, GbnDraft, JointDistribution, VariableSet};
