//! Small reference networks used by tests, benches and documentation.

use crate::graph::DiGraph;
use crate::model::{Gbn, GbnDraft, VariableSet};
use crate::parse_rational;
use crate::rational::Rational;

/// The two-node feedback loop `X ⇄ Y` with
/// `Pr(X=T | Y=F) = s1`, `Pr(X=T | Y=T) = s2`,
/// `Pr(Y=T | X=F) = t1`, `Pr(Y=T | X=T) = t2`. No node is initial.
pub fn two_node_feedback(s1: Rational, s2: Rational, t1: Rational, t2: Rational) -> Gbn {
    two_node_feedback_draft(s1, s2, t1, t2)
        .build()
        .expect("parameters must lie in [0,1]")
}

pub fn two_node_feedback_draft(s1: Rational, s2: Rational, t1: Rational, t2: Rational) -> GbnDraft {
    GbnDraft::new(["X", "Y"])
        .edge("Y", "X")
        .edge("X", "Y")
        .cpt("X", ["Y"], [s1, s2])
        .cpt("Y", ["X"], [t1, t2])
}

/// Same as [`two_node_feedback`] with parameters given as rational literals.
pub fn two_node_feedback_str(s1: &str, s2: &str, t1: &str, t2: &str) -> Gbn {
    let p = |s: &str| parse_rational(s).expect("valid literal");
    two_node_feedback(p(s1), p(s2), p(t1), p(t2))
}

/// Three strongly connected nodes: `Y→X`, `Y→Z`, `Z→Y`, `X→Z`.
pub fn triangle_graph() -> DiGraph {
    DiGraph::new(
        VariableSet::new(["X", "Y", "Z"]).expect("valid names"),
        [("Y", "X"), ("Y", "Z"), ("Z", "Y"), ("X", "Z")],
    )
    .expect("known nodes")
}

/// A smooth GBN on [`triangle_graph`] with fixed CPTs.
pub fn triangle_gbn() -> Gbn {
    let p = |s: &str| parse_rational(s).expect("valid literal");
    GbnDraft::new(["X", "Y", "Z"])
        .edge("Y", "X")
        .edge("Y", "Z")
        .edge("Z", "Y")
        .edge("X", "Z")
        .cpt("X", ["Y"], [p("1/3"), p("3/4")])
        .cpt("Y", ["Z"], [p("1/2"), p("1/5")])
        .cpt("Z", ["X", "Y"], [p("1/4"), p("2/3"), p("1/2"), p("9/10")])
        .build()
        .expect("valid fixture")
}

/// The directed 4-cycle `W→X→Y→Z→W`.
pub fn four_cycle_graph() -> DiGraph {
    DiGraph::new(
        VariableSet::new(["W", "X", "Y", "Z"]).expect("valid names"),
        [("W", "X"), ("X", "Y"), ("Y", "Z"), ("Z", "W")],
    )
    .expect("known nodes")
}
