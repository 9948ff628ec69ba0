//! Constraint semantics: the linear (Cpt) and (wCpt) systems, their exact
//! classification, CPT-consistency checks and (CPT-I) membership.
//!
//! Equations are stored homogeneously. For a node `X` with parent assignment
//! `c` and `p = Pr(X=T | c)`, strong consistency reads
//! `Σ_{a : a_Pre(X) = c} μ(a)·(p − [a(X) = T]) = 0`, so a column gets `p − 1`
//! when `X` is true in it and `p` otherwise. Weak consistency is the sum of
//! these rows over `c`.

use std::fmt;

use num_traits::{One, Zero};

use crate::chain::CutsetSemantics;
use crate::graph::{close, cut_restrict};
use crate::inference::{dsep_triples, IndependenceTriple};
use crate::limits::{self, limits};
use crate::linalg::{classify_system, AffineSpace, LinearSystem, Matrix, PolytopeClass};
use crate::model::{Gbn, JointDistribution, Projection, VariableSet};
use crate::rational::Rational;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SemanticsKind {
    Bn,
    Cpt,
    WCpt,
    CptI,
    Mc,
    Lim,
    LimAvg,
}

impl SemanticsKind {
    pub fn name(self) -> &'static str {
        match self {
            SemanticsKind::Bn => "bn",
            SemanticsKind::Cpt => "cpt",
            SemanticsKind::WCpt => "wcpt",
            SemanticsKind::CptI => "cpti",
            SemanticsKind::Mc => "mc",
            SemanticsKind::Lim => "lim",
            SemanticsKind::LimAvg => "limavg",
        }
    }
}

impl fmt::Display for SemanticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The shape of a set of distributions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyShape {
    Empty,
    Unique(JointDistribution),
    /// Infinitely many members: the nonnegative part of an affine space.
    Polytope {
        space: AffineSpace,
        witness: JointDistribution,
    },
    /// Infinitely many members: the convex hull of the listed extreme points.
    Hull(Vec<JointDistribution>),
    /// No algorithm is available for this case.
    Unsupported(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemanticsFamily {
    pub kind: SemanticsKind,
    pub shape: FamilyShape,
    /// Which cutset, initial distribution or route produced the family.
    pub notes: Vec<String>,
}

impl SemanticsFamily {
    pub fn new(kind: SemanticsKind, shape: FamilyShape) -> Self {
        SemanticsFamily {
            kind,
            shape,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.shape, FamilyShape::Empty)
    }

    pub fn unique(&self) -> Option<&JointDistribution> {
        match &self.shape {
            FamilyShape::Unique(mu) => Some(mu),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(
            self.shape,
            FamilyShape::Polytope { .. } | FamilyShape::Hull(_)
        )
    }

    /// Every distribution the family lists explicitly: the unique member, the
    /// polytope witness or the hull's extreme points.
    pub fn representatives(&self) -> Vec<&JointDistribution> {
        match &self.shape {
            FamilyShape::Unique(mu) => vec![mu],
            FamilyShape::Polytope { witness, .. } => vec![witness],
            FamilyShape::Hull(points) => points.iter().collect(),
            FamilyShape::Empty | FamilyShape::Unsupported(_) => Vec::new(),
        }
    }
}

fn check_capacity(g: &Gbn) -> Result<()> {
    limits::check(
        "constraint system variables",
        g.variables().len(),
        limits().max_constraint_variables,
    )
}

/// Rows `p − [a(X)=T]` per (node, parent assignment), in node order then
/// canonical parent order.
fn cpt_rows(g: &Gbn) -> Result<Vec<Vec<Rational>>> {
    let vars = g.variables();
    let mut rows = Vec::new();
    for cpt in g.cpts() {
        let shift = vars.shift_of(vars.position(cpt.node()).expect("validated"));
        let parents = Projection::new(vars, cpt.parents())?;
        for (c, p) in cpt.rows().iter().enumerate() {
            let p_minus_one = p - Rational::one();
            rows.push(
                (0..vars.num_assignments())
                    .map(|a| {
                        if parents.apply(a) != c {
                            Rational::zero()
                        } else if (a >> shift) & 1 == 1 {
                            p_minus_one.clone()
                        } else {
                            p.clone()
                        }
                    })
                    .collect(),
            );
        }
    }
    Ok(rows)
}

/// ι-pinning rows (only when there are initial nodes) and the normalization row.
fn append_init_rows(g: &Gbn, matrix: &mut Matrix, rhs: &mut Vec<Rational>) -> Result<()> {
    let vars = g.variables();
    let init = g.iota().vars();
    if !init.is_empty() {
        let to_init = Projection::new(vars, init)?;
        for (d, p) in g.iota().probs().iter().enumerate() {
            matrix.push(
                (0..vars.num_assignments())
                    .map(|a| {
                        if to_init.apply(a) == d {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect(),
            );
            rhs.push(p.clone());
        }
    }
    matrix.push(vec![Rational::one(); vars.num_assignments()]);
    rhs.push(Rational::one());
    Ok(())
}

/// The (Cpt) system: one row per node and parent assignment, then the
/// ι-pinning rows, then `Σμ = 1`. All columns are nonnegative.
pub fn build_cpt_system(g: &Gbn) -> Result<LinearSystem> {
    check_capacity(g)?;
    let mut matrix = cpt_rows(g)?;
    let mut rhs = vec![Rational::zero(); matrix.len()];
    append_init_rows(g, &mut matrix, &mut rhs)?;
    let n = g.variables().num_assignments();
    LinearSystem::new(matrix, rhs, vec![true; n])
}

/// The (wCpt) system: one marginal row per node, then ι-pinning and `Σμ = 1`.
pub fn build_wcpt_system(g: &Gbn) -> Result<LinearSystem> {
    check_capacity(g)?;
    let n = g.variables().num_assignments();
    let strong = cpt_rows(g)?;
    let mut matrix = Vec::new();
    let mut offset = 0;
    for cpt in g.cpts() {
        let count = cpt.rows().len();
        let mut row = vec![Rational::zero(); n];
        for r in &strong[offset..offset + count] {
            for (acc, v) in row.iter_mut().zip(r) {
                if !v.is_zero() {
                    *acc += v;
                }
            }
        }
        matrix.push(row);
        offset += count;
    }
    let mut rhs = vec![Rational::zero(); matrix.len()];
    append_init_rows(g, &mut matrix, &mut rhs)?;
    LinearSystem::new(matrix, rhs, vec![true; n])
}

fn family_from_class(
    g: &Gbn,
    kind: SemanticsKind,
    class: PolytopeClass,
) -> Result<SemanticsFamily> {
    let vars = g.variables().clone();
    let shape = match class {
        PolytopeClass::Empty => FamilyShape::Empty,
        PolytopeClass::Point(x) => FamilyShape::Unique(JointDistribution::new(vars, x)?),
        PolytopeClass::Infinite { space, witness } => FamilyShape::Polytope {
            space,
            witness: JointDistribution::new(vars, witness)?,
        },
    };
    Ok(SemanticsFamily::new(kind, shape))
}

/// `⟦B⟧_Cpt` or `⟦B⟧_wCpt`, classified exactly as empty, a single
/// distribution or an infinite polytope.
pub fn solve_family(g: &Gbn, kind: SemanticsKind) -> Result<SemanticsFamily> {
    let sys = match kind {
        SemanticsKind::Cpt => build_cpt_system(g)?,
        SemanticsKind::WCpt => build_wcpt_system(g)?,
        other => {
            return Err(Error::Precondition(format!(
                "solve_family handles cpt and wcpt, not {other}"
            )))
        }
    };
    family_from_class(g, kind, classify_system(&sys))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Consistency {
    /// Every conditional matches its CPT row.
    Strong,
    /// Only the node's marginal matches the CPT-weighted parent marginals.
    Weak,
}

fn require_domain(mu: &JointDistribution, g: &Gbn) -> Result<()> {
    if mu.vars() != g.variables() {
        return Err(Error::DomainMismatch {
            expected: g.variables().to_string(),
            found: mu.vars().to_string(),
        });
    }
    Ok(())
}

/// Strong or weak CPT-consistency of `μ` at the non-initial node `node`.
pub fn check_consistency(
    mu: &JointDistribution,
    g: &Gbn,
    node: &str,
    mode: Consistency,
) -> Result<bool> {
    require_domain(mu, g)?;
    if !g.variables().contains(node) {
        return Err(Error::UnknownVariable(node.to_string()));
    }
    let cpt = g
        .cpt(node)
        .ok_or_else(|| Error::InitialNode(node.to_string()))?;
    let single = VariableSet::new([node.to_string()])?;
    let family = cpt.parents().union(&single);
    let local = mu.restrict(&family)?;
    let to_parents = Projection::new(&family, cpt.parents())?;
    let shift = family.shift_of(family.position(node).expect("member"));
    // true_mass[c] = μ(X=T, c), parent_mass[c] = μ(c).
    let rows = cpt.parents().num_assignments();
    let mut true_mass = vec![Rational::zero(); rows];
    let mut parent_mass = vec![Rational::zero(); rows];
    for (a, p) in local.probs().iter().enumerate() {
        let c = to_parents.apply(a);
        parent_mass[c] += p;
        if (a >> shift) & 1 == 1 {
            true_mass[c] += p;
        }
    }
    Ok(match mode {
        Consistency::Strong => (0..rows).all(|c| true_mass[c] == &parent_mass[c] * &cpt.rows()[c]),
        Consistency::Weak => {
            let lhs: Rational = true_mass.iter().sum();
            let rhs: Rational = (0..rows).map(|c| &parent_mass[c] * &cpt.rows()[c]).sum();
            lhs == rhs
        }
    })
}

/// Strong consistency at every non-initial node plus `μ|_Init = ι`.
pub fn is_cpt_member(mu: &JointDistribution, g: &Gbn) -> Result<bool> {
    require_domain(mu, g)?;
    if mu.restrict(g.iota().vars())? != *g.iota() {
        return Ok(false);
    }
    for cpt in g.cpts() {
        if !check_consistency(mu, g, cpt.node(), Consistency::Strong)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The product-form constraint `μ(b)·μ(b_𝒲) = μ(b_{X}∪𝒲)·μ(b_𝒰∪𝒲)` for all `b`.
fn product_constraint_holds(mu: &JointDistribution, t: &IndependenceTriple) -> Result<bool> {
    let all = t.variables();
    let joint = mu.restrict(&all)?;
    let xw = t.x().union(t.z());
    let uw = t.y().union(t.z());
    let marginal = |set: &VariableSet| -> Result<(JointDistribution, Projection)> {
        Ok((joint.restrict(set)?, Projection::new(&all, set)?))
    };
    let (p_xw, to_xw) = marginal(&xw)?;
    let (p_uw, to_uw) = marginal(&uw)?;
    let (p_w, to_w) = marginal(t.z())?;
    Ok(joint.probs().iter().enumerate().all(|(b, p)| {
        p * &p_w.probs()[to_w.apply(b)]
            == &p_xw.probs()[to_xw.apply(b)] * &p_uw.probs()[to_uw.apply(b)]
    }))
}

/// (CPT-I) membership: `μ` is in `⟦B⟧_Cpt` and satisfies every independence
/// constraint of `triples` in product form. Each triple needs a single
/// variable on the left.
pub fn check_cpt_i_member(
    mu: &JointDistribution,
    g: &Gbn,
    triples: &[IndependenceTriple],
) -> Result<bool> {
    for t in triples {
        if t.x().len() != 1 {
            return Err(Error::MalformedTriple(t.to_string()));
        }
        g.variables().require_known(&t.variables())?;
    }
    if !is_cpt_member(mu, g)? {
        return Ok(false);
    }
    for t in triples {
        if !product_constraint_holds(mu, t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The independence constraints attached to a cutset: the bounded
/// d-separation triples of `Close(G[C])`.
pub fn cutset_independences(g: &Gbn, cutset: &VariableSet) -> Result<Vec<IndependenceTriple>> {
    dsep_triples(&close(&cut_restrict(g.graph(), cutset)?))
}

/// `⟦B⟧_Cpt-I` as the intersection of the Markov chain semantics of a cutset
/// family in which every node is left out of at least one cutset.
///
/// Singleton families are intersected by exact equality and a common member
/// is certified against (CPT-I) with the union of the cutsets' independence
/// constraints. Infinite families yield [`FamilyShape::Unsupported`].
pub fn cpt_i_via_cutsets(g: &Gbn, cutsets: &[VariableSet]) -> Result<SemanticsFamily> {
    if let Some(node) = g
        .variables()
        .iter()
        .find(|n| cutsets.iter().all(|c| c.contains(n)))
    {
        return Err(Error::Precondition(format!(
            "every cutset contains `{node}`; each node must be outside at least one cutset"
        )));
    }
    let mut common: Option<JointDistribution> = None;
    let mut differs = false;
    let mut notes = Vec::new();
    for cutset in cutsets {
        let semantics = CutsetSemantics::new(g, cutset)?;
        let family = semantics.family()?;
        let mu = match family.shape {
            FamilyShape::Unique(mu) => mu,
            _ => {
                return Ok(SemanticsFamily::new(
                    SemanticsKind::CptI,
                    FamilyShape::Unsupported(format!(
                        "the Markov chain semantics for cutset {cutset} is infinite; intersecting infinite families is not supported"
                    )),
                ))
            }
        };
        notes.push(format!("cutset {cutset}: singleton"));
        match &common {
            None => common = Some(mu),
            Some(existing) => differs |= *existing != mu,
        }
    }
    let family = match common {
        Some(mu) if !differs => {
            let mut triples = Vec::new();
            for cutset in cutsets {
                triples.extend(cutset_independences(g, cutset)?);
            }
            triples.sort();
            triples.dedup();
            if !check_cpt_i_member(&mu, g, &triples)? {
                return Err(Error::Unsupported(
                    "common Markov chain distribution failed (CPT-I) certification".into(),
                ));
            }
            SemanticsFamily::new(SemanticsKind::CptI, FamilyShape::Unique(mu))
        }
        _ => SemanticsFamily::new(SemanticsKind::CptI, FamilyShape::Empty),
    };
    // Cpt-I ⊆ MC-C needs Σ_d μ(d)·Π_Y Pr(Y | d) = μ(c), which CPT rows only
    // guarantee for a single cutset node that does not meet initial nodes.
    let init_empty = g.initial().is_empty();
    if !cutsets
        .iter()
        .all(|c| c.is_empty() || (c.len() == 1 && init_empty))
    {
        notes.push(
            "exact intersection of the MC families; Cpt-I may be larger here (cutset with several nodes, or next to initial nodes)"
                .into(),
        );
    }
    Ok(SemanticsFamily { notes, ..family })
}
