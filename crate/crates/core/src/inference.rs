//! Chain-rule semantics of acyclic GBNs and exact conditional-independence checks.

use std::fmt;

use num_traits::{One, Zero};

use crate::graph::{self, close, d_separated, require_disjoint, DiGraph};
use crate::limits::{self, limits};
use crate::model::{Gbn, JointDistribution, Projection, VariableSet};
use crate::rational::Rational;
use crate::{Error, Execution, Result};

/// `(𝒳 ⊥ 𝒴 | 𝒵)` with pairwise disjoint sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndependenceTriple {
    x: VariableSet,
    y: VariableSet,
    z: VariableSet,
}

impl IndependenceTriple {
    pub fn new(x: VariableSet, y: VariableSet, z: VariableSet) -> Result<Self> {
        require_disjoint([&x, &y, &z])?;
        Ok(IndependenceTriple { x, y, z })
    }

    pub fn x(&self) -> &VariableSet {
        &self.x
    }

    pub fn y(&self) -> &VariableSet {
        &self.y
    }

    pub fn z(&self) -> &VariableSet {
        &self.z
    }

    pub fn variables(&self) -> VariableSet {
        self.x.union(&self.y).union(&self.z)
    }
}

impl fmt::Display for IndependenceTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &VariableSet| s.names().join(",");
        write!(
            f,
            "({} ⊥ {} | {})",
            join(&self.x),
            join(&self.y),
            join(&self.z)
        )
    }
}

struct Factor {
    shift: u32,
    parents: Projection,
    prob_true: Vec<Rational>,
    prob_false: Vec<Rational>,
}

/// Precomputed chain-rule evaluator:
/// `⟦B⟧(b) = ι(b_Init) · Π_X Pr(b(X) | b_Pre(X))`.
pub(crate) struct ChainRule {
    vars: VariableSet,
    iota: Vec<Rational>,
    iota_projection: Projection,
    factors: Vec<Factor>,
}

impl ChainRule {
    pub(crate) fn new(g: &Gbn) -> Result<Self> {
        let order = g.graph().topological_indices().ok_or(Error::CyclicGraph)?;
        let vars = g.variables().clone();
        limits::check(
            "joint distribution variables",
            vars.len(),
            limits().max_joint_variables,
        )?;
        let mut factors = Vec::new();
        for i in order {
            let node = &vars.names()[i];
            let Some(cpt) = g.cpt(node) else { continue };
            factors.push(Factor {
                shift: vars.shift_of(i),
                parents: Projection::new(&vars, cpt.parents())?,
                prob_true: cpt.rows().to_vec(),
                prob_false: cpt.rows().iter().map(|p| Rational::one() - p).collect(),
            });
        }
        Ok(ChainRule {
            iota_projection: Projection::new(&vars, g.iota().vars())?,
            iota: g.iota().probs().to_vec(),
            vars,
            factors,
        })
    }

    pub(crate) fn vars(&self) -> &VariableSet {
        &self.vars
    }

    pub(crate) fn weight(&self, index: usize) -> Rational {
        self.weight_with(&self.iota, index)
    }

    /// The chain-rule weight of `index` with the initial distribution replaced by `iota`.
    pub(crate) fn weight_with(&self, iota: &[Rational], index: usize) -> Rational {
        let mut w = iota[self.iota_projection.apply(index)].clone();
        for factor in &self.factors {
            if w.is_zero() {
                break;
            }
            let row = factor.parents.apply(index);
            let p = if (index >> factor.shift) & 1 == 1 {
                &factor.prob_true[row]
            } else {
                &factor.prob_false[row]
            };
            if p.is_zero() {
                return Rational::zero();
            }
            if !p.is_one() {
                w *= p;
            }
        }
        w
    }

    pub(crate) fn joint(&self, exec: Execution) -> Vec<Rational> {
        exec.map_range(self.vars.num_assignments(), |i| self.weight(i))
    }

    /// The chain-rule distribution for initial distribution `iota`, pushed
    /// through `projection` into `size` cells.
    pub(crate) fn marginal_with(
        &self,
        iota: &[Rational],
        projection: &Projection,
        size: usize,
    ) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); size];
        for index in 0..self.vars.num_assignments() {
            let w = self.weight_with(iota, index);
            if !w.is_zero() {
                out[projection.apply(index)] += w;
            }
        }
        out
    }
}

/// `dist_BN(B)` by the chain rule. Fails with [`Error::CyclicGraph`] on cyclic GBNs.
pub fn chain_rule_dist(g: &Gbn) -> Result<JointDistribution> {
    chain_rule_dist_with(g, Execution::default())
}

pub fn chain_rule_dist_with(g: &Gbn, exec: Execution) -> Result<JointDistribution> {
    let rule = ChainRule::new(g)?;
    let probs = rule.joint(exec);
    debug_assert!(probs.iter().sum::<Rational>().is_one());
    Ok(JointDistribution::from_parts(rule.vars.clone(), probs))
}

/// True iff `t ∈ Indep(μ)`: for all assignments `a, b, c` of `𝒳, 𝒴, 𝒵`,
/// `μ(a | b, c) = μ(a | c)` or `μ(b, c) = 0`. Checked cross-multiplied,
/// which is exact and division-free once `μ(b, c) > 0`.
pub fn check_independence(mu: &JointDistribution, t: &IndependenceTriple) -> Result<bool> {
    let all = t.variables();
    mu.vars().require_known(&all)?;
    let joint = mu.restrict(&all)?;
    let xz = t.x.union(&t.z);
    let yz = t.y.union(&t.z);
    let p_xz = joint.restrict(&xz)?;
    let p_yz = joint.restrict(&yz)?;
    let p_z = joint.restrict(&t.z)?;
    let to_xz = Projection::new(&all, &xz)?;
    let to_yz = Projection::new(&all, &yz)?;
    let to_z = Projection::new(&all, &t.z)?;
    Ok(joint.probs().iter().enumerate().all(|(i, p_abc)| {
        let p_bc = &p_yz.probs()[to_yz.apply(i)];
        p_bc.is_zero()
            || p_abc * &p_z.probs()[to_z.apply(i)] == &p_xz.probs()[to_xz.apply(i)] * p_bc
    }))
}

/// All d-separation triples `({X} ⊥ {Y} | 𝒵)` of `g` with `X < Y` and `𝒵`
/// ranging over every subset of the remaining nodes.
pub fn dsep_triples(g: &DiGraph) -> Result<Vec<IndependenceTriple>> {
    dsep_triples_with(g, Execution::default())
}

pub fn dsep_triples_with(g: &DiGraph, exec: Execution) -> Result<Vec<IndependenceTriple>> {
    limits::check(
        "independence enumeration variables",
        g.len(),
        limits().max_independence_variables,
    )?;
    let candidates = singleton_pair_triples(g.nodes());
    let keep = exec.map_slice(&candidates, |t| d_separated(g, &t.x, &t.y, &t.z));
    let mut out = Vec::new();
    for (t, verdict) in candidates.into_iter().zip(keep) {
        if verdict? {
            out.push(t);
        }
    }
    Ok(out)
}

/// Every `({X}, {Y}, 𝒵)` with `X < Y` and `𝒵 ⊆ 𝒱 ∖ {X, Y}`.
pub(crate) fn singleton_pair_triples(vars: &VariableSet) -> Vec<IndependenceTriple> {
    let names = vars.names();
    let mut out = Vec::new();
    for (i, x) in names.iter().enumerate() {
        for y in &names[i + 1..] {
            let pair = VariableSet::new([x.clone(), y.clone()]).expect("distinct names");
            let rest = vars.difference(&pair);
            for mask in 0..rest.num_assignments() {
                let z = subset_by_mask(&rest, mask);
                out.push(IndependenceTriple {
                    x: VariableSet::new([x.clone()]).expect("valid"),
                    y: VariableSet::new([y.clone()]).expect("valid"),
                    z,
                });
            }
        }
    }
    out
}

pub(crate) fn subset_by_mask(set: &VariableSet, mask: usize) -> VariableSet {
    let n = set.len();
    VariableSet::new(
        (0..n)
            .filter(|&p| (mask >> (n - 1 - p)) & 1 == 1)
            .map(|p| set.names()[p].clone()),
    )
    .expect("subset of a valid set")
}

/// Checks `d-sep(Close(G)) ⊆ Indep(dist_BN(B))` over the bounded triple
/// enumeration. Identically true on valid acyclic inputs.
pub fn dsep_implies_indep_check(g: &Gbn) -> Result<bool> {
    dsep_implies_indep_check_with(g, Execution::default())
}

pub fn dsep_implies_indep_check_with(g: &Gbn, exec: Execution) -> Result<bool> {
    if !g.is_acyclic() {
        return Err(Error::CyclicGraph);
    }
    limits::check(
        "independence enumeration variables",
        g.variables().len(),
        limits().max_independence_variables,
    )?;
    let mu = chain_rule_dist_with(g, exec)?;
    let triples = dsep_triples_with(&close(g.graph()), exec)?;
    let verdicts = exec.map_slice(&triples, |t| check_independence(&mu, t));
    verdicts.into_iter().try_fold(true, |acc, v| Ok(acc && v?))
}

/// Convenience wrapper so callers need not import the graph module.
pub fn d_separated_triple(g: &DiGraph, t: &IndependenceTriple) -> Result<bool> {
    graph::d_separated(g, &t.x, &t.y, &t.z)
}
