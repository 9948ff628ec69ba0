//! Cutset dissection, the cutset Markov chain and the semantics derived from
//! it: Markov chain semantics (MCS), the limit and the limit average.
//!
//! Dissecting a GBN at a cutset `C` gives every `Y ∈ C` a fresh copy `Y'`
//! that takes over `Y`'s incoming edges and CPT. The result is acyclic and `C`
//! becomes initial, so one chain-rule pass maps a distribution `γ` over `C` to
//! a distribution over `V ∪ C'`. Reading `C'` as the next value of `C` gives
//! `Next`; reading the original nodes gives `Extend`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::constraints::{FamilyShape, SemanticsFamily, SemanticsKind};
use crate::graph::{bottom_flags, is_cutset, tarjan, DiGraph};
use crate::inference::ChainRule;
use crate::limits::{self, limits};
use crate::linalg::{null_space_left, solve_square, Matrix};
use crate::model::{Gbn, JointDistribution, Projection, VariableSet};
use crate::rational::Rational;
use crate::{Error, Execution, Result};

/// The name of the fresh copy of a cutset node.
pub fn prime(name: &str) -> String {
    format!("{name}'")
}

/// A `C`-dissected GBN over `V ∪ C'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DissectedGbn {
    gbn: Gbn,
    cutset: VariableSet,
    copies: VariableSet,
}

impl DissectedGbn {
    pub fn gbn(&self) -> &Gbn {
        &self.gbn
    }

    pub fn cutset(&self) -> &VariableSet {
        &self.cutset
    }

    /// The primed copies `C'`.
    pub fn copies(&self) -> &VariableSet {
        &self.copies
    }
}

fn require_cutset(g: &Gbn, cutset: &VariableSet) -> Result<()> {
    if !is_cutset(g.graph(), cutset)? {
        return Err(Error::NotACutset(cutset.to_string()));
    }
    if let Some(node) = cutset.iter().find(|n| g.cpt(n).is_none()) {
        return Err(Error::CutsetContainsInitialNode(node.to_string()));
    }
    Ok(())
}

fn require_over(gamma: &JointDistribution, vars: &VariableSet) -> Result<()> {
    if gamma.vars() != vars {
        return Err(Error::DomainMismatch {
            expected: vars.to_string(),
            found: gamma.vars().to_string(),
        });
    }
    Ok(())
}

/// Builds the `C`-dissection of `g` with initial distribution `ι ⊗ γ`.
///
/// Cutset nodes must be non-initial: an initial node already carries part of
/// ι, which would overlap with `γ`.
pub fn dissect(g: &Gbn, cutset: &VariableSet, gamma: &JointDistribution) -> Result<DissectedGbn> {
    require_cutset(g, cutset)?;
    require_over(gamma, cutset)?;
    let copies = VariableSet::new(cutset.iter().map(prime))?;
    let nodes = g.variables().union(&copies);
    limits::check(
        "dissection variables",
        nodes.len(),
        limits().max_joint_variables,
    )?;
    let edges: Vec<(String, String)> = g
        .graph()
        .edges()
        .map(|(a, b)| {
            let target = if cutset.contains(b) {
                prime(b)
            } else {
                b.to_string()
            };
            (a.to_string(), target)
        })
        .collect();
    let graph = DiGraph::new(nodes, edges.iter().map(|(a, b)| (a.as_str(), b.as_str())))?;
    debug_assert!(graph.is_acyclic());
    let cpts = g
        .cpts()
        .map(|cpt| {
            let name = if cutset.contains(cpt.node()) {
                prime(cpt.node())
            } else {
                cpt.node().to_string()
            };
            (name.clone(), cpt.with_node(name))
        })
        .collect::<BTreeMap<_, _>>();
    let iota = g.iota().product(gamma)?;
    Ok(DissectedGbn {
        gbn: Gbn::from_parts(graph, cpts, iota),
        cutset: cutset.clone(),
        copies,
    })
}

/// `Next(B, C, γ)`: the dissection's distribution over `(V ∖ C) ∪ C'`, with
/// each `Y'` read as `Y`.
pub fn next_dist(
    g: &Gbn,
    cutset: &VariableSet,
    gamma: &JointDistribution,
) -> Result<JointDistribution> {
    CutsetSemantics::without_chain(g, cutset)?.next(gamma)
}

/// `Extend(B, C, γ)`: the dissection's distribution restricted to `V`.
pub fn extend(
    g: &Gbn,
    cutset: &VariableSet,
    gamma: &JointDistribution,
) -> Result<JointDistribution> {
    CutsetSemantics::without_chain(g, cutset)?.extend(gamma)
}

/// A bottom strongly connected component of a finite Markov chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bscc {
    /// State indices, ascending.
    pub states: Vec<usize>,
    pub period: usize,
    /// Long-run frequency distribution over all states (zero outside the component).
    pub lrf: Vec<Rational>,
}

/// BSCC decomposition, periods, long-run frequencies and absorption
/// probabilities of an exact row-stochastic matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovAnalysis {
    bsccs: Vec<Bscc>,
    transient: Vec<usize>,
    /// `absorption[i][d]`: probability of ending in BSCC `d` from transient state `transient[i]`.
    absorption: Matrix,
}

fn support_lists(matrix: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    matrix
        .iter()
        .map(|row| (0..row.len()).filter(|&j| !row[j].is_zero()).collect())
        .collect()
}

/// gcd of `depth(u) + 1 − depth(v)` over edges `u → v` inside the component.
fn period_of(adj: &[Vec<usize>], component: &[usize]) -> usize {
    let inside = |v: usize| component.binary_search(&v).is_ok();
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([component[0]]);
    depth.insert(component[0], 0);
    while let Some(u) = queue.pop_front() {
        let next_depth = depth[&u] + 1;
        for &v in adj[u].iter().filter(|&&v| inside(v)) {
            if let std::collections::btree_map::Entry::Vacant(e) = depth.entry(v) {
                e.insert(next_depth);
                queue.push_back(v);
            }
        }
    }
    let mut period = 0usize;
    for &u in component {
        for &v in adj[u].iter().filter(|&&v| inside(v)) {
            let diff = (depth[&u] + 1).abs_diff(depth[&v]);
            period = period.gcd(&diff);
        }
    }
    period.max(1)
}

impl MarkovAnalysis {
    pub fn new(matrix: &[Vec<Rational>]) -> Self {
        let n = matrix.len();
        let adj = support_lists(matrix);
        let components = tarjan(&adj);
        let bottom = bottom_flags(&adj, &components);
        let mut in_bscc = vec![false; n];
        let mut bsccs: Vec<Bscc> = components
            .iter()
            .zip(&bottom)
            .filter(|(_, &b)| b)
            .map(|(states, _)| {
                for &s in states {
                    in_bscc[s] = true;
                }
                let restricted: Matrix = states
                    .iter()
                    .map(|&i| states.iter().map(|&j| matrix[i][j].clone()).collect())
                    .collect();
                let local = null_space_left(&restricted)
                    .particular
                    .expect("an irreducible stochastic matrix has a stationary vector");
                let mut lrf = vec![Rational::zero(); n];
                for (&s, v) in states.iter().zip(local) {
                    lrf[s] = v;
                }
                Bscc {
                    states: states.clone(),
                    period: period_of(&adj, states),
                    lrf,
                }
            })
            .collect();
        bsccs.sort_by_key(|b| b.states[0]);

        let transient: Vec<usize> = (0..n).filter(|&s| !in_bscc[s]).collect();
        let absorption = if transient.is_empty() {
            Vec::new()
        } else {
            // (I − P_TT)·H = P_TB, where P_TB sums each row over a BSCC.
            let a: Matrix = transient
                .iter()
                .map(|&i| {
                    transient
                        .iter()
                        .map(|&j| {
                            let v = -matrix[i][j].clone();
                            if i == j {
                                v + Rational::one()
                            } else {
                                v
                            }
                        })
                        .collect()
                })
                .collect();
            let b: Matrix = transient
                .iter()
                .map(|&i| {
                    bsccs
                        .iter()
                        .map(|d| d.states.iter().map(|&j| &matrix[i][j]).sum())
                        .collect()
                })
                .collect();
            solve_square(&a, &b).expect("transient block of a finite chain is invertible")
        };
        MarkovAnalysis {
            bsccs,
            transient,
            absorption,
        }
    }

    pub fn bsccs(&self) -> &[Bscc] {
        &self.bsccs
    }

    pub fn transient_states(&self) -> &[usize] {
        &self.transient
    }

    /// Probability of eventually entering each BSCC from `γ₀`, in BSCC order.
    pub fn reach_probs(&self, gamma0: &[Rational]) -> Vec<Rational> {
        self.bsccs
            .iter()
            .enumerate()
            .map(|(d, bscc)| {
                let inside: Rational = bscc.states.iter().map(|&s| &gamma0[s]).sum();
                let via_transient: Rational = self
                    .transient
                    .iter()
                    .zip(&self.absorption)
                    .filter(|(&t, _)| !gamma0[t].is_zero())
                    .map(|(&t, h)| &gamma0[t] * &h[d])
                    .sum();
                inside + via_transient
            })
            .collect()
    }

    /// `Σ_D reach(D)·lrf_D`: the Cesàro limit of `γ₀·Pⁿ`.
    pub fn limit_average(&self, gamma0: &[Rational]) -> Vec<Rational> {
        let n = gamma0.len();
        let mut out = vec![Rational::zero(); n];
        for (bscc, weight) in self.bsccs.iter().zip(self.reach_probs(gamma0)) {
            if weight.is_zero() {
                continue;
            }
            for &s in &bscc.states {
                out[s] += &weight * &bscc.lrf[s];
            }
        }
        out
    }
}

pub(crate) fn vec_mat(v: &[Rational], m: &[Vec<Rational>]) -> Vec<Rational> {
    let n = m.first().map_or(0, Vec::len);
    let mut out = vec![Rational::zero(); n];
    for (vi, row) in v.iter().zip(m) {
        if vi.is_zero() {
            continue;
        }
        for (o, p) in out.iter_mut().zip(row) {
            if !p.is_zero() {
                *o += vi * p;
            }
        }
    }
    out
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>], exec: Execution) -> Matrix {
    exec.map_slice(a, |row| vec_mat(row, b))
}

fn mat_pow(m: &[Vec<Rational>], mut e: usize, exec: Execution) -> Matrix {
    let n = m.len();
    let mut result: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut base = m.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul(&result, &base, exec);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(&base, &base, exec);
        }
    }
    result
}

/// The cutset Markov chain: states are the assignments of `C` in canonical
/// order and `P(b, c) = Next(B, C, Dirac(b))(c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutsetChain {
    states: VariableSet,
    matrix: Matrix,
    analysis: MarkovAnalysis,
}

impl CutsetChain {
    /// Wraps an arbitrary row-stochastic matrix over the assignments of `states`.
    pub fn from_matrix(states: VariableSet, matrix: Matrix) -> Result<Self> {
        let n = states.num_assignments();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "transition matrix must be {n}×{n}"
            )));
        }
        for row in &matrix {
            let total: Rational = row.iter().sum();
            if !total.is_one() || row.iter().any(|p| !crate::rational::in_unit_interval(p)) {
                return Err(Error::NotADistribution("transition matrix row".into()));
            }
        }
        let analysis = MarkovAnalysis::new(&matrix);
        Ok(CutsetChain {
            states,
            matrix,
            analysis,
        })
    }

    /// The cutset whose assignments are the states.
    pub fn states(&self) -> &VariableSet {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn analysis(&self) -> &MarkovAnalysis {
        &self.analysis
    }

    pub fn bsccs(&self) -> &[Bscc] {
        self.analysis.bsccs()
    }

    /// `γ·P`.
    pub fn step(&self, gamma: &[Rational]) -> Vec<Rational> {
        vec_mat(gamma, &self.matrix)
    }

    fn require_state_dist(&self, gamma0: &JointDistribution) -> Result<()> {
        require_over(gamma0, &self.states)
    }

    /// Absorption probability of each BSCC from `γ₀`, in BSCC order.
    pub fn reach_probs(&self, gamma0: &JointDistribution) -> Result<Vec<Rational>> {
        self.require_state_dist(gamma0)?;
        Ok(self.analysis.reach_probs(gamma0.probs()))
    }

    /// `Σ_D reach(D)·lrf_D` over the cutset.
    pub fn limit_average(&self, gamma0: &JointDistribution) -> Result<JointDistribution> {
        self.require_state_dist(gamma0)?;
        Ok(JointDistribution::from_parts(
            self.states.clone(),
            self.analysis.limit_average(gamma0.probs()),
        ))
    }

    /// The stationary distributions: a single one iff there is one BSCC,
    /// otherwise the convex hull of the per-BSCC long-run frequencies.
    pub fn stationary_set(&self) -> SemanticsFamily {
        let points: Vec<JointDistribution> = self
            .bsccs()
            .iter()
            .map(|b| JointDistribution::from_parts(self.states.clone(), b.lrf.clone()))
            .collect();
        let shape = if points.len() == 1 {
            FamilyShape::Unique(points.into_iter().next().expect("one point"))
        } else {
            FamilyShape::Hull(points)
        };
        SemanticsFamily::new(SemanticsKind::Mc, shape)
            .with_note(format!("stationary set over {}", self.states))
    }

    pub fn cardinality(&self) -> Cardinality {
        if self.bsccs().len() == 1 {
            Cardinality::One
        } else {
            Cardinality::Infinite
        }
    }

    /// Whether `γ₀·Pⁿ` converges, and if so the limit over the cutset.
    ///
    /// Shortcuts: `γ₀` stationary, or every BSCC reached with positive
    /// probability aperiodic. Otherwise, with `p` the lcm of the reached
    /// periods, `L = lim γ₀·(Pᵖ)ᵏ` exists; the full sequence converges iff
    /// `L·P = L`. The offending periods are those of BSCCs where `L` is not
    /// invariant.
    pub fn limit_status(&self, gamma0: &JointDistribution, exec: Execution) -> Result<ChainLimit> {
        self.require_state_dist(gamma0)?;
        let g0 = gamma0.probs();
        let average = self.analysis.limit_average(g0);
        if self.step(g0) == g0 {
            return Ok(ChainLimit::Converges(average));
        }
        let reach = self.analysis.reach_probs(g0);
        let reached: Vec<&Bscc> = self
            .bsccs()
            .iter()
            .zip(&reach)
            .filter(|(_, r)| !r.is_zero())
            .map(|(b, _)| b)
            .collect();
        if reached.iter().all(|b| b.period == 1) {
            return Ok(ChainLimit::Converges(average));
        }
        let p = reached.iter().fold(1usize, |acc, b| acc.lcm(&b.period));
        let power = mat_pow(&self.matrix, p, exec);
        let limit = MarkovAnalysis::new(&power).limit_average(g0);
        let moved = self.step(&limit);
        if moved == limit {
            debug_assert_eq!(limit, average);
            return Ok(ChainLimit::Converges(average));
        }
        let mut periods: Vec<usize> = reached
            .iter()
            .filter(|b| b.states.iter().any(|&s| moved[s] != limit[s]))
            .map(|b| b.period)
            .collect();
        periods.sort_unstable();
        periods.dedup();
        Ok(ChainLimit::Oscillates(periods))
    }
}

/// Outcome of [`CutsetChain::limit_status`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainLimit {
    Converges(Vec<Rational>),
    Oscillates(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cardinality {
    One,
    Infinite,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::One => f.write_str("1"),
            Cardinality::Infinite => f.write_str("infinite"),
        }
    }
}

/// The limit semantics is partial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimStatus {
    Defined(JointDistribution),
    /// Periods of the BSCCs on which the transient distributions keep cycling.
    UndefinedPeriodic(Vec<usize>),
}

impl LimStatus {
    pub fn defined(&self) -> Option<&JointDistribution> {
        match self {
            LimStatus::Defined(mu) => Some(mu),
            LimStatus::UndefinedPeriodic(_) => None,
        }
    }
}

/// Everything derived from one GBN and one cutset, computed once: the
/// dissection evaluator and, unless built with [`CutsetSemantics::without_chain`],
/// the cutset Markov chain.
pub struct CutsetSemantics {
    gbn: Gbn,
    cutset: VariableSet,
    rule: ChainRule,
    to_next: Projection,
    to_extend: Projection,
    to_copies: Projection,
    chain: Option<CutsetChain>,
    exec: Execution,
}

impl CutsetSemantics {
    pub fn new(g: &Gbn, cutset: &VariableSet) -> Result<Self> {
        CutsetSemantics::with_execution(g, cutset, Execution::default())
    }

    pub fn with_execution(g: &Gbn, cutset: &VariableSet, exec: Execution) -> Result<Self> {
        let mut semantics = CutsetSemantics::prepare(g, cutset, exec)?;
        semantics.chain = Some(semantics.build_chain()?);
        Ok(semantics)
    }

    /// Only the dissection; [`CutsetSemantics::chain`] and everything built on it fail.
    pub fn without_chain(g: &Gbn, cutset: &VariableSet) -> Result<Self> {
        CutsetSemantics::prepare(g, cutset, Execution::default())
    }

    fn prepare(g: &Gbn, cutset: &VariableSet, exec: Execution) -> Result<Self> {
        limits::check("cutset size", cutset.len(), limits().max_cutset_size)?;
        let placeholder = JointDistribution::uniform(cutset.clone())?;
        let dissected = dissect(g, cutset, &placeholder)?;
        let rule = ChainRule::new(dissected.gbn())?;
        let full = rule.vars().clone();
        let vars = g.variables();
        Ok(CutsetSemantics {
            to_next: Projection::with_renaming(&full, vars, |v| {
                if cutset.contains(v) {
                    prime(v)
                } else {
                    v.to_string()
                }
            })?,
            to_extend: Projection::new(&full, vars)?,
            to_copies: Projection::with_renaming(&full, cutset, prime)?,
            gbn: g.clone(),
            cutset: cutset.clone(),
            rule,
            chain: None,
            exec,
        })
    }

    fn initial_for(&self, gamma: &JointDistribution) -> Result<Vec<Rational>> {
        require_over(gamma, &self.cutset)?;
        Ok(self.gbn.iota().product(gamma)?.into_probs())
    }

    fn build_chain(&self) -> Result<CutsetChain> {
        let n = self.cutset.num_assignments();
        let rows = self.exec.map_range(n, |b| -> Result<Vec<Rational>> {
            let mut dirac = vec![Rational::zero(); n];
            dirac[b] = Rational::one();
            let gamma = JointDistribution::from_parts(self.cutset.clone(), dirac);
            let iota = self.initial_for(&gamma)?;
            Ok(self.rule.marginal_with(&iota, &self.to_copies, n))
        });
        let matrix = rows.into_iter().collect::<Result<Matrix>>()?;
        Ok(CutsetChain {
            analysis: MarkovAnalysis::new(&matrix),
            states: self.cutset.clone(),
            matrix,
        })
    }

    pub fn gbn(&self) -> &Gbn {
        &self.gbn
    }

    pub fn cutset(&self) -> &VariableSet {
        &self.cutset
    }

    pub fn chain(&self) -> Result<&CutsetChain> {
        self.chain
            .as_ref()
            .ok_or_else(|| Error::Precondition("cutset chain was not built".into()))
    }

    /// `Next(B, C, γ)` over `V`.
    pub fn next(&self, gamma: &JointDistribution) -> Result<JointDistribution> {
        let iota = self.initial_for(gamma)?;
        let vars = self.gbn.variables();
        let probs = self
            .rule
            .marginal_with(&iota, &self.to_next, vars.num_assignments());
        Ok(JointDistribution::from_parts(vars.clone(), probs))
    }

    /// `Next(B, C, γ)|_C`, computed without materializing the joint.
    pub fn next_on_cutset(&self, gamma: &JointDistribution) -> Result<JointDistribution> {
        let iota = self.initial_for(gamma)?;
        let n = self.cutset.num_assignments();
        Ok(JointDistribution::from_parts(
            self.cutset.clone(),
            self.rule.marginal_with(&iota, &self.to_copies, n),
        ))
    }

    /// `Extend(B, C, γ)` over `V`.
    pub fn extend(&self, gamma: &JointDistribution) -> Result<JointDistribution> {
        let iota = self.initial_for(gamma)?;
        let vars = self.gbn.variables();
        let probs = self
            .rule
            .marginal_with(&iota, &self.to_extend, vars.num_assignments());
        Ok(JointDistribution::from_parts(vars.clone(), probs))
    }

    /// `MCS(B, C, γ₀) = Extend(Σ_D reach(D)·lrf_D)`.
    pub fn mcs(&self, gamma0: &JointDistribution) -> Result<JointDistribution> {
        let gamma = self.chain()?.limit_average(gamma0)?;
        self.extend(&gamma)
    }

    /// The limit average; identical to [`CutsetSemantics::mcs`].
    pub fn lim_avg(&self, gamma0: &JointDistribution) -> Result<JointDistribution> {
        self.mcs(gamma0)
    }

    pub fn lim(&self, gamma0: &JointDistribution) -> Result<LimStatus> {
        match self.chain()?.limit_status(gamma0, self.exec)? {
            ChainLimit::Converges(gamma) => Ok(LimStatus::Defined(
                self.extend(&JointDistribution::from_parts(self.cutset.clone(), gamma))?,
            )),
            ChainLimit::Oscillates(periods) => Ok(LimStatus::UndefinedPeriodic(periods)),
        }
    }

    /// Stationary distributions over the cutset.
    pub fn stationary_set(&self) -> Result<SemanticsFamily> {
        Ok(self.chain()?.stationary_set())
    }

    /// `⟦B⟧_MC-C`: the extensions of all stationary distributions.
    pub fn family(&self) -> Result<SemanticsFamily> {
        let stationary = self.stationary_set()?;
        let shape = match stationary.shape {
            FamilyShape::Unique(gamma) => FamilyShape::Unique(self.extend(&gamma)?),
            FamilyShape::Hull(points) => FamilyShape::Hull(
                points
                    .iter()
                    .map(|p| self.extend(p))
                    .collect::<Result<_>>()?,
            ),
            other => other,
        };
        Ok(SemanticsFamily::new(SemanticsKind::Mc, shape)
            .with_note(format!("cutset {}", self.cutset)))
    }

    pub fn cardinality(&self) -> Result<Cardinality> {
        Ok(self.chain()?.cardinality())
    }
}

pub fn cutset_mc(g: &Gbn, cutset: &VariableSet) -> Result<CutsetChain> {
    cutset_mc_with(g, cutset, Execution::default())
}

pub fn cutset_mc_with(g: &Gbn, cutset: &VariableSet, exec: Execution) -> Result<CutsetChain> {
    let semantics = CutsetSemantics::with_execution(g, cutset, exec)?;
    Ok(semantics.chain.expect("built above"))
}

pub fn stationary_set(chain: &CutsetChain) -> SemanticsFamily {
    chain.stationary_set()
}

pub fn reach_probs(chain: &CutsetChain, gamma0: &JointDistribution) -> Result<Vec<Rational>> {
    chain.reach_probs(gamma0)
}

pub fn mcs(g: &Gbn, cutset: &VariableSet, gamma0: &JointDistribution) -> Result<JointDistribution> {
    CutsetSemantics::new(g, cutset)?.mcs(gamma0)
}

pub fn lim(g: &Gbn, cutset: &VariableSet, gamma0: &JointDistribution) -> Result<LimStatus> {
    CutsetSemantics::new(g, cutset)?.lim(gamma0)
}

pub fn lim_avg(
    g: &Gbn,
    cutset: &VariableSet,
    gamma0: &JointDistribution,
) -> Result<JointDistribution> {
    CutsetSemantics::new(g, cutset)?.lim_avg(gamma0)
}

pub fn semantics_cardinality(g: &Gbn, cutset: &VariableSet) -> Result<Cardinality> {
    CutsetSemantics::new(g, cutset)?.cardinality()
}

/// Every CPT entry lies in `(0, 1)`, and so does every ι entry when there are
/// initial nodes.
pub fn is_smooth(g: &Gbn) -> bool {
    let open = |p: &Rational| !p.is_zero() && !p.is_one();
    let iota_ok = g.iota().vars().is_empty() || g.iota().probs().iter().all(open);
    iota_ok && g.cpts().all(|cpt| cpt.rows().iter().all(open))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{triangle_gbn, two_node_feedback_str};
    use crate::inference::chain_rule_dist;
    use crate::model::{Assignment, GbnDraft};
    use crate::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn rs(items: &[&str]) -> Vec<Rational> {
        items.iter().map(|s| r(s)).collect()
    }

    fn vs(names: &[&str]) -> VariableSet {
        VariableSet::new(names.iter().copied()).unwrap()
    }

    fn dist(vars: &[&str], probs: &[&str]) -> JointDistribution {
        JointDistribution::new(vs(vars), rs(probs)).unwrap()
    }

    fn fig5() -> Gbn {
        two_node_feedback_str("1/4", "1", "1/2", "0")
    }

    fn cycle4() -> Gbn {
        two_node_feedback_str("1", "0", "0", "1")
    }

    fn three_bscc() -> Gbn {
        two_node_feedback_str("0", "1", "0", "1")
    }

    fn edges(g: &Gbn) -> Vec<(String, String)> {
        g.graph()
            .edges()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        let mut v: Vec<_> = items
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn dissection_shapes() {
        let g = triangle_gbn();
        let all = vs(&["X", "Y", "Z"]);
        let d = dissect(&g, &all, &JointDistribution::uniform(all.clone()).unwrap()).unwrap();
        assert_eq!(
            edges(d.gbn()),
            pairs(&[("X", "Z'"), ("Y", "Z'"), ("Z", "Y'"), ("Y", "X'")])
        );
        assert_eq!(d.gbn().initial(), all.clone());

        let z = vs(&["Z"]);
        let d = dissect(&g, &z, &JointDistribution::uniform(z.clone()).unwrap()).unwrap();
        assert_eq!(
            edges(d.gbn()),
            pairs(&[("Z", "Y"), ("Y", "X"), ("X", "Z'"), ("Y", "Z'")])
        );
        assert_eq!(
            d.gbn().cpt("Z'").unwrap().rows(),
            g.cpt("Z").unwrap().rows()
        );

        let acyclic = GbnDraft::new(["A", "B"])
            .edge("A", "B")
            .cpt("B", ["A"], rs(&["1/3", "1/2"]))
            .iota(rs(&["1/4", "3/4"]))
            .build()
            .unwrap();
        let d = dissect(&acyclic, &vs(&[]), &dist(&[], &["1"])).unwrap();
        assert_eq!(d.gbn(), &acyclic);
    }

    #[test]
    fn dissection_errors() {
        let g = triangle_gbn();
        assert!(matches!(
            dissect(&g, &vs(&["X"]), &dist(&["X"], &["1/2", "1/2"])),
            Err(Error::NotACutset(_))
        ));
        assert!(matches!(
            dissect(&g, &vs(&["Y"]), &dist(&["X"], &["1/2", "1/2"])),
            Err(Error::DomainMismatch { .. })
        ));
        let acyclic = GbnDraft::new(["A", "B"])
            .edge("A", "B")
            .cpt("B", ["A"], rs(&["1/3", "1/2"]))
            .iota(rs(&["1/4", "3/4"]))
            .build()
            .unwrap();
        assert!(matches!(
            dissect(&acyclic, &vs(&["A"]), &dist(&["A"], &["1/2", "1/2"])),
            Err(Error::CutsetContainsInitialNode(_))
        ));
    }

    #[test]
    fn next_from_dirac() {
        let g = fig5();
        let xy = vs(&["X", "Y"]);
        let ff = Assignment::new([("X", false), ("Y", false)]).unwrap();
        let next = next_dist(&g, &xy, &JointDistribution::dirac(&ff).unwrap()).unwrap();
        let ft = Assignment::new([("X", false), ("Y", true)]).unwrap();
        assert_eq!(next.prob(&ft).unwrap(), &r("3/8"));
    }

    #[test]
    fn fig5_matrix_and_stationary() {
        let chain = cutset_mc(&fig5(), &vs(&["X", "Y"])).unwrap();
        let expected = vec![
            rs(&["3/8", "3/8", "1/8", "1/8"]),
            rs(&["0", "0", "1/2", "1/2"]),
            rs(&["3/4", "0", "1/4", "0"]),
            rs(&["0", "0", "1", "0"]),
        ];
        assert_eq!(chain.matrix(), &expected);
        let stationary = chain.stationary_set();
        let gamma = stationary.unique().unwrap();
        assert_eq!(
            gamma.probs(),
            rs(&["48/121", "18/121", "40/121", "15/121"]).as_slice()
        );
        assert_eq!(chain.step(gamma.probs()), gamma.probs());

        let semantics = CutsetSemantics::new(&fig5(), &vs(&["X", "Y"])).unwrap();
        let next = semantics.next(gamma).unwrap();
        assert_eq!(next.restrict(&vs(&["X", "Y"])).unwrap(), *gamma);
        assert_eq!(semantics.extend(gamma).unwrap(), *gamma);
        for g0 in [
            JointDistribution::uniform(vs(&["X", "Y"])).unwrap(),
            dist(&["X", "Y"], &["0", "0", "0", "1"]),
        ] {
            assert_eq!(semantics.mcs(&g0).unwrap(), *gamma);
        }
        assert_eq!(semantics.cardinality().unwrap(), Cardinality::One);
    }

    #[test]
    fn period_four_cycle() {
        let g = cycle4();
        let xy = vs(&["X", "Y"]);
        let chain = cutset_mc(&g, &xy).unwrap();
        assert_eq!(chain.bsccs().len(), 1);
        assert_eq!(chain.bsccs()[0].period, 4);
        assert_eq!(chain.bsccs()[0].states, vec![0, 1, 2, 3]);
        // FF → TF → TT → FT → FF
        assert_eq!(chain.matrix()[0][2], r("1"));
        assert_eq!(chain.matrix()[2][3], r("1"));
        assert_eq!(chain.matrix()[3][1], r("1"));
        assert_eq!(chain.matrix()[1][0], r("1"));

        let uniform = JointDistribution::uniform(xy.clone()).unwrap();
        let tt = JointDistribution::dirac(&Assignment::new([("X", true), ("Y", true)]).unwrap())
            .unwrap();
        assert_eq!(
            lim(&g, &xy, &uniform).unwrap(),
            LimStatus::Defined(uniform.clone())
        );
        assert_eq!(
            lim(&g, &xy, &tt).unwrap(),
            LimStatus::UndefinedPeriodic(vec![4])
        );
        assert_eq!(lim_avg(&g, &xy, &tt).unwrap(), uniform);
        assert_eq!(chain.stationary_set().unique(), Some(&uniform));
    }

    #[test]
    fn three_bsccs() {
        let g = three_bscc();
        let xy = vs(&["X", "Y"]);
        let chain = cutset_mc(&g, &xy).unwrap();
        let states: Vec<Vec<usize>> = chain.bsccs().iter().map(|b| b.states.clone()).collect();
        assert_eq!(states, vec![vec![0], vec![1, 2], vec![3]]);
        let periods: Vec<usize> = chain.bsccs().iter().map(|b| b.period).collect();
        assert_eq!(periods, vec![1, 2, 1]);

        let family = chain.stationary_set();
        let FamilyShape::Hull(points) = &family.shape else {
            panic!("expected a hull")
        };
        let probs: Vec<&[Rational]> = points.iter().map(|p| p.probs()).collect();
        assert_eq!(
            probs,
            vec![
                rs(&["1", "0", "0", "0"]).as_slice(),
                rs(&["0", "1/2", "1/2", "0"]).as_slice(),
                rs(&["0", "0", "0", "1"]).as_slice()
            ]
        );
        let uniform = JointDistribution::uniform(xy.clone()).unwrap();
        assert_eq!(
            chain.reach_probs(&uniform).unwrap(),
            rs(&["1/4", "1/2", "1/4"])
        );
        assert_eq!(
            semantics_cardinality(&g, &xy).unwrap(),
            Cardinality::Infinite
        );

        // Uniform is stationary; a Dirac on FT oscillates with period 2.
        assert!(lim(&g, &xy, &uniform).unwrap().defined().is_some());
        let ft = JointDistribution::dirac(&Assignment::new([("X", false), ("Y", true)]).unwrap())
            .unwrap();
        assert_eq!(
            lim(&g, &xy, &ft).unwrap(),
            LimStatus::UndefinedPeriodic(vec![2])
        );
        // Mass on FF and TT only never touches the periodic class.
        let ff_tt = dist(&["X", "Y"], &["1/3", "0", "0", "2/3"]);
        assert_eq!(
            lim(&g, &xy, &ff_tt).unwrap(),
            LimStatus::Defined(ff_tt.clone())
        );
    }

    #[test]
    fn periodic_class_with_balanced_entry_converges() {
        // State 0 is transient and splits evenly into the two phases of a
        // period-2 class, so the limit exists although the class is periodic.
        let states = vs(&["A", "B"]);
        let m = vec![
            rs(&["0", "1/2", "1/2", "0"]),
            rs(&["0", "0", "1", "0"]),
            rs(&["0", "1", "0", "0"]),
            rs(&["0", "0", "0", "1"]),
        ];
        let chain = CutsetChain::from_matrix(states.clone(), m).unwrap();
        let g0 = dist(&["A", "B"], &["1", "0", "0", "0"]);
        assert_eq!(
            chain.limit_status(&g0, Execution::Sequential).unwrap(),
            ChainLimit::Converges(rs(&["0", "1/2", "1/2", "0"]))
        );
        let g1 = dist(&["A", "B"], &["0", "1", "0", "0"]);
        assert_eq!(
            chain.limit_status(&g1, Execution::Sequential).unwrap(),
            ChainLimit::Oscillates(vec![2])
        );
    }

    #[test]
    fn reach_through_transient_states() {
        // 0 → {1 (absorbing), 2 → 3 (absorbing)} with weights 1/3, 2/3.
        let m = vec![
            rs(&["0", "1/3", "2/3", "0"]),
            rs(&["0", "1", "0", "0"]),
            rs(&["0", "0", "0", "1"]),
            rs(&["0", "0", "0", "1"]),
        ];
        let chain = CutsetChain::from_matrix(vs(&["A", "B"]), m).unwrap();
        assert_eq!(chain.analysis().transient_states(), &[0, 2]);
        let g0 = dist(&["A", "B"], &["1", "0", "0", "0"]);
        assert_eq!(chain.reach_probs(&g0).unwrap(), rs(&["1/3", "2/3"]));
        let inside = dist(&["A", "B"], &["0", "1", "0", "0"]);
        assert_eq!(chain.reach_probs(&inside).unwrap(), rs(&["1", "0"]));
    }

    #[test]
    fn empty_cutset_on_acyclic_gbn() {
        let g = GbnDraft::new(["A", "B"])
            .edge("A", "B")
            .cpt("B", ["A"], rs(&["1/3", "1/2"]))
            .iota(rs(&["1/4", "3/4"]))
            .build()
            .unwrap();
        let empty = vs(&[]);
        let trivial = dist(&[], &["1"]);
        let bn = chain_rule_dist(&g).unwrap();
        assert_eq!(next_dist(&g, &empty, &trivial).unwrap(), bn);
        assert_eq!(extend(&g, &empty, &trivial).unwrap(), bn);
        assert_eq!(mcs(&g, &empty, &trivial).unwrap(), bn);
        assert_eq!(semantics_cardinality(&g, &empty).unwrap(), Cardinality::One);
    }

    #[test]
    fn extend_keeps_cutset_marginal() {
        let g = triangle_gbn();
        let z = vs(&["Z"]);
        let gamma = dist(&["Z"], &["2/7", "5/7"]);
        assert_eq!(extend(&g, &z, &gamma).unwrap().restrict(&z).unwrap(), gamma);
        let all = vs(&["X", "Y", "Z"]);
        let gamma = dist(
            &["X", "Y", "Z"],
            &["1/8", "0", "1/4", "1/8", "1/8", "1/8", "1/8", "1/8"],
        );
        assert_eq!(extend(&g, &all, &gamma).unwrap(), gamma);
    }

    #[test]
    fn smoothness() {
        assert!(is_smooth(&two_node_feedback_str(
            "1/3", "1/2", "2/3", "1/5"
        )));
        assert!(!is_smooth(&fig5()));
        let g = triangle_gbn();
        assert!(is_smooth(&g));
        let chain = cutset_mc(&g, &vs(&["Y"])).unwrap();
        assert!(chain.matrix().iter().flatten().all(|p| !p.is_zero()));
    }

    #[test]
    fn sequential_and_parallel_chains_agree() {
        let g = triangle_gbn();
        let c = vs(&["X", "Y", "Z"]);
        assert_eq!(
            cutset_mc_with(&g, &c, Execution::Sequential).unwrap(),
            cutset_mc_with(&g, &c, Execution::Parallel).unwrap()
        );
    }
}
