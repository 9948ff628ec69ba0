//! Variables, assignments, joint distributions, CPTs and the GBN itself.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::graph::DiGraph;
use crate::limits::{self, limits};
use crate::rational::{format_rational, in_unit_interval, Rational};
use crate::{Error, Result};

/// A set of Boolean variables kept in canonical (ascending name) order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableSet {
    names: Vec<String>,
}

fn is_valid_name(name: &str) -> bool {
    let base = name.trim_end_matches('\'');
    let mut chars = base.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VariableSet {
    /// Builds a set from names in any order. Duplicates and malformed names are rejected.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = BTreeSet::new();
        for name in names {
            let name = name.into();
            if !is_valid_name(&name) {
                return Err(Error::InvalidName(name));
            }
            if seen.contains(&name) {
                return Err(Error::DuplicateVariable(name));
            }
            seen.insert(name);
        }
        Ok(VariableSet {
            names: seen.into_iter().collect(),
        })
    }

    /// Parses a comma-separated list such as `"X,Y"`. The empty string is the empty set.
    pub fn parse_list(list: &str) -> Result<Self> {
        VariableSet::new(
            list.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string),
        )
    }

    pub fn empty() -> Self {
        VariableSet::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    /// Position of `name` in canonical order.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.names
            .binary_search_by(|probe| probe.as_str().cmp(name))
            .ok()
    }

    /// Number of assignments, `2^n`.
    pub fn num_assignments(&self) -> usize {
        1usize << self.names.len()
    }

    pub fn is_subset(&self, other: &VariableSet) -> bool {
        self.iter().all(|n| other.contains(n))
    }

    pub fn is_disjoint(&self, other: &VariableSet) -> bool {
        self.iter().all(|n| !other.contains(n))
    }

    pub fn union(&self, other: &VariableSet) -> VariableSet {
        let merged: BTreeSet<&String> = self.names.iter().chain(other.names.iter()).collect();
        VariableSet {
            names: merged.into_iter().cloned().collect(),
        }
    }

    pub fn difference(&self, other: &VariableSet) -> VariableSet {
        VariableSet {
            names: self
                .names
                .iter()
                .filter(|n| !other.contains(n))
                .cloned()
                .collect(),
        }
    }

    pub fn intersection(&self, other: &VariableSet) -> VariableSet {
        VariableSet {
            names: self
                .names
                .iter()
                .filter(|n| other.contains(n))
                .cloned()
                .collect(),
        }
    }

    /// All assignments in canonical order.
    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        (0..self.num_assignments()).map(move |index| Assignment {
            vars: self.clone(),
            index,
        })
    }

    pub(crate) fn shift_of(&self, position: usize) -> u32 {
        (self.names.len() - 1 - position) as u32
    }

    pub(crate) fn require_known(&self, other: &VariableSet) -> Result<()> {
        match other.iter().find(|n| !self.contains(n)) {
            Some(unknown) => Err(Error::UnknownVariable(unknown.to_string())),
            None => Ok(()),
        }
    }
}

impl fmt::Display for VariableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(","))
    }
}

/// Maps canonical indices over one variable set to indices over another,
/// optionally renaming variables on the way.
#[derive(Clone, Debug)]
pub(crate) struct Projection {
    moves: Vec<(u32, u32)>,
}

impl Projection {
    /// Projection onto a subset `to ⊆ from`.
    pub(crate) fn new(from: &VariableSet, to: &VariableSet) -> Result<Self> {
        Projection::with_renaming(from, to, |name| name.to_string())
    }

    /// Projection where target variable `v` is read from source variable `source_of(v)`.
    pub(crate) fn with_renaming<F>(
        from: &VariableSet,
        to: &VariableSet,
        source_of: F,
    ) -> Result<Self>
    where
        F: Fn(&str) -> String,
    {
        let moves = to
            .iter()
            .enumerate()
            .map(|(dst_pos, name)| {
                let source = source_of(name);
                let src_pos = from
                    .position(&source)
                    .ok_or(Error::UnknownVariable(source))?;
                Ok((from.shift_of(src_pos), to.shift_of(dst_pos)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Projection { moves })
    }

    #[inline]
    pub(crate) fn apply(&self, index: usize) -> usize {
        self.moves
            .iter()
            .fold(0, |acc, &(src, dst)| acc | (((index >> src) & 1) << dst))
    }
}

/// A total assignment of truth values to a [`VariableSet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    vars: VariableSet,
    index: usize,
}

impl Assignment {
    pub fn new<I, S>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        let pairs: Vec<(String, bool)> = values.into_iter().map(|(n, v)| (n.into(), v)).collect();
        let vars = VariableSet::new(pairs.iter().map(|(n, _)| n.clone()))?;
        let index = pairs.iter().fold(0, |acc, (name, value)| {
            let shift = vars.shift_of(vars.position(name).expect("name was just inserted"));
            acc | (usize::from(*value) << shift)
        });
        Ok(Assignment { vars, index })
    }

    pub fn empty() -> Self {
        Assignment {
            vars: VariableSet::empty(),
            index: 0,
        }
    }

    pub fn from_index(vars: VariableSet, index: usize) -> Result<Self> {
        if index >= vars.num_assignments() {
            return Err(Error::DimensionMismatch(format!(
                "index {index} out of range for {} variables",
                vars.len()
            )));
        }
        Ok(Assignment { vars, index })
    }

    /// Parses a bitstring such as `"01"` over `vars` in canonical order.
    pub fn from_bitstring(vars: VariableSet, bits: &str) -> Result<Self> {
        if bits.len() != vars.len() || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::InvalidAssignmentKey {
                key: bits.to_string(),
                expected: vars.len(),
            });
        }
        let index = bits
            .bytes()
            .fold(0usize, |acc, b| (acc << 1) | usize::from(b == b'1'));
        Ok(Assignment { vars, index })
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    /// `Σ bit(b(vᵢ))·2^(n−1−i)` with variables sorted by name.
    pub fn canonical_index(&self) -> usize {
        self.index
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.vars
            .position(name)
            .map(|p| (self.index >> self.vars.shift_of(p)) & 1 == 1)
    }

    pub fn values(&self) -> impl Iterator<Item = (&str, bool)> + '_ {
        self.vars
            .iter()
            .enumerate()
            .map(move |(p, n)| (n, (self.index >> self.vars.shift_of(p)) & 1 == 1))
    }

    pub fn to_bitstring(&self) -> String {
        bitstring(self.index, self.vars.len())
    }

    /// `b_𝒰`, the restriction to a subset.
    pub fn restrict(&self, subset: &VariableSet) -> Result<Assignment> {
        self.vars.require_known(subset)?;
        let projection = Projection::new(&self.vars, subset)?;
        Ok(Assignment {
            vars: subset.clone(),
            index: projection.apply(self.index),
        })
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values()
            .map(|(n, v)| format!("{n}={}", if v { 'T' } else { 'F' }))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub(crate) fn bitstring(index: usize, width: usize) -> String {
    (0..width)
        .map(|i| {
            if (index >> (width - 1 - i)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// The `FF, FT, TF, TT`-style label of each canonical index.
pub fn assignment_labels(vars: &VariableSet) -> Vec<String> {
    (0..vars.num_assignments())
        .map(|i| {
            bitstring(i, vars.len())
                .chars()
                .map(|c| if c == '1' { 'T' } else { 'F' })
                .collect()
        })
        .collect()
}

/// A dense distribution over all assignments of a variable set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JointDistribution {
    vars: VariableSet,
    probs: Vec<Rational>,
}

impl JointDistribution {
    /// Checks length, range and exact normalization.
    pub fn new(vars: VariableSet, probs: Vec<Rational>) -> Result<Self> {
        limits::check(
            "joint distribution variables",
            vars.len(),
            limits().max_joint_variables,
        )?;
        if probs.len() != vars.num_assignments() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for {} variables",
                probs.len(),
                vars.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !in_unit_interval(p)) {
            return Err(Error::NotADistribution(format!(
                "entry {} outside [0,1]",
                format_rational(p)
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::NotADistribution(format!(
                "entries sum to {}",
                format_rational(&total)
            )));
        }
        Ok(JointDistribution { vars, probs })
    }

    pub(crate) fn from_parts(vars: VariableSet, probs: Vec<Rational>) -> Self {
        debug_assert_eq!(probs.len(), vars.num_assignments());
        debug_assert!(probs.iter().sum::<Rational>().is_one());
        JointDistribution { vars, probs }
    }

    pub fn uniform(vars: VariableSet) -> Result<Self> {
        limits::check(
            "joint distribution variables",
            vars.len(),
            limits().max_joint_variables,
        )?;
        let n = vars.num_assignments();
        let p = Rational::new(1.into(), n.into());
        Ok(JointDistribution {
            probs: vec![p; n],
            vars,
        })
    }

    /// `Dirac(b)`.
    pub fn dirac(b: &Assignment) -> Result<Self> {
        limits::check(
            "joint distribution variables",
            b.vars.len(),
            limits().max_joint_variables,
        )?;
        let mut probs = vec![Rational::zero(); b.vars.num_assignments()];
        probs[b.index] = Rational::one();
        Ok(JointDistribution {
            vars: b.vars.clone(),
            probs,
        })
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    /// Entries in canonical assignment order.
    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<Rational> {
        self.probs
    }

    pub fn prob(&self, b: &Assignment) -> Result<&Rational> {
        if b.vars != self.vars {
            return Err(Error::DomainMismatch {
                expected: self.vars.to_string(),
                found: b.vars.to_string(),
            });
        }
        Ok(&self.probs[b.index])
    }

    /// `μ|_𝒰`.
    pub fn restrict(&self, subset: &VariableSet) -> Result<JointDistribution> {
        self.vars.require_known(subset)?;
        if *subset == self.vars {
            return Ok(self.clone());
        }
        let projection = Projection::new(&self.vars, subset)?;
        Ok(JointDistribution {
            probs: marginalize(&self.probs, &projection, subset.num_assignments()),
            vars: subset.clone(),
        })
    }

    /// `μ(d)` for a partial assignment `d`.
    pub fn partial_prob(&self, d: &Assignment) -> Result<Rational> {
        Ok(self.restrict(&d.vars)?.probs[d.index].clone())
    }

    /// `μ ⊗ ν` over the disjoint union of the variable sets.
    pub fn product(&self, other: &JointDistribution) -> Result<JointDistribution> {
        if let Some(shared) = self.vars.iter().find(|n| other.vars.contains(n)) {
            return Err(Error::OverlappingVariables(shared.to_string()));
        }
        let vars = self.vars.union(&other.vars);
        limits::check(
            "joint distribution variables",
            vars.len(),
            limits().max_joint_variables,
        )?;
        let left = Projection::new(&vars, &self.vars)?;
        let right = Projection::new(&vars, &other.vars)?;
        let probs = (0..vars.num_assignments())
            .map(|c| &self.probs[left.apply(c)] * &other.probs[right.apply(c)])
            .collect();
        Ok(JointDistribution { vars, probs })
    }

    /// `½ Σ |μ(b) − ν(b)|`.
    pub fn total_variation(&self, other: &JointDistribution) -> Result<Rational> {
        if self.vars != other.vars {
            return Err(Error::DomainMismatch {
                expected: self.vars.to_string(),
                found: other.vars.to_string(),
            });
        }
        let sum: Rational = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| num_traits::abs(a - b))
            .sum();
        Ok(sum / Rational::from_integer(2.into()))
    }

    /// Entries as `"p/q"` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.probs.iter().map(format_rational).collect()
    }
}

pub(crate) fn marginalize(
    probs: &[Rational],
    projection: &Projection,
    size: usize,
) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); size];
    for (index, p) in probs.iter().enumerate() {
        if !p.is_zero() {
            out[projection.apply(index)] += p;
        }
    }
    out
}

impl fmt::Display for JointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⟨{}⟩", self.vars, self.to_strings().join(" "))
    }
}

/// A conditional probability table: `Pr(X=T | b)` for every parent assignment `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cpt {
    node: String,
    parents: VariableSet,
    rows: Vec<Rational>,
}

impl Cpt {
    pub fn new(node: impl Into<String>, parents: VariableSet, rows: Vec<Rational>) -> Result<Self> {
        let node = node.into();
        if rows.len() != parents.num_assignments() {
            return Err(Error::DimensionMismatch(format!(
                "CPT for `{node}` has {} rows, expected {}",
                rows.len(),
                parents.num_assignments()
            )));
        }
        if let Some(p) = rows.iter().find(|p| !in_unit_interval(p)) {
            return Err(Error::NotADistribution(format!(
                "CPT entry {} for `{node}` outside [0,1]",
                format_rational(p)
            )));
        }
        Ok(Cpt {
            node,
            parents,
            rows,
        })
    }

    pub fn node(&self) -> &str {
        &self.node
    }

    pub fn parents(&self) -> &VariableSet {
        &self.parents
    }

    /// `Pr(X=T | b)` in canonical order of the parent assignments.
    pub fn rows(&self) -> &[Rational] {
        &self.rows
    }

    pub fn prob_true(&self, parent_assignment: &Assignment) -> Result<&Rational> {
        if parent_assignment.vars != self.parents {
            return Err(Error::DomainMismatch {
                expected: self.parents.to_string(),
                found: parent_assignment.vars.to_string(),
            });
        }
        Ok(&self.rows[parent_assignment.index])
    }

    pub(crate) fn with_node(&self, node: String) -> Cpt {
        Cpt {
            node,
            parents: self.parents.clone(),
            rows: self.rows.clone(),
        }
    }
}

/// A validated generalized Bayesian network `⟨G, P, ι⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gbn {
    graph: DiGraph,
    cpts: BTreeMap<String, Cpt>,
    iota: JointDistribution,
}

impl Gbn {
    pub(crate) fn from_parts(
        graph: DiGraph,
        cpts: BTreeMap<String, Cpt>,
        iota: JointDistribution,
    ) -> Self {
        Gbn { graph, cpts, iota }
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn variables(&self) -> &VariableSet {
        self.graph.nodes()
    }

    pub fn initial(&self) -> VariableSet {
        self.graph.initial_nodes()
    }

    pub fn non_initial(&self) -> VariableSet {
        self.variables().difference(&self.initial())
    }

    pub fn cpt(&self, node: &str) -> Option<&Cpt> {
        self.cpts.get(node)
    }

    pub fn cpts(&self) -> impl Iterator<Item = &Cpt> {
        self.cpts.values()
    }

    /// ι, the distribution over the initial nodes.
    pub fn iota(&self) -> &JointDistribution {
        &self.iota
    }

    pub fn is_acyclic(&self) -> bool {
        self.graph.is_acyclic()
    }

    pub fn to_draft(&self) -> GbnDraft {
        let cpts = self
            .cpts
            .values()
            .map(|cpt| {
                let rows = cpt
                    .rows
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (bitstring(i, cpt.parents.len()), p.clone()))
                    .collect();
                (
                    cpt.node.clone(),
                    CptDraft {
                        parents: cpt.parents.names().to_vec(),
                        rows,
                    },
                )
            })
            .collect();
        let iota = self
            .iota
            .probs
            .iter()
            .enumerate()
            .map(|(i, p)| (bitstring(i, self.iota.vars.len()), p.clone()))
            .collect();
        GbnDraft {
            variables: self.variables().names().to_vec(),
            edges: self
                .graph
                .edges()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            cpts,
            iota: Some(iota),
        }
    }
}

/// An unvalidated GBN description, e.g. as read from a document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GbnDraft {
    pub variables: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub cpts: BTreeMap<String, CptDraft>,
    /// Keys are bitstrings over the initial nodes in canonical order; `None`
    /// means "not given", which is only valid when there are no initial nodes.
    pub iota: Option<BTreeMap<String, Rational>>,
}

/// Unvalidated CPT: row keys are bitstrings over the parents in canonical order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CptDraft {
    pub parents: Vec<String>,
    pub rows: BTreeMap<String, Rational>,
}

impl GbnDraft {
    pub fn new<I, S>(variables: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        GbnDraft {
            variables: variables.into_iter().map(Into::into).collect(),
            ..GbnDraft::default()
        }
    }

    pub fn edge(mut self, from: &str, to: &str) -> Self {
        self.edges.push((from.to_string(), to.to_string()));
        self
    }

    /// Adds a CPT whose rows are listed in canonical order of the (sorted) parents.
    pub fn cpt<I, S, R>(mut self, node: &str, parents: I, rows: R) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
        R: IntoIterator<Item = Rational>,
    {
        let parents: Vec<String> = parents.into_iter().map(Into::into).collect();
        let width = parents.len();
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, p)| (bitstring(i, width), p))
            .collect();
        self.cpts
            .insert(node.to_string(), CptDraft { parents, rows });
        self
    }

    /// Sets ι from probabilities in canonical order over the initial nodes.
    pub fn iota<R>(mut self, probs: R) -> Self
    where
        R: IntoIterator<Item = Rational>,
    {
        let probs: Vec<Rational> = probs.into_iter().collect();
        let width = probs.len().max(1).trailing_zeros() as usize;
        self.iota = Some(
            probs
                .into_iter()
                .enumerate()
                .map(|(i, p)| (bitstring(i, width), p))
                .collect(),
        );
        self
    }

    pub fn validate(&self) -> ValidationReport {
        validate_gbn(self)
    }

    pub fn build(&self) -> Result<Gbn> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(Error::Validation(report));
        }
        let nodes = VariableSet::new(self.variables.iter().cloned())?;
        let graph = DiGraph::new(
            nodes,
            self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        )?;
        let mut cpts = BTreeMap::new();
        for (node, draft) in &self.cpts {
            let parents = VariableSet::new(draft.parents.iter().cloned())?;
            let rows = (0..parents.num_assignments())
                .map(|i| draft.rows[&bitstring(i, parents.len())].clone())
                .collect();
            cpts.insert(node.clone(), Cpt::new(node.clone(), parents, rows)?);
        }
        let init = graph.initial_nodes();
        let iota = match &self.iota {
            Some(map) => {
                let probs = (0..init.num_assignments())
                    .map(|i| {
                        map.get(&bitstring(i, init.len()))
                            .cloned()
                            .unwrap_or_else(Rational::zero)
                    })
                    .collect();
                JointDistribution::new(init, probs)?
            }
            None => JointDistribution::new(init, vec![Rational::one()])?,
        };
        Ok(Gbn::from_parts(graph, cpts, iota))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IssueKind {
    MissingCptRow,
    ParentMismatch,
    NotNormalized,
    OutOfRange,
    IotaDomainMismatch,
    MissingCpt,
    UnexpectedCpt,
    UnknownVariable,
    DuplicateVariable,
    InvalidName,
    MalformedKey,
    Capacity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationIssue {
    /// The node the issue is attached to; `None` for ι or graph-level issues.
    pub node: Option<String>,
    pub kind: IssueKind,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has(&self, kind: IssueKind) -> bool {
        self.issues.iter().any(|i| i.kind == kind)
    }

    fn push(&mut self, node: Option<&str>, kind: IssueKind, detail: String) {
        self.issues.push(ValidationIssue {
            node: node.map(str::to_string),
            kind,
            detail,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "OK");
        }
        for issue in &self.issues {
            let node = issue.node.as_deref().unwrap_or("iota");
            writeln!(f, "{node}: {:?}: {}", issue.kind, issue.detail)?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a GBN description.
pub fn validate_gbn(draft: &GbnDraft) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut known = BTreeSet::new();
    for name in &draft.variables {
        if name.contains('\'') || !is_valid_name(name) {
            report.push(
                Some(name),
                IssueKind::InvalidName,
                "names must match [A-Za-z_][A-Za-z0-9_]*".into(),
            );
        } else if !known.insert(name.clone()) {
            report.push(
                Some(name),
                IssueKind::DuplicateVariable,
                "declared twice".into(),
            );
        }
    }
    let max = limits().max_joint_variables;
    if known.len() > max {
        report.push(
            None,
            IssueKind::Capacity,
            format!("{} variables exceed the limit of {max}", known.len()),
        );
    }

    let mut preds: BTreeMap<&str, BTreeSet<&str>> = known
        .iter()
        .map(|n| (n.as_str(), BTreeSet::new()))
        .collect();
    for (from, to) in &draft.edges {
        let mut ok = true;
        for end in [from, to] {
            if !known.contains(end) {
                report.push(
                    Some(end),
                    IssueKind::UnknownVariable,
                    format!("edge {from} -> {to}"),
                );
                ok = false;
            }
        }
        if ok {
            preds
                .get_mut(to.as_str())
                .expect("known")
                .insert(from.as_str());
        }
    }
    let initial: Vec<&str> = preds
        .iter()
        .filter(|(_, p)| p.is_empty())
        .map(|(n, _)| *n)
        .collect();

    for (node, cpt) in &draft.cpts {
        let Some(node_preds) = preds.get(node.as_str()) else {
            report.push(
                Some(node),
                IssueKind::UnknownVariable,
                "CPT for undeclared variable".into(),
            );
            continue;
        };
        if node_preds.is_empty() {
            report.push(
                Some(node),
                IssueKind::UnexpectedCpt,
                "initial nodes are covered by iota".into(),
            );
            continue;
        }
        let listed: BTreeSet<&str> = cpt.parents.iter().map(String::as_str).collect();
        if listed.len() != cpt.parents.len() || listed != *node_preds {
            report.push(
                Some(node),
                IssueKind::ParentMismatch,
                format!(
                    "CPT parents [{}] but graph predecessors [{}]",
                    cpt.parents.join(","),
                    node_preds.iter().copied().collect::<Vec<_>>().join(",")
                ),
            );
            continue;
        }
        let width = listed.len();
        for (key, p) in &cpt.rows {
            if key.len() != width || !key.bytes().all(|b| b == b'0' || b == b'1') {
                report.push(
                    Some(node),
                    IssueKind::MalformedKey,
                    format!("row key `{key}`"),
                );
            } else if !in_unit_interval(p) {
                report.push(
                    Some(node),
                    IssueKind::OutOfRange,
                    format!("row {key} = {}", format_rational(p)),
                );
            }
        }
        if width > max {
            continue;
        }
        for i in 0..(1usize << width) {
            let key = bitstring(i, width);
            if !cpt.rows.contains_key(&key) {
                report.push(
                    Some(node),
                    IssueKind::MissingCptRow,
                    format!("row `{key}` missing"),
                );
            }
        }
    }
    for (node, node_preds) in &preds {
        if !node_preds.is_empty() && !draft.cpts.contains_key(*node) {
            report.push(
                Some(node),
                IssueKind::MissingCpt,
                "non-initial node without CPT".into(),
            );
        }
    }

    match &draft.iota {
        None if initial.is_empty() => {}
        None => report.push(
            None,
            IssueKind::IotaDomainMismatch,
            format!("missing iota over initial nodes [{}]", initial.join(",")),
        ),
        Some(map) => {
            let mut total = Rational::zero();
            let mut domain_ok = true;
            for (key, p) in map {
                if key.len() != initial.len() || !key.bytes().all(|b| b == b'0' || b == b'1') {
                    report.push(
                        None,
                        IssueKind::IotaDomainMismatch,
                        format!(
                            "key `{key}` is not a bitstring over [{}]",
                            initial.join(",")
                        ),
                    );
                    domain_ok = false;
                } else if !in_unit_interval(p) {
                    report.push(
                        None,
                        IssueKind::OutOfRange,
                        format!("iota {key} = {}", format_rational(p)),
                    );
                    domain_ok = false;
                } else {
                    total += p;
                }
            }
            if domain_ok && !total.is_one() {
                report.push(
                    None,
                    IssueKind::NotNormalized,
                    format!("iota sums to {}", format_rational(&total)),
                );
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn rs(items: &[&str]) -> Vec<Rational> {
        items.iter().map(|s| r(s)).collect()
    }

    fn xy() -> VariableSet {
        VariableSet::new(["Y", "X"]).unwrap()
    }

    #[test]
    fn canonical_index_examples() {
        let idx = |x, y| {
            Assignment::new([("X", x), ("Y", y)])
                .unwrap()
                .canonical_index()
        };
        assert_eq!(idx(false, false), 0);
        assert_eq!(idx(false, true), 1);
        assert_eq!(idx(true, false), 2);
        assert_eq!(idx(true, true), 3);
    }

    #[test]
    fn variable_set_is_sorted_and_unique() {
        assert_eq!(xy().names(), ["X", "Y"]);
        assert!(matches!(
            VariableSet::new(["X", "X"]),
            Err(Error::DuplicateVariable(_))
        ));
        assert!(matches!(
            VariableSet::new(["1X"]),
            Err(Error::InvalidName(_))
        ));
    }

    #[test]
    fn restrict_sums_branches() {
        let mu = JointDistribution::new(xy(), rs(&["1/10", "3/10", "3/10", "3/10"])).unwrap();
        let x = VariableSet::new(["X"]).unwrap();
        assert_eq!(
            mu.restrict(&x).unwrap().probs(),
            rs(&["4/10", "6/10"]).as_slice()
        );
        assert_eq!(mu.restrict(&xy()).unwrap(), mu);
        let unknown = VariableSet::new(["Q"]).unwrap();
        assert!(matches!(
            mu.restrict(&unknown),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn restrict_of_dirac_is_dirac() {
        let b = Assignment::new([("X", true), ("Y", true)]).unwrap();
        let y = VariableSet::new(["Y"]).unwrap();
        let restricted = JointDistribution::dirac(&b).unwrap().restrict(&y).unwrap();
        let expected = JointDistribution::dirac(&Assignment::new([("Y", true)]).unwrap()).unwrap();
        assert_eq!(restricted, expected);
        assert_eq!(
            restricted,
            JointDistribution::dirac(&b.restrict(&y).unwrap()).unwrap()
        );
    }

    #[test]
    fn partial_prob_examples() {
        let mu = JointDistribution::new(xy(), rs(&["1/10", "3/10", "3/10", "3/10"])).unwrap();
        let d = Assignment::new([("X", true)]).unwrap();
        assert_eq!(mu.partial_prob(&d).unwrap(), r("6/10"));
        assert_eq!(mu.partial_prob(&Assignment::empty()).unwrap(), r("1"));
        let full = Assignment::new([("X", false), ("Y", false)]).unwrap();
        assert_eq!(mu.partial_prob(&full).unwrap(), r("1/10"));
    }

    #[test]
    fn product_examples() {
        let x = VariableSet::new(["X"]).unwrap();
        let y = VariableSet::new(["Y"]).unwrap();
        let mu = JointDistribution::new(x.clone(), rs(&["1/4", "3/4"])).unwrap();
        let nu = JointDistribution::new(y.clone(), rs(&["1/3", "2/3"])).unwrap();
        let prod = mu.product(&nu).unwrap();
        assert_eq!(
            prod.probs(),
            rs(&["1/12", "2/12", "3/12", "6/12"]).as_slice()
        );

        let half_x = JointDistribution::uniform(x.clone()).unwrap();
        let half_y = JointDistribution::uniform(y.clone()).unwrap();
        assert_eq!(
            half_x.product(&half_y).unwrap(),
            JointDistribution::uniform(xy()).unwrap()
        );

        let dx = JointDistribution::dirac(&Assignment::new([("X", true)]).unwrap()).unwrap();
        let dy = JointDistribution::dirac(&Assignment::new([("Y", false)]).unwrap()).unwrap();
        let both = Assignment::new([("X", true), ("Y", false)]).unwrap();
        assert_eq!(
            dx.product(&dy).unwrap(),
            JointDistribution::dirac(&both).unwrap()
        );

        assert!(matches!(
            mu.product(&mu),
            Err(Error::OverlappingVariables(_))
        ));
    }

    #[test]
    fn dirac_examples() {
        let b = Assignment::new([("X", true)]).unwrap();
        assert_eq!(
            JointDistribution::dirac(&b).unwrap().probs(),
            rs(&["0", "1"]).as_slice()
        );
        let b = Assignment::new([("X", false), ("Y", false)]).unwrap();
        assert_eq!(
            JointDistribution::dirac(&b).unwrap().probs(),
            rs(&["1", "0", "0", "0"]).as_slice()
        );
    }

    #[test]
    fn new_rejects_non_distributions() {
        assert!(JointDistribution::new(xy(), rs(&["1/2", "1/2", "0", "1/10"])).is_err());
        assert!(JointDistribution::new(xy(), rs(&["-1/2", "1/2", "1/2", "1/2"])).is_err());
        assert!(JointDistribution::new(xy(), rs(&["1"])).is_err());
    }

    fn fig1(s1: &str, s2: &str, t1: &str, t2: &str) -> GbnDraft {
        GbnDraft::new(["X", "Y"])
            .edge("Y", "X")
            .edge("X", "Y")
            .cpt("X", ["Y"], rs(&[s1, s2]))
            .cpt("Y", ["X"], rs(&[t1, t2]))
    }

    #[test]
    fn validate_examples() {
        assert!(fig1("3/4", "1/2", "3/4", "1/2").validate().is_ok());
        let g = fig1("3/4", "1/2", "3/4", "1/2").build().unwrap();
        assert_eq!(g.iota().vars().len(), 0);
        assert_eq!(g.iota().probs(), rs(&["1"]).as_slice());

        let mut missing = fig1("3/4", "1/2", "3/4", "1/2");
        missing.cpts.get_mut("X").unwrap().rows.remove("1");
        let report = missing.validate();
        assert!(report.has(IssueKind::MissingCptRow));
        assert_eq!(report.issues[0].node.as_deref(), Some("X"));

        let bad_iota = GbnDraft::new(["A", "B"])
            .edge("A", "B")
            .cpt("B", ["A"], rs(&["0", "1"]))
            .iota(rs(&["1/2", "4/10"]));
        assert!(bad_iota.validate().has(IssueKind::NotNormalized));
    }

    #[test]
    fn validate_reports_each_kind() {
        let mismatch = GbnDraft::new(["A", "B"])
            .edge("A", "B")
            .cpt("B", Vec::<String>::new(), rs(&["1/2"]))
            .iota(rs(&["1/2", "1/2"]));
        assert!(mismatch.validate().has(IssueKind::ParentMismatch));

        let out_of_range = fig1("3/2", "1/2", "3/4", "1/2");
        assert!(out_of_range.validate().has(IssueKind::OutOfRange));

        let mut wrong_domain =
            GbnDraft::new(["A", "B"])
                .edge("A", "B")
                .cpt("B", ["A"], rs(&["0", "1"]));
        wrong_domain.iota = Some([("00".to_string(), r("1"))].into_iter().collect());
        assert!(wrong_domain.validate().has(IssueKind::IotaDomainMismatch));

        let missing_cpt = GbnDraft::new(["A", "B"])
            .edge("A", "B")
            .iota(rs(&["1/2", "1/2"]));
        assert!(missing_cpt.validate().has(IssueKind::MissingCpt));
        assert!(matches!(missing_cpt.build(), Err(Error::Validation(_))));
    }

    #[test]
    fn draft_round_trip() {
        let g = GbnDraft::new(["A", "B", "C"])
            .edge("A", "C")
            .edge("B", "C")
            .cpt("C", ["B", "A"], rs(&["0", "1/3", "1/2", "1"]))
            .iota(rs(&["1/4", "1/4", "0", "1/2"]))
            .build()
            .unwrap();
        assert_eq!(g.to_draft().build().unwrap(), g);
        // Rows are keyed over sorted parents: "01" means A=F, B=T.
        let c = g.cpt("C").unwrap();
        let row = Assignment::new([("A", false), ("B", true)]).unwrap();
        assert_eq!(c.prob_true(&row).unwrap(), &r("1/3"));
    }
}
