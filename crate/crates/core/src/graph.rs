//! Directed graphs over named variables: SCCs, cutsets, the initial-node
//! closure, cut-restriction and d-separation.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::limits::{self, limits};
use crate::model::VariableSet;
use crate::{Error, Execution, Result};

/// A directed graph whose nodes are the variables of a [`VariableSet`].
/// Self-loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiGraph {
    nodes: VariableSet,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl DiGraph {
    pub fn new<'a, I>(nodes: VariableSet, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut pairs = BTreeSet::new();
        for (from, to) in edges {
            let a = nodes
                .position(from)
                .ok_or_else(|| Error::UnknownVariable(from.to_string()))?;
            let b = nodes
                .position(to)
                .ok_or_else(|| Error::UnknownVariable(to.to_string()))?;
            pairs.insert((a, b));
        }
        Ok(DiGraph::from_index_edges(nodes, pairs))
    }

    pub(crate) fn from_index_edges<I>(nodes: VariableSet, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = nodes.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (a, b) in edges {
            succ[a].push(b);
            pred[b].push(a);
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        DiGraph { nodes, succ, pred }
    }

    pub fn nodes(&self) -> &VariableSet {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn name(&self, i: usize) -> &str {
        &self.nodes.names()[i]
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.nodes
            .position(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn indices(&self, set: &VariableSet) -> Result<Vec<usize>> {
        set.iter().map(|n| self.index(n)).collect()
    }

    fn set_of<I: IntoIterator<Item = usize>>(&self, indices: I) -> VariableSet {
        let names: BTreeSet<usize> = indices.into_iter().collect();
        VariableSet::new(names.into_iter().map(|i| self.name(i).to_string()))
            .expect("node names are valid and distinct")
    }

    /// Edges in lexicographic order of (source, target).
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.succ.iter().enumerate().flat_map(move |(a, targets)| {
            targets.iter().map(move |&b| (self.name(a), self.name(b)))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        match (self.nodes.position(from), self.nodes.position(to)) {
            (Some(a), Some(b)) => self.succ[a].binary_search(&b).is_ok(),
            _ => false,
        }
    }

    /// `Pre(X)`.
    pub fn predecessors(&self, node: &str) -> Result<VariableSet> {
        let i = self.index(node)?;
        Ok(self.set_of(self.pred[i].iter().copied()))
    }

    /// `Post(X)`.
    pub fn successors(&self, node: &str) -> Result<VariableSet> {
        let i = self.index(node)?;
        Ok(self.set_of(self.succ[i].iter().copied()))
    }

    /// `Init(G)`: nodes without predecessors.
    pub fn initial_nodes(&self) -> VariableSet {
        self.set_of((0..self.len()).filter(|&i| self.pred[i].is_empty()))
    }

    pub(crate) fn pred_indices(&self, i: usize) -> &[usize] {
        &self.pred[i]
    }

    pub(crate) fn succ_indices(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    /// A topological order of node indices, or `None` if the graph has a cycle.
    pub(crate) fn topological_indices(&self) -> Option<Vec<usize>> {
        let mut indegree: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.succ[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == self.len()).then_some(order)
    }

    /// Node names in a topological order, or `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<String>> {
        self.topological_indices().map(|order| {
            order
                .into_iter()
                .map(|i| self.name(i).to_string())
                .collect()
        })
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_indices().is_some()
    }

    fn closure_from(&self, start: &[usize], forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = start.to_vec();
        for &s in start {
            seen[s] = true;
        }
        while let Some(v) = stack.pop() {
            let next = if forward {
                &self.succ[v]
            } else {
                &self.pred[v]
            };
            for &w in next {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// `Post*(S)`: every node reachable from `S`, including `S` itself.
    pub fn descendants(&self, set: &VariableSet) -> Result<VariableSet> {
        let start = self.indices(set)?;
        let seen = self.closure_from(&start, true);
        Ok(self.set_of((0..self.len()).filter(|&i| seen[i])))
    }

    /// Every node from which `S` is reachable, including `S` itself.
    pub fn ancestors(&self, set: &VariableSet) -> Result<VariableSet> {
        let start = self.indices(set)?;
        let seen = self.closure_from(&start, false);
        Ok(self.set_of((0..self.len()).filter(|&i| seen[i])))
    }

    /// The subgraph induced by `keep`.
    pub fn induced(&self, keep: &VariableSet) -> Result<DiGraph> {
        self.nodes.require_known(keep)?;
        let map: Vec<Option<usize>> = self.nodes.iter().map(|n| keep.position(n)).collect();
        let edges = self
            .index_edges()
            .filter_map(|(a, b)| Some((map[a]?, map[b]?)));
        Ok(DiGraph::from_index_edges(
            keep.clone(),
            edges.collect::<Vec<_>>(),
        ))
    }

    pub(crate) fn index_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, targets)| targets.iter().map(move |&b| (a, b)))
    }

    /// Nodes lying on some directed cycle (non-trivial SCC members and self-loops).
    pub fn cyclic_nodes(&self) -> VariableSet {
        let mut on_cycle = vec![false; self.len()];
        for component in tarjan(&self.succ) {
            if component.len() > 1 {
                for v in component {
                    on_cycle[v] = true;
                }
            } else if self.succ[component[0]].contains(&component[0]) {
                on_cycle[component[0]] = true;
            }
        }
        self.set_of((0..self.len()).filter(|&i| on_cycle[i]))
    }
}

impl fmt::Display for DiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().map(|(a, b)| format!("{a}->{b}")).collect();
        write!(f, "{} [{}]", self.nodes, edges.join(", "))
    }
}

/// Strongly connected components by Tarjan's algorithm, iteratively.
/// Components come out in reverse topological order of the condensation
/// (bottom components first); each component is sorted.
pub(crate) fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, 0));

        while let Some(&(v, pos)) = call.last() {
            if pos < adj[v].len() {
                call.last_mut().expect("non-empty").1 += 1;
                let w = adj[v][pos];
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}

/// SCCs of a graph in topological order of the condensation, with bottom flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    pub components: Vec<VariableSet>,
    pub bottom: Vec<bool>,
}

impl SccDecomposition {
    pub fn bottom_components(&self) -> impl Iterator<Item = &VariableSet> {
        self.components
            .iter()
            .zip(&self.bottom)
            .filter(|(_, &b)| b)
            .map(|(c, _)| c)
    }
}

pub(crate) fn bottom_flags(adj: &[Vec<usize>], components: &[Vec<usize>]) -> Vec<bool> {
    let mut owner = vec![0; adj.len()];
    for (c, component) in components.iter().enumerate() {
        for &v in component {
            owner[v] = c;
        }
    }
    components
        .iter()
        .enumerate()
        .map(|(c, component)| {
            component
                .iter()
                .all(|&v| adj[v].iter().all(|&w| owner[w] == c))
        })
        .collect()
}

pub fn scc_decompose(g: &DiGraph) -> SccDecomposition {
    let mut components = tarjan(&g.succ);
    components.reverse();
    let bottom = bottom_flags(&g.succ, &components);
    SccDecomposition {
        components: components.into_iter().map(|c| g.set_of(c)).collect(),
        bottom,
    }
}

/// True iff every directed cycle (self-loops included) meets `cutset`,
/// i.e. removing `cutset` leaves an acyclic graph.
pub fn is_cutset(g: &DiGraph, cutset: &VariableSet) -> Result<bool> {
    g.nodes.require_known(cutset)?;
    let rest = g.nodes.difference(cutset);
    Ok(g.induced(&rest)?.is_acyclic())
}

/// All cutsets (or only the inclusion-minimal ones), ordered by size and then
/// lexicographically by their sorted member names.
pub fn enumerate_cutsets(g: &DiGraph, minimal_only: bool) -> Result<Vec<VariableSet>> {
    enumerate_cutsets_with(g, minimal_only, Execution::default())
}

pub fn enumerate_cutsets_with(
    g: &DiGraph,
    minimal_only: bool,
    exec: Execution,
) -> Result<Vec<VariableSet>> {
    limits::check(
        "cutset enumeration nodes",
        g.len(),
        limits().max_enumeration_nodes,
    )?;
    // Only nodes on cycles matter: a set is a cutset iff its intersection with
    // the cyclic core is one.
    let core = g.cyclic_nodes();
    let core_graph = g.induced(&core)?;
    let k = core.len();
    let subset = |mask: usize, base: &VariableSet| -> VariableSet {
        let n = base.len();
        VariableSet::new(
            (0..n)
                .filter(|&p| (mask >> (n - 1 - p)) & 1 == 1)
                .map(|p| base.names()[p].clone()),
        )
        .expect("subset of a valid set")
    };
    let cuts: Vec<bool> = exec.map_range(1usize << k, |mask| {
        let kept = core_graph
            .nodes
            .iter()
            .enumerate()
            .filter(|&(p, _)| (mask >> (k - 1 - p)) & 1 == 0)
            .map(|(_, n)| n.to_string());
        let rest = VariableSet::new(kept).expect("subset of a valid set");
        core_graph.induced(&rest).expect("subset").is_acyclic()
    });
    let core_cutsets = (0..1usize << k).filter(|&mask| {
        cuts[mask]
            && (!minimal_only
                || (0..k).all(|bit| mask & (1 << bit) == 0 || !cuts[mask & !(1 << bit)]))
    });
    let mut result: Vec<VariableSet> = Vec::new();
    let outside = g.nodes.difference(&core);
    for mask in core_cutsets {
        let base = subset(mask, &core);
        if minimal_only {
            result.push(base);
        } else {
            for extra in 0..1usize << outside.len() {
                result.push(base.union(&subset(extra, &outside)));
            }
        }
    }
    result.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(result)
}

/// `Close(G)`: adds both edges between every pair of distinct initial nodes.
pub fn close(g: &DiGraph) -> DiGraph {
    let init: Vec<usize> = (0..g.len()).filter(|&i| g.pred[i].is_empty()).collect();
    let extra = init
        .iter()
        .flat_map(|&a| init.iter().filter(move |&&b| b != a).map(move |&b| (a, b)));
    DiGraph::from_index_edges(
        g.nodes.clone(),
        g.index_edges().chain(extra).collect::<Vec<_>>(),
    )
}

/// `G[C]`: drops every edge whose target lies in the cutset, making each
/// cutset node initial. The result is acyclic.
pub fn cut_restrict(g: &DiGraph, cutset: &VariableSet) -> Result<DiGraph> {
    if !is_cutset(g, cutset)? {
        return Err(Error::NotACutset(cutset.to_string()));
    }
    let edges: Vec<(usize, usize)> = g
        .index_edges()
        .filter(|&(_, b)| !cutset.contains(g.name(b)))
        .collect();
    Ok(DiGraph::from_index_edges(g.nodes.clone(), edges))
}

pub(crate) fn require_disjoint(sets: [&VariableSet; 3]) -> Result<()> {
    let [x, y, z] = sets;
    if x.is_disjoint(y) && x.is_disjoint(z) && y.is_disjoint(z) {
        Ok(())
    } else {
        Err(Error::NonDisjoint)
    }
}

/// d-separation of `xs` and `ys` given `zs`.
///
/// Reachability over (node, direction) states: a trail may pass a
/// non-collider outside `zs`, and a collider whose descendants (itself
/// included) meet `zs`. Self-loops never lie on a simple path and are ignored.
pub fn d_separated(
    g: &DiGraph,
    xs: &VariableSet,
    ys: &VariableSet,
    zs: &VariableSet,
) -> Result<bool> {
    require_disjoint([xs, ys, zs])?;
    let x = g.indices(xs)?;
    let y = g.indices(ys)?;
    let z = g.indices(zs)?;
    let n = g.len();
    let mut observed = vec![false; n];
    for &v in &z {
        observed[v] = true;
    }
    let opens_collider = g.closure_from(&z, false);
    let mut target = vec![false; n];
    for &v in &y {
        target[v] = true;
    }

    // State 0: arrived from a child (moving up); state 1: arrived from a parent.
    let mut visited = vec![[false; 2]; n];
    let mut queue: VecDeque<(usize, usize)> = x.iter().map(|&v| (v, 0)).collect();
    while let Some((v, dir)) = queue.pop_front() {
        if visited[v][dir] {
            continue;
        }
        visited[v][dir] = true;
        if target[v] {
            return Ok(false);
        }
        let parents = g.pred[v].iter().filter(|&&w| w != v);
        let children = g.succ[v].iter().filter(|&&w| w != v);
        if dir == 0 {
            if !observed[v] {
                queue.extend(parents.map(|&w| (w, 0)));
                queue.extend(children.map(|&w| (w, 1)));
            }
        } else {
            if !observed[v] {
                queue.extend(children.map(|&w| (w, 1)));
            }
            if opens_collider[v] {
                queue.extend(parents.map(|&w| (w, 0)));
            }
        }
    }
    Ok(true)
}
