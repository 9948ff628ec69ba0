//! Seeded random generators shared by the integration suites.
#![allow(dead_code)]

use gbn_core::graph::enumerate_cutsets;
use gbn_core::{DiGraph, Gbn, GbnDraft, JointDistribution, Rational, VariableSet};
use num_bigint::BigInt;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn vs(names: &[&str]) -> VariableSet {
    VariableSet::new(names.iter().copied()).unwrap()
}

/// `{0, 1/4, 1/2, 3/4, 1}`.
pub fn quarter_grid() -> Vec<Rational> {
    (0..=4).map(|k| r(k, 4)).collect()
}

/// `{0, 1/4, 1/3, 1/2, 2/3, 3/4, 1}`.
pub fn mixed_grid() -> Vec<Rational> {
    [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)]
        .iter()
        .map(|&(n, d)| r(n, d))
        .collect()
}

/// Strictly interior values only.
pub fn smooth_grid() -> Vec<Rational> {
    [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4)]
        .iter()
        .map(|&(n, d)| r(n, d))
        .collect()
}

pub fn names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| ((b'A' + i as u8) as char).to_string())
        .collect()
}

/// How ι is drawn for the initial nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IotaMode {
    /// Independent marginals from the grid.
    Product,
    /// Arbitrary joint with small integer weights.
    Correlated,
    /// Arbitrary joint with strictly positive weights.
    Smooth,
}

/// A probability vector of length `n` from integer weights in `lo..=hi`.
pub fn random_weights(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| r(x, total)).collect();
        }
    }
}

pub fn random_dist(rng: &mut impl Rng, vars: &VariableSet) -> JointDistribution {
    let probs = random_weights(rng, vars.num_assignments(), 0, 4);
    JointDistribution::new(vars.clone(), probs).unwrap()
}

fn product_of_marginals(marginals: &[Rational]) -> Vec<Rational> {
    let k = marginals.len();
    (0..1usize << k)
        .map(|idx| {
            marginals.iter().enumerate().fold(r(1, 1), |acc, (i, p)| {
                // the first variable is the most significant bit
                let bit = (idx >> (k - 1 - i)) & 1 == 1;
                if bit {
                    acc * p
                } else {
                    acc * (r(1, 1) - p)
                }
            })
        })
        .collect()
}

fn fill_cpts(rng: &mut impl Rng, mut draft: GbnDraft, grid: &[Rational], iota: IotaMode) -> Gbn {
    let nodes = draft.variables.clone();
    let mut initial = Vec::new();
    for node in &nodes {
        let mut parents: Vec<String> = draft
            .edges
            .iter()
            .filter(|(_, to)| to == node)
            .map(|(from, _)| from.clone())
            .collect();
        parents.sort();
        if parents.is_empty() {
            initial.push(node.clone());
            continue;
        }
        let rows: Vec<Rational> = (0..1usize << parents.len())
            .map(|_| grid.choose(rng).unwrap().clone())
            .collect();
        draft = draft.cpt(node, parents, rows);
    }
    initial.sort();
    let iota_probs = match iota {
        IotaMode::Product => {
            let marginals: Vec<Rational> = initial
                .iter()
                .map(|_| grid.choose(rng).unwrap().clone())
                .collect();
            product_of_marginals(&marginals)
        }
        IotaMode::Correlated => random_weights(rng, 1 << initial.len(), 0, 4),
        IotaMode::Smooth => random_weights(rng, 1 << initial.len(), 1, 4),
    };
    draft.iota(iota_probs).build().unwrap()
}

/// A random acyclic GBN on `n` nodes with at most `max_parents` parents per node.
pub fn random_acyclic_gbn(rng: &mut impl Rng, n: usize, grid: &[Rational], iota: IotaMode) -> Gbn {
    let mut order = names(n);
    order.shuffle(rng);
    let mut draft = GbnDraft::new(names(n));
    for j in 1..n {
        let mut parents = 0;
        for i in 0..j {
            if parents < 3 && rng.random_bool(0.4) {
                draft = draft.edge(&order[i], &order[j]);
                parents += 1;
            }
        }
    }
    fill_cpts(rng, draft, grid, iota)
}

/// A random GBN on `n ≥ 2` nodes with at least one directed cycle and no self-loops.
pub fn random_cyclic_gbn(rng: &mut impl Rng, n: usize, grid: &[Rational], iota: IotaMode) -> Gbn {
    let all = names(n);
    loop {
        let mut edges = Vec::new();
        for a in &all {
            for b in &all {
                if a != b && rng.random_bool(0.4) {
                    edges.push((a.clone(), b.clone()));
                }
            }
        }
        let graph = DiGraph::new(
            VariableSet::new(all.iter().cloned()).unwrap(),
            edges.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        )
        .unwrap();
        let too_wide = all.iter().any(|v| graph.predecessors(v).unwrap().len() > 3);
        if graph.is_acyclic() || too_wide {
            continue;
        }
        let mut draft = GbnDraft::new(all.clone());
        for (a, b) in &edges {
            draft = draft.edge(a, b);
        }
        return fill_cpts(rng, draft, grid, iota);
    }
}

/// Cutsets of `g` avoiding initial nodes, optionally bounded in size.
pub fn admissible_cutsets(g: &Gbn, max_len: usize) -> Vec<VariableSet> {
    let init = g.initial();
    enumerate_cutsets(g.graph(), false)
        .unwrap()
        .into_iter()
        .filter(|c| c.len() <= max_len && c.is_disjoint(&init))
        .collect()
}

pub fn random_cutset(rng: &mut impl Rng, g: &Gbn, max_len: usize) -> VariableSet {
    admissible_cutsets(g, max_len)
        .choose(rng)
        .expect("cyclic GBNs have cutsets")
        .clone()
}

/// A random digraph on up to `max_nodes` nodes; self-loops and 2-cycles allowed.
pub fn random_digraph(rng: &mut impl Rng, max_nodes: usize) -> DiGraph {
    let n = rng.random_range(1..=max_nodes);
    let all = names(n);
    let density = rng.random_range(0.1..0.5);
    let mut edges = Vec::new();
    for a in &all {
        for b in &all {
            if rng.random_bool(if a == b { 0.05 } else { density }) {
                edges.push((a.as_str(), b.as_str()));
            }
        }
    }
    DiGraph::new(
        VariableSet::new(all.iter().cloned()).unwrap(),
        edges.iter().copied(),
    )
    .unwrap()
}

/// Three pairwise disjoint subsets of `nodes`, with `x` and `y` non-empty.
pub fn random_triple(
    rng: &mut impl Rng,
    nodes: &VariableSet,
) -> Option<(VariableSet, VariableSet, VariableSet)> {
    if nodes.len() < 2 {
        return None;
    }
    let mut shuffled: Vec<&str> = nodes.iter().collect();
    shuffled.shuffle(rng);
    let (mut x, mut y, mut z) = (vec![shuffled[0]], vec![shuffled[1]], Vec::new());
    for &n in &shuffled[2..] {
        match rng.random_range(0..5) {
            0 => x.push(n),
            1 => y.push(n),
            2 | 3 => z.push(n),
            _ => {}
        }
    }
    Some((vs(&x), vs(&y), vs(&z)))
}
