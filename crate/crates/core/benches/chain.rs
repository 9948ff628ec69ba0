use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gbn_core::chain::cutset_mc_with;
use gbn_core::graph::enumerate_cutsets_with;
use gbn_core::inference::chain_rule_dist_with;
use gbn_core::{DiGraph, Execution, Gbn, GbnDraft, Rational, VariableSet};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("V{i:02}")).collect()
}

/// Ring `V0 → V1 → … → V(n-1) → V0` plus random chords, smooth CPTs.
fn ring_gbn(n: usize, seed: u64) -> Gbn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = names(n);
    let mut parents: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + n - 1) % n]).collect();
    for (i, ps) in parents.iter_mut().enumerate() {
        let extra = rng.random_range(0..n);
        if extra != i && !ps.contains(&extra) && rng.random_bool(0.5) {
            ps.push(extra);
        }
    }
    let mut draft = GbnDraft::new(all.clone());
    for (i, ps) in parents.iter().enumerate() {
        let mut ps: Vec<&str> = ps.iter().map(|&p| all[p].as_str()).collect();
        ps.sort();
        for p in &ps {
            draft = draft.edge(p, &all[i]);
        }
        let rows: Vec<Rational> = (0..1 << ps.len())
            .map(|_| Rational::new(BigInt::from(rng.random_range(1..8)), BigInt::from(8)))
            .collect();
        draft = draft.cpt(&all[i], ps, rows);
    }
    draft.build().expect("valid ring")
}

/// A layered DAG where every node has up to three parents from earlier layers.
fn layered_gbn(n: usize, seed: u64) -> Gbn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = names(n);
    let mut draft = GbnDraft::new(all.clone());
    let mut roots = Vec::new();
    for j in 0..n {
        let mut ps: Vec<&str> = (0..j)
            .filter(|_| rng.random_bool(0.3))
            .map(|i| all[i].as_str())
            .take(3)
            .collect();
        ps.sort();
        if ps.is_empty() {
            roots.push(j);
            continue;
        }
        for p in &ps {
            draft = draft.edge(p, &all[j]);
        }
        let rows: Vec<Rational> = (0..1 << ps.len())
            .map(|_| Rational::new(BigInt::from(rng.random_range(0..=4)), BigInt::from(4)))
            .collect();
        draft = draft.cpt(&all[j], ps, rows);
    }
    let k = roots.len();
    let uniform = Rational::new(BigInt::from(1), BigInt::from(1u64 << k));
    draft
        .iota(vec![uniform; 1 << k])
        .build()
        .expect("valid DAG")
}

fn bench_cutset_chain(c: &mut Criterion) {
    let mut group = c.benchmark_group("cutset_mc");
    group.sample_size(10);
    for n in [6, 8] {
        let g = ring_gbn(n, 1);
        let cutset = VariableSet::new(names(n).into_iter().step_by(2)).unwrap();
        for (label, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(label, n), &exec, |b, &exec| {
                b.iter(|| cutset_mc_with(black_box(&g), &cutset, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_chain_rule(c: &mut Criterion) {
    let mut group = c.benchmark_group("chain_rule_dist");
    group.sample_size(10);
    for n in [10, 14] {
        let g = layered_gbn(n, 2);
        for (label, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(label, n), &exec, |b, &exec| {
                b.iter(|| chain_rule_dist_with(black_box(&g), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_cutsets(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_cutsets");
    group.sample_size(10);
    for n in [12, 16] {
        let g: DiGraph = ring_gbn(n, 3).graph().clone();
        for (label, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(label, n), &exec, |b, &exec| {
                b.iter(|| enumerate_cutsets_with(black_box(&g), true, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_cutset_chain, bench_chain_rule, bench_cutsets);
criterion_main!(benches);
