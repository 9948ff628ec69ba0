mod common;

use common::*;
use gbn_core::graph::{d_separated, enumerate_cutsets, is_cutset, scc_decompose};
use gbn_core::linalg::null_space_left;
use gbn_core::model::assignment_labels;
use gbn_core::oracle::total_variation;
use gbn_core::{Assignment, JointDistribution, VariableSet};
use proptest::prelude::*;

fn small_set() -> impl Strategy<Value = VariableSet> {
    (0usize..=5).prop_map(|n| VariableSet::new(names(n)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_index_round_trips(vars in small_set(), seed in any::<u64>()) {
        let n = vars.num_assignments();
        let idx = (seed as usize) % n;
        let a = Assignment::from_index(vars.clone(), idx).unwrap();
        prop_assert_eq!(a.canonical_index(), idx);
        let b = Assignment::from_bitstring(vars.clone(), &a.to_bitstring()).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(assignment_labels(&vars).len(), n);
    }

    #[test]
    fn marginals_sum_to_one_and_compose(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = rng(seed);
        let vars = VariableSet::new(names(n)).unwrap();
        let mu = random_dist(&mut rng, &vars);
        let mask = (seed as usize) % (1 << n);
        let sub = VariableSet::new(names(n).into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s)).unwrap();
        let marginal = mu.restrict(&sub).unwrap();
        let total: gbn_core::Rational = marginal.probs().iter().sum();
        prop_assert_eq!(total, r(1, 1));
        let empty = marginal.restrict(&VariableSet::empty()).unwrap();
        prop_assert_eq!(empty.probs(), &[r(1, 1)][..]);
        for a in sub.assignments() {
            prop_assert_eq!(marginal.prob(&a).unwrap().clone(), mu.partial_prob(&a).unwrap());
        }
    }

    #[test]
    fn product_restricts_to_factors(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let left = vs(&["A", "C"]);
        let right = vs(&["B", "D", "E"]);
        let p = random_dist(&mut rng, &left);
        let q = random_dist(&mut rng, &right);
        let joint = p.product(&q).unwrap();
        prop_assert_eq!(joint.restrict(&left).unwrap(), p.clone());
        prop_assert_eq!(joint.restrict(&right).unwrap(), q);
        prop_assert!(p.product(&p).is_err());
    }

    #[test]
    fn total_variation_is_a_metric(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let vars = vs(&["A", "B"]);
        let (a, b, c) = (random_dist(&mut rng, &vars), random_dist(&mut rng, &vars), random_dist(&mut rng, &vars));
        let d = |x: &JointDistribution, y: &JointDistribution| total_variation(x.probs(), y.probs());
        prop_assert_eq!(d(&a, &a), r(0, 1));
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert!(d(&a, &b) <= r(1, 1));
    }

    #[test]
    fn d_separation_is_symmetric(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = random_digraph(&mut rng, 7);
        if let Some((x, y, z)) = random_triple(&mut rng, g.nodes()) {
            prop_assert_eq!(d_separated(&g, &x, &y, &z).unwrap(), d_separated(&g, &y, &x, &z).unwrap());
        }
    }

    #[test]
    fn cutsets_break_every_cycle(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = random_digraph(&mut rng, 6);
        let all = enumerate_cutsets(&g, false).unwrap();
        let minimal = enumerate_cutsets(&g, true).unwrap();
        prop_assert!(all.iter().all(|c| is_cutset(&g, c).unwrap()));
        prop_assert!(all.windows(2).all(|w| (w[0].len(), w[0].names()) < (w[1].len(), w[1].names())));
        for c in &minimal {
            prop_assert!(all.contains(c));
            for n in c.iter() {
                let smaller = c.difference(&vs(&[n]));
                prop_assert!(!is_cutset(&g, &smaller).unwrap());
            }
        }
        // the full node set is always a cutset; the empty set only for acyclic graphs
        prop_assert!(all.contains(g.nodes()));
        prop_assert_eq!(all.contains(&VariableSet::empty()), g.is_acyclic());
        // every cutset hits every non-trivial strongly connected component
        for comp in &scc_decompose(&g).components {
            let cyclic = comp.len() > 1 || comp.iter().any(|n| g.has_edge(n, n));
            if cyclic {
                prop_assert!(all.iter().all(|c| !c.is_disjoint(comp)));
            }
        }
    }

    #[test]
    fn random_chains_are_row_stochastic(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = random_cyclic_gbn(&mut rng, 3, &quarter_grid(), IotaMode::Correlated);
        let c = random_cutset(&mut rng, &g, 3);
        let chain = gbn_core::chain::cutset_mc(&g, &c).unwrap();
        for row in chain.matrix() {
            let sum: gbn_core::Rational = row.iter().sum();
            prop_assert_eq!(sum, r(1, 1));
            prop_assert!(row.iter().all(|p| *p >= r(0, 1)));
        }
        // each lrf is a stationary distribution supported on its class
        for bscc in chain.bsccs() {
            let total: gbn_core::Rational = bscc.lrf.iter().sum();
            prop_assert_eq!(total, r(1, 1));
            prop_assert_eq!(chain.step(&bscc.lrf), bscc.lrf.clone());
            for (s, p) in bscc.lrf.iter().enumerate() {
                prop_assert!(bscc.states.contains(&s) || *p == r(0, 1));
            }
        }
        // stationary vectors form a simplex with one vertex per BSCC
        let space = null_space_left(chain.matrix());
        prop_assert_eq!(space.basis.len() + 1, chain.bsccs().len());
    }
}
