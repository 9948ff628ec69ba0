//! Brute-force oracles that cross-check the analytic routes: literal Next
//! iteration with Cesàro averages, d-separation by simple-path enumeration,
//! and exact power iteration on the cutset chain.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::chain::{CutsetChain, CutsetSemantics};
use crate::graph::{require_disjoint, DiGraph};
use crate::limits::{self, limits};
use crate::model::{Gbn, JointDistribution, VariableSet};
use crate::rational::Rational;
use crate::{Error, Result};

/// `γ₀, γ₁, …, γ_N` with `γ_{i+1} = Next(B, C, γᵢ)|_C`, plus the running averages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationTrace {
    pub gammas: Vec<JointDistribution>,
    /// `averages[i] = (γ₀ + … + γᵢ) / (i + 1)`.
    pub averages: Vec<JointDistribution>,
}

impl IterationTrace {
    pub fn last(&self) -> &JointDistribution {
        self.gammas.last().expect("trace has at least one entry")
    }

    pub fn last_average(&self) -> &JointDistribution {
        self.averages.last().expect("trace has at least one entry")
    }

    /// Whether the final Cesàro average lies within total variation `tolerance` of `target`.
    pub fn average_within(&self, target: &JointDistribution, tolerance: &Rational) -> Result<bool> {
        Ok(self.last_average().total_variation(target)? <= *tolerance)
    }

    /// Whether the final iterate lies within total variation `tolerance` of `target`.
    pub fn last_within(&self, target: &JointDistribution, tolerance: &Rational) -> Result<bool> {
        Ok(self.last().total_variation(target)? <= *tolerance)
    }
}

/// Applies `Next(B, C, ·)|_C` literally `steps` times.
pub fn iterate_next(
    g: &Gbn,
    cutset: &VariableSet,
    gamma0: &JointDistribution,
    steps: usize,
) -> Result<IterationTrace> {
    if steps == 0 {
        return Err(Error::Precondition("at least one step is required".into()));
    }
    let semantics = CutsetSemantics::without_chain(g, cutset)?;
    let mut gammas = vec![gamma0.clone()];
    for _ in 0..steps {
        let next = semantics.next_on_cutset(gammas.last().expect("non-empty"))?;
        gammas.push(next);
    }
    let mut sum = vec![Rational::zero(); cutset.num_assignments()];
    let averages = gammas
        .iter()
        .enumerate()
        .map(|(i, gamma)| {
            for (s, p) in sum.iter_mut().zip(gamma.probs()) {
                *s += p;
            }
            let count = Rational::from_integer(BigInt::from(i + 1));
            let probs = sum.iter().map(|s| s / &count).collect();
            JointDistribution::from_parts(cutset.clone(), probs)
        })
        .collect();
    Ok(IterationTrace { gammas, averages })
}

/// d-separation by enumerating every simple undirected path between `xs` and
/// `ys` and applying the blocking rules to each intermediate node.
pub fn dsep_by_paths(
    g: &DiGraph,
    xs: &VariableSet,
    ys: &VariableSet,
    zs: &VariableSet,
) -> Result<bool> {
    limits::check("path oracle nodes", g.len(), limits().max_path_oracle_nodes)?;
    require_disjoint([xs, ys, zs])?;
    for set in [xs, ys, zs] {
        g.nodes().require_known(set)?;
    }
    let n = g.len();
    let pos = |name: &str| g.nodes().position(name).expect("checked above");
    let observed: Vec<bool> = (0..n).map(|i| zs.contains(&g.nodes().names()[i])).collect();
    // Post*(W) ∩ Z ≠ ∅.
    let reaches_observed: Vec<bool> = (0..n)
        .map(|i| {
            let w = VariableSet::new([g.nodes().names()[i].clone()]).expect("valid");
            let post = g.descendants(&w).expect("known node");
            let hit = post.iter().any(|d| zs.contains(d));
            hit
        })
        .collect();
    let targets: Vec<bool> = (0..n).map(|i| ys.contains(&g.nodes().names()[i])).collect();

    // Each step is (neighbor, edge points forward along the path).
    let steps = |v: usize| -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        for &w in g.succ_indices(v) {
            if w != v {
                out.push((w, true));
            }
        }
        for &w in g.pred_indices(v) {
            if w != v {
                out.push((w, false));
            }
        }
        out
    };

    struct Search<'a, F: Fn(usize) -> Vec<(usize, bool)>> {
        steps: F,
        observed: &'a [bool],
        reaches_observed: &'a [bool],
        targets: &'a [bool],
        on_path: Vec<bool>,
    }

    impl<F: Fn(usize) -> Vec<(usize, bool)>> Search<'_, F> {
        /// True if some active path continues from `v`, entered via an edge
        /// with orientation `into_v` (`Some(true)` means prev → v).
        fn active_from(&mut self, v: usize, into_v: Option<bool>) -> bool {
            for (w, forward) in (self.steps)(v) {
                if self.on_path[w] {
                    continue;
                }
                if let Some(arrow_in) = into_v {
                    // v is intermediate: collider iff both edges point into v.
                    let collider = arrow_in && !forward;
                    let blocked = if collider {
                        !self.reaches_observed[v]
                    } else {
                        self.observed[v]
                    };
                    if blocked {
                        continue;
                    }
                }
                if self.targets[w] {
                    return true;
                }
                self.on_path[w] = true;
                let found = self.active_from(w, Some(forward));
                self.on_path[w] = false;
                if found {
                    return true;
                }
            }
            false
        }
    }

    let mut search = Search {
        steps,
        observed: &observed,
        reaches_observed: &reaches_observed,
        targets: &targets,
        on_path: vec![false; n],
    };
    for x in xs.iter() {
        let start = pos(x);
        search.on_path[start] = true;
        let found = search.active_from(start, None);
        search.on_path[start] = false;
        if found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The Cesàro average `(1/(N+1)) Σ_{i=0}^{N} γ₀·Pⁱ`, computed exactly.
///
/// All arithmetic runs on integer vectors over a common denominator, so
/// thousands of steps stay cheap despite the exact representation.
pub fn power_iteration(
    chain: &CutsetChain,
    gamma0: &JointDistribution,
    steps: usize,
) -> Result<JointDistribution> {
    if gamma0.vars() != chain.states() {
        return Err(Error::DomainMismatch {
            expected: chain.states().to_string(),
            found: gamma0.vars().to_string(),
        });
    }
    let matrix = chain.matrix();
    let d = matrix
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let p_int: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|row| row.iter().map(|p| p.numer() * (&d / p.denom())).collect())
        .collect();
    let g = gamma0
        .probs()
        .iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    // v_i represents γ₀·Pⁱ scaled by g·dⁱ.
    let mut v: Vec<BigInt> = gamma0
        .probs()
        .iter()
        .map(|p| p.numer() * (&g / p.denom()))
        .collect();
    let mut acc = v.clone();
    let n = v.len();
    for _ in 0..steps {
        let mut next = vec![BigInt::zero(); n];
        for (vi, row) in v.iter().zip(&p_int) {
            if vi.is_zero() {
                continue;
            }
            for (o, p) in next.iter_mut().zip(row) {
                if !p.is_zero() {
                    *o += vi * p;
                }
            }
        }
        v = next;
        // acc = Σ_j v_j · d^(i − j)
        for (a, vi) in acc.iter_mut().zip(&v) {
            *a *= &d;
            *a += vi;
        }
    }
    let denominator = BigInt::from(steps + 1) * g * num_traits::pow(d, steps);
    let probs = acc
        .into_iter()
        .map(|a| Rational::new(a, denominator.clone()))
        .collect();
    Ok(JointDistribution::from_parts(chain.states().clone(), probs))
}

/// `½ Σ |a − b|` between two probability vectors, exactly.
pub fn total_variation(a: &[Rational], b: &[Rational]) -> Rational {
    let sum: Rational = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    sum / Rational::from_integer(BigInt::from(2))
}
