//! Tuple potentials, commonness and negligibility, plus crossing families of
//! pattern copies (see [`family`]).
//!
//! Potentials count ORDERED tuples with repetition: a `(p+d)`-tuple from `X`
//! is violating when its common neighbourhood in `Y` has fewer than `β`
//! vertices. Commonness checks SUBSETS of size `min(d, |X|)`, since a repeated
//! vertex adds nothing to a common-neighbourhood constraint.

pub mod family;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{Budget, CheckMode};
use crate::error::{Error, Result};
use crate::graph::{common_count, PartitionedGraph, VertexSet};
use crate::rng;

pub use family::{
    crossing_adjacent, heavy_cliques, heavy_cliques_across, heavy_wrt_family, is_heavy_clique, is_pattern_copy, probe_of, rho,
    sample_family, AdjacencyIndex, CrossingFamily, FamilyTotal, HeavyRule, Pattern, RhoCount,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialValue {
    Exact { count: u64 },
    Estimate { mean: f64, se: f64, trials: u64 },
}

/// The `(p,d,β)`-potential of `X` in `Y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialCount {
    pub value: PotentialValue,
    pub p: usize,
    pub d: usize,
    pub beta: usize,
    /// Always true: tuples are ordered and may repeat vertices.
    pub ordered: bool,
    /// `|X|`, so that `|X|^(p+d)` can be recovered.
    pub size_x: usize,
}

impl PotentialCount {
    /// Exact count or point estimate.
    pub fn value(&self) -> f64 {
        match self.value {
            PotentialValue::Exact { count } => count as f64,
            PotentialValue::Estimate { mean, .. } => mean,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.value, PotentialValue::Exact { .. })
    }

    pub fn exact(&self) -> Option<u64> {
        match self.value {
            PotentialValue::Exact { count } => Some(count),
            _ => None,
        }
    }

    /// Standard error of the estimate (0 for exact counts).
    pub fn se(&self) -> f64 {
        match self.value {
            PotentialValue::Exact { .. } => 0.0,
            PotentialValue::Estimate { se, .. } => se,
        }
    }

    /// `|X|^(p+d)`, the number of tuples.
    pub fn tuple_space(&self) -> f64 {
        (self.size_x as f64).powi((self.p + self.d) as i32)
    }
}

/// `λ^(p−1)`, the negligibility threshold.
pub fn negligible_threshold(lambda: f64, p: usize) -> f64 {
    lambda.powi(p as i32 - 1)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `surj[j]` = number of maps from a `k`-set onto a `j`-set.
fn surjections(k: usize) -> Vec<u128> {
    (0..=k)
        .map(|j| {
            let mut total: i128 = 0;
            for i in 0..=j {
                let term = binomial(j, i) as i128 * (j as i128 - i as i128).pow(k as u32);
                if i % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            total as u128
        })
        .collect()
}

/// Cost of an exact count over `|X|^k` ordered tuples.
pub fn exact_cost(size_x: usize, k: usize) -> f64 {
    (size_x as f64).powi(k as i32)
}

/// Counts or estimates the `(p,d,β)`-potential of `X` in `Y`.
///
/// The exact count groups tuples by their support `S`: a `k`-tuple has support
/// exactly `S` in `surj(k,|S|)` ways, and once `|N(S) ∩ Y| < β` every superset
/// of `S` violates as well, so whole subtrees are added in closed form.
pub fn potential(
    g: &PartitionedGraph,
    x: &VertexSet,
    y: &VertexSet,
    p: usize,
    d: usize,
    beta: usize,
    mode: CheckMode,
    budget: &Budget,
) -> Result<PotentialCount> {
    let k = p + d;
    let value = match mode {
        CheckMode::Exact => {
            let cost = exact_cost(x.len(), k);
            if cost > budget.tuples {
                return Err(Error::BudgetExceeded { what: format!("exact ({p},{d},{beta})-potential"), needed: cost, cap: budget.tuples });
            }
            PotentialValue::Exact { count: exact_potential(g, x, y, k, beta) }
        }
        CheckMode::Sampled { trials, seed } => sampled_potential(g, x, y, k, beta, trials, seed),
    };
    Ok(PotentialCount { value, p, d, beta, ordered: true, size_x: x.len() })
}

/// Exact when `|X|^(p+d)` fits the tuple budget, otherwise estimated from
/// `budget.samples` draws.
#[allow(clippy::too_many_arguments)]
pub fn potential_auto(
    g: &PartitionedGraph,
    x: &VertexSet,
    y: &VertexSet,
    p: usize,
    d: usize,
    beta: usize,
    budget: &Budget,
    seed: u64,
) -> PotentialCount {
    let mode = if exact_cost(x.len(), p + d) <= budget.tuples {
        CheckMode::Exact
    } else {
        CheckMode::Sampled { trials: budget.samples.max(1), seed }
    };
    potential(g, x, y, p, d, beta, mode, budget).expect("mode chosen within budget")
}

fn exact_potential(g: &PartitionedGraph, x: &VertexSet, y: &VertexSet, k: usize, beta: usize) -> u64 {
    if k == 0 {
        return u64::from(y.len() < beta);
    }
    let xs = x.to_vec();
    if xs.is_empty() {
        return 0;
    }
    let surj = surjections(k);
    let total: u128 = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = y.words().to_vec();
            for (a, b) in acc.iter_mut().zip(g.neighbors(xs[i]).words()) {
                *a &= b;
            }
            let mut stack = Vec::new();
            subtree(g, &xs, i, 1, acc, k, beta, &surj, &mut stack)
        })
        .sum();
    total.min(u64::MAX as u128) as u64
}

/// Violating tuples whose support is `S ∪ (extensions by indices > last)`,
/// where `S` has `size` elements, the largest at index `last`, and `cn` is
/// its common neighbourhood in `Y`.
#[allow(clippy::too_many_arguments)]
fn subtree(
    g: &PartitionedGraph,
    xs: &[usize],
    last: usize,
    size: usize,
    cn: Vec<u64>,
    k: usize,
    beta: usize,
    surj: &[u128],
    scratch: &mut Vec<Vec<u64>>,
) -> u128 {
    let rem = xs.len() - last - 1;
    let cnt: usize = cn.iter().map(|w| w.count_ones() as usize).sum();
    if cnt < beta {
        return (0..=(k - size)).map(|extra| binomial(rem, extra) * surj[size + extra]).sum();
    }
    let mut total = 0u128;
    if size < k {
        for j in last + 1..xs.len() {
            let mut next = scratch.pop().unwrap_or_default();
            next.clear();
            next.extend(cn.iter().zip(g.neighbors(xs[j]).words()).map(|(a, b)| a & b));
            total += subtree(g, xs, j, size + 1, next, k, beta, surj, scratch);
        }
    }
    scratch.push(cn);
    total
}

fn sampled_potential(g: &PartitionedGraph, x: &VertexSet, y: &VertexSet, k: usize, beta: usize, trials: u64, seed: u64) -> PotentialValue {
    let space = exact_cost(x.len(), k);
    if k == 0 || x.is_empty() {
        let count = if k == 0 { u64::from(y.len() < beta) } else { 0 };
        return PotentialValue::Estimate { mean: count as f64, se: 0.0, trials };
    }
    if trials == 0 {
        return PotentialValue::Estimate { mean: 0.0, se: f64::INFINITY, trials };
    }
    let xs = x.to_vec();
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map_init(
            || vec![0usize; k],
            |tuple, i| {
                let mut r = rng::stream(seed, i);
                for t in tuple.iter_mut() {
                    *t = xs[r.gen_range(0..xs.len())];
                }
                u64::from(common_count(g, tuple, y) < beta)
            },
        )
        .sum();
    let f = hits as f64 / trials as f64;
    let se = (f * (1.0 - f) / trials as f64).sqrt() * space;
    PotentialValue::Estimate { mean: f * space, se, trials }
}

/// Outcome of a commonness check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommonCheck {
    pub ok: bool,
    /// A subset of `X` of size `min(d,|X|)` with fewer than `β` common
    /// neighbours in `Y`, when `ok` is false.
    pub witness: Option<Vec<usize>>,
}

/// Whether every subset of `X` of size `min(d,|X|)` has at least `β` common
/// neighbours in `Y` (`X` is `(d,β)`-common into `Y`).
///
/// Smaller subsets need no separate check: their common neighbourhoods contain
/// those of their supersets. For `d = 0` the condition is `|Y| ≥ β`.
pub fn is_common(g: &PartitionedGraph, x: &VertexSet, y: &VertexSet, d: usize, beta: usize, budget: &Budget) -> Result<CommonCheck> {
    if beta == 0 {
        return Ok(CommonCheck { ok: true, witness: None });
    }
    let xs = x.to_vec();
    let q = d.min(xs.len());
    if q == 0 {
        let ok = y.len() >= beta;
        return Ok(CommonCheck { ok, witness: if ok { None } else { Some(Vec::new()) } });
    }
    let cost = binomial(xs.len(), q) as f64;
    if cost > budget.subsets {
        return Err(Error::BudgetExceeded { what: format!("({d},{beta})-commonness"), needed: cost, cap: budget.subsets });
    }
    let found = (0..xs.len()).into_par_iter().find_map_first(|i| {
        let mut acc = y.words().to_vec();
        for (a, b) in acc.iter_mut().zip(g.neighbors(xs[i]).words()) {
            *a &= b;
        }
        let mut chosen = vec![i];
        find_uncommon(g, &xs, &mut chosen, acc, q, beta)
    });
    Ok(match found {
        None => CommonCheck { ok: true, witness: None },
        Some(idx) => {
            let mut w = complete_witness(&idx, xs.len(), q);
            w.iter_mut().for_each(|i| *i = xs[*i]);
            CommonCheck { ok: false, witness: Some(w) }
        }
    })
}

/// Depth-first search for an index set whose common neighbourhood drops
/// below `β`; may stop early at fewer than `q` indices.
fn find_uncommon(g: &PartitionedGraph, xs: &[usize], chosen: &mut Vec<usize>, cn: Vec<u64>, q: usize, beta: usize) -> Option<Vec<usize>> {
    let cnt: usize = cn.iter().map(|w| w.count_ones() as usize).sum();
    if cnt < beta {
        return Some(chosen.clone());
    }
    if chosen.len() == q {
        return None;
    }
    let last = *chosen.last().unwrap();
    // Not enough indices left to reach size q on this branch.
    if xs.len() - last - 1 < q - chosen.len() {
        return None;
    }
    for j in last + 1..xs.len() {
        let next: Vec<u64> = cn.iter().zip(g.neighbors(xs[j]).words()).map(|(a, b)| a & b).collect();
        chosen.push(j);
        if let Some(w) = find_uncommon(g, xs, chosen, next, q, beta) {
            return Some(w);
        }
        chosen.pop();
    }
    None
}

/// Pads an early-stopped witness to exactly `q` distinct indices.
fn complete_witness(idx: &[usize], n: usize, q: usize) -> Vec<usize> {
    let mut out = idx.to_vec();
    let mut j = 0;
    while out.len() < q && j < n {
        if !out.contains(&j) {
            out.push(j);
        }
        j += 1;
    }
    out.sort_unstable();
    out
}

/// Whether the exact `(p,d,β)`-potential of `X` in `Y` is below `λ^(p−1)`.
#[allow(clippy::too_many_arguments)]
pub fn is_negligible(
    g: &PartitionedGraph,
    x: &VertexSet,
    y: &VertexSet,
    p: usize,
    d: usize,
    beta: usize,
    lambda: f64,
    budget: &Budget,
) -> Result<bool> {
    if lambda <= 0.0 {
        return Err(Error::PreconditionViolated(format!("lambda must be positive, got {lambda}")));
    }
    let pc = potential(g, x, y, p, d, beta, CheckMode::Exact, budget)?;
    Ok(pc.value() < negligible_threshold(lambda, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::consecutive_parts;
    use rand::SeedableRng;

    /// Direct enumeration of all ordered `k`-tuples.
    fn naive_potential(g: &PartitionedGraph, x: &VertexSet, y: &VertexSet, k: usize, beta: usize) -> u64 {
        let xs = x.to_vec();
        let mut count = 0;
        let mut idx = vec![0usize; k];
        if k == 0 {
            return u64::from(y.len() < beta);
        }
        if xs.is_empty() {
            return 0;
        }
        loop {
            let t: Vec<usize> = idx.iter().map(|&i| xs[i]).collect();
            let c = y.iter().filter(|&w| t.iter().all(|&v| g.has_edge(v, w))).count();
            count += u64::from(c < beta);
            let mut pos = 0;
            loop {
                if pos == k {
                    return count;
                }
                idx[pos] += 1;
                if idx[pos] < xs.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> PartitionedGraph {
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if r.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        PartitionedGraph::from_edges(n, &edges).unwrap()
    }

    fn k33() -> (PartitionedGraph, VertexSet, VertexSet) {
        let g = PartitionedGraph::complete_multipartite(&[3, 3]);
        let parts = consecutive_parts(6, &[3, 3]);
        (g, parts[0].clone(), parts[1].clone())
    }

    #[test]
    fn k33_examples() {
        let (g, x, y) = k33();
        let b = Budget::default();
        assert_eq!(potential(&g, &x, &y, 0, 1, 4, CheckMode::Exact, &b).unwrap().exact(), Some(3));
        assert_eq!(potential(&g, &x, &y, 0, 1, 3, CheckMode::Exact, &b).unwrap().exact(), Some(0));
    }

    #[test]
    fn isolated_vertex_counts() {
        let g = PartitionedGraph::from_edges(4, &[(1, 2)]).unwrap();
        let x = VertexSet::from_iter(4, [0, 1]);
        let y = VertexSet::from_iter(4, [2, 3]);
        let pc = potential(&g, &x, &y, 0, 1, 1, CheckMode::Exact, &Budget::default()).unwrap();
        assert!(pc.exact().unwrap() >= 1);
    }

    #[test]
    fn exact_matches_naive() {
        for seed in 0..20 {
            let g = random_graph(14, 0.5, seed);
            let x = VertexSet::from_iter(14, 0..6);
            let y = VertexSet::from_iter(14, 6..14);
            for k in 0..4 {
                for beta in 0..5 {
                    let pc = potential(&g, &x, &y, k / 2, k - k / 2, beta, CheckMode::Exact, &Budget::default()).unwrap();
                    assert_eq!(pc.exact().unwrap(), naive_potential(&g, &x, &y, k, beta), "seed {seed} k {k} beta {beta}");
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let (g, x, y) = k33();
        let b = Budget { tuples: 10.0, ..Budget::default() };
        assert!(matches!(potential(&g, &x, &y, 1, 2, 1, CheckMode::Exact, &b), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn common_examples() {
        let (g, x, y) = k33();
        let b = Budget::default();
        assert!(is_common(&g, &x, &y, 2, 3, &b).unwrap().ok);
        assert!(is_common(&g, &x, &y, 5, 0, &b).unwrap().ok);
        // K_{3,3} minus a perfect matching.
        let edges: Vec<_> = (0..3).flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, 3 + j))).collect();
        let h = PartitionedGraph::from_edges(6, &edges).unwrap();
        let c = is_common(&h, &x, &y, 2, 2, &b).unwrap();
        assert!(!c.ok);
        let w = c.witness.unwrap();
        assert_eq!(w.len(), 2);
        assert!(common_count(&h, &w, &y) < 2);
    }

    #[test]
    fn common_matches_p0_negligibility() {
        for seed in 0..30 {
            let g = random_graph(12, 0.6, seed);
            let x = VertexSet::from_iter(12, 0..5);
            let y = VertexSet::from_iter(12, 5..12);
            for d in 1..4 {
                for beta in 0..4 {
                    let c = is_common(&g, &x, &y, d, beta, &Budget::default()).unwrap();
                    let n = is_negligible(&g, &x, &y, 0, d, beta, 2.0, &Budget::default()).unwrap();
                    assert_eq!(c.ok, n, "seed {seed} d {d} beta {beta}");
                    if let Some(w) = c.witness {
                        assert!(common_count(&g, &w, &y) < beta);
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_close_to_exact() {
        let g = random_graph(30, 0.5, 4);
        let x = VertexSet::from_iter(30, 0..12);
        let y = VertexSet::from_iter(30, 12..30);
        let b = Budget::default();
        let exact = potential(&g, &x, &y, 1, 1, 5, CheckMode::Exact, &b).unwrap().value();
        let est = potential(&g, &x, &y, 1, 1, 5, CheckMode::Sampled { trials: 20000, seed: 3 }, &b).unwrap();
        assert!((est.value() - exact).abs() <= 4.0 * est.se() + 1e-9, "{exact} vs {est:?}");
    }

    #[test]
    fn surjection_table() {
        assert_eq!(surjections(3), vec![0, 1, 6, 6]);
        assert_eq!(surjections(0), vec![1]);
    }
}
