use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{Budget, CheckMode};
use crate::error::{Error, Result};
use crate::graph::{common_neighbors_of, PartitionedGraph, VertexSet};
use crate::potentials::{is_common, potential};
use crate::rng;

/// `s` independent uniform draws (with repetition) from `pool`, and the
/// common neighbourhood of the drawn vertices in the whole graph.
pub fn sample_neighborhood_set(g: &PartitionedGraph, pool: &VertexSet, s: usize, seed: u64) -> Result<(Vec<usize>, VertexSet)> {
    if pool.is_empty() {
        return Err(Error::PreconditionViolated("cannot draw from an empty pool".into()));
    }
    let t = draw(pool, s, &mut rng::stream(seed, 0));
    let nt = common_neighbors_of(g, t.iter().copied(), &VertexSet::full(g.n()));
    Ok((t, nt))
}

pub(crate) fn draw(pool: &VertexSet, s: usize, r: &mut rng::Rng) -> Vec<usize> {
    let items = pool.to_vec();
    (0..s).map(|_| items[r.gen_range(0..items.len())]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypicalCheck {
    pub ok: bool,
    /// Part `i` and a subset `Q ⊆ A_{−i}` such that `Q ∪ T_{−i}` has fewer
    /// than `β` common neighbours in `A_i`.
    pub witness: Option<(usize, Vec<usize>)>,
}

/// Whether `T` is `(d,β)`-typical for `A`: for every `i` and every `d`-set
/// `Q ⊆ A_{−i}`, `Q ∪ T_{−i}` has at least `β` common neighbours in `A_i`.
pub fn is_typical(g: &PartitionedGraph, t: &[Vec<usize>], a: &[VertexSet], d: usize, beta: usize, budget: &Budget) -> Result<TypicalCheck> {
    if t.len() != a.len() {
        return Err(Error::PreconditionViolated(format!("{} T sets for {} parts", t.len(), a.len())));
    }
    for i in 0..a.len() {
        let mut rest = VertexSet::new(g.n());
        for (j, aj) in a.iter().enumerate() {
            if j != i {
                rest.union_with(aj);
            }
        }
        let others = t.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, tj)| tj.iter().copied());
        let target = common_neighbors_of(g, others, &a[i]);
        let c = is_common(g, &rest, &target, d, beta, budget)?;
        if !c.ok {
            return Ok(TypicalCheck { ok: false, witness: Some((i, c.witness.unwrap_or_default())) });
        }
    }
    Ok(TypicalCheck { ok: true, witness: None })
}

/// Monte Carlo mean of one expectation against its bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationCheck {
    pub mean: f64,
    pub se: f64,
    pub bound: f64,
    /// The reference potential the bound is a multiple of.
    pub reference: f64,
    /// `mean / bound`, 0 when both vanish.
    pub ratio: f64,
    /// `mean − 3·se ≤ bound`.
    pub holds: bool,
    /// Reference potential and every sampled value were 0.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegligibleReport {
    pub trials: u64,
    pub m: usize,
    pub s: usize,
    /// `E[ξ_p(N(T̂)∩Y, X)] ≤ (β/m)^s ξ_p(Y, X)`.
    pub first: ExpectationCheck,
    /// `E[ξ_p(X, N(T̂)∩Y)] ≤ (1/m)^s ξ_{p+s}(X, Y)`.
    pub second: ExpectationCheck,
}

/// Monte Carlo test of the two expectation bounds for `T̂` drawn from
/// `Xsub ⊆ X` with `m = |Xsub|`. Each trial counts potentials exactly, so
/// the budget must allow exact counts on these sets. With `|Xsub| = 1` the
/// draw is deterministic and a single evaluation is exact.
#[allow(clippy::too_many_arguments)]
pub fn test_negligible_potential_props(
    g: &PartitionedGraph,
    x: &VertexSet,
    y: &VertexSet,
    xsub: &VertexSet,
    s: usize,
    p: usize,
    d: usize,
    beta: usize,
    trials: u64,
    seed: u64,
    budget: &Budget,
) -> Result<NegligibleReport> {
    if xsub.is_empty() || !xsub.is_subset(x) {
        return Err(Error::PreconditionViolated("Xsub must be a nonempty subset of X".into()));
    }
    let m = xsub.len();
    let exact = |xx: &VertexSet, yy: &VertexSet, pp: usize| -> Result<f64> { Ok(potential(g, xx, yy, pp, d, beta, CheckMode::Exact, budget)?.value()) };
    let ref_first = exact(y, x, p)?;
    let ref_second = exact(x, y, p + s)?;
    let trials = if m == 1 { 1 } else { trials.max(1) };
    let samples: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let t = draw(xsub, s, &mut rng::stream(seed, i));
            let nt = common_neighbors_of(g, t.iter().copied(), y);
            Ok((exact(&nt, x, p)?, exact(x, &nt, p)?))
        })
        .collect::<Result<_>>()?;
    let first = summarize(samples.iter().map(|s| s.0), ref_first, (beta as f64 / m as f64).powi(s as i32), "first")?;
    let second = summarize(samples.iter().map(|s| s.1), ref_second, (1.0 / m as f64).powi(s as i32), "second")?;
    Ok(NegligibleReport { trials, m, s, first, second })
}

fn summarize(vals: impl Iterator<Item = f64>, reference: f64, factor: f64, which: &str) -> Result<ExpectationCheck> {
    let v: Vec<f64> = vals.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let se = (var / n).sqrt();
    let bound = reference * factor;
    if reference == 0.0 {
        if mean > 0.0 {
            return Err(Error::DegenerateDenominator(format!("{which} bound: reference potential is 0 but the sampled mean is {mean}")));
        }
        return Ok(ExpectationCheck { mean, se, bound, reference, ratio: 0.0, holds: true, degenerate: true });
    }
    Ok(ExpectationCheck { mean, se, bound, reference, ratio: mean / bound, holds: mean - 3.0 * se <= bound, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::consecutive_parts;

    fn bip(n1: usize, n2: usize, p: f64, seed: u64) -> (PartitionedGraph, VertexSet, VertexSet) {
        let mut r = rng::stream(seed, 0);
        let mut e = Vec::new();
        for u in 0..n1 {
            for v in n1..n1 + n2 {
                if r.gen_bool(p) {
                    e.push((u, v));
                }
            }
        }
        let parts = consecutive_parts(n1 + n2, &[n1, n2]);
        let g = PartitionedGraph::from_edges(n1 + n2, &e).unwrap().with_parts(parts.clone(), true).unwrap();
        (g, parts[0].clone(), parts[1].clone())
    }

    #[test]
    fn single_pool_vertex_repeats() {
        let (g, x, _) = bip(5, 5, 0.5, 1);
        let pool = VertexSet::from_iter(10, [2]);
        let (t, nt) = sample_neighborhood_set(&g, &pool, 3, 9).unwrap();
        assert_eq!(t, vec![2, 2, 2]);
        assert_eq!(&nt, g.neighbors(2));
        assert!(sample_neighborhood_set(&g, &VertexSet::new(10), 1, 0).is_err());
        let (t1, _) = sample_neighborhood_set(&g, &x, 4, 3).unwrap();
        let (t2, _) = sample_neighborhood_set(&g, &x, 4, 3).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn typical_on_complete_and_with_isolated_vertex() {
        let g = PartitionedGraph::complete_multipartite(&[4, 4, 4]);
        let a: Vec<VertexSet> = g.parts().to_vec();
        let t = vec![vec![0], vec![4], vec![8]];
        assert!(is_typical(&g, &t, &a, 2, 4, &Budget::default()).unwrap().ok);
        // Vertex 0 loses all edges to part 1, so {0} has no neighbours there.
        let edges: Vec<_> = g.edges().into_iter().filter(|&(u, v)| !(u == 0 && (4..8).contains(&v))).collect();
        let h = PartitionedGraph::from_edges(12, &edges).unwrap().with_parts(a.clone(), true).unwrap();
        let t = vec![vec![], vec![], vec![]];
        let c = is_typical(&h, &t, &a, 1, 1, &Budget::default()).unwrap();
        assert!(!c.ok);
        assert_eq!(c.witness, Some((1, vec![0])));
    }

    #[test]
    fn complete_bipartite_gives_zero_expectations() {
        let g = PartitionedGraph::complete_multipartite(&[6, 6]);
        let (x, y) = (g.part(0).clone(), g.part(1).clone());
        let r = test_negligible_potential_props(&g, &x, &y, &x, 2, 1, 1, 3, 50, 1, &Budget::default()).unwrap();
        assert_eq!(r.first.mean, 0.0);
        assert_eq!(r.second.mean, 0.0);
        assert!(r.first.holds && r.second.holds && r.first.degenerate);
    }

    #[test]
    fn single_vertex_subpool_is_exact() {
        let (g, x, y) = bip(12, 12, 0.5, 4);
        let xsub = VertexSet::from_iter(24, [3]);
        let r = test_negligible_potential_props(&g, &x, &y, &xsub, 2, 1, 1, 3, 100, 1, &Budget::default()).unwrap();
        assert_eq!(r.trials, 1);
        let nt = common_neighbors_of(&g, [3], &y);
        let direct = potential(&g, &x, &nt, 1, 1, 3, CheckMode::Exact, &Budget::default()).unwrap().value();
        assert_eq!(r.second.mean, direct);
        assert_eq!(r.second.se, 0.0);
    }
}
