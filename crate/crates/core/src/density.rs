//! Dense pairs, degree-dense bipartite graphs and reduced graphs.
//!
//! Exact checks enumerate subsets and are limited to small pairs. Sampled
//! checks are falsifier searches: they can refute a property but never
//! certify it, which is why their positive verdict is
//! [`DensityStatus::Unfalsified`].

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::CheckMode;
use crate::error::{Error, Result};
use crate::graph::{PartitionedGraph, VertexSet};
use crate::rng;

/// Largest `|X| + |Y|` accepted by exact density checks.
pub const EXACT_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DensityStatus {
    Certified,
    Refuted,
    Unfalsified,
}

/// A witness against density: subsets `x ⊆ X`, `y ⊆ Y` and the value they
/// achieve (edge density for dense pairs, share of good vertices on `side`
/// for degree-density).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub achieved: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityVerdict {
    pub status: DensityStatus,
    pub counterexample: Option<Counterexample>,
    /// Subset pairs examined (exact) or drawn (sampled).
    pub trials: u64,
    pub mode: CheckMode,
}

impl DensityVerdict {
    pub fn is_refuted(&self) -> bool {
        self.status == DensityStatus::Refuted
    }
}

/// Smallest integer `≥ x`, tolerant of float noise just above an integer.
pub(crate) fn ceil_tol(x: f64) -> usize {
    let x = x.max(0.0);
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// `e(X, Y) / (|X||Y|)`, or 0 when either side is empty.
pub fn pair_density(g: &PartitionedGraph, x: &VertexSet, y: &VertexSet) -> f64 {
    if x.is_empty() || y.is_empty() {
        return 0.0;
    }
    g.edges_between(x, y) as f64 / (x.len() as f64 * y.len() as f64)
}

fn check_pair_inputs(x: &VertexSet, y: &VertexSet) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::PreconditionViolated("density check needs nonempty X and Y".into()));
    }
    if !x.is_disjoint(y) {
        return Err(Error::PreconditionViolated("X and Y must be disjoint".into()));
    }
    Ok(())
}

/// Whether every `X′ ⊆ X`, `Y′ ⊆ Y` with `|X′| ≥ ε|X|`, `|Y′| ≥ ε|Y|` spans at
/// least `δ|X′||Y′|` edges.
pub fn check_dense_pair(
    g: &PartitionedGraph,
    x: &VertexSet,
    y: &VertexSet,
    eps: f64,
    delta: f64,
    mode: CheckMode,
) -> Result<DensityVerdict> {
    check_pair_inputs(x, y)?;
    match mode {
        CheckMode::Exact => dense_pair_exact(g, x, y, eps, delta),
        CheckMode::Sampled { trials, seed } => Ok(dense_pair_sampled(g, x, y, eps, delta, trials, seed)),
    }
}

fn dense_pair_exact(g: &PartitionedGraph, x: &VertexSet, y: &VertexSet, eps: f64, delta: f64) -> Result<DensityVerdict> {
    let size = x.len() + y.len();
    if size > EXACT_LIMIT {
        return Err(Error::SizeLimitExceeded { what: "exact dense-pair check".into(), size, limit: EXACT_LIMIT });
    }
    // Enumerate subsets of the smaller side; for a fixed X′ the sparsest Y′ of
    // size b consists of the b vertices with fewest neighbours in X′.
    let swap = x.len() > y.len();
    let (sx, sy) = if swap { (y, x) } else { (x, y) };
    let xs = sx.to_vec();
    let ys = sy.to_vec();
    let lo_x = ceil_tol(eps * xs.len() as f64).max(1);
    let lo_y = ceil_tol(eps * ys.len() as f64).max(1);
    let masks: Vec<u32> = ys
        .iter()
        .map(|&v| xs.iter().enumerate().filter(|(_, &u)| g.has_edge(u, v)).fold(0u32, |m, (i, _)| m | 1 << i))
        .collect();
    let mut trials = 0u64;
    for sub in 1u32..(1u32 << xs.len()) {
        let a = sub.count_ones() as usize;
        if a < lo_x {
            continue;
        }
        let mut c: Vec<(u32, usize)> = masks.iter().enumerate().map(|(j, &m)| ((m & sub).count_ones(), j)).collect();
        c.sort_unstable();
        let mut e = 0u64;
        for b in 1..=ys.len() {
            e += c[b - 1].0 as u64;
            if b < lo_y {
                continue;
            }
            trials += 1;
            if (e as f64) + 1e-9 < delta * (a * b) as f64 {
                let xp: Vec<usize> = (0..xs.len()).filter(|i| sub >> i & 1 == 1).map(|i| xs[i]).collect();
                let mut yp: Vec<usize> = c[..b].iter().map(|&(_, j)| ys[j]).collect();
                yp.sort_unstable();
                let (xp, yp) = if swap { (yp, xp) } else { (xp, yp) };
                return Ok(DensityVerdict {
                    status: DensityStatus::Refuted,
                    counterexample: Some(Counterexample {
                        x: xp,
                        y: yp,
                        achieved: e as f64 / (a * b) as f64,
                        side: None,
                    }),
                    trials,
                    mode: CheckMode::Exact,
                });
            }
        }
    }
    Ok(DensityVerdict { status: DensityStatus::Certified, counterexample: None, trials, mode: CheckMode::Exact })
}

/// Uniform subset of `pool` with size uniform in `[lo, pool.len()]`.
fn random_subset(pool: &[usize], lo: usize, rng: &mut rng::Rng) -> Vec<usize> {
    let lo = lo.clamp(1, pool.len());
    let size = rng.gen_range(lo..=pool.len());
    let mut out: Vec<usize> = sample(rng, pool.len(), size).into_iter().map(|i| pool[i]).collect();
    out.sort_unstable();
    out
}

fn dense_pair_sampled(
    g: &PartitionedGraph,
    x: &VertexSet,
    y: &VertexSet,
    eps: f64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> DensityVerdict {
    let xs = x.to_vec();
    let ys = y.to_vec();
    let lo_x = ceil_tol(eps * xs.len() as f64);
    let lo_y = ceil_tol(eps * ys.len() as f64);
    let n = g.n();
    let hit = (0..trials).into_par_iter().find_map_first(|i| {
        let mut r = rng::stream(seed, i);
        let xp = random_subset(&xs, lo_x, &mut r);
        let yp = random_subset(&ys, lo_y, &mut r);
        let yset = VertexSet::from_iter(n, yp.iter().copied());
        let e: usize = xp.iter().map(|&u| g.neighbors(u).intersection_len(&yset)).sum();
        let area = (xp.len() * yp.len()) as f64;
        ((e as f64) + 1e-9 < delta * area).then(|| (i, Counterexample { x: xp, y: yp, achieved: e as f64 / area, side: None }))
    });
    let mode = CheckMode::Sampled { trials, seed };
    match hit {
        Some((i, cx)) => DensityVerdict { status: DensityStatus::Refuted, counterexample: Some(cx), trials: i + 1, mode },
        None => DensityVerdict { status: DensityStatus::Unfalsified, counterexample: None, trials, mode },
    }
}

/// Re-checks a dense-pair counterexample by counting edges directly.
pub fn recheck_dense_counterexample(g: &PartitionedGraph, cx: &Counterexample, delta: f64) -> bool {
    let e: usize = cx.x.iter().map(|&u| cx.y.iter().filter(|&&v| g.has_edge(u, v)).count()).sum();
    (e as f64) + 1e-9 < delta * (cx.x.len() * cx.y.len()) as f64
}

/// Number of vertices of `xs` with at least `δ|other|` neighbours in `other`.
fn good_count(g: &PartitionedGraph, xs: &[usize], other: &VertexSet, delta: f64) -> usize {
    let need = delta * other.len() as f64;
    xs.iter().filter(|&&u| g.neighbors(u).intersection_len(other) as f64 + 1e-9 >= need).count()
}

/// Whether, for all `X_i ⊆ V_i` with `|X_i| ≥ α|V_i|` (nonempty), at least
/// `(1−ε)|X_i|` vertices of each `X_i` have relative degree at least `δ` into
/// the other side. `V_1`, `V_2` are the first two parts of `g`.
pub fn check_degree_dense(g: &PartitionedGraph, alpha: f64, eps: f64, delta: f64, mode: CheckMode) -> Result<DensityVerdict> {
    let (v1, v2) = bipartition(g)?;
    check_degree_dense_between(g, v1, v2, alpha, eps, delta, mode)
}

pub fn check_degree_dense_between(
    g: &PartitionedGraph,
    v1: &VertexSet,
    v2: &VertexSet,
    alpha: f64,
    eps: f64,
    delta: f64,
    mode: CheckMode,
) -> Result<DensityVerdict> {
    check_pair_inputs(v1, v2)?;
    match mode {
        CheckMode::Exact => degree_dense_exact(g, v1, v2, alpha, eps, delta),
        CheckMode::Sampled { trials, seed } => Ok(degree_dense_sampled(g, v1, v2, alpha, eps, delta, trials, seed)),
    }
}

fn bipartition(g: &PartitionedGraph) -> Result<(&VertexSet, &VertexSet)> {
    if g.parts().len() < 2 {
        return Err(Error::PreconditionViolated("bipartite mode needs two parts".into()));
    }
    Ok((g.part(0), g.part(1)))
}

fn degree_dense_exact(
    g: &PartitionedGraph,
    v1: &VertexSet,
    v2: &VertexSet,
    alpha: f64,
    eps: f64,
    delta: f64,
) -> Result<DensityVerdict> {
    let size = v1.len() + v2.len();
    if size > EXACT_LIMIT {
        return Err(Error::SizeLimitExceeded { what: "exact degree-dense check".into(), size, limit: EXACT_LIMIT });
    }
    let a = v1.to_vec();
    let b = v2.to_vec();
    let adj1: Vec<u32> =
        a.iter().map(|&u| b.iter().enumerate().filter(|(_, &v)| g.has_edge(u, v)).fold(0, |m, (j, _)| m | 1 << j)).collect();
    let adj2: Vec<u32> =
        b.iter().map(|&v| a.iter().enumerate().filter(|(_, &u)| g.has_edge(u, v)).fold(0, |m, (i, _)| m | 1 << i)).collect();
    let lo1 = ceil_tol(alpha * a.len() as f64).max(1);
    let lo2 = ceil_tol(alpha * b.len() as f64).max(1);
    let subs1: Vec<u32> = (1u32..1 << a.len()).filter(|s| s.count_ones() as usize >= lo1).collect();
    let subs2: Vec<u32> = (1u32..1 << b.len()).filter(|s| s.count_ones() as usize >= lo2).collect();

    // Share of vertices of `own` whose degree into `other` is at least δ|other|.
    let side_fails = |own: u32, other: u32, adj: &[u32]| -> Option<f64> {
        let k = own.count_ones() as f64;
        let need = delta * other.count_ones() as f64;
        let mut good = 0usize;
        let mut bits = own;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if (adj[i] & other).count_ones() as f64 + 1e-9 >= need {
                good += 1;
            }
        }
        ((good as f64) + 1e-9 < (1.0 - eps) * k).then(|| good as f64 / k)
    };

    let hit = subs1.par_iter().find_map_first(|&s1| {
        for &s2 in &subs2 {
            if let Some(f) = side_fails(s1, s2, &adj1) {
                return Some((s1, s2, 0usize, f));
            }
            if let Some(f) = side_fails(s2, s1, &adj2) {
                return Some((s1, s2, 1usize, f));
            }
        }
        None
    });
    let trials = (subs1.len() * subs2.len()) as u64;
    Ok(match hit {
        Some((s1, s2, side, f)) => DensityVerdict {
            status: DensityStatus::Refuted,
            counterexample: Some(Counterexample {
                x: (0..a.len()).filter(|i| s1 >> i & 1 == 1).map(|i| a[i]).collect(),
                y: (0..b.len()).filter(|j| s2 >> j & 1 == 1).map(|j| b[j]).collect(),
                achieved: f,
                side: Some(side),
            }),
            trials,
            mode: CheckMode::Exact,
        },
        None => DensityVerdict { status: DensityStatus::Certified, counterexample: None, trials, mode: CheckMode::Exact },
    })
}

#[allow(clippy::too_many_arguments)]
fn degree_dense_sampled(
    g: &PartitionedGraph,
    v1: &VertexSet,
    v2: &VertexSet,
    alpha: f64,
    eps: f64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> DensityVerdict {
    let a = v1.to_vec();
    let b = v2.to_vec();
    let lo1 = ceil_tol(alpha * a.len() as f64);
    let lo2 = ceil_tol(alpha * b.len() as f64);
    let n = g.n();
    let hit = (0..trials).into_par_iter().find_map_first(|i| {
        let mut r = rng::stream(seed, i);
        let x1 = random_subset(&a, lo1, &mut r);
        let x2 = random_subset(&b, lo2, &mut r);
        let s1 = VertexSet::from_iter(n, x1.iter().copied());
        let s2 = VertexSet::from_iter(n, x2.iter().copied());
        for (side, own, other) in [(0usize, &x1, &s2), (1, &x2, &s1)] {
            let good = good_count(g, own, other, delta);
            if (good as f64) + 1e-9 < (1.0 - eps) * own.len() as f64 {
                let f = good as f64 / own.len() as f64;
                return Some((i, Counterexample { x: x1.clone(), y: x2.clone(), achieved: f, side: Some(side) }));
            }
        }
        None
    });
    let mode = CheckMode::Sampled { trials, seed };
    match hit {
        Some((i, cx)) => DensityVerdict { status: DensityStatus::Refuted, counterexample: Some(cx), trials: i + 1, mode },
        None => DensityVerdict { status: DensityStatus::Unfalsified, counterexample: None, trials, mode },
    }
}

/// Re-checks a degree-dense counterexample directly.
pub fn recheck_degree_counterexample(g: &PartitionedGraph, cx: &Counterexample, eps: f64, delta: f64) -> bool {
    let n = g.n();
    let s1 = VertexSet::from_iter(n, cx.x.iter().copied());
    let s2 = VertexSet::from_iter(n, cx.y.iter().copied());
    let (own, other) = match cx.side {
        Some(1) => (&cx.y, &s1),
        _ => (&cx.x, &s2),
    };
    (good_count(g, own, other, delta) as f64) + 1e-9 < (1.0 - eps) * own.len() as f64
}

/// Verdict for one pair of parts of a reduced graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub verdict: DensityVerdict,
}

#[derive(Clone, Debug)]
pub struct ReducedGraph {
    /// One vertex per part; `i ~ j` unless the pair was refuted.
    pub graph: PartitionedGraph,
    pub pairs: Vec<PairVerdict>,
}

/// The `(ε,δ)`-reduced graph of `parts`: one vertex per part, adjacent unless
/// the pair check refutes density. Sampled checks use a per-pair seed derived
/// from the supplied one.
pub fn reduced_graph(
    g: &PartitionedGraph,
    parts: &[VertexSet],
    eps: f64,
    delta: f64,
    mode: CheckMode,
) -> Result<ReducedGraph> {
    let k = parts.len();
    for i in 0..k {
        for j in i + 1..k {
            if !parts[i].is_disjoint(&parts[j]) {
                return Err(Error::PreconditionViolated(format!("parts {i} and {j} overlap")));
            }
        }
    }
    let jobs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let pairs = jobs
        .par_iter()
        .map(|&(i, j)| {
            let m = match mode {
                CheckMode::Exact => CheckMode::Exact,
                CheckMode::Sampled { trials, seed } => {
                    CheckMode::Sampled { trials, seed: rng::derive(seed, (i * k + j) as u64) }
                }
            };
            let verdict = if parts[i].is_empty() || parts[j].is_empty() {
                DensityVerdict { status: DensityStatus::Refuted, counterexample: None, trials: 0, mode: m }
            } else {
                check_dense_pair(g, &parts[i], &parts[j], eps, delta, m)?
            };
            Ok(PairVerdict { i, j, verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = vec![VertexSet::new(k); k];
    for p in &pairs {
        if !p.verdict.is_refuted() {
            rows[p.i].insert(p.j);
            rows[p.j].insert(p.i);
        }
    }
    Ok(ReducedGraph { graph: PartitionedGraph::from_rows(rows), pairs })
}

/// Minimum over `V_1` of `d(a)/|V_2|` and over `V_2` of `d(b)/|V_1|`, using
/// the first two parts of `g`.
pub fn relative_min_degree(g: &PartitionedGraph) -> Result<f64> {
    let (v1, v2) = bipartition(g)?;
    Ok(relative_min_degree_between(g, v1, v2))
}

pub fn relative_min_degree_between(g: &PartitionedGraph, v1: &VertexSet, v2: &VertexSet) -> f64 {
    let side = |own: &VertexSet, other: &VertexSet| -> f64 {
        if other.is_empty() {
            return 1.0;
        }
        own.iter().map(|u| g.degree_in(u, other)).min().map_or(1.0, |d| d as f64 / other.len() as f64)
    };
    side(v1, v2).min(side(v2, v1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::consecutive_parts;

    #[test]
    fn complete_pair_certified() {
        let g = PartitionedGraph::complete_multipartite(&[5, 6]);
        let v = check_dense_pair(&g, g.part(0), g.part(1), 0.2, 1.0, CheckMode::Exact).unwrap();
        assert_eq!(v.status, DensityStatus::Certified);
        let v = check_degree_dense(&g, 0.3, 0.0, 1.0, CheckMode::Exact).unwrap();
        assert_eq!(v.status, DensityStatus::Certified);
        assert_eq!(relative_min_degree(&g).unwrap(), 1.0);
    }

    #[test]
    fn empty_pair_refuted() {
        let g = PartitionedGraph::empty(8).with_parts(consecutive_parts(8, &[4, 4]), true).unwrap();
        let v = check_dense_pair(&g, g.part(0), g.part(1), 0.5, 0.1, CheckMode::Exact).unwrap();
        assert_eq!(v.status, DensityStatus::Refuted);
        assert!(recheck_dense_counterexample(&g, v.counterexample.as_ref().unwrap(), 0.1));
        let v = check_dense_pair(&g, g.part(0), g.part(1), 0.5, 0.1, CheckMode::Sampled { trials: 10, seed: 1 }).unwrap();
        assert!(v.is_refuted());
    }

    #[test]
    fn isolated_vertex_refutes_degree_density() {
        let edges: Vec<_> = (1..3).flat_map(|u| (3..6).map(move |v| (u, v))).collect();
        let g = PartitionedGraph::from_edges(6, &edges).unwrap().with_parts(consecutive_parts(6, &[3, 3]), true).unwrap();
        let v = check_degree_dense(&g, 1.0, 0.0, 0.5, CheckMode::Exact).unwrap();
        assert!(v.is_refuted());
        assert_eq!(relative_min_degree(&g).unwrap(), 0.0);
    }

    #[test]
    fn exact_limit_enforced() {
        let g = PartitionedGraph::complete_multipartite(&[13, 13]);
        assert!(matches!(
            check_dense_pair(&g, g.part(0), g.part(1), 0.5, 0.5, CheckMode::Exact),
            Err(Error::SizeLimitExceeded { .. })
        ));
    }

    #[test]
    fn reduced_graph_of_blocks() {
        let g = PartitionedGraph::complete_multipartite(&[2, 2, 2]);
        let r = reduced_graph(&g, g.parts(), 0.5, 0.9, CheckMode::Exact).unwrap();
        assert_eq!(r.graph.edge_count(), 3);
        let e = PartitionedGraph::empty(4);
        let r = reduced_graph(&e, &consecutive_parts(4, &[2, 2]), 0.5, 0.1, CheckMode::Exact).unwrap();
        assert_eq!(r.graph.edge_count(), 0);
    }
}
