//! Grid and path-power patterns, backbones, the counting greedy, the block
//! recolouring of `H` and the two-colour pipeline.

mod counting;
mod ramsey;
mod recolor;
mod search;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::CheckMode;
use crate::density::{check_dense_pair, pair_density, DensityStatus};
use crate::error::Result;
use crate::graph::{PartitionedGraph, VertexSet};
use crate::rng;

pub use counting::find_adjacent_heavy_cliques;
pub use ramsey::{heuristic_partition, ramsey_pipeline, Colour, RamseyParams, RamseyReport};
pub use recolor::{balanced_recolor, recolor, sub_interval_len, transpositions_for, BlockColoring, Recoloring};
pub use search::{find_backbone_min_degree, find_bkr, find_mono_path_power, path_power_to_backbone, BackboneSearch, PathPower};

/// `B_k^r` on `[k] × [r]`, vertex `(i, j)` numbered `i·r + j`: `(i,j) ~ (i′,j′)`
/// iff `|i − i′| ≤ 1` and `j ≠ j′`. Parts are the columns.
pub fn make_bkr(k: usize, r: usize) -> PartitionedGraph {
    let n = k * r;
    let mut edges = Vec::new();
    for i in 0..k {
        for j in 0..r {
            for i2 in i..(i + 2).min(k) {
                for j2 in 0..r {
                    if j != j2 && (i2 > i || j2 > j) {
                        edges.push((i * r + j, i2 * r + j2));
                    }
                }
            }
        }
    }
    let parts = (0..r).map(|j| VertexSet::from_iter(n, (0..k).map(|i| i * r + j))).collect();
    PartitionedGraph::from_edges(n, &edges).expect("edges are in range").with_parts(parts, true).expect("columns are independent")
}

/// `P_k^r` on `[k]`: `i ~ i′` iff `0 < |i − i′| ≤ r`.
pub fn make_pkr(k: usize, r: usize) -> PartitionedGraph {
    let edges: Vec<_> = (0..k).flat_map(|i| (i + 1..(i + r + 1).min(k)).map(move |j| (i, j))).collect();
    PartitionedGraph::from_edges(k, &edges).expect("edges are in range")
}

/// Verdict for one required pair of a backbone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackbonePair {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub density: f64,
    pub status: DensityStatus,
}

/// A `k × c` grid of disjoint vertex sets. Rows are blocks; the last column
/// is the reservoir column.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Backbone {
    pub parts: Vec<Vec<VertexSet>>,
    pub eps: f64,
    pub delta: f64,
    /// Verdicts for every pair the backbone definition requires to be dense.
    pub certificate: Vec<BackbonePair>,
    pub sizes: Vec<Vec<usize>>,
    /// Lower bound every ordinary part is held to, and whether all meet it.
    pub size_bound: f64,
    pub sizes_ok: bool,
    pub notes: Vec<String>,
}

impl Backbone {
    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    pub fn columns(&self) -> usize {
        self.parts.first().map_or(0, Vec::len)
    }

    /// No required pair was refuted.
    pub fn is_certified(&self) -> bool {
        self.certificate.iter().all(|p| p.status != DensityStatus::Refuted)
    }
}

/// Pairs the backbone definition requires: `B_k^{c−1}` on the first `c − 1`
/// columns and a clique on each row. With `full_grid`, `B_k^c` on all columns.
pub fn required_pairs(rows: usize, cols: usize, full_grid: bool) -> Vec<((usize, usize), (usize, usize))> {
    let grid_cols = if full_grid { cols } else { cols - 1 };
    let mut out = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            for j2 in j + 1..cols {
                out.push(((i, j), (i, j2)));
            }
        }
        if i + 1 < rows {
            for j in 0..grid_cols {
                for j2 in 0..grid_cols {
                    if j != j2 {
                        out.push(((i, j), (i + 1, j2)));
                    }
                }
            }
        }
    }
    out
}

/// Checks every required pair of `parts` for `(ε,δ)`-density.
pub fn certify_backbone(
    g: &PartitionedGraph,
    parts: &[Vec<VertexSet>],
    eps: f64,
    delta: f64,
    mode: CheckMode,
    full_grid: bool,
) -> Result<Vec<BackbonePair>> {
    let cols = parts.first().map_or(0, Vec::len);
    if cols == 0 {
        return Ok(Vec::new());
    }
    required_pairs(parts.len(), cols, full_grid)
        .par_iter()
        .enumerate()
        .map(|(idx, &(a, b))| {
            let (x, y) = (&parts[a.0][a.1], &parts[b.0][b.1]);
            let density = pair_density(g, x, y);
            let status = if x.is_empty() || y.is_empty() {
                DensityStatus::Refuted
            } else {
                let m = match mode {
                    CheckMode::Exact => CheckMode::Exact,
                    CheckMode::Sampled { trials, seed } => CheckMode::Sampled { trials, seed: rng::derive(seed, idx as u64) },
                };
                check_dense_pair(g, x, y, eps, delta, m)?.status
            };
            Ok(BackbonePair { a, b, density, status })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_patterns() {
        let b = make_bkr(2, 2);
        assert_eq!((b.n(), b.edge_count()), (4, 4));
        assert!((0..4).all(|v| b.degree(v) == 2));
        let p = make_pkr(4, 2);
        let mut e = p.edges();
        e.sort();
        assert_eq!(e, vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        let q = make_pkr(6, 1);
        assert_eq!(q.edge_count(), 5);
        assert!((0..5).all(|i| q.has_edge(i, i + 1)));
    }

    #[test]
    fn bkr_edge_count_closed_form() {
        for k in 1..=10 {
            for r in 1..=10 {
                let g = make_bkr(k, r);
                let direct = (0..k * r)
                    .flat_map(|u| (u + 1..k * r).map(move |v| (u, v)))
                    .filter(|&(u, v)| (u / r).abs_diff(v / r) <= 1 && u % r != v % r)
                    .count();
                assert_eq!(g.edge_count(), direct);
                assert_eq!(g.edge_count(), k * r * (r - 1) / 2 + (k - 1) * r * (r - 1));
            }
        }
    }

    #[test]
    fn required_pairs_counts() {
        // Two rows, three columns, grid on the first two columns.
        let p = required_pairs(2, 3, false);
        assert_eq!(p.len(), 3 + 3 + 2);
        assert_eq!(required_pairs(2, 3, true).len(), 3 + 3 + 6);
    }
}
