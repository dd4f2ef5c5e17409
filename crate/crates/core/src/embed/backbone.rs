use serde::{Deserialize, Serialize};

use super::pipeline::{run_rolling, RollingPlan, Window};
use super::{labelling_bounds, verify_embedding, PartialEmbedding, PipelineParams, RunLog};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{Labelling, PartitionedGraph, VertexSet};
use crate::potentials::Pattern;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackboneParams {
    pub pipeline: PipelineParams,
    /// Labels per backbone block of `H`.
    pub xi: usize,
    /// Headroom: `|W_{i,j}| ≤ (1−ε)|V_{i,j}|`.
    pub eps: f64,
}

/// Embeds `H` into `G` along a backbone `(V_{i,j})`.
///
/// `colour[v] ∈ 0..r` and the block of `v` is `(label − 1) / ξ`; vertex `v`
/// must land in `V_{block(v), colour(v)}`. Colour `r − 1` is the buffered
/// colour: its vertices stay at least `β` labels away from block boundaries.
///
/// The host is completed on a scratch copy (`V_{i,j}`–`V_{i+1,j}` for every
/// `j`, and the last column of block `i` against the other columns of the
/// neighbouring blocks). Block `i` is placed in windows spanning blocks `i`
/// and `i+1`; the first interval of each block is placed while the window
/// still starts at the previous block. The result is checked against the
/// original `G`.
pub fn embed_via_backbone(
    g: &PartitionedGraph,
    backbone: &[Vec<VertexSet>],
    h: &PartitionedGraph,
    lab: &Labelling,
    colour: &[usize],
    params: &BackboneParams,
    budget: &Budget,
) -> Result<(PartialEmbedding, RunLog)> {
    let rows = backbone.len();
    let r = backbone.first().map_or(0, Vec::len);
    if rows == 0 || r < 2 || backbone.iter().any(|row| row.len() != r) {
        return Err(Error::PreconditionViolated("backbone must be a nonempty grid with at least two columns".into()));
    }
    if backbone.iter().flatten().any(|p| p.universe() != g.n()) {
        return Err(Error::PreconditionViolated("backbone parts live on a different vertex set".into()));
    }
    if lab.len() != h.n() || colour.len() != h.n() {
        return Err(Error::PreconditionViolated("labelling or colouring size differs from H".into()));
    }
    let m = h.n();
    let xi = params.xi.max(1);
    let k = m.div_ceil(xi);
    if k > rows {
        return Err(Error::PreconditionViolated(format!("H spans {k} blocks of {xi} labels but the backbone has {rows}")));
    }
    let (_, beta) = labelling_bounds(h, lab);
    let block_of = |v: usize| (lab.label(v) - 1) / xi;

    // (iii) colour classes independent, then (ii) buffers and (iv) headroom.
    if let Some(&c) = colour.iter().find(|&&c| c >= r) {
        return Err(Error::PreconditionViolated(format!("colour {c} out of range for {r} columns")));
    }
    if let Some((u, v)) = h.edges().into_iter().find(|&(u, v)| colour[u] == colour[v]) {
        return Err(Error::PreconditionViolated(format!("edge {u}-{v} joins two vertices of colour {}", colour[u])));
    }
    let mut count = vec![vec![0usize; r]; k];
    for v in 0..m {
        let (i, l) = (block_of(v), lab.label(v));
        if colour[v] == r - 1 && (l <= i * xi + beta || l + beta > ((i + 1) * xi).min(m)) {
            return Err(Error::PreconditionViolated(format!("label {l} of the buffered colour lies within {beta} of a block boundary")));
        }
        count[i][colour[v]] += 1;
    }
    for (i, row) in count.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            let cap = (1.0 - params.eps) * backbone[i][j].len() as f64;
            if c as f64 > cap + 1e-9 {
                return Err(Error::PreconditionViolated(format!("|W_{i},{j}| = {c} exceeds (1 - eps)|V_{i},{j}| = {cap:.1}")));
            }
        }
    }

    let mut pairs = Vec::new();
    for i in 0..rows.saturating_sub(1) {
        for j in 0..r {
            pairs.push((&backbone[i][j], &backbone[i + 1][j]));
        }
        for j in 0..r - 1 {
            pairs.push((&backbone[i][r - 1], &backbone[i + 1][j]));
            pairs.push((&backbone[i + 1][r - 1], &backbone[i][j]));
        }
    }
    let overlay = g.with_complete_pairs(&pairs);

    let windows: Vec<Window> = (0..k)
        .map(|w| {
            let next = backbone.get(w + 1);
            let parts = (0..r).map(|j| next.map_or_else(|| backbone[w][j].clone(), |nx| backbone[w][j].union(&nx[j]))).collect();
            match next {
                Some(nx) => Window { parts, f_parts: (0..r).flat_map(|j| [backbone[w][j].clone(), nx[j].clone()]).collect(), pattern: Pattern::Clique2 },
                None => Window { parts, f_parts: backbone[w].clone(), pattern: Pattern::Clique },
            }
        })
        .collect();
    let len = if params.pipeline.block > 0 { params.pipeline.block } else { beta.max(1) };
    let mut chunks = Vec::new();
    for i in 0..k {
        let (start, end) = (i * xi, ((i + 1) * xi).min(m));
        let mut lo = start;
        while lo < end {
            let hi = (lo + len).min(end);
            // The first interval of a block is placed from the previous window.
            let window = if lo == start && i > 0 { i - 1 } else { i };
            chunks.push(((lo, hi), window));
            lo = hi;
        }
    }
    let plan = RollingPlan {
        r,
        chunks,
        windows,
        zones: backbone[..k].to_vec(),
        zone_of: (0..m).map(block_of).collect(),
        colour: colour.to_vec(),
        block_len: len,
    };
    let (f, log) = run_rolling(&overlay, h, lab, &plan, &params.pipeline, budget).map_err(|e| match e {
        Error::PipelineFailed { index, cause, .. } => {
            let (lo, _) = plan.chunks[index].0;
            let outer = lo / xi;
            let inner = plan.chunks[..index].iter().filter(|c| c.0 .0 / xi == outer).count();
            Error::PipelineFailed { stage: format!("outer {outer} inner"), index: inner, cause }
        }
        e => e,
    })?;
    let check = verify_embedding(g, h, &f.map);
    if !check.ok {
        return Err(Error::InternalInvariantBroken(format!(
            "backbone embedding fails on the original host: {}",
            check.first_violation.unwrap_or_default()
        )));
    }
    if let Some(v) = (0..m).find(|&v| !backbone[block_of(v)][colour[v]].contains(f.map[v].unwrap())) {
        return Err(Error::InternalInvariantBroken(format!("vertex {v} left its backbone part")));
    }
    Ok((f, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drc::DrcParams;
    use crate::graph::consecutive_parts;

    /// A path coloured `0,1,0,1,...`; the buffered colour is left unused.
    fn strip(m: usize) -> (PartitionedGraph, Vec<usize>) {
        let e: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        let h = PartitionedGraph::from_edges(m, &e).unwrap();
        (h, (0..m).map(|i| i % 2).collect())
    }

    fn grid(rows: usize, r: usize, size: usize) -> (PartitionedGraph, Vec<Vec<VertexSet>>) {
        let n = rows * r * size;
        let g = PartitionedGraph::complete_multipartite(&vec![size; rows * r]);
        let parts = consecutive_parts(n, &vec![size; rows * r]);
        let bb = (0..rows).map(|i| parts[i * r..(i + 1) * r].to_vec()).collect();
        (g, bb)
    }

    fn params(xi: usize) -> BackboneParams {
        BackboneParams { pipeline: PipelineParams::new(DrcParams::practical(1, 1, 0.5)), xi, eps: 0.1 }
    }

    #[test]
    fn single_block_behaves_like_rpartite() {
        let (g, bb) = grid(1, 3, 12);
        let (h, col) = strip(10);
        let (f, _) = embed_via_backbone(&g, &bb, &h, &Labelling::identity(10), &col, &params(10), &Budget::default()).unwrap();
        assert!(verify_embedding(&g, &h, &f.map).ok);
    }

    #[test]
    fn several_blocks_with_buffered_colour() {
        let (g, bb) = grid(4, 3, 10);
        let m = 24;
        let (h, mut col) = strip(m);
        // Label 4 of each block of 8 gets the buffered colour; its neighbours have colours 0/1.
        for b in 0..3 {
            col[b * 8 + 4] = 2;
        }
        let (f, log) = embed_via_backbone(&g, &bb, &h, &Labelling::identity(m), &col, &params(8), &Budget::default()).unwrap();
        assert!(verify_embedding(&g, &h, &f.map).ok);
        assert!(!log.blocks.is_empty());
    }

    #[test]
    fn buffer_violation_is_rejected() {
        let (g, bb) = grid(3, 3, 10);
        let (h, mut col) = strip(16);
        col[8] = 2;
        let err = embed_via_backbone(&g, &bb, &h, &Labelling::identity(16), &col, &params(8), &Budget::default()).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolated(_)));
    }
}
