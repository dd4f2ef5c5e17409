use serde::{Deserialize, Serialize};

use super::{balanced_recolor, find_mono_path_power, path_power_to_backbone, BlockColoring, PathPower};
use crate::budget::{Budget, CheckMode};
use crate::density::{pair_density, DensityStatus};
use crate::embed::{embed_via_backbone, verify_embedding, BackboneParams, PartialEmbedding, PipelineParams, RunLog};
use crate::error::{Error, Result};
use crate::graph::{Labelling, PartitionedGraph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colour {
    Red,
    Blue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyParams {
    /// Partition of the host; when absent, [`heuristic_partition`] with `t` parts.
    #[serde(default)]
    pub partition: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub t: usize,
    /// Backbone certification parameters.
    pub eps: f64,
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub check_trials: u64,
    /// Blocks of `H`; 0 uses one less than the backbone rows.
    #[serde(default)]
    pub blocks: usize,
    pub balance_eps: f64,
    #[serde(default = "default_balance_trials")]
    pub balance_trials: usize,
    pub seed: u64,
    pub pipeline: PipelineParams,
}

fn default_trials() -> u64 {
    200
}
fn default_balance_trials() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RamseyReport {
    pub n: usize,
    pub t: usize,
    pub colour: Colour,
    pub path: PathPower,
    pub backbone_rows: usize,
    pub refuted_pairs: usize,
    pub block_coloring: BlockColoring,
    pub log: RunLog,
    /// `verify_embedding` against the winning colour's graph.
    pub verified: bool,
    /// Every edge of `H` lands on an edge of the winning colour.
    pub audit_ok: bool,
    pub notes: Vec<String>,
}

/// Groups vertices into `t` parts of `⌊n/t⌋` by adjacency-row similarity:
/// the lowest unassigned vertex takes the unassigned vertices whose rows
/// differ least from its own. Leftover vertices stay unassigned.
pub fn heuristic_partition(g: &PartitionedGraph, t: usize) -> Vec<VertexSet> {
    let n = g.n();
    if t == 0 || n < t {
        return Vec::new();
    }
    let size = n / t;
    let mut free = VertexSet::full(n);
    let mut parts = Vec::with_capacity(t);
    for _ in 0..t {
        let pivot = free.first().expect("enough vertices remain");
        let pw = g.neighbors(pivot).words();
        let mut scored: Vec<(usize, usize)> = free
            .iter()
            .map(|u| {
                let d = pw.iter().zip(g.neighbors(u).words()).map(|(a, b)| (a ^ b).count_ones() as usize).sum();
                (d, u)
            })
            .collect();
        scored.sort_unstable();
        let part = VertexSet::from_iter(n, scored.iter().take(size).map(|&(_, u)| u));
        free.difference_with(&part);
        parts.push(part);
    }
    parts
}

fn stage(name: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::wrap(name, 0, e)
}

/// Two-colour pipeline: `red` holds the red edges of a colouring of `K_n`,
/// the rest is blue.
///
/// Colours each pair of parts by majority red density, finds a long
/// monochromatic `P_k^r` among the parts, slices it into a backbone,
/// recolours `H` into blocks and embeds it in the winning colour's graph.
pub fn ramsey_pipeline(
    red: &PartitionedGraph,
    r: usize,
    h: &PartitionedGraph,
    lab: &Labelling,
    coloring: &[usize],
    params: &RamseyParams,
    budget: &Budget,
) -> Result<(PartialEmbedding, RamseyReport)> {
    let n = red.n();
    if r == 0 || coloring.len() != h.n() || lab.len() != h.n() {
        return Err(Error::PreconditionViolated("need r >= 1 and colouring/labelling sized like H".into()));
    }
    if let Some(&c) = coloring.iter().find(|&&c| c >= r) {
        return Err(Error::PreconditionViolated(format!("colour {c} out of range for r = {r}")));
    }
    let mut notes = Vec::new();
    let parts: Vec<VertexSet> = match &params.partition {
        Some(p) => p.iter().map(|s| VertexSet::from_iter(n, s.iter().copied())).collect(),
        None => {
            notes.push(format!("heuristic partition into {} parts", params.t));
            heuristic_partition(red, params.t)
        }
    };
    let t = parts.len();
    if t < r + 2 {
        return Err(stage("partition")(Error::PreconditionViolated(format!("{t} parts is too few for r = {r}"))));
    }

    // Coloured reduced graph: every pair of parts is an edge, coloured by majority.
    let mut red_rows = vec![VertexSet::new(t); t];
    let mut blue_rows = vec![VertexSet::new(t); t];
    for i in 0..t {
        for j in i + 1..t {
            let rows = if pair_density(red, &parts[i], &parts[j]) >= 0.5 { &mut red_rows } else { &mut blue_rows };
            rows[i].insert(j);
            rows[j].insert(i);
        }
    }
    let path = find_mono_path_power(&PartitionedGraph::from_rows(red_rows), &PartitionedGraph::from_rows(blue_rows), r, params.seed)
        .map_err(stage("path_power"))?;
    if !path.meets_floor {
        notes.push(format!("path power has k = {} below the floor {}", path.k, path.floor));
    }
    let host = match path.colour {
        Colour::Red => red.clone(),
        Colour::Blue => red.complement(),
    };
    let ordered: Vec<VertexSet> = path.seq.iter().map(|&i| parts[i].clone()).collect();
    let mode = CheckMode::Sampled { trials: params.check_trials, seed: params.seed };
    let bb = path_power_to_backbone(&host, &ordered, r, params.eps, params.delta, mode).map_err(stage("backbone"))?;
    let refuted_pairs = bb.certificate.iter().filter(|p| p.status == DensityStatus::Refuted).count();
    notes.extend(bb.notes.iter().cloned());

    let m = h.n();
    let beta = crate::embed::labelling_bounds(h, lab).1.max(1);
    let blocks = if params.blocks > 0 { params.blocks } else { bb.rows().saturating_sub(1).max(1).min((m / (2 * beta)).max(1)) };
    let bc = balanced_recolor(h, lab, coloring, blocks, params.balance_eps, params.seed, params.balance_trials).map_err(stage("recolor"))?;
    if bc.r < r {
        notes.push(format!("H uses {} of the {r} colours", bc.r));
    }
    // Columns of the backbone are 0..=r with r the buffer; map buffer colour bc.r to r.
    let col: Vec<usize> = bc.coloring.iter().map(|&c| if c == bc.r { r } else { c }).collect();
    let bp = BackboneParams { pipeline: params.pipeline.clone(), xi: bc.xi, eps: 0.0 };
    let (f, log) = embed_via_backbone(&host, &bb.parts, h, lab, &col, &bp, budget).map_err(stage("embed"))?;

    let verified = verify_embedding(&host, h, &f.map).ok;
    let want_red = path.colour == Colour::Red;
    let audit_ok = h.edges().into_iter().all(|(u, v)| match (f.map[u], f.map[v]) {
        (Some(x), Some(y)) => red.has_edge(x, y) == want_red,
        _ => false,
    });
    if !(verified && audit_ok) {
        return Err(stage("audit")(Error::InternalInvariantBroken(format!("verified {verified}, colour audit {audit_ok}"))));
    }
    let report = RamseyReport {
        n,
        t,
        colour: path.colour,
        backbone_rows: bb.rows(),
        path,
        refuted_pairs,
        block_coloring: bc,
        log,
        verified,
        audit_ok,
        notes,
    };
    Ok((f, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drc::DrcParams;

    #[test]
    fn heuristic_recovers_blobs() {
        // Three blobs of 8 with distinct neighbourhood profiles.
        let sizes = [8, 8, 8];
        let parts = crate::graph::consecutive_parts(24, &sizes);
        let mut e = Vec::new();
        for u in 0..24 {
            for v in u + 1..24 {
                let (a, b) = (u / 8, v / 8);
                if a == b || (a == 0 && b == 1) {
                    e.push((u, v));
                }
            }
        }
        let g = PartitionedGraph::from_edges(24, &e).unwrap();
        let found = heuristic_partition(&g, 3);
        for p in &found {
            assert!(parts.iter().any(|q| q == p));
        }
    }

    #[test]
    fn all_red_host() {
        let n = 120;
        let red = PartitionedGraph::complete(n);
        let m = 12;
        let e: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        let h = PartitionedGraph::from_edges(m, &e).unwrap();
        let col: Vec<usize> = (0..m).map(|i| i % 2).collect();
        let params = RamseyParams {
            partition: None,
            t: 12,
            eps: 0.2,
            delta: 0.5,
            check_trials: 20,
            blocks: 0,
            balance_eps: 0.5,
            balance_trials: 20,
            seed: 1,
            pipeline: PipelineParams::new(DrcParams::practical(1, 1, 0.5)),
        };
        let (f, rep) = ramsey_pipeline(&red, 2, &h, &Labelling::identity(m), &col, &params, &Budget::default()).unwrap();
        assert_eq!(rep.colour, Colour::Red);
        assert!(rep.verified && rep.audit_ok);
        assert!(f.is_total());
    }
}
