//! Greedy extension and the block-by-block embedding pipelines.
//!
//! `H` is processed in label order. A pipeline repeatedly selects sets by
//! dependent random choice on the residual host, extends the embedding over
//! one block of labels, and releases the images of blocks that can no longer
//! have neighbours among later labels.

mod backbone;
mod pipeline;

use serde::{Deserialize, Serialize};

use crate::drc::{Checked, DrcParams, PropertyRecord};
use crate::error::{Error, Result};
use crate::graph::{common_neighbors_of, Labelling, PartitionedGraph, VertexSet};

pub use backbone::{embed_via_backbone, BackboneParams};
pub use pipeline::{embed_bipartite, embed_min_degree_bipartite, embed_rpartite, MinDegreeParams};

/// An injective partial map from `V(H)` to `V(G)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialEmbedding {
    /// `map[v]` is the image of `H`-vertex `v`.
    pub map: Vec<Option<usize>>,
    /// Images, as a subset of `V(G)`.
    pub used: VertexSet,
    /// Images placed while processing each block.
    pub block_ledger: Vec<Vec<usize>>,
}

impl PartialEmbedding {
    pub fn new(h_n: usize, g_n: usize) -> Self {
        PartialEmbedding { map: vec![None; h_n], used: VertexSet::new(g_n), block_ledger: Vec::new() }
    }

    pub fn image(&self, v: usize) -> Option<usize> {
        self.map[v]
    }

    pub fn mapped(&self) -> usize {
        self.map.iter().filter(|x| x.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.map.iter().all(Option::is_some)
    }

    /// Maps `v` to `x`, recording `x` under `block`.
    pub fn place(&mut self, v: usize, x: usize, block: usize) -> Result<()> {
        if self.map[v].is_some() || self.used.contains(x) {
            return Err(Error::InternalInvariantBroken(format!("placing {v} -> {x} breaks injectivity")));
        }
        self.map[v] = Some(x);
        self.used.insert(x);
        if self.block_ledger.len() <= block {
            self.block_ledger.resize(block + 1, Vec::new());
        }
        self.block_ledger[block].push(x);
        Ok(())
    }

    /// Images recorded under blocks `0..upto`.
    pub fn images_before(&self, upto: usize) -> VertexSet {
        let mut s = VertexSet::new(self.used.universe());
        for b in self.block_ledger.iter().take(upto) {
            for &x in b {
                s.insert(x);
            }
        }
        s
    }

    /// Total map as a plain vector; `None` if some vertex is unmapped.
    pub fn to_total(&self) -> Option<Vec<usize>> {
        self.map.iter().copied().collect()
    }
}

/// Outcome of [`verify_embedding`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub ok: bool,
    pub first_violation: Option<String>,
}

/// Checks that `map` is total, injective, in range, and sends every `H`-edge to
/// a `G`-edge. When `H` and `G` carry the same number (at least two) of parts,
/// part `i` of `H` must also land in part `i` of `G`.
pub fn verify_embedding(g: &PartitionedGraph, h: &PartitionedGraph, map: &[Option<usize>]) -> EmbeddingCheck {
    let bad = |msg: String| EmbeddingCheck { ok: false, first_violation: Some(msg) };
    if map.len() != h.n() {
        return bad(format!("map has {} entries for {} vertices", map.len(), h.n()));
    }
    let mut seen = vec![usize::MAX; g.n()];
    for (v, x) in map.iter().enumerate() {
        let Some(x) = *x else { return bad(format!("vertex {v} is unmapped")) };
        if x >= g.n() {
            return bad(format!("vertex {v} maps to {x}, outside the host"));
        }
        if seen[x] != usize::MAX {
            return bad(format!("vertices {} and {v} both map to {x}", seen[x]));
        }
        seen[x] = v;
    }
    for (u, v) in h.edges() {
        let (x, y) = (map[u].unwrap(), map[v].unwrap());
        if !g.has_edge(x, y) {
            return bad(format!("edge {u}-{v} maps to non-edge {x}-{y}"));
        }
    }
    if h.parts().len() >= 2 && h.parts().len() == g.parts().len() {
        for (i, w) in h.parts().iter().enumerate() {
            if let Some(v) = w.iter().find(|&v| !g.part(i).contains(map[v].unwrap())) {
                return bad(format!("vertex {v} of part {i} maps outside part {i}"));
            }
        }
    }
    EmbeddingCheck { ok: true, first_violation: None }
}

/// Pipeline settings shared by the bipartite and `r`-partite pipelines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    /// Labels per block; 0 picks the default (`2β` bipartite, `β` `r`-partite,
    /// with `β` the verified stretch of the labelling).
    #[serde(default)]
    pub block: usize,
    pub drc: DrcParams,
    /// Blocks kept in the residual host before their images are released.
    #[serde(default = "default_lag")]
    pub release_lag: usize,
    /// Required headroom: `|W_i| ≤ (1−α)|V_i|`.
    #[serde(default)]
    pub alpha: f64,
    /// Reseeded selection attempts per block before giving up.
    #[serde(default = "default_retries")]
    pub retries: usize,
    /// Allow placement outside `A ∩ B` (still inside `B`) when the primary
    /// target is exhausted; every such placement is counted in the log.
    #[serde(default = "default_true")]
    pub fallback: bool,
}

fn default_lag() -> usize {
    2
}
fn default_retries() -> usize {
    3
}
fn default_true() -> bool {
    true
}

impl PipelineParams {
    pub fn new(drc: DrcParams) -> Self {
        PipelineParams { block: 0, drc, release_lag: 2, alpha: 0.0, retries: 3, fallback: true }
    }
}

/// What happened in one block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockLog {
    pub block: usize,
    /// Labels `(lo, hi]` placed in this block.
    pub labels: (usize, usize),
    pub residual: Vec<usize>,
    pub a_sizes: Vec<usize>,
    pub b_sizes: Vec<usize>,
    pub drc_attempts: usize,
    pub fallbacks: usize,
    pub released: usize,
    pub certificate: Vec<PropertyRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub d: usize,
    pub beta: usize,
    pub block_len: usize,
    pub blocks: Vec<BlockLog>,
    pub fallbacks: usize,
    pub exact_entries: usize,
    pub sampled_entries: usize,
}

impl RunLog {
    pub(crate) fn push(&mut self, b: BlockLog) {
        self.fallbacks += b.fallbacks;
        self.exact_entries += b.certificate.iter().filter(|r| r.checked == Checked::Exact).count();
        self.sampled_entries += b.certificate.iter().filter(|r| r.checked == Checked::Sampled).count();
        self.blocks.push(b);
    }
}

/// Degeneracy and locality of a labelling: the verified bounds when
/// recorded, otherwise the measured worst back-degree and stretch.
pub fn labelling_bounds(h: &PartitionedGraph, lab: &Labelling) -> (usize, usize) {
    match (lab.checked_d(), lab.checked_beta()) {
        (Some(d), Some(b)) => (d, b),
        _ => {
            let rep = crate::graph::verify_labelling(h, lab, usize::MAX, usize::MAX);
            (rep.worst_back_degree, rep.worst_stretch)
        }
    }
}

/// Greedy placement of labels `(lo, hi]` in order: each vertex of colour
/// `j` goes to the lowest-index unused vertex of `targets[j] ∩ N(images of
/// its back-neighbours)`, or of `fallback[j] ∩ N(...)` when that is empty.
/// Returns the number of fallback placements.
#[allow(clippy::too_many_arguments)]
pub(crate) fn extend_range(
    g: &PartitionedGraph,
    h: &PartitionedGraph,
    lab: &Labelling,
    f: &mut PartialEmbedding,
    colour: &dyn Fn(usize) -> usize,
    targets: &[VertexSet],
    fallback: Option<&[VertexSet]>,
    range: (usize, usize),
    block: usize,
) -> Result<usize> {
    let (lo, hi) = range;
    if hi < lo || hi > h.n() {
        return Err(Error::PreconditionViolated(format!("label range ({lo}, {hi}] is invalid for {} vertices", h.n())));
    }
    let seq = lab.sequence();
    if seq[..lo].iter().any(|&v| f.map[v].is_none()) || seq[lo..].iter().any(|&v| f.map[v].is_some()) {
        return Err(Error::PreconditionViolated(format!("the embedding must be defined exactly on labels 1..={lo}")));
    }
    let mut fallbacks = 0;
    for l in lo + 1..=hi {
        let v = seq[l - 1];
        let mut back = Vec::new();
        for u in h.neighbors(v).iter().filter(|&u| lab.label(u) < l) {
            back.push(f.map[u].expect("labels below l are mapped"));
        }
        let j = colour(v);
        let cand = common_neighbors_of(g, back.iter().copied(), &targets[j]);
        let total = cand.len();
        let pick = cand.difference(&f.used).first().or_else(|| {
            let fb = fallback?;
            let alt = common_neighbors_of(g, back.iter().copied(), &fb[j]).difference(&f.used).first();
            fallbacks += usize::from(alt.is_some());
            alt
        });
        match pick {
            Some(x) => f.place(v, x, block)?,
            None => return Err(Error::ExtensionStuck { label: l, back_images: back, candidates: total }),
        }
    }
    Ok(fallbacks)
}

/// Extends `f` from labels `1..=lo` over `(lo, hi]` into
/// `(A1 ∩ B1) ∪ (A2 ∩ B2)`, each vertex of `W_j` into `A_j ∩ B_j`.
#[allow(clippy::too_many_arguments)]
pub fn extend_bipartite(
    g: &PartitionedGraph,
    h: &PartitionedGraph,
    lab: &Labelling,
    f: &mut PartialEmbedding,
    a: [&VertexSet; 2],
    b: [&VertexSet; 2],
    range: (usize, usize),
) -> Result<()> {
    if h.parts().len() != 2 {
        return Err(Error::PreconditionViolated("H must come with its two colour classes".into()));
    }
    let targets = [a[0].intersection(b[0]), a[1].intersection(b[1])];
    let colour = |v: usize| h.part_of(v).expect("every vertex of H is coloured");
    let block = f.block_ledger.len();
    extend_range(g, h, lab, f, &colour, &targets, None, range, block).map(|_| ())
}

/// Extends `f` over `(lo, hi]`, each vertex of colour `j` into
/// `A_j ∩ N(T_{−j})`.
pub fn extend_rpartite(
    g: &PartitionedGraph,
    h: &PartitionedGraph,
    lab: &Labelling,
    f: &mut PartialEmbedding,
    a: &[VertexSet],
    t: &[Vec<usize>],
    range: (usize, usize),
) -> Result<()> {
    if h.parts().len() != a.len() || t.len() != a.len() {
        return Err(Error::PreconditionViolated("H colour classes, A and T must have the same length".into()));
    }
    let targets = typical_targets(g, a, t);
    let colour = |v: usize| h.part_of(v).expect("every vertex of H is coloured");
    let block = f.block_ledger.len();
    extend_range(g, h, lab, f, &colour, &targets, None, range, block).map(|_| ())
}

/// `A_j ∩ N(T_{−j})` for every `j`.
pub(crate) fn typical_targets(g: &PartitionedGraph, a: &[VertexSet], t: &[Vec<usize>]) -> Vec<VertexSet> {
    (0..a.len())
        .map(|j| {
            let others = t.iter().enumerate().filter(|&(i, _)| i != j).flat_map(|(_, ti)| ti.iter().copied());
            common_neighbors_of(g, others, &a[j])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::consecutive_parts;

    fn path(m: usize) -> PartitionedGraph {
        let e: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        let parts = vec![VertexSet::from_iter(m, (0..m).step_by(2)), VertexSet::from_iter(m, (1..m).step_by(2))];
        PartitionedGraph::from_edges(m, &e).unwrap().with_parts(parts, true).unwrap()
    }

    #[test]
    fn identity_embeds_and_collisions_fail() {
        let g = PartitionedGraph::complete_multipartite(&[3, 3]);
        let ident: Vec<_> = (0..6).map(Some).collect();
        assert!(verify_embedding(&g, &g, &ident).ok);
        let mut clash = ident.clone();
        clash[1] = Some(0);
        let c = verify_embedding(&g, &g, &clash);
        assert!(!c.ok && c.first_violation.unwrap().contains("both map"));
    }

    #[test]
    fn path_into_complete_bipartite() {
        let h = path(6);
        let g = PartitionedGraph::complete_multipartite(&[4, 4]);
        let lab = Labelling::identity(6);
        let mut f = PartialEmbedding::new(6, 8);
        extend_bipartite(&g, &h, &lab, &mut f, [g.part(0), g.part(1)], [g.part(0), g.part(1)], (0, 0)).unwrap();
        assert_eq!(f.mapped(), 0);
        extend_bipartite(&g, &h, &lab, &mut f, [g.part(0), g.part(1)], [g.part(0), g.part(1)], (0, 6)).unwrap();
        assert!(verify_embedding(&g, &h, &f.map).ok);
        let img: Vec<_> = f.map.iter().map(|x| x.unwrap()).collect();
        assert_eq!(img, vec![0, 4, 1, 5, 2, 6]);
    }

    #[test]
    fn stuck_extension_reports_context() {
        let h = path(3);
        let g = PartitionedGraph::from_edges(4, &[(0, 2)]).unwrap().with_parts(consecutive_parts(4, &[2, 2]), true).unwrap();
        let lab = Labelling::identity(3);
        let mut f = PartialEmbedding::new(3, 4);
        let err = extend_bipartite(&g, &h, &lab, &mut f, [g.part(0), g.part(1)], [g.part(0), g.part(1)], (0, 3)).unwrap_err();
        match err {
            Error::ExtensionStuck { label, back_images, .. } => {
                assert_eq!(label, 3);
                assert_eq!(back_images, vec![2]);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rpartite_extension_in_complete_host() {
        let g = PartitionedGraph::complete_multipartite(&[3, 3, 3]);
        let h = PartitionedGraph::complete_multipartite(&[1, 1, 1]);
        let lab = Labelling::identity(3);
        let mut f = PartialEmbedding::new(3, 9);
        let a = g.parts().to_vec();
        extend_rpartite(&g, &h, &lab, &mut f, &a, &[vec![0], vec![3], vec![6]], (0, 3)).unwrap();
        assert!(verify_embedding(&g, &h, &f.map).ok);
    }
}
