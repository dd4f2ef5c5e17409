use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{extend_range, labelling_bounds, BlockLog, PartialEmbedding, PipelineParams, RunLog};
use crate::budget::Budget;
use crate::density::relative_min_degree_between;
use crate::drc::{select_bipartite, select_rpartite, DrcOutcome, DrcParams};
use crate::error::{Error, Result};
use crate::graph::{Labelling, PartitionedGraph, VertexSet};
use crate::potentials::{sample_family, HeavyRule, Pattern};
use crate::rng;

fn failed(index: usize, cause: Error) -> Error {
    Error::wrap("block", index, cause)
}

/// Consecutive label intervals `(lo, hi]` of length `len` covering `1..=m`.
fn chunks(m: usize, len: usize) -> Vec<(usize, usize)> {
    (0..m.div_ceil(len)).map(|c| (c * len, ((c + 1) * len).min(m))).collect()
}

/// Labels `≤` the returned value may be released before placing `(lo, hi]`:
/// chunks at least `lag` steps back whose last label is `β` below `lo`.
fn release_bound(ch: &[(usize, usize)], t: usize, lag: usize, beta: usize) -> usize {
    (0..t)
        .filter(|&c| c + lag <= t && ch[c].1 + beta <= ch[t].0)
        .map(|c| ch[c].1)
        .max()
        .unwrap_or(0)
}

fn released_images(f: &PartialEmbedding, lab: &Labelling, upto: usize, n: usize) -> VertexSet {
    let mut s = VertexSet::new(n);
    for (v, x) in f.map.iter().enumerate() {
        if let Some(x) = x {
            if lab.label(v) <= upto {
                s.insert(*x);
            }
        }
    }
    s
}

fn images_in(f: &PartialEmbedding, lab: &Labelling, range: (usize, usize), n: usize) -> VertexSet {
    let mut s = VertexSet::new(n);
    for (v, x) in f.map.iter().enumerate() {
        if let Some(x) = x {
            let l = lab.label(v);
            if l > range.0 && l <= range.1 {
                s.insert(*x);
            }
        }
    }
    s
}

fn check_headroom(w: &[VertexSet], v: &[VertexSet], alpha: f64) -> Result<()> {
    for (i, (wi, vi)) in w.iter().zip(v).enumerate() {
        if wi.len() as f64 > (1.0 - alpha) * vi.len() as f64 + 1e-9 {
            return Err(Error::PreconditionViolated(format!(
                "|W_{i}| = {} exceeds (1 - alpha)|V_{i}| = {:.1}",
                wi.len(),
                (1.0 - alpha) * vi.len() as f64
            )));
        }
    }
    Ok(())
}

/// Block pipeline for a bipartite host `G` (parts `V1, V2`) and a bipartite
/// `H` (parts `W1, W2`) with a degenerate local labelling.
///
/// Step `t` runs the two-round selection on the residual host with the
/// current `A`, extends over the `t`-th block into `A_j ∩ B_j`, and sets the
/// next `A_j = B_j` minus the images of the previous block.
pub fn embed_bipartite(
    g: &PartitionedGraph,
    h: &PartitionedGraph,
    lab: &Labelling,
    params: &PipelineParams,
    budget: &Budget,
) -> Result<(PartialEmbedding, RunLog)> {
    if g.parts().len() != 2 || h.parts().len() != 2 {
        return Err(Error::PreconditionViolated("host and H must both come with two parts".into()));
    }
    if lab.len() != h.n() {
        return Err(Error::PreconditionViolated("labelling size differs from H".into()));
    }
    check_headroom(h.parts(), g.parts(), params.alpha)?;
    let (d, beta) = labelling_bounds(h, lab);
    let len = if params.block > 0 { params.block } else { (2 * beta).max(1) };
    let mut log = RunLog { d, beta, block_len: len, ..Default::default() };
    let mut f = PartialEmbedding::new(h.n(), g.n());
    if h.n() == 0 {
        return Ok((f, log));
    }
    let n = g.n();
    let ch = chunks(h.n(), len);
    let colour = |v: usize| h.part_of(v).expect("every vertex of H is coloured");
    let mut a = g.parts().to_vec();
    for t in 0..ch.len() {
        let upto = release_bound(&ch, t, params.release_lag, beta);
        let released = released_images(&f, lab, upto, n);
        let v: Vec<VertexSet> = g.parts().iter().map(|p| p.difference(&released)).collect();
        for (aj, vj) in a.iter_mut().zip(&v) {
            aj.intersect_with(vj);
        }
        let (out, attempts) = retry(params, t, |p| select_bipartite(g, &v[0], &v[1], &a[0], &a[1], p, budget)).map_err(|e| failed(t, e))?;
        let b = out.b_sets();
        let targets: Vec<VertexSet> = (0..2).map(|j| a[j].intersection(&b[j])).collect();
        let fb = params.fallback.then_some(b.as_slice());
        let fallbacks = extend_range(g, h, lab, &mut f, &colour, &targets, fb, ch[t], t).map_err(|e| failed(t, e))?;
        log.push(BlockLog {
            block: t,
            labels: ch[t],
            residual: v.iter().map(VertexSet::len).collect(),
            a_sizes: a.iter().map(VertexSet::len).collect(),
            b_sizes: b.iter().map(VertexSet::len).collect(),
            drc_attempts: attempts,
            fallbacks,
            released: released.len(),
            certificate: out.certificate,
        });
        let prev = if t > 0 { images_in(&f, lab, ch[t - 1], n) } else { VertexSet::new(n) };
        a = b.iter().map(|bj| bj.difference(&prev)).collect();
    }
    Ok((f, log))
}

/// Runs `select` with reseeded parameters until it succeeds or the retries
/// run out; returns the outcome and the number of attempts.
fn retry<F>(params: &PipelineParams, step: usize, select: F) -> Result<(DrcOutcome, usize)>
where
    F: Fn(&DrcParams) -> Result<DrcOutcome>,
{
    let mut last = None;
    for attempt in 0..params.retries.max(1) {
        let p = params.drc.clone().with_seed(rng::derive(params.drc.seed, (step as u64) << 8 | attempt as u64));
        match select(&p) {
            Ok(out) => return Ok((out, attempt + 1)),
            Err(e @ Error::SelectionFailed { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinDegreeParams {
    pub gamma: f64,
    pub eps: f64,
    pub seed: u64,
    /// Random bipartitions tried before giving up.
    #[serde(default = "default_partition_retries")]
    pub partition_retries: usize,
}

fn default_partition_retries() -> usize {
    20
}

/// Embeds a bipartite `H` into a host with minimum degree `≥ γn`.
///
/// Draws a uniformly random bipartition `V1 ∪ V2` with sizes proportional to
/// `w_i = |W_i| + (ε/4)n`, keeps it once the bipartite graph between the
/// sides has relative minimum degree at least `γ − ε/4`, and runs
/// [`embed_bipartite`] on it with `α = 1 − γ + ε/2`.
pub fn embed_min_degree_bipartite(
    g: &PartitionedGraph,
    h: &PartitionedGraph,
    lab: &Labelling,
    md: &MinDegreeParams,
    params: &PipelineParams,
    budget: &Budget,
) -> Result<(PartialEmbedding, RunLog)> {
    let n = g.n();
    if h.parts().len() != 2 {
        return Err(Error::PreconditionViolated("H must come with its two colour classes".into()));
    }
    let min_deg = (0..n).map(|v| g.degree(v)).min().unwrap_or(0);
    if (min_deg as f64) < md.gamma * n as f64 - 1e-9 {
        return Err(Error::PreconditionViolated(format!("minimum degree {min_deg} is below gamma*n = {:.1}", md.gamma * n as f64)));
    }
    let (w1, w2) = (h.part(0).len(), h.part(1).len());
    if (w1 + w2) as f64 > (md.gamma - md.eps) * n as f64 + 1e-9 {
        return Err(Error::PreconditionViolated(format!("|H| = {} exceeds (gamma - eps)n", w1 + w2)));
    }
    let q = md.eps / 4.0 * n as f64;
    let share = (w1 as f64 + q) / ((w1 + w2) as f64 + 2.0 * q);
    let n1 = ((share * n as f64).round() as usize).clamp(1, n.saturating_sub(1));
    let needed = md.gamma - md.eps / 4.0;
    for attempt in 0..md.partition_retries.max(1) {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng::stream(md.seed, attempt as u64));
        let v1 = VertexSet::from_iter(n, order[..n1].iter().copied());
        let v2 = VertexSet::from_iter(n, order[n1..].iter().copied());
        if relative_min_degree_between(g, &v1, &v2) + 1e-12 < needed {
            continue;
        }
        let host = g.clone().with_parts(vec![v1, v2], false)?;
        let mut p = params.clone();
        p.alpha = 1.0 - md.gamma + md.eps / 2.0;
        p.drc.delta = md.eps / 4.0;
        return embed_bipartite(&host, h, lab, &p, budget);
    }
    Err(Error::PartitionRejected { attempts: md.partition_retries.max(1), needed })
}

/// Block pipeline for an `r`-partite host and an `r`-coloured `H` (its parts).
///
/// Step `t` samples `(δ/2)^r`-heavy cliques across the current `A` and
/// `δ^r`-heavy cliques across the residual parts, runs the `r`-round
/// selection, extends over the `t`-th block into `A_j ∩ N(T_{−j})`, and
/// sets the next `A_j = V_j ∩ N(T_{−j})` minus the images of the previous block.
pub fn embed_rpartite(
    g: &PartitionedGraph,
    h: &PartitionedGraph,
    lab: &Labelling,
    params: &PipelineParams,
    budget: &Budget,
) -> Result<(PartialEmbedding, RunLog)> {
    let r = g.parts().len();
    if r < 2 || h.parts().len() != r {
        return Err(Error::PreconditionViolated(format!("host has {r} parts, H has {}", h.parts().len())));
    }
    if lab.len() != h.n() {
        return Err(Error::PreconditionViolated("labelling size differs from H".into()));
    }
    check_headroom(h.parts(), g.parts(), params.alpha)?;
    let colour: Vec<usize> = (0..h.n()).map(|v| h.part_of(v).expect("every vertex of H is coloured")).collect();
    let (_, beta) = labelling_bounds(h, lab);
    let len = if params.block > 0 { params.block } else { beta.max(1) };
    let ch = chunks(h.n(), len);
    let plan = RollingPlan {
        r,
        chunks: ch.iter().map(|&c| (c, 0)).collect(),
        windows: vec![Window { parts: g.parts().to_vec(), f_parts: g.parts().to_vec(), pattern: Pattern::Clique }],
        zones: vec![g.parts().to_vec()],
        zone_of: vec![0; h.n()],
        colour,
        block_len: len,
    };
    run_rolling(g, h, lab, &plan, params, budget)
}

/// Parts of one window of the rolling process.
pub(crate) struct Window {
    /// `P_j`, where colour `j` may be placed.
    pub parts: Vec<VertexSet>,
    /// Slot parts of the `F` pattern (`r·width` of them).
    pub f_parts: Vec<VertexSet>,
    pub pattern: Pattern,
}

pub(crate) struct RollingPlan {
    pub r: usize,
    /// `((lo, hi], window)` per step.
    pub chunks: Vec<((usize, usize), usize)>,
    pub windows: Vec<Window>,
    /// `zones[z][j]`: where vertices of zone `z` and colour `j` must land.
    pub zones: Vec<Vec<VertexSet>>,
    pub zone_of: Vec<usize>,
    pub colour: Vec<usize>,
    pub block_len: usize,
}

/// The `r`-partite rolling process over a sequence of windows.
pub(crate) fn run_rolling(
    g: &PartitionedGraph,
    h: &PartitionedGraph,
    lab: &Labelling,
    plan: &RollingPlan,
    params: &PipelineParams,
    budget: &Budget,
) -> Result<(PartialEmbedding, RunLog)> {
    let (d, beta) = labelling_bounds(h, lab);
    let mut log = RunLog { d, beta, block_len: plan.block_len, ..Default::default() };
    let mut f = PartialEmbedding::new(h.n(), g.n());
    if h.n() == 0 {
        return Ok((f, log));
    }
    let (n, r) = (g.n(), plan.r);
    let ranges: Vec<(usize, usize)> = plan.chunks.iter().map(|c| c.0).collect();
    let delta = params.drc.delta;
    let want = params.drc.family_samples.max(1);
    let mut a: Vec<VertexSet> = plan.windows[plan.chunks[0].1].parts.clone();
    let nz = plan.zones.len();
    let slot = |v: usize| plan.zone_of[v] * r + plan.colour[v];
    for t in 0..ranges.len() {
        let w = &plan.windows[plan.chunks[t].1];
        let upto = release_bound(&ranges, t, params.release_lag, beta);
        let released = released_images(&f, lab, upto, n);
        let parts: Vec<VertexSet> = w.parts.iter().map(|p| p.difference(&released)).collect();
        for (aj, pj) in a.iter_mut().zip(&parts) {
            aj.intersect_with(pj);
        }
        let f_parts: Vec<VertexSet> = w.f_parts.iter().map(|p| p.difference(&released)).collect();
        let seed = rng::derive(params.drc.seed, 1 << 20 | t as u64);
        let k_rule = HeavyRule { reference: parts.clone(), delta: (delta / 2.0).powi(r as i32) };
        let k = sample_family(g, Pattern::Clique, r, &a, Some(k_rule), want * 4, want as u64 * 800, seed);
        let f_rule = HeavyRule { reference: parts.clone(), delta: delta.powi(r as i32) };
        let fam = sample_family(g, w.pattern, r, &f_parts, Some(f_rule), want, want as u64 * 800, seed ^ 1);
        let (out, attempts) = retry(params, t, |p| select_rpartite(g, &parts, &a, &k, &fam, p, budget)).map_err(|e| failed(t, e))?;
        let c = out.b_sets();
        let mut targets = Vec::with_capacity(nz * r);
        let mut fallback = Vec::with_capacity(nz * r);
        for zone in &plan.zones {
            for j in 0..r {
                targets.push(a[j].intersection(&c[j]).intersection(&zone[j]));
                fallback.push(c[j].intersection(&zone[j]));
            }
        }
        let fb = params.fallback.then_some(fallback.as_slice());
        let fallbacks = extend_range(g, h, lab, &mut f, &slot, &targets, fb, ranges[t], t).map_err(|e| failed(t, e))?;
        log.push(BlockLog {
            block: t,
            labels: ranges[t],
            residual: parts.iter().map(VertexSet::len).collect(),
            a_sizes: a.iter().map(VertexSet::len).collect(),
            b_sizes: c.iter().map(VertexSet::len).collect(),
            drc_attempts: attempts,
            fallbacks,
            released: released.len(),
            certificate: out.certificate,
        });
        let prev = if t > 0 { images_in(&f, lab, ranges[t - 1], n) } else { VertexSet::new(n) };
        a = c.iter().map(|cj| cj.difference(&prev)).collect();
        if let Some(next) = plan.chunks.get(t + 1) {
            if next.1 != plan.chunks[t].1 {
                // Entering a new window: keep only the part of A that lies in it.
                for (aj, pj) in a.iter_mut().zip(&plan.windows[next.1].parts) {
                    aj.intersect_with(pj);
                }
            }
        }
    }
    Ok((f, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::verify_embedding;
    use crate::graph::consecutive_parts;

    fn path(m: usize) -> (PartitionedGraph, Labelling) {
        let e: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        let parts = vec![VertexSet::from_iter(m, (0..m).step_by(2)), VertexSet::from_iter(m, (1..m).step_by(2))];
        (PartitionedGraph::from_edges(m, &e).unwrap().with_parts(parts, true).unwrap(), Labelling::identity(m))
    }

    #[test]
    fn release_bound_respects_locality() {
        let ch = chunks(10, 2);
        assert_eq!(ch, vec![(0, 2), (2, 4), (4, 6), (6, 8), (8, 10)]);
        assert_eq!(release_bound(&ch, 1, 2, 1), 0);
        assert_eq!(release_bound(&ch, 2, 2, 1), 2);
        assert_eq!(release_bound(&ch, 2, 2, 3), 0);
    }

    #[test]
    fn empty_h_gives_empty_embedding() {
        let g = PartitionedGraph::complete_multipartite(&[4, 4]);
        let h = PartitionedGraph::empty(0).with_parts(vec![VertexSet::new(0), VertexSet::new(0)], true).unwrap();
        let p = PipelineParams::new(DrcParams::practical(1, 1, 0.5));
        let (f, log) = embed_bipartite(&g, &h, &Labelling::identity(0), &p, &Budget::default()).unwrap();
        assert!(f.map.is_empty() && log.blocks.is_empty());
    }

    #[test]
    fn path_into_complete_bipartite_pipeline() {
        let g = PartitionedGraph::complete_multipartite(&[12, 12]);
        let (h, lab) = path(16);
        let p = PipelineParams::new(DrcParams::practical(1, 2, 0.5));
        let (f, log) = embed_bipartite(&g, &h, &lab, &p, &Budget::default()).unwrap();
        assert!(verify_embedding(&g, &h, &f.map).ok);
        assert_eq!(log.block_len, 2);
    }

    #[test]
    fn oversized_side_is_rejected() {
        let g = PartitionedGraph::complete_multipartite(&[4, 4]);
        let (h, lab) = path(12);
        let p = PipelineParams::new(DrcParams::practical(1, 1, 0.5));
        let err = embed_bipartite(&g, &h, &lab, &p, &Budget::default()).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolated(_)));
    }

    #[test]
    fn triangle_strip_into_complete_tripartite() {
        // Square of a path coloured by i mod 3.
        let m = 24;
        let mut e = Vec::new();
        for i in 0..m {
            for j in i + 1..(i + 3).min(m) {
                e.push((i, j));
            }
        }
        let parts: Vec<VertexSet> = (0..3).map(|c| VertexSet::from_iter(m, (c..m).step_by(3))).collect();
        let h = PartitionedGraph::from_edges(m, &e).unwrap().with_parts(parts, true).unwrap();
        let g = PartitionedGraph::complete_multipartite(&[15, 15, 15]);
        let p = PipelineParams::new(DrcParams::practical(2, 2, 0.5));
        let (f, _) = embed_rpartite(&g, &h, &Labelling::identity(m), &p, &Budget::default()).unwrap();
        assert!(verify_embedding(&g, &h, &f.map).ok);
    }

    #[test]
    fn min_degree_on_complete_host() {
        let n = 40;
        let g = PartitionedGraph::complete(n).with_parts(consecutive_parts(n, &[n]), false).unwrap();
        let (h, lab) = path(10);
        let md = MinDegreeParams { gamma: 0.9, eps: 0.2, seed: 3, partition_retries: 5 };
        let p = PipelineParams::new(DrcParams::practical(1, 1, 0.5));
        let (f, _) = embed_min_degree_bipartite(&g, &h, &lab, &md, &p, &Budget::default()).unwrap();
        assert!(verify_embedding(&g, &h, &f.map).ok);
    }
}
