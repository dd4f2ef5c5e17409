//! Crossing families of pattern copies, heaviness and ρ-adjacency counts.
//!
//! A member is a flat vertex tuple split into `r` slot groups of `width`
//! vertices; slot `j·width + t` lies in `parts[j·width + t]`. The pattern
//! requires every two vertices in different groups to be adjacent.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::density::ceil_tol;
use crate::error::{Error, Result};
use crate::graph::{common_count, PartitionedGraph, VertexSet};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pattern {
    /// `K_r`, one vertex per group.
    #[serde(rename = "K_r")]
    Clique,
    /// `K_r(2)`, complete r-partite with two vertices per group.
    #[serde(rename = "K_r(2)")]
    Clique2,
}

impl Pattern {
    pub fn width(self) -> usize {
        match self {
            Pattern::Clique => 1,
            Pattern::Clique2 => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTotal {
    /// Every member was enumerated.
    Exact { count: u64 },
    /// Members are a uniform sample obtained by rejection; the family size is
    /// `accepted / draws · Π|parts|`.
    Estimated { estimate: f64, se: f64, draws: u64, accepted: u64 },
}

/// Heaviness with respect to reference parts: for every group `j`, the
/// vertices outside group `j` have at least `δ|reference_j|` common
/// neighbours in `reference_j`. For `K_r` this is the usual `δ`-heavy clique.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeavyRule {
    pub reference: Vec<VertexSet>,
    pub delta: f64,
}

impl HeavyRule {
    pub fn holds(&self, g: &PartitionedGraph, tuple: &[usize]) -> bool {
        let r = self.reference.len();
        let w = tuple.len() / r.max(1);
        let mut rest = Vec::with_capacity(tuple.len());
        (0..r).all(|j| {
            rest.clear();
            rest.extend(tuple.iter().enumerate().filter(|&(s, _)| s / w != j).map(|(_, &v)| v));
            let need = ceil_tol(self.delta * self.reference[j].len() as f64);
            common_count(g, &rest, &self.reference[j]) >= need
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingFamily {
    pub pattern: Pattern,
    pub r: usize,
    pub parts: Vec<VertexSet>,
    members: Vec<usize>,
    pub total: FamilyTotal,
    /// Membership rule beyond being a pattern copy across `parts`; `None`
    /// means every copy qualifies.
    pub rule: Option<HeavyRule>,
}

impl CrossingFamily {
    pub fn new(pattern: Pattern, r: usize, parts: Vec<VertexSet>, members: Vec<usize>, total: FamilyTotal) -> Self {
        assert_eq!(parts.len(), r * pattern.width());
        assert_eq!(members.len() % (r * pattern.width()).max(1), 0);
        CrossingFamily { pattern, r, parts, members, total, rule: None }
    }

    pub fn with_rule(mut self, rule: Option<HeavyRule>) -> Self {
        self.rule = rule;
        self
    }

    /// Whether `tuple` belongs to the family as defined (not just the stored
    /// sample): slots in their parts, a pattern copy, and the rule holds.
    pub fn admits(&self, g: &PartitionedGraph, tuple: &[usize]) -> bool {
        tuple.len() == self.arity()
            && tuple.iter().zip(&self.parts).all(|(&v, p)| p.contains(v))
            && is_pattern_copy(g, self.r, tuple)
            && self.rule.as_ref().is_none_or(|rule| rule.holds(g, tuple))
    }

    pub fn width(&self) -> usize {
        self.pattern.width()
    }

    /// Vertices per member.
    pub fn arity(&self) -> usize {
        self.r * self.width()
    }

    /// Number of stored members (the sample size for estimated families).
    pub fn len(&self) -> usize {
        self.members.len().checked_div(self.arity()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn member(&self, i: usize) -> &[usize] {
        let a = self.arity();
        &self.members[i * a..(i + 1) * a]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.members.chunks_exact(self.arity().max(1))
    }

    /// Family size: the exact count, or the estimate for sampled families.
    pub fn total_value(&self) -> f64 {
        match self.total {
            FamilyTotal::Exact { count } => count as f64,
            FamilyTotal::Estimated { estimate, .. } => estimate,
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.total, FamilyTotal::Estimated { .. })
    }

    /// Members whose every slot lies in the corresponding set of `within`.
    pub fn restricted(&self, within: &[VertexSet]) -> CrossingFamily {
        let keep: Vec<usize> = self
            .iter()
            .filter(|m| m.iter().enumerate().all(|(s, &v)| within[s].contains(v)))
            .flat_map(|m| m.iter().copied())
            .collect();
        let kept = keep.len() / self.arity().max(1);
        let total = match &self.total {
            FamilyTotal::Exact { .. } => FamilyTotal::Exact { count: kept as u64 },
            FamilyTotal::Estimated { estimate, draws, accepted, .. } => {
                let frac = if self.is_empty() { 0.0 } else { kept as f64 / self.len() as f64 };
                let acc = (*accepted as f64 * frac).round() as u64;
                FamilyTotal::Estimated { estimate: estimate * frac, se: estimate_se(frac, kept, *estimate), draws: *draws, accepted: acc }
            }
        };
        CrossingFamily { pattern: self.pattern, r: self.r, parts: within.to_vec(), members: keep, total, rule: self.rule.clone() }
    }
}

fn estimate_se(frac: f64, n: usize, scale: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (frac * (1.0 - frac) / n as f64).sqrt() * scale
}

/// Whether `tuple` (grouped into `r` groups) is a copy of the pattern:
/// distinct vertices, and every two vertices in different groups adjacent.
pub fn is_pattern_copy(g: &PartitionedGraph, r: usize, tuple: &[usize]) -> bool {
    let w = tuple.len() / r.max(1);
    for a in 0..tuple.len() {
        for b in a + 1..tuple.len() {
            if tuple[a] == tuple[b] {
                return false;
            }
            if a / w != b / w && !g.has_edge(tuple[a], tuple[b]) {
                return false;
            }
        }
    }
    true
}

/// For a clique with one vertex per part: every `(r−1)`-subtuple has at least
/// `δ|reference_j|` common neighbours in `reference_j`.
pub fn is_heavy_clique(g: &PartitionedGraph, tuple: &[usize], reference: &[VertexSet], delta: f64) -> bool {
    let mut rest = Vec::with_capacity(tuple.len());
    (0..tuple.len()).all(|j| {
        rest.clear();
        rest.extend(tuple.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v));
        common_count(g, &rest, &reference[j]) >= ceil_tol(delta * reference[j].len() as f64)
    })
}

/// All `δ`-heavy copies of `K_r` across `parts`.
pub fn heavy_cliques(g: &PartitionedGraph, parts: &[VertexSet], delta: f64, budget: &Budget) -> Result<CrossingFamily> {
    heavy_cliques_across(g, parts, parts, delta, budget)
}

/// Copies of `K_r` across `across` that are `δ`-heavy with respect to
/// `reference` (the `j`-th subtuple is measured in `reference_j`).
///
/// Part-ordered backtracking. A partial clique is abandoned as soon as some
/// part's running common neighbourhood falls below its threshold, since the
/// final common neighbourhoods are subsets of the running ones.
pub fn heavy_cliques_across(
    g: &PartitionedGraph,
    across: &[VertexSet],
    reference: &[VertexSet],
    delta: f64,
    budget: &Budget,
) -> Result<CrossingFamily> {
    let r = across.len();
    if r < 2 || reference.len() != r {
        return Err(Error::PreconditionViolated(format!("heavy cliques need r ≥ 2 matching parts, got {r}/{}", reference.len())));
    }
    let cost: f64 = across.iter().map(|p| p.len() as f64).product();
    if cost > budget.tuples {
        return Err(Error::BudgetExceeded { what: "heavy clique enumeration".into(), needed: cost, cap: budget.tuples });
    }
    let need: Vec<usize> = reference.iter().map(|p| ceil_tol(delta * p.len() as f64)).collect();
    let first = across[0].to_vec();
    let chunks: Vec<Vec<usize>> = first
        .par_iter()
        .map(|&v0| {
            let mut out = Vec::new();
            // cn[j] = reference_j ∩ N(chosen vertices other than slot j).
            let mut cn: Vec<VertexSet> = reference.to_vec();
            for (j, c) in cn.iter_mut().enumerate() {
                if j != 0 {
                    c.intersect_with(g.neighbors(v0));
                }
            }
            if cn.iter().zip(&need).all(|(c, &t)| c.len() >= t) {
                let cand = across[1].intersection(g.neighbors(v0));
                let mut chosen = vec![v0];
                extend_clique(g, across, &need, &mut chosen, cn, cand, &mut out);
            }
            out
        })
        .collect();
    let members: Vec<usize> = chunks.into_iter().flatten().collect();
    let count = (members.len() / r) as u64;
    let rule = HeavyRule { reference: reference.to_vec(), delta };
    Ok(CrossingFamily::new(Pattern::Clique, r, across.to_vec(), members, FamilyTotal::Exact { count }).with_rule(Some(rule)))
}

fn extend_clique(
    g: &PartitionedGraph,
    across: &[VertexSet],
    need: &[usize],
    chosen: &mut Vec<usize>,
    cn: Vec<VertexSet>,
    cand: VertexSet,
    out: &mut Vec<usize>,
) {
    let t = chosen.len();
    let r = across.len();
    for v in cand.iter() {
        let mut next = cn.clone();
        let mut ok = true;
        for (j, c) in next.iter_mut().enumerate() {
            if j != t {
                c.intersect_with(g.neighbors(v));
                if c.len() < need[j] {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        chosen.push(v);
        if t + 1 == r {
            out.extend_from_slice(chosen);
        } else {
            let mut c2 = across[t + 1].clone();
            for &u in chosen.iter() {
                c2.intersect_with(g.neighbors(u));
            }
            extend_clique(g, across, need, chosen, next, c2, out);
        }
        chosen.pop();
    }
}

/// Uniform sample of a family by rejection: draw one vertex per slot
/// uniformly from its part, keep the draw when it is a pattern copy and the
/// rule holds. Stops after `want` acceptances or `max_draws` draws.
///
/// Draw `i` uses stream `i` of `seed`, so the result does not depend on
/// thread scheduling.
#[allow(clippy::too_many_arguments)]
pub fn sample_family(
    g: &PartitionedGraph,
    pattern: Pattern,
    r: usize,
    parts: &[VertexSet],
    rule: Option<HeavyRule>,
    want: usize,
    max_draws: u64,
    seed: u64,
) -> CrossingFamily {
    let arity = r * pattern.width();
    assert_eq!(parts.len(), arity);
    let lists: Vec<Vec<usize>> = parts.iter().map(|p| p.to_vec()).collect();
    let space: f64 = lists.iter().map(|l| l.len() as f64).product();
    let mut members = Vec::new();
    let mut accepted = 0u64;
    let mut draws = 0u64;
    if space > 0.0 && want > 0 {
        const BATCH: u64 = 512;
        'outer: while draws < max_draws {
            let hi = (draws + BATCH).min(max_draws);
            let hits: Vec<Option<Vec<usize>>> = (draws..hi)
                .into_par_iter()
                .map(|i| {
                    let mut rg = rng::stream(seed, i);
                    let t: Vec<usize> = lists.iter().map(|l| l[rg.gen_range(0..l.len())]).collect();
                    (is_pattern_copy(g, r, &t) && rule.as_ref().is_none_or(|ru| ru.holds(g, &t))).then_some(t)
                })
                .collect();
            for h in hits {
                draws += 1;
                if let Some(t) = h {
                    accepted += 1;
                    members.extend(t);
                    if accepted as usize >= want {
                        break 'outer;
                    }
                }
            }
        }
    }
    let frac = if draws == 0 { 0.0 } else { accepted as f64 / draws as f64 };
    let se = if draws == 0 { 0.0 } else { (frac * (1.0 - frac) / draws as f64).sqrt() * space };
    CrossingFamily::new(pattern, r, parts.to_vec(), members, FamilyTotal::Estimated { estimate: frac * space, se, draws, accepted })
        .with_rule(rule)
}

/// Whether member `f1` is adjacent to member `f2`: for distinct groups
/// `j ≠ j′`, every vertex in group `j` of `f1` is adjacent to every vertex in
/// group `j′` of `f2`. Both are split into `r` equal groups.
pub fn crossing_adjacent(g: &PartitionedGraph, r: usize, f1: &[usize], f2: &[usize]) -> bool {
    let w1 = f1.len() / r.max(1);
    let w2 = f2.len() / r.max(1);
    f1.iter().enumerate().all(|(a, &u)| f2.iter().enumerate().all(|(b, &v)| a / w1 == b / w2 || g.has_edge(u, v)))
}

/// Per-member rows `CN_{−j}(F) = ⋂_{v ∈ F outside group j} N(v)`, so that a
/// probe vertex in group `j` is compatible with `F` iff it lies in the row.
pub struct AdjacencyIndex {
    r: usize,
    rows: Vec<VertexSet>,
}

impl AdjacencyIndex {
    pub fn new(g: &PartitionedGraph, fam: &CrossingFamily) -> Self {
        let r = fam.r;
        let w = fam.width();
        let rows = fam
            .iter()
            .flat_map(|m| {
                (0..r).map(move |j| {
                    let mut row = VertexSet::full(g.n());
                    for (s, &v) in m.iter().enumerate() {
                        if s / w != j {
                            row.intersect_with(g.neighbors(v));
                        }
                    }
                    row
                })
            })
            .collect();
        AdjacencyIndex { r, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len().checked_div(self.r).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Whether the probe `(vertex, group)` pairs are all compatible with member `m`.
    pub fn adjacent(&self, m: usize, probe: &[(usize, usize)]) -> bool {
        probe.iter().all(|&(v, j)| self.rows[m * self.r + j].contains(v))
    }

    /// Number of members adjacent to the probe, restricted to `mask` if given.
    pub fn degree(&self, probe: &[(usize, usize)], mask: Option<&[bool]>) -> u64 {
        (0..self.len()).filter(|&m| mask.is_none_or(|k| k[m]) && self.adjacent(m, probe)).count() as u64
    }
}

/// Probe pairs for a full member with `r` groups.
pub fn probe_of(member: &[usize], r: usize) -> Vec<(usize, usize)> {
    let w = member.len() / r.max(1);
    member.iter().enumerate().map(|(s, &v)| (v, s / w)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoCount {
    pub total: u64,
    /// Number of adjacent `F` members, per member of `K`.
    pub degrees: Vec<u64>,
}

/// `ρ(K, F)`: the number of adjacent pairs, with per-member degrees of `K`.
pub fn rho(g: &PartitionedGraph, k: &CrossingFamily, f: &CrossingFamily, budget: &Budget) -> Result<RhoCount> {
    let cost = k.len() as f64 * f.len() as f64;
    if cost > budget.tuples {
        return Err(Error::BudgetExceeded { what: "rho pair count".into(), needed: cost, cap: budget.tuples });
    }
    let idx = AdjacencyIndex::new(g, f);
    let degrees: Vec<u64> = (0..k.len()).into_par_iter().map(|i| idx.degree(&probe_of(k.member(i), k.r), None)).collect();
    Ok(RhoCount { total: degrees.iter().sum(), degrees })
}

/// Whether at least `δ|F|` members of `F` are adjacent to `member`. With `F`
/// empty the threshold is 0 and the answer is true.
pub fn heavy_wrt_family(g: &PartitionedGraph, member: &[usize], f: &CrossingFamily, delta: f64) -> bool {
    let need = ceil_tol(delta * f.len() as f64);
    let mut count = 0;
    for m in f.iter() {
        if crossing_adjacent(g, f.r, member, m) {
            count += 1;
            if count >= need {
                return true;
            }
        }
    }
    count >= need
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::consecutive_parts;
    use rand::SeedableRng;

    fn random_tripartite(sizes: &[usize], p: f64, seed: u64) -> PartitionedGraph {
        let n: usize = sizes.iter().sum();
        let parts = consecutive_parts(n, sizes);
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let pu = parts.iter().position(|p| p.contains(u));
                let pv = parts.iter().position(|p| p.contains(v));
                if pu != pv && r.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        PartitionedGraph::from_edges(n, &edges).unwrap().with_parts(parts, true).unwrap()
    }

    fn naive_heavy(g: &PartitionedGraph, parts: &[VertexSet], delta: f64) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for a in parts[0].iter() {
            for b in parts[1].iter() {
                for c in parts[2].iter() {
                    let t = [a, b, c];
                    if g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(b, c) {
                        let heavy = (0..3).all(|j| {
                            let cnt = parts[j]
                                .iter()
                                .filter(|&w| (0..3).filter(|&i| i != j).all(|i| g.has_edge(t[i], w)))
                                .count();
                            cnt as f64 + 1e-9 >= delta * parts[j].len() as f64
                        });
                        if heavy {
                            out.push(t.to_vec());
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn triangle_and_k222() {
        let b = Budget::default();
        let tri = PartitionedGraph::complete(3);
        let parts = consecutive_parts(3, &[1, 1, 1]);
        assert_eq!(heavy_cliques(&tri, &parts, 1.0, &b).unwrap().len(), 1);
        let k = PartitionedGraph::complete_multipartite(&[2, 2, 2]);
        let parts = k.parts().to_vec();
        assert_eq!(heavy_cliques(&k, &parts, 1.0, &b).unwrap().len(), 8);
        let e = PartitionedGraph::empty(6);
        assert_eq!(heavy_cliques(&e, &parts, 0.0, &b).unwrap().len(), 0);
    }

    #[test]
    fn heavy_matches_naive() {
        for seed in 0..15 {
            let g = random_tripartite(&[6, 5, 7], 0.6, seed);
            let parts = g.parts().to_vec();
            for &delta in &[0.0, 0.2, 0.4, 0.6] {
                let fam = heavy_cliques(&g, &parts, delta, &Budget::default()).unwrap();
                let mut got: Vec<Vec<usize>> = fam.iter().map(|m| m.to_vec()).collect();
                got.sort();
                let mut want = naive_heavy(&g, &parts, delta);
                want.sort();
                assert_eq!(got, want, "seed {seed} delta {delta}");
                for m in fam.iter() {
                    assert!(is_heavy_clique(&g, m, &parts, delta));
                }
            }
        }
    }

    #[test]
    fn adjacency_and_rho_match_naive() {
        for seed in 0..10 {
            let g = random_tripartite(&[5, 5, 5], 0.7, seed);
            let parts = g.parts().to_vec();
            let fam = heavy_cliques(&g, &parts, 0.0, &Budget::default()).unwrap();
            let rc = rho(&g, &fam, &fam, &Budget::default()).unwrap();
            let mut total = 0;
            for (i, a) in fam.iter().enumerate() {
                let mut deg = 0;
                for bm in fam.iter() {
                    let mut adj = true;
                    for j in 0..3 {
                        for jp in 0..3 {
                            if j != jp && !g.has_edge(a[j], bm[jp]) {
                                adj = false;
                            }
                        }
                    }
                    assert_eq!(adj, crossing_adjacent(&g, 3, a, bm));
                    deg += u64::from(adj);
                }
                assert_eq!(rc.degrees[i], deg);
                total += deg;
                let need = ceil_tol(0.5 * fam.len() as f64);
                assert_eq!(heavy_wrt_family(&g, a, &fam, 0.5), deg as usize >= need);
            }
            assert_eq!(rc.total, total);
        }
    }

    #[test]
    fn complete_host_is_fully_adjacent() {
        let g = PartitionedGraph::complete_multipartite(&[2, 2, 2]);
        let parts = g.parts().to_vec();
        let fam = heavy_cliques(&g, &parts, 0.0, &Budget::default()).unwrap();
        let rc = rho(&g, &fam, &fam, &Budget::default()).unwrap();
        assert_eq!(rc.total, 64);
        assert!(crossing_adjacent(&g, 3, &[0, 2, 4], &[1, 3, 5]));
        let lone = PartitionedGraph::from_edges(4, &[(0, 1)]).unwrap();
        assert!(!crossing_adjacent(&lone, 2, &[0, 1], &[2, 3]));
    }

    #[test]
    fn empty_family_conventions() {
        let g = PartitionedGraph::complete(3);
        let parts = consecutive_parts(3, &[1, 1, 1]);
        let f = CrossingFamily::new(Pattern::Clique, 3, parts.clone(), vec![], FamilyTotal::Exact { count: 0 });
        assert!(heavy_wrt_family(&g, &[0, 1, 2], &f, 0.7));
        assert_eq!(rho(&g, &f, &f, &Budget::default()).unwrap().total, 0);
    }

    #[test]
    fn sampled_family_is_uniform_subset_of_exact() {
        let g = random_tripartite(&[8, 8, 8], 0.6, 2);
        let parts = g.parts().to_vec();
        let exact = heavy_cliques(&g, &parts, 0.2, &Budget::default()).unwrap();
        let rule = HeavyRule { reference: parts.clone(), delta: 0.2 };
        let s = sample_family(&g, Pattern::Clique, 3, &parts, Some(rule), 10_000, 20_000, 5);
        assert!(s.iter().all(|m| exact.admits(&g, m)));
        let set: std::collections::HashSet<Vec<usize>> = exact.iter().map(|m| m.to_vec()).collect();
        assert!(s.iter().all(|m| set.contains(m)));
        if let FamilyTotal::Estimated { estimate, se, .. } = s.total {
            assert!((estimate - exact.len() as f64).abs() <= 4.0 * se + 1e-9);
        } else {
            panic!("expected an estimate");
        }
    }
}
