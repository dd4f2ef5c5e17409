//! Seeded instance generators.
//!
//! Each generator re-checks what its construction promises before handing
//! the instance out, so a pipeline never runs on an instance that is wrong
//! by construction.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::pair_density;
use crate::error::{Error, Result};
use crate::graph::{consecutive_parts, degeneracy_ordering, verify_labelling, GraphDoc, Labelling, PartitionedGraph, VertexSet};
use crate::rng;

/// What to generate. Serialised with a `kind` tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    DegenerateBandwidthH { n: usize, d: usize, beta: usize, r: usize },
    DenseRpartiteG { sizes: Vec<usize>, p: f64 },
    MinDegreeG { n: usize, gamma: f64 },
    TwoColoredKn { n: usize, p: f64 },
    PlantedBackboneG(PlantedSpec),
}

/// A generated instance together with its construction certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub graph: PartitionedGraph,
    pub labelling: Option<Labelling>,
    pub coloring: Option<Vec<usize>>,
    pub planted: Option<Vec<Vec<Vec<usize>>>>,
    pub certificate: Certificate,
}

/// File form of [`Generated`]: a [`GraphDoc`] with the extras alongside, so
/// `read_graph` accepts it unchanged.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratedDoc {
    #[serde(flatten)]
    pub graph: GraphDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<Vec<Vec<Vec<usize>>>>,
    pub certificate: Certificate,
}

impl Generated {
    pub fn to_doc(&self) -> GeneratedDoc {
        GeneratedDoc {
            graph: GraphDoc::from_graph(&self.graph, self.graph.parts().len() > 1, self.labelling.as_ref()),
            coloring: self.coloring.clone(),
            planted: self.planted.clone(),
            certificate: self.certificate.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// `verify_labelling` and the colouring check passed.
    Labelling { d: usize, beta: usize, worst_back_degree: usize, worst_stretch: usize, proper_colors: usize },
    Density(DensityCertificate),
    MinDegree { gamma: f64, min_degree: usize, needed: usize, attempts: usize },
    Planted { pairs: usize, worst_high: f64, worst_low: f64 },
}

/// Observed edge density against the generating `p`, per pair of parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCertificate {
    pub p: f64,
    /// `(i, j, density, standard error)` for each pair `i < j`.
    pub pairs: Vec<(usize, usize, f64, f64)>,
    /// Every pair lies within 3 standard errors of `p`.
    pub within_3se: bool,
}

impl GeneratorSpec {
    pub fn generate(&self, seed: u64) -> Result<Generated> {
        let plain = |graph, certificate| Generated { graph, labelling: None, coloring: None, planted: None, certificate };
        Ok(match self {
            GeneratorSpec::DegenerateBandwidthH { n, d, beta, r } => {
                let (h, lab, col) = gen_degenerate_bandwidth_h(*n, *d, *beta, *r, seed)?;
                let rep = verify_labelling(&h, &lab, *d, *beta);
                let certificate = Certificate::Labelling {
                    d: *d,
                    beta: *beta,
                    worst_back_degree: rep.worst_back_degree,
                    worst_stretch: rep.worst_stretch,
                    proper_colors: *r,
                };
                let h = h.with_parts(colour_parts(&col, *r), true)?;
                Generated { graph: h, labelling: Some(lab), coloring: Some(col), planted: None, certificate }
            }
            GeneratorSpec::DenseRpartiteG { sizes, p } => {
                let g = gen_dense_rpartite_g(sizes, *p, seed)?;
                let cert = density_certificate(&g, *p);
                plain(g, Certificate::Density(cert))
            }
            GeneratorSpec::MinDegreeG { n, gamma } => {
                let (g, attempts) = gen_min_degree_g_counted(*n, *gamma, seed)?;
                let min_degree = (0..*n).map(|v| g.degree(v)).min().unwrap_or(0);
                let needed = min_degree_needed(*n, *gamma);
                plain(g, Certificate::MinDegree { gamma: *gamma, min_degree, needed, attempts })
            }
            GeneratorSpec::TwoColoredKn { n, p } => {
                let g = gen_two_colored_kn(*n, *p, seed)?;
                let cert = density_certificate(&g.clone().with_parts(vec![VertexSet::full(*n)], false)?, *p);
                plain(g, Certificate::Density(cert))
            }
            GeneratorSpec::PlantedBackboneG(spec) => {
                let pl = gen_planted(spec, seed)?;
                let planted = pl.grid.iter().map(|row| row.iter().map(VertexSet::to_vec).collect()).collect();
                Generated {
                    graph: pl.graph,
                    labelling: None,
                    coloring: None,
                    planted: Some(planted),
                    certificate: Certificate::Planted { pairs: pl.pairs, worst_high: pl.worst_high, worst_low: pl.worst_low },
                }
            }
        })
    }
}

/// `H` on `n` vertices where vertex `v` has label `v + 1` and colour `v mod r`.
///
/// Each vertex takes `min(d, c)` distinct back-neighbours uniformly from the
/// `c` earlier vertices within distance `β` whose colour differs from its own.
/// The labelling is `d`-degenerate and `β`-local by construction and is
/// re-verified.
pub fn gen_degenerate_bandwidth_h(n: usize, d: usize, beta: usize, r: usize, seed: u64) -> Result<(PartitionedGraph, Labelling, Vec<usize>)> {
    if d == 0 || beta == 0 || r < 2 {
        return Err(Error::InfeasibleParams(format!("need d >= 1, beta >= 1 and r >= 2, got d = {d}, beta = {beta}, r = {r}")));
    }
    let mut rng = rng::stream(seed, 0x4745_4e48);
    let coloring: Vec<usize> = (0..n).map(|v| v % r).collect();
    let mut edges = Vec::new();
    for v in 1..n {
        let cands: Vec<usize> = (v.saturating_sub(beta)..v).filter(|&u| coloring[u] != coloring[v]).collect();
        let k = d.min(cands.len());
        for i in index::sample(&mut rng, cands.len(), k) {
            edges.push((cands[i], v));
        }
    }
    let h = PartitionedGraph::from_edges(n, &edges)?;
    let lab = Labelling::identity(n)
        .verified(&h, d, beta)
        .map_err(|e| Error::InternalInvariantBroken(format!("generated H failed its own check: {e}")))?;
    if edges.iter().any(|&(u, v)| coloring[u] == coloring[v]) {
        return Err(Error::InternalInvariantBroken("generated colouring is not proper".into()));
    }
    Ok((h, lab, coloring))
}

/// Colour classes `0..r` of `coloring` as vertex sets, for use as the parts of `H`.
pub fn colour_parts(coloring: &[usize], r: usize) -> Vec<VertexSet> {
    let n = coloring.len();
    (0..r).map(|j| VertexSet::from_iter(n, (0..n).filter(|&v| coloring[v] == j))).collect()
}

/// Independent edges with probability `p` between different parts; parts are
/// consecutive id ranges of the given sizes.
pub fn gen_dense_rpartite_g(sizes: &[usize], p: f64, seed: u64) -> Result<PartitionedGraph> {
    check_p(p)?;
    let n: usize = sizes.iter().sum();
    let parts = consecutive_parts(n, sizes);
    let part_of: Vec<usize> = (0..n).map(|v| parts.iter().position(|q| q.contains(v)).unwrap()).collect();
    let mut rng = rng::stream(seed, 0x4745_4e47);
    let mut rows = vec![VertexSet::new(n); n];
    for u in 0..n {
        for v in u + 1..n {
            if part_of[u] != part_of[v] && rng.gen_bool(p) {
                rows[u].insert(v);
                rows[v].insert(u);
            }
        }
    }
    PartitionedGraph::from_rows(rows).with_parts(parts, true)
}

/// Red edges of a 2-colouring of `K_n`: each pair is red with probability `p`.
pub fn gen_two_colored_kn(n: usize, p: f64, seed: u64) -> Result<PartitionedGraph> {
    check_p(p)?;
    Ok(gnp(n, p, &mut rng::stream(seed, 0x4b4e)))
}

const MIN_DEGREE_RETRIES: usize = 50;

/// `⌈γ(n−1)⌉`, the degree every vertex of [`gen_min_degree_g`] reaches.
pub fn min_degree_needed(n: usize, gamma: f64) -> usize {
    crate::density::ceil_tol(gamma * n.saturating_sub(1) as f64)
}

/// `G(n, p)` with `p = min(1, γ + √(ln n / n))`, resampled until every degree is
/// at least `⌈γ(n−1)⌉`.
pub fn gen_min_degree_g(n: usize, gamma: f64, seed: u64) -> Result<PartitionedGraph> {
    gen_min_degree_g_counted(n, gamma, seed).map(|(g, _)| g)
}

fn gen_min_degree_g_counted(n: usize, gamma: f64, seed: u64) -> Result<(PartitionedGraph, usize)> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InfeasibleParams(format!("gamma = {gamma} is not in [0, 1]")));
    }
    let p = if n < 2 { 1.0 } else { (gamma + ((n as f64).ln() / n as f64).sqrt()).min(1.0) };
    let needed = min_degree_needed(n, gamma);
    for attempt in 0..MIN_DEGREE_RETRIES {
        let g = gnp(n, p, &mut rng::stream(seed, attempt as u64));
        if (0..n).all(|v| g.degree(v) >= needed) {
            return Ok((g, attempt + 1));
        }
    }
    Err(Error::RetryExhausted(format!("no G({n}, {p:.3}) sample with minimum degree {needed} in {MIN_DEGREE_RETRIES} tries")))
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InfeasibleParams(format!("p = {p} is not in [0, 1]")));
    }
    Ok(())
}

fn gnp(n: usize, p: f64, rng: &mut rng::Rng) -> PartitionedGraph {
    let mut rows = vec![VertexSet::new(n); n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                rows[u].insert(v);
                rows[v].insert(u);
            }
        }
    }
    PartitionedGraph::from_rows(rows)
}

/// Observed density of every pair of parts of `g` against `p`. With a single
/// part, the pair is the part with itself (all unordered pairs inside it).
pub fn density_certificate(g: &PartitionedGraph, p: f64) -> DensityCertificate {
    let parts = g.parts();
    let mut pairs = Vec::new();
    let se = |pairs: f64| if pairs > 0.0 { (p * (1.0 - p) / pairs).sqrt() } else { 0.0 };
    if parts.len() <= 1 {
        let all = parts.first().cloned().unwrap_or_else(|| VertexSet::full(g.n()));
        let k = all.len();
        let total = (k * k.saturating_sub(1) / 2) as f64;
        let e: usize = all.iter().map(|v| g.degree_in(v, &all)).sum::<usize>() / 2;
        let dens = if total > 0.0 { e as f64 / total } else { 0.0 };
        pairs.push((0, 0, dens, se(total)));
    } else {
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let total = (parts[i].len() * parts[j].len()) as f64;
                pairs.push((i, j, pair_density(g, &parts[i], &parts[j]), se(total)));
            }
        }
    }
    let within_3se = pairs.iter().all(|&(_, _, dens, s)| (dens - p).abs() <= 3.0 * s + 1e-12);
    DensityCertificate { p, pairs, within_3se }
}

/// A planted `B_k^c` blow-up: `k × c` blobs of `blob` vertices each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub rows: usize,
    pub cols: usize,
    pub blob: usize,
    /// Edge probability between blobs adjacent in `B_k^c`.
    pub p_hi: f64,
    /// Edge probability everywhere else, including inside blobs.
    pub p_lo: f64,
    /// Also make every pair of blobs within one row dense.
    #[serde(default)]
    pub complete_rows: bool,
    /// Relabel the vertices by a random permutation.
    #[serde(default)]
    pub shuffle: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Planted {
    pub graph: PartitionedGraph,
    /// `grid[i][j]` is blob `(i, j)` after any shuffling.
    pub grid: Vec<Vec<VertexSet>>,
    /// Number of dense blob pairs.
    pub pairs: usize,
    /// Smallest observed density among dense pairs, largest among sparse ones.
    pub worst_high: f64,
    pub worst_low: f64,
}

impl Planted {
    /// Blobs in row-major order.
    pub fn parts(&self) -> Vec<VertexSet> {
        self.grid.iter().flatten().cloned().collect()
    }
}

/// Whether blobs `a` and `b` are planted dense.
pub fn planted_dense(spec: &PlantedSpec, a: (usize, usize), b: (usize, usize)) -> bool {
    if a == b {
        return false;
    }
    let same_row = a.0 == b.0;
    (a.0.abs_diff(b.0) <= 1 && a.1 != b.1) || (spec.complete_rows && same_row)
}

/// Generates the planted host. Its parts are the blobs in row-major order.
pub fn gen_planted(spec: &PlantedSpec, seed: u64) -> Result<Planted> {
    check_p(spec.p_hi)?;
    check_p(spec.p_lo)?;
    if spec.rows == 0 || spec.cols == 0 || spec.blob == 0 {
        return Err(Error::InfeasibleParams("planted grid needs rows, cols and blob >= 1".into()));
    }
    let (k, c, b) = (spec.rows, spec.cols, spec.blob);
    let n = k * c * b;
    let mut rng = rng::stream(seed, 0x504c);
    let mut id: Vec<usize> = (0..n).collect();
    if spec.shuffle {
        id.shuffle(&mut rng);
    }
    let blob_of = |v: usize| ((v / b) / c, (v / b) % c);
    let mut rows = vec![VertexSet::new(n); n];
    for u in 0..n {
        for v in u + 1..n {
            let p = if planted_dense(spec, blob_of(u), blob_of(v)) { spec.p_hi } else { spec.p_lo };
            if rng.gen_bool(p) {
                rows[id[u]].insert(id[v]);
                rows[id[v]].insert(id[u]);
            }
        }
    }
    let grid: Vec<Vec<VertexSet>> =
        (0..k).map(|i| (0..c).map(|j| VertexSet::from_iter(n, (0..b).map(|t| id[(i * c + j) * b + t]))).collect()).collect();
    let graph = PartitionedGraph::from_rows(rows).with_parts(grid.iter().flatten().cloned().collect(), false)?;
    let (mut pairs, mut worst_high, mut worst_low) = (0, 1.0f64, 0.0f64);
    for a in 0..k * c {
        for bb in a + 1..k * c {
            let (x, y) = ((a / c, a % c), (bb / c, bb % c));
            let dens = pair_density(&graph, &grid[x.0][x.1], &grid[y.0][y.1]);
            if planted_dense(spec, x, y) {
                pairs += 1;
                worst_high = worst_high.min(dens);
            } else {
                worst_low = worst_low.max(dens);
            }
        }
    }
    Ok(Planted { graph, grid, pairs, worst_high, worst_low })
}

/// Degeneracy of `h`, for callers that want to double-check a generated `H`.
pub fn degeneracy(h: &PartitionedGraph) -> usize {
    degeneracy_ordering(h).1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_is_verified_and_deterministic() {
        let (h, lab, col) = gen_degenerate_bandwidth_h(200, 2, 6, 3, 9).unwrap();
        assert!(verify_labelling(&h, &lab, 2, 6).local_ok);
        assert!(h.edges().iter().all(|&(u, v)| col[u] != col[v]));
        let (h2, _, _) = gen_degenerate_bandwidth_h(200, 2, 6, 3, 9).unwrap();
        assert_eq!(h.edges(), h2.edges());
        assert!(gen_degenerate_bandwidth_h(10, 0, 3, 2, 0).is_err());
        assert!(matches!(gen_degenerate_bandwidth_h(10, 1, 3, 1, 0), Err(Error::InfeasibleParams(_))));
    }

    #[test]
    fn d_one_gives_a_forest() {
        let (h, _, _) = gen_degenerate_bandwidth_h(50, 1, 4, 2, 3).unwrap();
        assert_eq!(h.edge_count(), 49);
        assert_eq!(degeneracy(&h), 1);
    }

    #[test]
    fn extreme_probabilities() {
        let g = gen_dense_rpartite_g(&[3, 4, 5], 1.0, 1).unwrap();
        assert_eq!(g.edge_count(), 3 * 4 + 3 * 5 + 4 * 5);
        let e = gen_dense_rpartite_g(&[3, 4], 0.0, 1).unwrap();
        assert_eq!(e.edge_count(), 0);
        assert!(gen_dense_rpartite_g(&[3], 1.5, 0).is_err());
    }

    #[test]
    fn min_degree_is_met() {
        let g = gen_min_degree_g(120, 0.6, 4).unwrap();
        assert!((0..120).all(|v| g.degree(v) >= min_degree_needed(120, 0.6)));
        assert!(matches!(gen_min_degree_g(30, 1.2, 0), Err(Error::InfeasibleParams(_))));
    }

    #[test]
    fn planted_separates_densities() {
        let spec = PlantedSpec { rows: 3, cols: 3, blob: 30, p_hi: 0.9, p_lo: 0.1, complete_rows: false, shuffle: true };
        let pl = gen_planted(&spec, 2).unwrap();
        assert_eq!(pl.pairs, 3 * 3 + 2 * 6);
        assert!(pl.worst_high > 0.75 && pl.worst_low < 0.25);
        let all: usize = pl.grid.iter().flatten().map(VertexSet::len).sum();
        assert_eq!(all, 270);
    }

    #[test]
    fn spec_round_trip() {
        let s = GeneratorSpec::DenseRpartiteG { sizes: vec![5, 5], p: 0.5 };
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"kind\":\"dense_rpartite_g\""));
        assert_eq!(serde_json::from_str::<GeneratorSpec>(&j).unwrap(), s);
        let g = s.generate(3).unwrap();
        assert!(matches!(g.certificate, Certificate::Density(_)));
    }
}
