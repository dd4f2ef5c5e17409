use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{certify_backbone, Backbone, Colour};
use crate::budget::CheckMode;
use crate::density::reduced_graph;
use crate::error::{Error, Result};
use crate::graph::{PartitionedGraph, VertexSet};
use crate::rng;

/// Graphs up to this many vertices are searched exhaustively.
const EXHAUSTIVE_BKR: usize = 20;
const EXHAUSTIVE_PATH: usize = 16;
/// Node cap for a nominally exhaustive search; reaching it is reported.
const EXHAUSTIVE_NODES: u64 = 50_000_000;
const RESTARTS: u64 = 64;
const RESTART_NODES: u64 = 20_000;

struct Dfs<'a> {
    g: &'a PartitionedGraph,
    order: Vec<usize>,
    nodes: u64,
    limit: u64,
    aborted: bool,
}

impl Dfs<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
        }
        !self.aborted
    }
}

/// Longest monochromatic path power found, and in which colour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathPower {
    pub colour: Colour,
    /// Vertices of the copy in path order; consecutive-within-`r` pairs are
    /// edges of `colour`.
    pub seq: Vec<usize>,
    pub k: usize,
    /// `⌊n/(2r+3)⌋`, the length guaranteed for near-complete graphs.
    pub floor: usize,
    pub meets_floor: bool,
    /// Every search finished without hitting its node cap.
    pub exhaustive: bool,
    /// Smallest `(d_red + d_blue)/(n − 1)`; reported, not enforced.
    pub min_degree_share: f64,
}

fn path_dfs(s: &mut Dfs, r: usize, seq: &mut Vec<usize>, used: &mut VertexSet, best: &mut Vec<usize>) {
    if seq.len() > best.len() {
        *best = seq.clone();
    }
    let n = s.g.n();
    if best.len() == n || seq.len() + (n - seq.len()) <= best.len() {
        return;
    }
    let mut cand = VertexSet::full(n);
    cand.difference_with(used);
    for &u in seq.iter().rev().take(r) {
        cand.intersect_with(s.g.neighbors(u));
    }
    if seq.len() + cand.len() <= best.len() {
        return;
    }
    for i in 0..s.order.len() {
        let v = s.order[i];
        if !cand.contains(v) {
            continue;
        }
        if !s.tick() {
            return;
        }
        seq.push(v);
        used.insert(v);
        path_dfs(s, r, seq, used, best);
        used.remove(v);
        seq.pop();
        if s.aborted || best.len() == n {
            return;
        }
    }
}

/// Longest sequence of distinct vertices in which any two at distance at
/// most `r` are adjacent. Returns the sequence and whether the search was
/// complete.
fn longest_path_power(g: &PartitionedGraph, r: usize, seed: u64) -> (Vec<usize>, bool) {
    let n = g.n();
    if n == 0 {
        return (Vec::new(), true);
    }
    if n <= EXHAUSTIVE_PATH {
        let mut s = Dfs { g, order: (0..n).collect(), nodes: 0, limit: EXHAUSTIVE_NODES, aborted: false };
        let mut best = Vec::new();
        path_dfs(&mut s, r, &mut Vec::new(), &mut VertexSet::new(n), &mut best);
        return (best, !s.aborted);
    }
    let runs: Vec<Vec<usize>> = (0..RESTARTS)
        .into_par_iter()
        .map(|i| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng::stream(seed, i));
            let mut s = Dfs { g, order, nodes: 0, limit: RESTART_NODES, aborted: false };
            let mut best = Vec::new();
            path_dfs(&mut s, r, &mut Vec::new(), &mut VertexSet::new(n), &mut best);
            best
        })
        .collect();
    let best = runs.into_iter().fold(Vec::new(), |b, x| if x.len() > b.len() { x } else { b });
    let complete = best.len() == n;
    (best, complete)
}

/// Longest monochromatic `P_k^r` in a two-coloured graph given by its red and
/// blue edge sets. Exhaustive up to 16 vertices, randomized restarts above.
/// Ties go to red.
pub fn find_mono_path_power(red: &PartitionedGraph, blue: &PartitionedGraph, r: usize, seed: u64) -> Result<PathPower> {
    let n = red.n();
    if blue.n() != n {
        return Err(Error::PreconditionViolated("red and blue graphs differ in size".into()));
    }
    if let Some((u, v)) = red.edges().into_iter().find(|&(u, v)| blue.has_edge(u, v)) {
        return Err(Error::PreconditionViolated(format!("pair {u}-{v} carries both colours")));
    }
    let (rs, rc) = longest_path_power(red, r, rng::derive(seed, 0));
    let (bs, bc) = longest_path_power(blue, r, rng::derive(seed, 1));
    let (colour, seq) = if bs.len() > rs.len() { (Colour::Blue, bs) } else { (Colour::Red, rs) };
    let floor = n / (2 * r + 3);
    let min_degree_share =
        if n < 2 { 1.0 } else { (0..n).map(|v| (red.degree(v) + blue.degree(v)) as f64 / (n - 1) as f64).fold(1.0, f64::min) };
    Ok(PathPower { colour, k: seq.len(), meets_floor: seq.len() >= floor, seq, floor, exhaustive: rc && bc, min_degree_share })
}

/// Rows of a labelled `B_k^r` found in a graph (typically a reduced graph).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackboneSearch {
    /// `rows[i][j]` is the vertex playing `(i, j)`.
    pub rows: Vec<Vec<usize>>,
    pub exhaustive: bool,
}

struct GridSearch<'a> {
    s: Dfs<'a>,
    r: usize,
    rows: Vec<Vec<usize>>,
    cur: Vec<usize>,
    used: VertexSet,
    best: Vec<Vec<usize>>,
}

impl GridSearch<'_> {
    /// Some vertex outside the row is adjacent to all of it.
    fn completable(&self, row: &[usize]) -> bool {
        let mut c = VertexSet::full(self.s.g.n());
        for &v in row {
            c.intersect_with(self.s.g.neighbors(v));
        }
        !c.is_empty()
    }

    fn run(&mut self) {
        let n = self.s.g.n();
        if self.rows.len() > self.best.len() {
            self.best = self.rows.clone();
        }
        let free = n - self.used.len();
        if self.rows.len() + (free + self.cur.len()) / self.r <= self.best.len() || self.best.len() * self.r == n {
            return;
        }
        if self.cur.len() == self.r {
            if self.completable(&self.cur) {
                let row = std::mem::take(&mut self.cur);
                self.rows.push(row);
                self.run();
                self.cur = self.rows.pop().expect("just pushed");
            }
            return;
        }
        let p = self.cur.len();
        let mut cand = VertexSet::full(n);
        cand.difference_with(&self.used);
        for &u in &self.cur {
            cand.intersect_with(self.s.g.neighbors(u));
        }
        if let Some(prev) = self.rows.last() {
            for (j, &u) in prev.iter().enumerate() {
                if j != p {
                    cand.intersect_with(self.s.g.neighbors(u));
                }
            }
        }
        for i in 0..self.s.order.len() {
            let v = self.s.order[i];
            if !cand.contains(v) {
                continue;
            }
            if !self.s.tick() {
                return;
            }
            self.cur.push(v);
            self.used.insert(v);
            self.run();
            self.used.remove(v);
            self.cur.pop();
            if self.s.aborted || self.best.len() * self.r == n {
                return;
            }
        }
    }
}

/// Longest labelled `B_k^r` in `g` whose every row has a common neighbour
/// outside the row. Exhaustive up to 20 vertices, randomized restarts above.
pub fn find_bkr(g: &PartitionedGraph, r: usize, seed: u64) -> BackboneSearch {
    let n = g.n();
    if r == 0 || n < r {
        return BackboneSearch { rows: Vec::new(), exhaustive: true };
    }
    let search = |order: Vec<usize>, limit: u64| {
        let mut gs = GridSearch {
            s: Dfs { g, order, nodes: 0, limit, aborted: false },
            r,
            rows: Vec::new(),
            cur: Vec::new(),
            used: VertexSet::new(n),
            best: Vec::new(),
        };
        gs.run();
        (gs.best, !gs.s.aborted)
    };
    if n <= EXHAUSTIVE_BKR {
        let (rows, done) = search((0..n).collect(), EXHAUSTIVE_NODES);
        return BackboneSearch { rows, exhaustive: done };
    }
    let runs: Vec<Vec<Vec<usize>>> = (0..RESTARTS)
        .into_par_iter()
        .map(|i| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng::stream(seed, i));
            search(order, RESTART_NODES).0
        })
        .collect();
    let rows = runs.into_iter().fold(Vec::new(), |b, x| if x.len() > b.len() { x } else { b });
    let exhaustive = rows.len() * r == n;
    BackboneSearch { rows, exhaustive }
}

/// Backbone from a partition of a host of large minimum degree.
///
/// Builds the `(ε,δ)`-reduced graph of `partition`, searches it for a
/// labelled `B_k^r` with `k ≥ t0` whose rows all have a completing part,
/// assigns each row `i` a completing part `a(i)` (each used at most `⌊1/δ⌋`
/// times, parts outside the grid first) and carves the reservoir `U_{i,r}`
/// out of it: `⌈(δε/2)|V_a|⌉` vertices from a grid part, an equal share of a
/// part outside the grid.
#[allow(clippy::too_many_arguments)]
pub fn find_backbone_min_degree(
    g: &PartitionedGraph,
    r: usize,
    eps: f64,
    delta: f64,
    t0: usize,
    partition: &[VertexSet],
    mode: CheckMode,
    seed: u64,
) -> Result<Backbone> {
    if r == 0 || partition.is_empty() || partition.iter().any(VertexSet::is_empty) {
        return Err(Error::PreconditionViolated("need r >= 1 and a partition into nonempty parts".into()));
    }
    if !(delta > 0.0 && eps > 0.0) {
        return Err(Error::PreconditionViolated("eps and delta must be positive".into()));
    }
    let n = g.n();
    let mut notes = Vec::new();
    let min_deg = (0..n).map(|v| g.degree(v)).min().unwrap_or(0) as f64 / n.max(1) as f64;
    let needed = 1.0 - 1.0 / r as f64 + 2.0 * delta;
    notes.push(format!("relative minimum degree {min_deg:.4} (the min-degree hypothesis asks for {needed:.4})"));
    let red = reduced_graph(g, partition, eps, delta, mode)?;
    let found = find_bkr(&red.graph, r, seed);
    notes.push(format!(
        "reduced graph on {} parts; {} search found {} rows",
        partition.len(),
        if found.exhaustive { "complete" } else { "restarted" },
        found.rows.len()
    ));
    let k = found.rows.len();
    if k == 0 || k < t0 {
        return Err(Error::BackboneNotFound(format!("longest grid has {k} rows, need {}", t0.max(1))));
    }
    let rg = &red.graph;
    let in_grid: Vec<bool> = (0..partition.len()).map(|a| found.rows.iter().flatten().any(|&x| x == a)).collect();
    let cap = ((1.0 / delta).floor() as usize).max(1);
    let mut uses = vec![0usize; partition.len()];
    let mut assign = Vec::with_capacity(k);
    for (i, row) in found.rows.iter().enumerate() {
        let pick = (0..partition.len())
            .filter(|&a| !row.contains(&a) && uses[a] < cap && row.iter().all(|&x| rg.has_edge(a, x)))
            .min_by_key(|&a| (in_grid[a], uses[a], a))
            .ok_or_else(|| Error::BackboneNotFound(format!("row {i} has no completing part within the multiplicity cap {cap}")))?;
        uses[pick] += 1;
        assign.push(pick);
    }

    // Carve reservoirs in row order from the sorted vertices of each part.
    let mut taken: Vec<VertexSet> = partition.iter().map(|p| VertexSet::new(p.universe())).collect();
    let mut cursor = vec![0usize; partition.len()];
    let lists: Vec<Vec<usize>> = partition.iter().map(VertexSet::to_vec).collect();
    let mut reservoir = Vec::with_capacity(k);
    for &a in &assign {
        let size = if in_grid[a] {
            ((delta * eps / 2.0) * lists[a].len() as f64).ceil().max(1.0) as usize
        } else {
            lists[a].len() / uses[a]
        };
        let hi = (cursor[a] + size).min(lists[a].len());
        let set = VertexSet::from_iter(n, lists[a][cursor[a]..hi].iter().copied());
        cursor[a] = hi;
        taken[a].union_with(&set);
        reservoir.push(set);
    }
    let parts: Vec<Vec<VertexSet>> = found
        .rows
        .iter()
        .zip(reservoir)
        .map(|(row, res)| {
            let mut out: Vec<VertexSet> = row.iter().map(|&a| partition[a].difference(&taken[a])).collect();
            out.push(res);
            out
        })
        .collect();
    let grid_total: usize = found.rows.iter().flatten().map(|&a| partition[a].len()).sum();
    let size_bound = (1.0 - eps) * grid_total as f64 / (k * r) as f64;
    let sizes: Vec<Vec<usize>> = parts.iter().map(|row| row.iter().map(VertexSet::len).collect()).collect();
    let sizes_ok = sizes.iter().all(|row| row[..r].iter().all(|&s| s as f64 + 1e-9 >= size_bound));
    notes.push(format!("completing parts a(i) = {assign:?}; grid rows {:?}", found.rows));
    let certificate = certify_backbone(g, &parts, eps, delta, mode, false)?;
    Ok(Backbone { parts, eps, delta, certificate, sizes, size_bound, sizes_ok, notes })
}

/// Converts parts whose reduced graph contains `P_k^r` in the given order
/// into a `(k − r) × (r + 1)` backbone: `U_{i,j}` is slice `a − i` of
/// `V_a`, where `a` is the unique index in `[i, i + r]` congruent to `j`
/// modulo `r + 1`. Each part is cut into `r + 1` slices of `⌊|V_a|/(r+1)⌋`
/// vertices; the remainder stays unassigned. The certificate checks the
/// full `B_{k−r}^{r+1}` at `((r+1)ε, δ)`.
pub fn path_power_to_backbone(
    g: &PartitionedGraph,
    parts: &[VertexSet],
    r: usize,
    eps: f64,
    delta: f64,
    mode: CheckMode,
) -> Result<Backbone> {
    let k = parts.len();
    if r == 0 || k < r + 1 {
        return Err(Error::PreconditionViolated(format!("need at least r + 1 = {} parts, got {k}", r + 1)));
    }
    let c = r + 1;
    let n = g.n();
    let lists: Vec<Vec<usize>> = parts.iter().map(VertexSet::to_vec).collect();
    let mut notes = Vec::new();
    let leftover: usize = lists.iter().map(|l| l.len() % c).sum();
    if leftover > 0 {
        notes.push(format!("part sizes not divisible by {c}; {leftover} vertices left unassigned"));
    }
    let rows = k - r;
    let grid: Vec<Vec<VertexSet>> = (0..rows)
        .map(|i| {
            (0..c)
                .map(|j| {
                    let a = i + (j + c - i % c) % c;
                    let s = lists[a].len() / c;
                    let q = a - i;
                    VertexSet::from_iter(n, lists[a][q * s..(q + 1) * s].iter().copied())
                })
                .collect()
        })
        .collect();
    let sizes: Vec<Vec<usize>> = grid.iter().map(|row| row.iter().map(VertexSet::len).collect()).collect();
    let min_part = lists.iter().map(Vec::len).min().unwrap_or(0);
    let size_bound = (min_part / c) as f64;
    let sizes_ok = sizes.iter().flatten().all(|&s| s as f64 >= size_bound);
    let eps2 = (c as f64 * eps).min(1.0);
    let certificate = certify_backbone(g, &grid, eps2, delta, mode, true)?;
    let refuted = certificate.iter().filter(|p| p.status == crate::density::DensityStatus::Refuted).count();
    if refuted > 0 {
        notes.push(format!("{refuted} required pairs refuted at ({eps2}, {delta})"));
    }
    Ok(Backbone { parts: grid, eps: eps2, delta, certificate, sizes, size_bound, sizes_ok, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{make_bkr, make_pkr};

    #[test]
    fn complete_graph_path_power_is_everything() {
        let red = PartitionedGraph::complete(9);
        let blue = PartitionedGraph::empty(9);
        let p = find_mono_path_power(&red, &blue, 2, 1).unwrap();
        assert_eq!((p.colour, p.k), (Colour::Red, 9));
        let e = PartitionedGraph::empty(5);
        assert_eq!(find_mono_path_power(&e, &e, 1, 1).unwrap().k, 1);
    }

    #[test]
    fn blue_wins_when_longer() {
        let red = make_pkr(3, 1).induced(&[0, 1, 2]);
        let mut rows = vec![VertexSet::new(6); 6];
        for u in 0..6 {
            for v in 0..6 {
                if u != v && !(u < 3 && v < 3 && red.has_edge(u, v)) {
                    rows[u].insert(v);
                }
            }
        }
        let blue = PartitionedGraph::from_rows(rows);
        let red6 = PartitionedGraph::from_edges(6, &red.edges()).unwrap();
        let p = find_mono_path_power(&red6, &blue, 1, 0).unwrap();
        assert_eq!(p.colour, Colour::Blue);
        assert_eq!(p.k, 6);
    }

    #[test]
    fn finds_planted_grid() {
        let b = make_bkr(4, 2);
        // Add a completing vertex adjacent to everything.
        let n = b.n() + 1;
        let mut e = b.edges();
        e.extend((0..b.n()).map(|v| (v, b.n())));
        let g = PartitionedGraph::from_edges(n, &e).unwrap();
        let s = find_bkr(&g, 2, 0);
        assert!(s.exhaustive);
        assert_eq!(s.rows.len(), 4);
        for w in s.rows.windows(2) {
            for j in 0..2 {
                for j2 in 0..2 {
                    if j != j2 {
                        assert!(g.has_edge(w[0][j], w[1][j2]));
                    }
                }
            }
        }
    }

    #[test]
    fn edgeless_has_no_grid() {
        let g = PartitionedGraph::empty(6);
        assert!(find_bkr(&g, 2, 0).rows.is_empty());
    }

    #[test]
    fn slicing_minimal_case() {
        let g = PartitionedGraph::complete(9);
        let parts = crate::graph::consecutive_parts(9, &[3, 3, 3]);
        let bb = path_power_to_backbone(&g, &parts, 2, 0.1, 0.5, CheckMode::Exact).unwrap();
        assert_eq!((bb.rows(), bb.columns()), (1, 3));
        assert!(bb.parts[0].iter().all(|p| p.len() == 1));
        assert!(bb.is_certified());
    }
}
