//! Dense-bitmap graphs, vertex sets and labellings.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A subset of `[n]` stored as a dense bitmap with a cached cardinality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
    len: usize,
}

#[inline]
fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet { n, words: vec![0; word_count(n)], len: 0 }
    }

    pub fn full(n: usize) -> Self {
        let mut s = VertexSet { n, words: vec![u64::MAX; word_count(n)], len: n };
        s.trim();
        s
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(n: usize, it: I) -> Self {
        let mut s = VertexSet::new(n);
        for v in it {
            s.insert(v);
        }
        s
    }

    /// Universe size `n`.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v >> 6] >> (v & 63) & 1 == 1
    }

    /// Inserts `v`; returns whether it was newly added.
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.n, "vertex {v} outside universe {}", self.n);
        let w = &mut self.words[v >> 6];
        let bit = 1u64 << (v & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.len += 1;
            true
        } else {
            false
        }
    }

    pub fn remove(&mut self, v: usize) -> bool {
        if v >= self.n {
            return false;
        }
        let w = &mut self.words[v >> 6];
        let bit = 1u64 << (v & 63);
        if *w & bit != 0 {
            *w &= !bit;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
        self.len = 0;
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { words: &self.words, idx: 0, cur: self.words.first().copied().unwrap_or(0) }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// The `k`-th smallest member (0-based).
    pub fn nth(&self, mut k: usize) -> Option<usize> {
        if k >= self.len {
            return None;
        }
        for (i, &w) in self.words.iter().enumerate() {
            let c = w.count_ones() as usize;
            if k < c {
                let mut w = w;
                for _ in 0..k {
                    w &= w - 1;
                }
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
            k -= c;
        }
        None
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        self.check_universe(other);
        let words: Vec<u64> = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        VertexSet::from_words(self.n, words)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.check_universe(other);
        let words: Vec<u64> = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        VertexSet::from_words(self.n, words)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        self.check_universe(other);
        let words: Vec<u64> = self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect();
        VertexSet::from_words(self.n, words)
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        let mut len = 0;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
            len += a.count_ones() as usize;
        }
        self.len = len;
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        let mut len = 0;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
            len += a.count_ones() as usize;
        }
        self.len = len;
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        let mut len = 0;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
            len += a.count_ones() as usize;
        }
        self.len = len;
    }

    /// `|self ∩ other|` without allocating.
    #[inline]
    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        and_count(&self.words, &other.words)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    fn from_words(n: usize, words: Vec<u64>) -> VertexSet {
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        VertexSet { n, words, len }
    }

    fn trim(&mut self) {
        let extra = self.words.len() * 64 - self.n;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
        self.len = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }

    fn check_universe(&self, other: &VertexSet) {
        assert_eq!(self.n, other.n, "vertex sets over different universes");
    }
}

/// Popcount of the bitwise AND of two equally long word slices.
#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// An immutable simple graph on `[n]` with dense adjacency rows and an
/// optional list of disjoint parts.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionedGraph {
    n: usize,
    adj: Vec<VertexSet>,
    parts: Vec<VertexSet>,
    part_of: Vec<Option<usize>>,
    strict: bool,
}

impl PartitionedGraph {
    /// Builds a graph from an edge list. Self-loops and repeated edges are
    /// rejected, as are endpoints outside `[n]`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![VertexSet::new(n); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Schema(format!("edge ({u},{v}) outside [0,{n})")));
            }
            if u == v {
                return Err(Error::Schema(format!("self-loop at {u}")));
            }
            if !adj[u].insert(v) {
                return Err(Error::Schema(format!("duplicate edge ({u},{v})")));
            }
            adj[v].insert(u);
        }
        Ok(PartitionedGraph { n, adj, parts: vec![VertexSet::full(n)], part_of: vec![Some(0); n], strict: false })
    }

    /// Builds a graph from adjacency rows; rows are symmetrised and the
    /// diagonal cleared.
    pub fn from_rows(mut adj: Vec<VertexSet>) -> Self {
        let n = adj.len();
        for v in 0..n {
            adj[v].remove(v);
        }
        for u in 0..n {
            let nbrs: Vec<usize> = adj[u].iter().collect();
            for v in nbrs {
                adj[v].insert(u);
            }
        }
        PartitionedGraph { n, adj, parts: vec![VertexSet::full(n)], part_of: vec![Some(0); n], strict: false }
    }

    pub fn empty(n: usize) -> Self {
        PartitionedGraph::from_rows(vec![VertexSet::new(n); n])
    }

    pub fn complete(n: usize) -> Self {
        let rows = (0..n).map(|_| VertexSet::full(n)).collect();
        PartitionedGraph::from_rows(rows)
    }

    /// Complete multipartite graph with consecutive parts of the given sizes.
    pub fn complete_multipartite(sizes: &[usize]) -> Self {
        let n: usize = sizes.iter().sum();
        let parts = consecutive_parts(n, sizes);
        let mut rows = Vec::with_capacity(n);
        for (i, p) in parts.iter().enumerate() {
            let mut row = VertexSet::full(n);
            row.difference_with(p);
            for _ in p.iter() {
                rows.push(row.clone());
            }
            let _ = i;
        }
        PartitionedGraph::from_rows(rows).with_parts(parts, true).expect("consecutive parts are valid")
    }

    /// Attaches parts. In strict mode every edge must join distinct parts and
    /// every vertex must be assigned.
    pub fn with_parts(mut self, parts: Vec<VertexSet>, strict: bool) -> Result<Self> {
        let mut part_of = vec![None; self.n];
        for (i, p) in parts.iter().enumerate() {
            if p.universe() != self.n {
                return Err(Error::Schema(format!("part {i} has universe {} != {}", p.universe(), self.n)));
            }
            for v in p.iter() {
                if part_of[v].is_some() {
                    return Err(Error::Schema(format!("vertex {v} lies in two parts")));
                }
                part_of[v] = Some(i);
            }
        }
        if strict {
            if let Some(v) = part_of.iter().position(|p| p.is_none()) {
                return Err(Error::Schema(format!("vertex {v} is in no part")));
            }
            for (i, p) in parts.iter().enumerate() {
                for v in p.iter() {
                    if self.adj[v].intersection_len(p) > 0 {
                        return Err(Error::Schema(format!("edge inside part {i} at vertex {v}")));
                    }
                }
            }
        }
        self.parts = parts;
        self.part_of = part_of;
        self.strict = strict;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[VertexSet] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &VertexSet {
        &self.parts[i]
    }

    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.part_of[v]
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degree_in(&self, v: usize, set: &VertexSet) -> usize {
        self.adj[v].intersection_len(set)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.len()).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in self.adj[u].iter() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Number of edges between `x` and `y` (each pair counted once; `x`, `y` disjoint).
    pub fn edges_between(&self, x: &VertexSet, y: &VertexSet) -> usize {
        x.iter().map(|v| self.adj[v].intersection_len(y)).sum()
    }

    /// Same vertex ids, with every edge touching a vertex outside `keep` removed.
    pub fn restrict(&self, keep: &VertexSet) -> PartitionedGraph {
        let adj = (0..self.n)
            .map(|v| if keep.contains(v) { self.adj[v].intersection(keep) } else { VertexSet::new(self.n) })
            .collect();
        let parts = self.parts.iter().map(|p| p.intersection(keep)).collect();
        let part_of = (0..self.n).map(|v| if keep.contains(v) { self.part_of[v] } else { None }).collect();
        PartitionedGraph { n: self.n, adj, parts, part_of, strict: self.strict }
    }

    /// Same graph with all edges between `x` and `y` added (`x`, `y` disjoint).
    pub fn with_complete_pairs(&self, pairs: &[(&VertexSet, &VertexSet)]) -> PartitionedGraph {
        let mut adj = self.adj.clone();
        for (x, y) in pairs {
            for u in x.iter() {
                adj[u].union_with(y);
                adj[u].remove(u);
            }
            for v in y.iter() {
                adj[v].union_with(x);
                adj[v].remove(v);
            }
        }
        PartitionedGraph { n: self.n, adj, parts: self.parts.clone(), part_of: self.part_of.clone(), strict: false }
    }

    /// The complement graph on the same parts (non-strict).
    pub fn complement(&self) -> PartitionedGraph {
        let adj = (0..self.n)
            .map(|v| {
                let mut row = VertexSet::full(self.n);
                row.difference_with(&self.adj[v]);
                row.remove(v);
                row
            })
            .collect();
        PartitionedGraph { n: self.n, adj, parts: self.parts.clone(), part_of: self.part_of.clone(), strict: false }
    }

    /// Induced subgraph on `verts` (in the given order), relabelled to `0..verts.len()`.
    pub fn induced(&self, verts: &[usize]) -> PartitionedGraph {
        let k = verts.len();
        let mut rows = vec![VertexSet::new(k); k];
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate() {
                if i != j && self.has_edge(u, v) {
                    rows[i].insert(j);
                }
            }
        }
        PartitionedGraph::from_rows(rows)
    }
}

/// Parts `{0..s0}, {s0..s0+s1}, ...` over a universe of size `n`.
pub fn consecutive_parts(n: usize, sizes: &[usize]) -> Vec<VertexSet> {
    let mut start = 0;
    sizes
        .iter()
        .map(|&s| {
            let p = VertexSet::from_iter(n, start..start + s);
            start += s;
            p
        })
        .collect()
}

/// `target ∩ ⋂_{v∈S} N(v)`. For empty `S` the result is `target`.
pub fn common_neighbors(g: &PartitionedGraph, s: &VertexSet, target: &VertexSet) -> VertexSet {
    common_neighbors_of(g, s.iter(), target)
}

/// Slice form of [`common_neighbors`]; repeated vertices are harmless.
pub fn common_neighbors_of<I: IntoIterator<Item = usize>>(g: &PartitionedGraph, s: I, target: &VertexSet) -> VertexSet {
    let mut out = target.clone();
    for v in s {
        out.intersect_with(g.neighbors(v));
        if out.is_empty() {
            break;
        }
    }
    out
}

/// `|target ∩ ⋂_{v∈S} N(v)|` without allocating more than one scratch row.
pub fn common_count(g: &PartitionedGraph, s: &[usize], target: &VertexSet) -> usize {
    match s.len() {
        0 => target.len(),
        1 => g.neighbors(s[0]).intersection_len(target),
        2 => {
            let (a, b) = (g.neighbors(s[0]).words(), g.neighbors(s[1]).words());
            a.iter().zip(b).zip(target.words()).map(|((x, y), t)| (x & y & t).count_ones() as usize).sum()
        }
        _ => {
            let mut acc: Vec<u64> = target.words().to_vec();
            for &v in s {
                for (a, b) in acc.iter_mut().zip(g.neighbors(v).words()) {
                    *a &= b;
                }
            }
            acc.iter().map(|w| w.count_ones() as usize).sum()
        }
    }
}

/// A bijection from vertices to labels `1..=m`, with the bounds it has been
/// verified against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labelling {
    /// `order[v]` is the label of vertex `v`, in `1..=m`.
    order: Vec<usize>,
    checked_d: Option<usize>,
    checked_beta: Option<usize>,
}

impl Labelling {
    /// Wraps `order[v] = label of v`, checking that it is a bijection onto `1..=m`.
    pub fn from_labels(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        let mut seen = vec![false; m + 1];
        for (v, &l) in order.iter().enumerate() {
            if l == 0 || l > m || seen[l] {
                return Err(Error::Schema(format!("label {l} of vertex {v} breaks the bijection onto 1..={m}")));
            }
            seen[l] = true;
        }
        Ok(Labelling { order, checked_d: None, checked_beta: None })
    }

    /// Labelling that lists `verts` in order: `verts[i]` gets label `i+1`.
    pub fn from_sequence(verts: &[usize]) -> Result<Self> {
        let mut order = vec![0; verts.len()];
        for (i, &v) in verts.iter().enumerate() {
            if v >= verts.len() || order[v] != 0 {
                return Err(Error::Schema(format!("sequence entry {v} is out of range or repeated")));
            }
            order[v] = i + 1;
        }
        Ok(Labelling { order, checked_d: None, checked_beta: None })
    }

    pub fn identity(m: usize) -> Self {
        Labelling { order: (1..=m).collect(), checked_d: None, checked_beta: None }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    pub fn label(&self, v: usize) -> usize {
        self.order[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.order
    }

    /// Vertices sorted by label.
    pub fn sequence(&self) -> Vec<usize> {
        let mut seq = vec![0; self.order.len()];
        for (v, &l) in self.order.iter().enumerate() {
            seq[l - 1] = v;
        }
        seq
    }

    pub fn checked_d(&self) -> Option<usize> {
        self.checked_d
    }

    pub fn checked_beta(&self) -> Option<usize> {
        self.checked_beta
    }

    /// Runs [`verify_labelling`] and records the bounds if both hold.
    pub fn verified(mut self, h: &PartitionedGraph, d: usize, beta: usize) -> Result<Self> {
        let rep = verify_labelling(h, &self, d, beta);
        if !rep.degenerate_ok || !rep.local_ok {
            return Err(Error::PreconditionViolated(format!(
                "labelling is not {d}-degenerate {beta}-local (worst back-degree {}, worst stretch {})",
                rep.worst_back_degree, rep.worst_stretch
            )));
        }
        self.checked_d = Some(d);
        self.checked_beta = Some(beta);
        Ok(self)
    }
}

/// Result of [`verify_labelling`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabellingReport {
    pub degenerate_ok: bool,
    pub local_ok: bool,
    pub worst_back_degree: usize,
    pub worst_stretch: usize,
}

/// Checks that every vertex has at most `d` lower-labelled neighbours and that
/// every edge spans a label gap of at most `beta`.
pub fn verify_labelling(h: &PartitionedGraph, lab: &Labelling, d: usize, beta: usize) -> LabellingReport {
    assert_eq!(h.n(), lab.len(), "labelling size differs from the graph");
    let mut worst_back = 0;
    let mut worst_stretch = 0;
    for v in 0..h.n() {
        let lv = lab.label(v);
        let mut back = 0;
        for u in h.neighbors(v).iter() {
            let lu = lab.label(u);
            if lu < lv {
                back += 1;
                worst_stretch = worst_stretch.max(lv - lu);
            }
        }
        worst_back = worst_back.max(back);
    }
    LabellingReport {
        degenerate_ok: worst_back <= d,
        local_ok: worst_stretch <= beta,
        worst_back_degree: worst_back,
        worst_stretch,
    }
}

/// Min-degree peeling (lowest id on ties), emitted in reverse removal order.
///
/// Returns the ordering as a labelling and its maximum back-degree, which is
/// the degeneracy of the graph.
pub fn degeneracy_ordering(g: &PartitionedGraph) -> (Labelling, usize) {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut removal = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<usize> = None;
        for v in 0..n {
            if alive[v] && best.is_none_or(|b| deg[v] < deg[b]) {
                best = Some(v);
            }
        }
        let v = best.expect("a live vertex remains");
        alive[v] = false;
        removal.push(v);
        for u in g.neighbors(v).iter() {
            if alive[u] {
                deg[u] -= 1;
            }
        }
    }
    removal.reverse();
    let lab = Labelling::from_sequence(&removal).expect("peeling visits every vertex once");
    let worst = verify_labelling(g, &lab, usize::MAX, usize::MAX).worst_back_degree;
    (lab, worst)
}

/// JSON interchange document for graphs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphDoc {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labelling: Option<Vec<usize>>,
}

impl GraphDoc {
    pub fn from_graph(g: &PartitionedGraph, with_parts: bool, lab: Option<&Labelling>) -> Self {
        GraphDoc {
            n: g.n(),
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            parts: with_parts.then(|| g.parts().iter().map(|p| p.to_vec()).collect()),
            labelling: lab.map(|l| l.labels().to_vec()),
        }
    }

    /// Validates and converts. Edges must be listed once with `u < v`.
    pub fn into_graph(self, strict_parts: bool) -> Result<(PartitionedGraph, Option<Labelling>)> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for [u, v] in self.edges {
            if u >= v {
                if u == v {
                    return Err(Error::Schema(format!("self-loop at {u}")));
                }
                return Err(Error::Schema(format!("edge [{u},{v}] must be listed with u < v")));
            }
            edges.push((u, v));
        }
        let mut g = PartitionedGraph::from_edges(self.n, &edges)?;
        if let Some(parts) = self.parts {
            let sets = parts
                .into_iter()
                .map(|p| {
                    if let Some(&bad) = p.iter().find(|&&v| v >= self.n) {
                        return Err(Error::Schema(format!("part member {bad} outside [0,{})", self.n)));
                    }
                    Ok(VertexSet::from_iter(self.n, p))
                })
                .collect::<Result<Vec<_>>>()?;
            g = g.with_parts(sets, strict_parts)?;
        }
        let lab = self.labelling.map(Labelling::from_labels).transpose()?;
        Ok((g, lab))
    }
}

pub fn read_graph(path: &Path) -> Result<(PartitionedGraph, Option<Labelling>)> {
    let text = std::fs::read_to_string(path)?;
    let doc: GraphDoc = serde_json::from_str(&text)?;
    doc.into_graph(false)
}

pub fn write_graph(path: &Path, g: &PartitionedGraph, with_parts: bool, lab: Option<&Labelling>) -> Result<()> {
    let doc = GraphDoc::from_graph(g, with_parts, lab);
    crate::experiment::write_atomic(path, &serde_json::to_vec_pretty(&doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> PartitionedGraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        PartitionedGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn vertex_set_basics() {
        let mut s = VertexSet::new(130);
        assert!(s.insert(0));
        assert!(s.insert(129));
        assert!(!s.insert(129));
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_vec(), vec![0, 129]);
        assert_eq!(s.nth(1), Some(129));
        let f = VertexSet::full(130);
        assert_eq!(f.len(), 130);
        assert_eq!(f.difference(&s).len(), 128);
        assert!(s.is_subset(&f));
        assert!(s.remove(0));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn k33_common_neighbors() {
        let g = PartitionedGraph::complete_multipartite(&[3, 3]);
        let s = VertexSet::from_iter(6, [0]);
        assert_eq!(common_neighbors(&g, &s, g.part(1)).to_vec(), vec![3, 4, 5]);
        assert_eq!(common_neighbors(&g, &VertexSet::new(6), g.part(0)).to_vec(), vec![0, 1, 2]);
    }

    #[test]
    fn triangle_common_neighbors() {
        let g = PartitionedGraph::complete(3);
        let s = VertexSet::from_iter(3, [0, 1]);
        assert_eq!(common_neighbors(&g, &s, &VertexSet::full(3)).to_vec(), vec![2]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(PartitionedGraph::from_edges(3, &[(0, 0)]).is_err());
        assert!(PartitionedGraph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        let doc = GraphDoc { n: 3, edges: vec![[0, 1], [0, 1]], parts: None, labelling: None };
        assert!(doc.into_graph(false).is_err());
    }

    #[test]
    fn strict_parts_reject_internal_edges() {
        let g = PartitionedGraph::complete(4);
        let parts = consecutive_parts(4, &[2, 2]);
        assert!(g.with_parts(parts, true).is_err());
    }

    #[test]
    fn degeneracy_small_cases() {
        assert_eq!(degeneracy_ordering(&path(7)).1, 1);
        assert_eq!(degeneracy_ordering(&PartitionedGraph::complete(5)).1, 4);
        assert_eq!(degeneracy_ordering(&PartitionedGraph::empty(3)).1, 0);
    }

    #[test]
    fn verify_labelling_examples() {
        let p = path(4);
        let r = verify_labelling(&p, &Labelling::identity(4), 1, 1);
        assert!(r.degenerate_ok && r.local_ok);
        let k3 = PartitionedGraph::complete(3);
        let r = verify_labelling(&k3, &Labelling::identity(3), 1, 2);
        assert!(!r.degenerate_ok);
        assert_eq!(r.worst_back_degree, 2);
    }

    #[test]
    fn json_roundtrip() {
        let g = PartitionedGraph::complete_multipartite(&[2, 3]);
        let doc = GraphDoc::from_graph(&g, true, Some(&Labelling::identity(5)));
        let text = serde_json::to_string(&doc).unwrap();
        let back: GraphDoc = serde_json::from_str(&text).unwrap();
        let (h, lab) = back.into_graph(true).unwrap();
        assert_eq!(h.edges(), g.edges());
        assert_eq!(h.parts(), g.parts());
        assert_eq!(lab.unwrap(), Labelling::identity(5));
    }
}
