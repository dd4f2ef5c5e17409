use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{verify_labelling, Labelling, PartitionedGraph};
use crate::rng;

/// Output of [`recolor`]: a proper colouring by `0..=r`, where `r` is the
/// buffer colour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recoloring {
    pub coloring: Vec<usize>,
    /// Colour-value transpositions applied, in order.
    pub transpositions: Vec<(usize, usize)>,
    pub beta: usize,
}

/// Adjacent transpositions `τ_1, …, τ_t` (bubble-sort order, `t ≤ C(r,2)`)
/// such that applying them in turn to colour values sends colour `σ(j)` to `j`.
pub fn transpositions_for(perm: &[usize]) -> Vec<(usize, usize)> {
    // Bubble-sorting `perm` swaps adjacent positions; replaying those swaps
    // backwards turns the identity arrangement into `perm`.
    let mut a = perm.to_vec();
    let mut swaps = Vec::new();
    for pass in 0..a.len() {
        for i in 0..a.len().saturating_sub(1 + pass) {
            if a[i] > a[i + 1] {
                a.swap(i, i + 1);
                swaps.push((i, i + 1));
            }
        }
    }
    swaps.reverse();
    swaps
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&p| p < perm.len() && !std::mem::replace(&mut seen[p], true))
}

fn proper(h: &PartitionedGraph, coloring: &[usize]) -> Option<(usize, usize)> {
    h.edges().into_iter().find(|&(u, v)| coloring[u] == coloring[v])
}

fn locality(h: &PartitionedGraph, lab: &Labelling) -> usize {
    lab.checked_beta().unwrap_or_else(|| verify_labelling(h, lab, usize::MAX, usize::MAX).worst_stretch)
}

/// Applies the swap steps to colours indexed by position `0..m` (label − 1).
/// `r` is the buffer colour.
fn recolor_labels(cols: &mut [usize], swaps: &[(usize, usize)], beta: usize, r: usize) {
    let m = cols.len();
    for (step, &(a, b)) in swaps.iter().enumerate() {
        let i = step + 1;
        let old = cols.to_vec();
        let within = |l: usize, lo: usize, hi: usize| l > lo && l <= hi;
        for (pos, c) in cols.iter_mut().enumerate() {
            let l = pos + 1;
            if old[pos] == a {
                if within(l, 3 * i * beta, (3 * i + 2) * beta)
                    || within(l, m.saturating_sub((3 * i + 2) * beta), m.saturating_sub(3 * i * beta))
                {
                    *c = r;
                } else if within(l, (3 * i + 2) * beta, m.saturating_sub((3 * i + 2) * beta)) {
                    *c = b;
                }
            } else if old[pos] == b && within(l, (3 * i + 1) * beta, m.saturating_sub((3 * i + 1) * beta)) {
                *c = a;
            }
        }
    }
}

/// Recolours a properly `r`-coloured `H` with a `β`-local labelling so that,
/// away from both ends, colour `j` takes over the vertices of colour
/// `perm[j]`, using a sparse buffer colour `r`.
///
/// Requires `εm ≥ 3r²β`. The first and last `β` labels keep their colours
/// and the buffer colour has at most `2(3t+2)β` vertices, `t` the number of
/// transpositions.
pub fn recolor(h: &PartitionedGraph, sigma: &Labelling, coloring: &[usize], perm: &[usize], eps: f64) -> Result<Recoloring> {
    let m = h.n();
    let r = perm.len();
    if sigma.len() != m || coloring.len() != m {
        return Err(Error::PreconditionViolated("labelling or colouring size differs from H".into()));
    }
    if r == 0 || !is_permutation(perm) {
        return Err(Error::PreconditionViolated("perm is not a permutation of 0..r".into()));
    }
    if let Some(&c) = coloring.iter().find(|&&c| c >= r) {
        return Err(Error::PreconditionViolated(format!("colour {c} out of range for r = {r}")));
    }
    if let Some((u, v)) = proper(h, coloring) {
        return Err(Error::PreconditionViolated(format!("colouring is not proper at edge {u}-{v}")));
    }
    let beta = locality(h, sigma).max(1);
    if r >= 2 && eps * (m as f64) < (3 * r * r * beta) as f64 {
        return Err(Error::PreconditionViolated(format!("eps*m = {:.1} is below 3r^2*beta = {}", eps * m as f64, 3 * r * r * beta)));
    }
    let swaps = transpositions_for(perm);
    let seq = sigma.sequence();
    let mut cols: Vec<usize> = seq.iter().map(|&v| coloring[v]).collect();
    recolor_labels(&mut cols, &swaps, beta, r);
    let mut out = vec![0; m];
    for (pos, &v) in seq.iter().enumerate() {
        out[v] = cols[pos];
    }
    if let Some((u, v)) = proper(h, &out) {
        return Err(Error::InternalInvariantBroken(format!("recolouring broke properness at {u}-{v}")));
    }
    Ok(Recoloring { coloring: out, transpositions: swaps, beta })
}

/// Block colouring of `H` by `0..=r` (colour `r` is the buffer) together with
/// the checked block conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockColoring {
    pub coloring: Vec<usize>,
    pub r: usize,
    pub k: usize,
    /// Labels per block; the last block may be shorter.
    pub xi: usize,
    /// Locality of the labelling.
    pub beta: usize,
    /// Length of the sub-intervals permuted independently.
    pub sub_len: usize,
    /// `counts[i][j] = |W_{i,j}|`.
    pub counts: Vec<Vec<usize>>,
    /// Permutation used for each full sub-interval of each block.
    pub perms: Vec<Vec<Vec<usize>>>,
    /// Sampling rounds used per block.
    pub trials_used: Vec<usize>,
    pub proper: bool,
    /// `|W_{i,j}| ≤ (1+ε)|I_i|/r` for ordinary colours.
    pub sizes_ok: bool,
    /// `|W_{i,r}| ≤ ε|I_i|/r`.
    pub buffer_small: bool,
    /// No buffer vertex within `β` labels of a block boundary.
    pub buffer_ok: bool,
    pub notes: Vec<String>,
}

impl BlockColoring {
    pub fn block_of_label(&self, label: usize) -> usize {
        (label - 1) / self.xi
    }
}

/// Sub-interval length that makes the per-interval recolouring deviation at
/// most `ε/(2r)` of the interval and satisfies the recolouring precondition
/// at `ε/4`.
pub fn sub_interval_len(r: usize, beta: usize, eps: f64) -> usize {
    let t = r * r.saturating_sub(1) / 2;
    let dev = (4 * (3 * t + 2) * r * beta) as f64 / eps;
    let pre = (12 * r * r * beta) as f64 / eps;
    dev.max(pre).ceil() as usize
}

/// Splits `H` (in label order) into `k` blocks of `⌈m/k⌉` labels and
/// recolours every full sub-interval of each block with a random permutation,
/// retrying until every colour's share of the block is at most
/// `(1+ε/2)|I|/r`. Sub-intervals shorter than [`sub_interval_len`] keep the
/// identity permutation.
#[allow(clippy::too_many_arguments)]
pub fn balanced_recolor(
    h: &PartitionedGraph,
    lab: &Labelling,
    coloring: &[usize],
    k: usize,
    eps: f64,
    seed: u64,
    trials: usize,
) -> Result<BlockColoring> {
    let m = h.n();
    if lab.len() != m || coloring.len() != m {
        return Err(Error::PreconditionViolated("labelling or colouring size differs from H".into()));
    }
    if k == 0 || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::PreconditionViolated("need k >= 1 and 0 < eps < 1".into()));
    }
    if let Some((u, v)) = proper(h, coloring) {
        return Err(Error::PreconditionViolated(format!("colouring is not proper at edge {u}-{v}")));
    }
    let r = coloring.iter().copied().max().map_or(1, |c| c + 1);
    let beta = locality(h, lab).max(1);
    let xi = m.div_ceil(k).max(1);
    let sub = sub_interval_len(r, beta, eps);
    let seq = lab.sequence();
    let mut cols: Vec<usize> = seq.iter().map(|&v| coloring[v]).collect();
    let mut notes = Vec::new();
    if !m.is_multiple_of(k) {
        notes.push(format!("m = {m} is not a multiple of k = {k}; the last block has {} labels", m - (k - 1) * xi));
    }
    let mut perms = Vec::new();
    let mut trials_used = Vec::new();
    let mut counts = Vec::new();
    let nblocks = m.div_ceil(xi);
    if nblocks < k {
        notes.push(format!("only {nblocks} nonempty blocks"));
    }
    for b in 0..nblocks {
        let (start, end) = (b * xi, ((b + 1) * xi).min(m));
        let len = end - start;
        let intervals: Vec<(usize, usize)> = (start..end).step_by(sub.max(1)).map(|lo| (lo, (lo + sub).min(end))).collect();
        let full: Vec<bool> = intervals.iter().map(|&(lo, hi)| r >= 2 && hi - lo >= sub).collect();
        if !full.iter().any(|&f| f) && r >= 2 {
            notes.push(format!("block {b}: {len} labels is shorter than one sub-interval ({sub}); identity colouring kept"));
        }
        let per: Vec<Vec<usize>> = intervals
            .iter()
            .map(|&(lo, hi)| {
                let mut c = vec![0; r];
                for &x in &cols[lo..hi] {
                    c[x] += 1;
                }
                c
            })
            .collect();
        let bound = (1.0 + eps / 2.0) * len as f64 / r as f64;
        let share = |sig: &[Vec<usize>]| -> usize {
            (0..r).map(|j| per.iter().zip(sig).map(|(c, s)| c[s[j]]).sum::<usize>()).max().unwrap_or(0)
        };
        let mut best: Option<(usize, Vec<Vec<usize>>)> = None;
        let mut used = 0;
        let mut rg = rng::stream(seed, b as u64);
        for _ in 0..trials {
            used += 1;
            let sig: Vec<Vec<usize>> = full
                .iter()
                .map(|&f| {
                    let mut p: Vec<usize> = (0..r).collect();
                    if f {
                        p.shuffle(&mut rg);
                    }
                    p
                })
                .collect();
            let worst = share(&sig);
            if best.as_ref().is_none_or(|(w, _)| worst < *w) {
                best = Some((worst, sig));
            }
            if best.as_ref().is_some_and(|(w, _)| *w as f64 <= bound + 1e-9) {
                break;
            }
        }
        let identity: Vec<Vec<usize>> = vec![(0..r).collect(); intervals.len()];
        match best {
            Some((w, sig)) if w as f64 <= bound + 1e-9 => {
                for ((&(lo, hi), s), &f) in intervals.iter().zip(&sig).zip(&full) {
                    if f {
                        recolor_labels(&mut cols[lo..hi], &transpositions_for(s), beta, r);
                    }
                }
                perms.push(sig);
            }
            other => {
                let best_worst = other.map_or_else(|| share(&identity), |(w, _)| w);
                return Err(Error::BalancingFailed { trials, best_worst, bound });
            }
        }
        trials_used.push(used);
        let mut c = vec![0; r + 1];
        for &x in &cols[start..end] {
            c[x] += 1;
        }
        counts.push(c);
    }

    let mut out = vec![0; m];
    for (pos, &v) in seq.iter().enumerate() {
        out[v] = cols[pos];
    }
    let is_proper = proper(h, &out).is_none();
    let block_len = |b: usize| (((b + 1) * xi).min(m) - b * xi) as f64;
    let sizes_ok = counts.iter().enumerate().all(|(b, c)| c[..r].iter().all(|&x| x as f64 <= (1.0 + eps) * block_len(b) / r as f64 + 1e-9));
    let buffer_small = counts.iter().enumerate().all(|(b, c)| c[r] as f64 <= eps * block_len(b) / r as f64 + 1e-9);
    let buffer_ok = cols.iter().enumerate().all(|(pos, &c)| {
        let l = pos + 1;
        let b = pos / xi;
        let (lo, hi) = (b * xi, ((b + 1) * xi).min(m));
        c != r || (l > lo + beta && l + beta <= hi)
    });
    if !(is_proper && sizes_ok && buffer_small && buffer_ok) {
        return Err(Error::InternalInvariantBroken(format!(
            "block colouring checks failed: proper {is_proper}, sizes {sizes_ok}, buffer size {buffer_small}, buffer placement {buffer_ok}"
        )));
    }
    Ok(BlockColoring {
        coloring: out,
        r,
        k,
        xi,
        beta,
        sub_len: sub,
        counts,
        perms,
        trials_used,
        proper: is_proper,
        sizes_ok,
        buffer_small,
        buffer_ok,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(m: usize) -> (PartitionedGraph, Vec<usize>) {
        let e: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        (PartitionedGraph::from_edges(m, &e).unwrap(), (0..m).map(|i| i % 2).collect())
    }

    fn apply(swaps: &[(usize, usize)], c: usize) -> usize {
        swaps.iter().fold(c, |c, &(a, b)| if c == a { b } else if c == b { a } else { c })
    }

    #[test]
    fn transpositions_invert_the_permutation() {
        for perm in [vec![0, 1, 2], vec![2, 0, 1], vec![1, 2, 0], vec![2, 1, 0], vec![3, 1, 0, 2]] {
            let s = transpositions_for(&perm);
            assert!(s.len() <= perm.len() * (perm.len() - 1) / 2);
            for (j, &p) in perm.iter().enumerate() {
                assert_eq!(apply(&s, p), j);
            }
        }
    }

    #[test]
    fn identity_perm_changes_nothing() {
        let (h, c) = path(60);
        let out = recolor(&h, &Labelling::identity(60), &c, &[0, 1], 0.5).unwrap();
        assert_eq!(out.coloring, c);
    }

    #[test]
    fn swap_on_path() {
        let m = 80;
        let (h, c) = path(m);
        let out = recolor(&h, &Labelling::identity(m), &c, &[1, 0], 0.5).unwrap();
        assert!(proper(&h, &out.coloring).is_none());
        assert_eq!(out.coloring[0], c[0]);
        assert_eq!(out.coloring[m - 1], c[m - 1]);
        // The middle takes the swapped colours.
        assert_eq!(out.coloring[m / 2], 1 - c[m / 2]);
        let buffered = out.coloring.iter().filter(|&&x| x == 2).count();
        assert!(buffered <= 2 * (3 + 2));
    }

    #[test]
    fn too_short_is_rejected() {
        let (h, c) = path(10);
        assert!(matches!(recolor(&h, &Labelling::identity(10), &c, &[1, 0], 0.5), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn zero_trials_fail() {
        let (h, c) = path(100);
        let err = balanced_recolor(&h, &Labelling::identity(100), &c, 2, 0.5, 1, 0).unwrap_err();
        assert!(matches!(err, Error::BalancingFailed { trials: 0, .. }));
    }

    #[test]
    fn single_colour_is_balanced() {
        let h = PartitionedGraph::empty(30);
        let out = balanced_recolor(&h, &Labelling::identity(30), &[0; 30], 3, 0.2, 1, 1).unwrap();
        assert_eq!(out.r, 1);
        assert!(out.coloring.iter().all(|&c| c == 0));
    }
}
