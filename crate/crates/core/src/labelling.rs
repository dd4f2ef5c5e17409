//! Relabelling a local labelling of a degenerate graph so that it is both
//! degenerate (with constant factor 5) and still local (up to a log factor).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{degeneracy_ordering, verify_labelling, Labelling, PartitionedGraph};

/// One step of the relabelling: at step `t` vertex `vertex` receives label `m - t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelabelStep {
    pub t: usize,
    pub vertex: usize,
    /// Number of σ-preceding neighbours among the vertices not yet labelled.
    pub back_degree: usize,
    pub sigma: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelabelTrace {
    pub steps: Vec<RelabelStep>,
    /// `σ(v) − π(v)` per vertex. Diagnostic only; never asserted.
    pub claim_check: Vec<i64>,
}

impl RelabelTrace {
    /// Largest and smallest entries of `claim_check`.
    pub fn claim_range(&self) -> (i64, i64) {
        let lo = self.claim_check.iter().copied().min().unwrap_or(0);
        let hi = self.claim_check.iter().copied().max().unwrap_or(0);
        (lo, hi)
    }
}

/// `⌈β·log₂(4β)⌉`, the locality guaranteed for the output of
/// [`relabel_degenerate_local`]. Equals 2 for `β = 1`.
pub fn locality_bound(beta: usize) -> usize {
    if beta == 0 {
        return 0;
    }
    let b = beta as f64;
    let x = b * (4.0 * b).log2();
    // Guard against 2.0000000001-style float noise on exact powers of two.
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Builds π from σ: for `t = 0..m`, among the unlabelled vertices take the one
/// with the largest σ-label whose number of σ-preceding unlabelled neighbours
/// is at most `5d`, and give it label `m − t`.
///
/// The result is `5d`-degenerate by the selection rule and
/// `⌈β log₂(4β)⌉`-local whenever σ is β-local and `H` is d-degenerate. The
/// returned labelling carries those bounds as verified metadata.
pub fn relabel_degenerate_local(
    h: &PartitionedGraph,
    sigma: &Labelling,
    d: usize,
    beta: usize,
) -> Result<(Labelling, RelabelTrace)> {
    let m = h.n();
    if sigma.len() != m {
        return Err(Error::PreconditionViolated(format!("labelling has {} entries for {m} vertices", sigma.len())));
    }
    let rep = verify_labelling(h, sigma, usize::MAX, beta);
    if !rep.local_ok {
        return Err(Error::PreconditionViolated(format!(
            "sigma is not {beta}-local (worst stretch {})",
            rep.worst_stretch
        )));
    }
    let (_, degeneracy) = degeneracy_ordering(h);
    if degeneracy > d {
        return Err(Error::PreconditionViolated(format!("H has degeneracy {degeneracy} > d = {d}")));
    }

    let seq = sigma.sequence();
    // back[v] = neighbours u still unlabelled with σ(u) < σ(v).
    let mut back: Vec<usize> = (0..m)
        .map(|v| h.neighbors(v).iter().filter(|&u| sigma.label(u) < sigma.label(v)).count())
        .collect();
    let mut alive = vec![true; m];
    let mut pi = vec![0usize; m];
    let mut steps = Vec::with_capacity(m);
    let cap = 5 * d;
    // Every σ-position above `top` is already labelled.
    let mut top = m;
    for t in 0..m {
        while top > 0 && !alive[seq[top - 1]] {
            top -= 1;
        }
        let v = (0..top)
            .rev()
            .map(|i| seq[i])
            .find(|&v| alive[v] && back[v] <= cap)
            .ok_or_else(|| Error::InternalInvariantBroken(format!("no vertex with at most {cap} back-neighbours at step {t}")))?;
        steps.push(RelabelStep { t, vertex: v, back_degree: back[v], sigma: sigma.label(v) });
        pi[v] = m - t;
        alive[v] = false;
        let sv = sigma.label(v);
        for w in h.neighbors(v).iter() {
            if alive[w] && sigma.label(w) > sv {
                back[w] -= 1;
            }
        }
    }
    let claim_check = (0..m).map(|v| sigma.label(v) as i64 - pi[v] as i64).collect();
    let pi = Labelling::from_labels(pi)?;
    let pi = pi
        .verified(h, cap, locality_bound(beta))
        .map_err(|e| Error::InternalInvariantBroken(format!("relabelled output failed verification: {e}")))?;
    Ok((pi, RelabelTrace { steps, claim_check }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locality_bound_values() {
        assert_eq!(locality_bound(1), 2);
        assert_eq!(locality_bound(2), 6);
        assert_eq!(locality_bound(4), 16);
        assert_eq!(locality_bound(3), 11); // 3·log₂12 ≈ 10.75
        assert_eq!(locality_bound(8), 40);
    }

    #[test]
    fn single_edge() {
        let h = PartitionedGraph::from_edges(2, &[(0, 1)]).unwrap();
        let (pi, trace) = relabel_degenerate_local(&h, &Labelling::identity(2), 1, 1).unwrap();
        assert_eq!(trace.steps.len(), 2);
        let r = verify_labelling(&h, &pi, 5, 2);
        assert!(r.degenerate_ok && r.local_ok);
    }

    #[test]
    fn degenerate_input_is_kept() {
        let edges: Vec<_> = (1..10).map(|i| (i - 1, i)).collect();
        let h = PartitionedGraph::from_edges(10, &edges).unwrap();
        let (pi, _) = relabel_degenerate_local(&h, &Labelling::identity(10), 1, 1).unwrap();
        assert_eq!(pi.labels(), Labelling::identity(10).labels());
        assert_eq!(pi.checked_d(), Some(5));
        assert_eq!(pi.checked_beta(), Some(2));
    }

    #[test]
    fn rejects_nonlocal_sigma() {
        let h = PartitionedGraph::from_edges(3, &[(0, 2)]).unwrap();
        assert!(matches!(
            relabel_degenerate_local(&h, &Labelling::identity(3), 1, 1),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn rejects_too_small_d() {
        let h = PartitionedGraph::complete(4);
        assert!(relabel_degenerate_local(&h, &Labelling::identity(4), 2, 3).is_err());
    }
}
