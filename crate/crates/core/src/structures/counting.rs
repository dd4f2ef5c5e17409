use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{common_neighbors_of, PartitionedGraph, VertexSet};
use crate::potentials::{crossing_adjacent, is_heavy_clique, CrossingFamily, FamilyTotal, HeavyRule, Pattern};

/// Copies of `K_r` across `parts` that are adjacent to the seed clique `k`
/// and `δ^r`-heavy, found one vertex at a time.
///
/// With `W_i = V_i ∩ N(k_{−i})`, step `t` picks `w_t` in
/// `W_t ∩ N(w_1) ∩ … ∩ N(w_{t−1})` such that every
/// `W_i^{(t)} = W_i ∩ ⋂_{j ≤ t, j ≠ i} N(w_j)` keeps at least `δ^t |W_i|`
/// vertices. All such sequences are enumerated; a completed clique is kept
/// once it passes the heaviness and adjacency re-checks.
pub fn find_adjacent_heavy_cliques(
    g: &PartitionedGraph,
    parts: &[VertexSet],
    k: &[usize],
    delta_prime: f64,
    delta: f64,
    budget: &Budget,
) -> Result<CrossingFamily> {
    let r = parts.len();
    if r < 2 || k.len() != r {
        return Err(Error::PreconditionViolated(format!("need r >= 2 parts and a seed with one vertex per part, got {r}/{}", k.len())));
    }
    if k.iter().zip(parts).any(|(&v, p)| !p.contains(v)) || !crate::potentials::is_pattern_copy(g, r, k) {
        return Err(Error::PreconditionViolated("seed is not a clique across the parts".into()));
    }
    if !is_heavy_clique(g, k, parts, delta_prime) {
        return Err(Error::PreconditionViolated(format!("seed clique is not {delta_prime}-heavy")));
    }
    let w: Vec<VertexSet> = (0..r)
        .map(|i| common_neighbors_of(g, k.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v), &parts[i]))
        .collect();
    let cost: f64 = w.iter().map(|p| p.len() as f64).product();
    if cost > budget.tuples {
        return Err(Error::BudgetExceeded { what: "adjacent heavy clique search".into(), needed: cost, cap: budget.tuples });
    }
    let heavy = delta.powi(r as i32);
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(r);
    step(g, &w, delta, &mut chosen, w.clone(), &mut |c: &[usize]| {
        if is_heavy_clique(g, c, parts, heavy) && crossing_adjacent(g, r, c, k) {
            out.extend_from_slice(c);
        }
    });
    let count = (out.len() / r) as u64;
    let rule = HeavyRule { reference: parts.to_vec(), delta: heavy };
    Ok(CrossingFamily::new(Pattern::Clique, r, parts.to_vec(), out, FamilyTotal::Exact { count }).with_rule(Some(rule)))
}

/// `cur[i] = W_i^{(t)}` for the `t = chosen.len()` vertices chosen so far.
fn step(g: &PartitionedGraph, w: &[VertexSet], delta: f64, chosen: &mut Vec<usize>, cur: Vec<VertexSet>, emit: &mut dyn FnMut(&[usize])) {
    let t = chosen.len();
    if t == w.len() {
        emit(chosen);
        return;
    }
    let floor = delta.powi(t as i32 + 1);
    for v in cur[t].iter() {
        let next: Vec<VertexSet> =
            cur.iter().enumerate().map(|(i, c)| if i == t { c.clone() } else { c.intersection(g.neighbors(v)) }).collect();
        if next.iter().zip(w).enumerate().any(|(i, (c, wi))| i != t && (c.len() as f64) + 1e-9 < floor * wi.len() as f64) {
            continue;
        }
        chosen.push(v);
        step(g, w, delta, chosen, next, emit);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_host_gives_every_clique() {
        let g = PartitionedGraph::complete_multipartite(&[3, 4, 2]);
        let parts = g.parts().to_vec();
        let fam = find_adjacent_heavy_cliques(&g, &parts, &[0, 3, 7], 0.5, 0.5, &Budget::default()).unwrap();
        assert_eq!(fam.len(), 3 * 4 * 2);
    }

    #[test]
    fn light_seed_is_rejected() {
        // Vertex 0 sees only one vertex of part 1.
        let g0 = PartitionedGraph::complete_multipartite(&[2, 4]);
        let edges: Vec<_> = g0.edges().into_iter().filter(|&(u, v)| !(u == 0 && v > 2)).collect();
        let g = PartitionedGraph::from_edges(6, &edges).unwrap().with_parts(g0.parts().to_vec(), true).unwrap();
        let err = find_adjacent_heavy_cliques(&g, g.parts(), &[0, 2], 0.5, 0.5, &Budget::default()).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolated(_)));
    }
}
