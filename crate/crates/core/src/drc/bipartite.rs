use rayon::prelude::*;

use super::props::draw;
use super::{
    b_from_t, best_index, evaluate, high_degree, mode_for, objective_budget, ratio, record, unmet, Claim, Ctx, DrcKind, DrcOutcome,
    DrcParams, PropertyRecord, RoundRecord, Schedule, SelectMode, SetExpr, SetName,
};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{common_neighbors_of, PartitionedGraph, VertexSet};
use crate::potentials::{potential, PotentialCount};
use crate::rng;

/// Two-round selection on the bipartite graph between `V1` and `V2`.
///
/// Round 1 draws `T1` from the vertices of `V1` with relative degree at least
/// `δ` and sets `B2 = V2 ∩ N(T1)`; round 2 draws `T2` from the high-degree part
/// of `A2 ∩ B2` and sets `B1 = V1 ∩ N(T2)`. The certificate holds
///
/// * `i`: `B1` is `(d,2β)`-common into `A2 ∩ B2`;
/// * `ii`: `B2` has `λ`-negligible `(s,d,2β)`-potential in `B1`;
/// * `iii`: `B2` has `½(δ/2)^{2s}|V2|` vertices of degree `≥ δ|V1|`;
/// * `iv`: `A2` is `(d,β)`-common into `A1 ∩ B1`, conditional on `iv.hyp`,
///   the `λ`-negligible `(s,d,β)`-potential of `A2` in `A1`;
/// * `v`: `A1` is `(d,β)`-common into `A2 ∩ B2`, which the extension step
///   needs for back-neighbours embedded before this block.
pub fn select_bipartite(
    g: &PartitionedGraph,
    v1: &VertexSet,
    v2: &VertexSet,
    a1: &VertexSet,
    a2: &VertexSet,
    params: &DrcParams,
    budget: &Budget,
) -> Result<DrcOutcome> {
    params.validate()?;
    if !a1.is_subset(v1) || !a2.is_subset(v2) || !v1.is_disjoint(v2) {
        return Err(Error::PreconditionViolated("need A1 ⊆ V1, A2 ⊆ V2 and V1, V2 disjoint".into()));
    }
    let s = params.s;
    let half = params.delta / 2.0;
    let v1p = high_degree(g, v1, v2, params.delta);
    let v2p = high_degree(g, v2, v1, params.delta);
    let a2p = a2.intersection(&high_degree(g, v2, v1, half));
    let need = 0.25 * half.powi(2 * s as i32) * v2.len() as f64;
    if (a2p.len() as f64) < need - 1e-9 {
        return Err(Error::PreconditionViolated(format!(
            "A2 has {} vertices of degree >= (delta/2)|V1|, need {need:.2}",
            a2p.len()
        )));
    }
    if v1p.is_empty() || a2p.is_empty() {
        return Err(Error::PreconditionViolated("no vertex of V1 has relative degree >= delta".into()));
    }

    let sel = Selector { g, v1, v2, a1, a2, v1p, v2p, a2p, params, ob: objective_budget(budget, params) };
    let v = vec![v1.clone(), v2.clone()];
    let a = vec![a1.clone(), a2.clone()];
    let finish = |t: Vec<Vec<usize>>, rounds: Vec<RoundRecord>, attempts: usize, value: Option<f64>| -> (DrcOutcome, Vec<String>) {
        let b = b_from_t(g, &v, &t);
        let ctx = Ctx { g, v: v.clone(), a: a.clone(), b: b.clone(), t: t.clone() };
        let cert = certify(&ctx, params, budget);
        let missing = unmet(&cert, &params.require);
        let out = DrcOutcome {
            kind: DrcKind::Bipartite,
            n: g.n(),
            params: params.clone(),
            v: v.iter().map(VertexSet::to_vec).collect(),
            a: a.iter().map(VertexSet::to_vec).collect(),
            t,
            b: b.iter().map(VertexSet::to_vec).collect(),
            certificate: cert,
            rounds,
            objective_value: value,
            attempts,
        };
        (out, missing)
    };

    match params.mode {
        SelectMode::Objective { candidates } => {
            let seed1 = rng::derive(params.seed, 1);
            let t1s: Vec<Vec<usize>> = (0..candidates).map(|i| draw(&sel.v1p, s, &mut rng::stream(seed1, i as u64))).collect();
            let mus: Vec<f64> = t1s.par_iter().enumerate().map(|(i, t1)| sel.mu(t1, rng::derive(seed1, 1000 + i as u64))).collect();
            let c1 = best_index(&mus, true);
            let t1 = t1s[c1].clone();
            let b2 = common_neighbors_of(g, t1.iter().copied(), v2);
            let pool = sel.a2p.intersection(&b2);
            if pool.is_empty() {
                return Err(Error::SelectionFailed { round: 1, attempts: candidates, failing: vec!["A2' ∩ B2 is empty".into()] });
            }
            let dens = sel.denominators(&b2);
            let seed2 = rng::derive(params.seed, 2);
            let t2s: Vec<Vec<usize>> = (0..candidates).map(|i| draw(&pool, s, &mut rng::stream(seed2, i as u64))).collect();
            let nus: Vec<f64> =
                t2s.par_iter().enumerate().map(|(i, t2)| sel.nu(&b2, t2, &dens, rng::derive(seed2, 1000 + i as u64))).collect();
            let c2 = best_index(&nus, false);
            let rounds = vec![
                RoundRecord { round: 1, maximize: true, values: mus, chosen: c1, bucket: None },
                RoundRecord { round: 2, maximize: false, values: nus.clone(), chosen: c2, bucket: None },
            ];
            let (out, missing) = finish(vec![t1, t2s[c2].clone()], rounds, 2 * candidates, Some(nus[c2]));
            // Objective mode only fails on explicitly required entries.
            if params.require.is_empty() || missing.is_empty() {
                Ok(out)
            } else {
                Err(Error::SelectionFailed { round: 2, attempts: 2 * candidates, failing: missing })
            }
        }
        SelectMode::Rejection { max_retries } => {
            let mut last = vec!["no candidate reached round 2".to_string()];
            for attempt in 0..max_retries {
                let seed = rng::derive(params.seed, 10 + attempt as u64);
                let t1 = draw(&sel.v1p, s, &mut rng::stream(seed, 1));
                let b2 = common_neighbors_of(g, t1.iter().copied(), v2);
                let pool = sel.a2p.intersection(&b2);
                let strong = high_degree(g, &b2, v1, params.delta).len() as f64;
                if pool.is_empty() || strong < 0.5 * half.powi(2 * s as i32) * v2.len() as f64 - 1e-9 {
                    last = vec!["iii".into()];
                    continue;
                }
                let t2 = draw(&pool, s, &mut rng::stream(seed, 2));
                let (out, missing) = finish(vec![t1, t2], Vec::new(), attempt + 1, None);
                if missing.is_empty() {
                    return Ok(out);
                }
                last = missing;
            }
            Err(Error::SelectionFailed { round: 2, attempts: max_retries, failing: last })
        }
    }
}

struct Selector<'a> {
    g: &'a PartitionedGraph,
    v1: &'a VertexSet,
    v2: &'a VertexSet,
    a1: &'a VertexSet,
    a2: &'a VertexSet,
    v1p: VertexSet,
    v2p: VertexSet,
    a2p: VertexSet,
    params: &'a DrcParams,
    ob: Budget,
}

/// Round-2 denominators, fixed once `T1` is chosen.
struct Denominators {
    eta_2s: f64,
    xi_s: f64,
}

impl Selector<'_> {
    fn pot(&self, x: &VertexSet, y: &VertexSet, p: usize, beta: usize, seed: u64) -> PotentialCount {
        let mode = mode_for(x.len(), p + self.params.d, &self.ob, seed);
        potential(self.g, x, y, p, self.params.d, beta, mode, &self.ob).expect("mode chosen within budget")
    }

    fn frac(pc: &PotentialCount) -> f64 {
        let space = pc.tuple_space();
        if space > 0.0 {
            pc.value() / space
        } else {
            0.0
        }
    }

    /// `|B2 ∩ A2′|·|B2′| − (δ/2)^{2s}|V2′|·|B2 ∩ A2′|` minus the potential term.
    fn mu(&self, t1: &[usize], seed: u64) -> f64 {
        let p = self.params;
        let b2 = common_neighbors_of(self.g, t1.iter().copied(), self.v2);
        let x = b2.intersection_len(&self.a2p) as f64;
        let y = b2.intersection_len(&self.v2p) as f64;
        let base = x * y - (p.delta / 2.0).powi(2 * p.s as i32) * self.v2p.len() as f64 * x;
        let eta = self.pot(&b2, self.v1, 2 * p.s, 2 * p.beta, seed);
        let pen = match p.schedule {
            Schedule::Paper => (self.g.n() as f64).powi(2) / p.lambda.powi(2 * p.s as i32 - 1) * eta.value(),
            Schedule::Practical => p.penalty * (self.v2.len() as f64).powi(2) * Self::frac(&eta),
        };
        base - pen
    }

    fn denominators(&self, b2: &VertexSet) -> Denominators {
        let p = self.params;
        let seed = rng::derive(p.seed, 3);
        Denominators {
            eta_2s: self.pot(b2, self.v1, 2 * p.s, 2 * p.beta, seed).value(),
            xi_s: self.pot(self.a2, self.a1, p.s, p.beta, seed ^ 1).value(),
        }
    }

    /// `η₀(B1, A2∩B2) + λ^s η_s(B2,B1)/η_{2s}(B2,V1) + λ^s ξ₀(A2, B1∩A1)/ξ_s(A2,A1)`.
    fn nu(&self, b2: &VertexSet, t2: &[usize], dens: &Denominators, seed: u64) -> f64 {
        let p = self.params;
        let b1 = common_neighbors_of(self.g, t2.iter().copied(), self.v1);
        let e0 = self.pot(&b1, &self.a2.intersection(b2), 0, 2 * p.beta, seed);
        let es = self.pot(b2, &b1, p.s, 2 * p.beta, seed ^ 1);
        let x0 = self.pot(self.a2, &b1.intersection(self.a1), 0, p.beta, seed ^ 2);
        match p.schedule {
            Schedule::Paper => {
                let ls = p.lambda.powi(p.s as i32);
                e0.value() + ls * ratio(es.value(), dens.eta_2s) + ls * ratio(x0.value(), dens.xi_s)
            }
            Schedule::Practical => Self::frac(&e0) + p.penalty * (Self::frac(&es) + Self::frac(&x0)),
        }
    }
}

fn certify(ctx: &Ctx, p: &DrcParams, budget: &Budget) -> Vec<PropertyRecord> {
    use SetName::{A, B, V};
    let (d, beta, s) = (p.d, p.beta, p.s);
    let need = 0.5 * (p.delta / 2.0).powi(2 * s as i32) * ctx.v[1].len() as f64;
    let claims: Vec<(&str, Claim)> = vec![
        ("iii", Claim::HighDegreeCount { x: SetExpr::one(B(1)), within: SetExpr::one(V(0)), frac: p.delta, need }),
        ("i", Claim::Common { x: SetExpr::one(B(0)), y: SetExpr::meet(vec![A(1), B(1)]), d, beta: 2 * beta }),
        ("v", Claim::Common { x: SetExpr::one(A(0)), y: SetExpr::meet(vec![A(1), B(1)]), d, beta }),
        ("iv", Claim::Common { x: SetExpr::one(A(1)), y: SetExpr::meet(vec![A(0), B(0)]), d, beta }),
        ("iv.hyp", Claim::Negligible { x: SetExpr::one(A(1)), y: SetExpr::one(A(0)), p: s, d, beta, lambda: p.lambda }),
        ("ii", Claim::Negligible { x: SetExpr::one(B(1)), y: SetExpr::one(B(0)), p: s, d, beta: 2 * beta, lambda: p.lambda }),
    ];
    claims
        .into_iter()
        .enumerate()
        .map(|(k, (id, claim))| {
            let ev = evaluate(ctx, &claim, budget, rng::derive(p.seed, 100 + k as u64));
            let mut rec = record(id, claim, ev);
            if id == "iv" {
                rec.conditional_on = Some("iv.hyp".into());
            }
            rec
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drc::verify_certificate;
    use crate::graph::consecutive_parts;
    use rand::Rng as _;

    fn random_bip(n: usize, p: f64, seed: u64) -> PartitionedGraph {
        let mut r = rng::stream(seed, 0);
        let mut e = Vec::new();
        for u in 0..n {
            for v in n..2 * n {
                if r.gen_bool(p) {
                    e.push((u, v));
                }
            }
        }
        PartitionedGraph::from_edges(2 * n, &e).unwrap().with_parts(consecutive_parts(2 * n, &[n, n]), true).unwrap()
    }

    #[test]
    fn complete_host_passes_everything() {
        let g = PartitionedGraph::complete_multipartite(&[20, 20]);
        let (v1, v2) = (g.part(0).clone(), g.part(1).clone());
        for mode in [SelectMode::Objective { candidates: 3 }, SelectMode::Rejection { max_retries: 2 }] {
            let p = DrcParams::practical(2, 3, 0.5).with_mode(mode);
            let out = select_bipartite(&g, &v1, &v2, &v1, &v2, &p, &Budget::default()).unwrap();
            assert_eq!(out.b_sets(), vec![v1.clone(), v2.clone()]);
            assert!(out.failing().is_empty(), "{:?}", out.certificate);
            assert!(verify_certificate(&g, &out, &Budget::default()).unwrap().is_empty());
        }
    }

    #[test]
    fn random_host_certificate_recomputes() {
        let g = random_bip(120, 0.5, 3);
        let (v1, v2) = (g.part(0).clone(), g.part(1).clone());
        let p = DrcParams::practical(2, 2, 0.4).with_seed(7);
        let out = select_bipartite(&g, &v1, &v2, &v1, &v2, &p, &Budget::default()).unwrap();
        assert!(verify_certificate(&g, &out, &Budget::default()).unwrap().is_empty());
        let r1 = &out.rounds[0];
        assert!(r1.values.iter().all(|&x| x <= r1.values[r1.chosen]));
        let r2 = &out.rounds[1];
        assert!(r2.values.iter().all(|&x| x >= r2.values[r2.chosen]));
        let again = select_bipartite(&g, &v1, &v2, &v1, &v2, &p, &Budget::default()).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn tampered_b_is_detected() {
        let g = random_bip(40, 0.5, 1);
        let (v1, v2) = (g.part(0).clone(), g.part(1).clone());
        let p = DrcParams::practical(1, 1, 0.3);
        let mut out = select_bipartite(&g, &v1, &v2, &v1, &v2, &p, &Budget::default()).unwrap();
        out.b[0].pop();
        assert!(!verify_certificate(&g, &out, &Budget::default()).unwrap().is_empty());
    }

    #[test]
    fn missing_high_degree_vertices_is_a_precondition() {
        let g = PartitionedGraph::empty(20).with_parts(consecutive_parts(20, &[10, 10]), true).unwrap();
        let p = DrcParams::practical(1, 1, 0.5);
        let err = select_bipartite(&g, g.part(0), g.part(1), g.part(0), g.part(1), &p, &Budget::default()).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolated(_)));
    }
}
