use rand::Rng as _;
use rayon::prelude::*;

use super::props::draw;
use super::{
    b_from_t, best_index, estimate_record, evaluate, mode_for, objective_budget, ratio, record, unmet, Checked, Claim, Ctx, DrcKind,
    DrcOutcome, DrcParams, PropertyRecord, RoundRecord, Schedule, SelectMode, Tuple,
};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{common_neighbors_of, PartitionedGraph, VertexSet};
use crate::potentials::{heavy_wrt_family, is_pattern_copy, potential, AdjacencyIndex, CrossingFamily, Pattern, PotentialCount};
use crate::rng;

/// `r`-round selection over crossing families.
///
/// Round `c` (0-based) samples the current clique family `K_c` on parts
/// `c..r`, buckets its members dyadically by their number of adjacent
/// members of `F(B_c)` relative to `θ_c|F|`, keeps the densest bucket `i₀`,
/// and draws `T_c` from `A_{c,c}`. `K_{c+1}` consists of the `(r−c−1)`-cliques
/// `q` with `{x} ∪ q` in the kept bucket for every `x ∈ T_c`; membership is
/// decided by replaying this chain down to `K`.
///
/// Families are handled through uniform samples of `family_samples`
/// members, and `|F|` is the size of the given `F` sample. The certificate
/// holds
///
/// * `a`: the `T_i` are pairwise completely joined;
/// * `i.p` for `p ≤ (r−1)s`: `B` has `λ`-negligible `(p,d,2β)`-potential;
/// * `ii`: share of `F` crossing `B` against `θ_r`;
/// * `iii`: `T` is `(d,β)`-typical for `A`, conditional on `iii.hyp`, the
///   `λ`-negligible `((r−1)s,d,β)`-potential of `A`;
/// * per round `b.c`, `d.c` (family size and density estimates) and
///   `c.c`, `e.c` (potential terms of the chosen candidate).
pub fn select_rpartite(
    g: &PartitionedGraph,
    v: &[VertexSet],
    a: &[VertexSet],
    k: &CrossingFamily,
    f: &CrossingFamily,
    params: &DrcParams,
    budget: &Budget,
) -> Result<DrcOutcome> {
    params.validate()?;
    let r = v.len();
    if r < 2 || a.len() != r || k.r != r || f.r != r || k.pattern != Pattern::Clique {
        return Err(Error::PreconditionViolated(format!("need r >= 2 parts with K a K_r family on them (r = {r})")));
    }
    if a.iter().zip(v).any(|(ai, vi)| !ai.is_subset(vi)) {
        return Err(Error::PreconditionViolated("need A_i ⊆ V_i".into()));
    }
    let ka = k.restricted(a);
    if ka.is_empty() {
        return Err(Error::PreconditionViolated("K(A) is empty".into()));
    }
    if f.is_empty() {
        return Err(Error::PreconditionViolated("F is empty".into()));
    }
    let space: f64 = v.iter().map(|x| x.len() as f64).product();
    if ka.total_value() < params.delta2 * space {
        return Err(Error::PreconditionViolated(format!(
            "|K(A)| = {:.3e} below delta2 * prod |V_i| = {:.3e}",
            ka.total_value(),
            params.delta2 * space
        )));
    }
    // Uniform subsample of K(A) for the first round.
    let want = params.family_samples.max(1) * 4;
    let sample: Vec<Vec<usize>> = if ka.len() <= want {
        ka.iter().map(<[usize]>::to_vec).collect()
    } else {
        let mut rg = rng::stream(rng::derive(params.seed, 7), 0);
        (0..want).map(|_| ka.member(rg.gen_range(0..ka.len())).to_vec()).collect()
    };
    let heavy = sample.iter().filter(|m| heavy_wrt_family(g, m, f, params.theta)).count() as f64 / sample.len() as f64;
    let hyp = estimate_record("hyp.heavy", "share of sampled K members that are theta-heavy with respect to F", heavy, Some(1.0), None);

    let eng = Engine { g, r, v, a, k, f, idx: AdjacencyIndex::new(g, f), params, ob: objective_budget(budget, params), k_total: ka.total_value() };
    let attempts = match params.mode {
        SelectMode::Objective { .. } => 1,
        SelectMode::Rejection { max_retries } => max_retries,
    };
    let mut last = (0, vec!["no attempt".to_string()]);
    for attempt in 0..attempts {
        match eng.run(&sample, attempt as u64) {
            Err(RoundFail { round, failing }) => last = (round, failing),
            Ok(run) => {
                let b = b_from_t(g, v, &run.t);
                debug_assert_eq!(b, run.b);
                let ctx = Ctx { g, v: v.to_vec(), a: a.to_vec(), b: b.clone(), t: run.t.clone() };
                let mut cert = vec![hyp.clone()];
                cert.extend(run.records);
                cert.push(estimate_record("ii", "share of the F sample crossing B", run.f_share, Some(eng.theta(r)), None));
                cert.extend(certify(&ctx, params, budget));
                let missing = unmet(&cert, &params.require);
                let accept = missing.is_empty() || (attempts == 1 && params.require.is_empty());
                if accept {
                    return Ok(DrcOutcome {
                        kind: DrcKind::Rpartite,
                        n: g.n(),
                        params: params.clone(),
                        v: v.iter().map(VertexSet::to_vec).collect(),
                        a: a.iter().map(VertexSet::to_vec).collect(),
                        t: run.t,
                        b: b.iter().map(VertexSet::to_vec).collect(),
                        certificate: cert,
                        rounds: run.rounds,
                        objective_value: run.last_value,
                        attempts: attempt + 1,
                    });
                }
                last = (r, missing);
            }
        }
    }
    Err(Error::SelectionFailed { round: last.0, attempts, failing: last.1 })
}

fn certify(ctx: &Ctx, p: &DrcParams, budget: &Budget) -> Vec<PropertyRecord> {
    let r = ctx.v.len();
    let (d, beta, s, lambda) = (p.d, p.beta, p.s, p.lambda);
    let mut claims: Vec<(String, Claim)> = vec![("a".into(), Claim::CrossAdjacent)];
    for q in 0..=(r - 1) * s {
        claims.push((format!("i.{q}"), Claim::NegligibleAll { family: Tuple::B, p: q, d, beta: 2 * beta, lambda }));
    }
    claims.push(("iii.hyp".into(), Claim::NegligibleAll { family: Tuple::A, p: (r - 1) * s, d, beta, lambda }));
    claims.push(("iii".into(), Claim::Typical { d, beta }));
    claims
        .into_iter()
        .enumerate()
        .map(|(j, (id, claim))| {
            let ev = evaluate(ctx, &claim, budget, rng::derive(p.seed, 200 + j as u64));
            let mut rec = record(&id, claim, ev);
            if id == "iii" {
                rec.conditional_on = Some("iii.hyp".into());
            }
            rec
        })
        .collect()
}

struct Engine<'a> {
    g: &'a PartitionedGraph,
    r: usize,
    v: &'a [VertexSet],
    a: &'a [VertexSet],
    k: &'a CrossingFamily,
    f: &'a CrossingFamily,
    idx: AdjacencyIndex,
    params: &'a DrcParams,
    ob: Budget,
    k_total: f64,
}

struct RoundFail {
    round: usize,
    failing: Vec<String>,
}

/// Densest dyadic bucket of one round.
#[derive(Clone)]
struct Link {
    i0: i32,
    thr: f64,
    mask: Vec<bool>,
}

struct State {
    t: Vec<Vec<usize>>,
    chain: Vec<Link>,
    a: Vec<VertexSet>,
    b: Vec<VertexSet>,
    mask: Vec<bool>,
}

struct Run {
    t: Vec<Vec<usize>>,
    b: Vec<VertexSet>,
    records: Vec<PropertyRecord>,
    rounds: Vec<RoundRecord>,
    f_share: f64,
    last_value: Option<f64>,
}

/// Objective value and the pieces recorded for the chosen candidate.
#[derive(Clone, Copy)]
struct Scored {
    value: f64,
    k_hat: f64,
    rho_hat: f64,
    xi: f64,
    eta: f64,
}

fn distinct(t: &[usize]) -> Vec<usize> {
    let mut x = t.to_vec();
    x.sort_unstable();
    x.dedup();
    x
}

impl Engine<'_> {
    /// `θ_t`: `(δ₁/ln²n)^{(10s)^t}` in the paper schedule, `δ₁^{t+1}` otherwise.
    fn theta(&self, t: usize) -> f64 {
        match self.params.schedule {
            Schedule::Paper => {
                let ln = (self.g.n() as f64).ln();
                (self.params.theta / (ln * ln)).powf((10.0 * self.params.s as f64).powi(t as i32))
            }
            Schedule::Practical => self.params.theta.powi(t as i32 + 1),
        }
    }

    fn mask_of(&self, b: &[VertexSet]) -> Vec<bool> {
        let w = self.f.width();
        self.f.iter().map(|m| m.iter().enumerate().all(|(slot, &x)| b[slot / w].contains(x))).collect()
    }

    fn degree(&self, level: usize, q: &[usize], mask: &[bool]) -> u64 {
        let probe: Vec<(usize, usize)> = q.iter().enumerate().map(|(o, &x)| (x, level + o)).collect();
        self.idx.degree(&probe, Some(mask))
    }

    fn bucket(deg: u64, thr: f64) -> Option<i32> {
        let deg = deg as f64;
        if deg <= 0.0 || deg < thr / 2.0 {
            return None;
        }
        if thr <= 0.0 {
            return Some(i32::MAX);
        }
        Some((deg / thr).log2().floor() as i32 + 1)
    }

    /// Whether `q` (one vertex per part `level..r`) belongs to `K_level`.
    fn member(&self, st: &State, level: usize, q: &[usize]) -> bool {
        if level == 0 {
            return q.iter().zip(self.a).all(|(&x, ai)| ai.contains(x)) && self.k.admits(self.g, q);
        }
        let link = &st.chain[level - 1];
        distinct(&st.t[level - 1]).into_iter().all(|x| {
            let mut qq = Vec::with_capacity(q.len() + 1);
            qq.push(x);
            qq.extend_from_slice(q);
            self.member(st, level - 1, &qq) && Self::bucket(self.degree(level - 1, &qq, &link.mask), link.thr) == Some(link.i0)
        })
    }

    /// Rejection sample of cliques on parts `from..r` inside `sets` accepted
    /// by `accept`; returns the accepted tuples and the acceptance rate.
    fn sample_cliques<F>(&self, sets: &[VertexSet], from: usize, accept: F, seed: u64) -> (Vec<Vec<usize>>, f64)
    where
        F: Fn(&[usize]) -> bool,
    {
        let pools: Vec<Vec<usize>> = sets[from..].iter().map(VertexSet::to_vec).collect();
        if pools.iter().any(Vec::is_empty) {
            return (Vec::new(), 0.0);
        }
        let want = self.params.family_samples.max(1);
        let max_draws = want as u64 * 100;
        let mut rg = rng::stream(seed, 0);
        let (mut got, mut draws) = (Vec::new(), 0u64);
        while draws < max_draws && got.len() < want {
            draws += 1;
            let q: Vec<usize> = pools.iter().map(|p| p[rg.gen_range(0..p.len())]).collect();
            if is_pattern_copy(self.g, q.len(), &q) && accept(&q) {
                got.push(q);
            }
        }
        let rate = got.len() as f64 / draws as f64;
        (got, rate)
    }

    fn pot(&self, x: &VertexSet, y: &VertexSet, p: usize, beta: usize, seed: u64) -> PotentialCount {
        let mode = mode_for(x.len(), p + self.params.d, &self.ob, seed);
        potential(self.g, x, y, p, self.params.d, beta, mode, &self.ob).expect("mode chosen within budget")
    }

    fn union_except(&self, sets: &[VertexSet], i: usize) -> VertexSet {
        let mut u = VertexSet::new(self.g.n());
        for (j, s) in sets.iter().enumerate() {
            if j != i {
                u.union_with(s);
            }
        }
        u
    }

    fn run(&self, k0: &[Vec<usize>], attempt: u64) -> std::result::Result<Run, RoundFail> {
        let (r, p) = (self.r, self.params);
        let fl = self.f.len() as f64;
        let mut st = State { t: vec![Vec::new(); r], chain: Vec::new(), a: self.a.to_vec(), b: self.v.to_vec(), mask: vec![true; self.f.len()] };
        let (mut records, mut rounds, mut last_value) = (Vec::new(), Vec::new(), None);
        let mut k_size = self.k_total;
        for c in 0..r {
            let seed = rng::derive(p.seed, attempt * 1000 + c as u64 * 10);
            let kc: Vec<Vec<usize>> = if c == 0 {
                k0.to_vec()
            } else {
                let (got, rate) = self.sample_cliques(&st.a, c, |q| self.member(&st, c, q), rng::derive(seed, 1));
                k_size = rate * st.a[c..].iter().map(|x| x.len() as f64).product::<f64>();
                got
            };
            records.push(estimate_record(&format!("b.{c}"), "estimated size of the round family K_c", k_size, Some(f64::MIN_POSITIVE), None));
            if kc.is_empty() {
                return Err(RoundFail { round: c, failing: vec![format!("b.{c}")] });
            }
            let degs: Vec<u64> = kc.iter().map(|q| self.degree(c, q, &st.mask)).collect();
            let theta = self.theta(c);
            let density = degs.iter().sum::<u64>() as f64 / (kc.len() as f64 * fl);
            records.push(estimate_record(&format!("d.{c}"), "rho(K_c, F(B_c)) / (|K_c||F|)", density, Some(theta), None));
            let thr = theta * fl;
            let mut totals: std::collections::BTreeMap<i32, u64> = Default::default();
            for &dg in &degs {
                if let Some(i) = Self::bucket(dg, thr) {
                    *totals.entry(i).or_default() += dg;
                }
            }
            // Densest bucket, ties to the smallest index.
            let Some(i0) = totals.iter().fold(None, |best: Option<(i32, u64)>, (&i, &e)| match best {
                Some((_, be)) if be >= e => best,
                _ => Some((i, e)),
            }) else {
                return Err(RoundFail { round: c, failing: vec![format!("d.{c}")] });
            };
            st.chain.push(Link { i0: i0.0, thr, mask: st.mask.clone() });

            let pool = st.a[c].clone();
            if pool.is_empty() {
                return Err(RoundFail { round: c, failing: vec![format!("A_{c} exhausted")] });
            }
            let dens = self.denominators(&st, c, rng::derive(seed, 2));
            let cand_seed = rng::derive(seed, 3);
            let (chosen, scored, values, pick) = match p.mode {
                SelectMode::Objective { candidates } => {
                    let ts: Vec<Vec<usize>> = (0..candidates).map(|i| draw(&pool, p.s, &mut rng::stream(cand_seed, i as u64))).collect();
                    let sc: Vec<Scored> =
                        ts.par_iter().enumerate().map(|(i, t)| self.score(&st, c, t, &dens, k_size, rng::derive(cand_seed, 1000 + i as u64))).collect();
                    let values: Vec<f64> = sc.iter().map(|x| x.value).collect();
                    let best = best_index(&values, true);
                    (ts[best].clone(), sc[best], values, best)
                }
                SelectMode::Rejection { max_retries } => {
                    let mut found = None;
                    let mut values = Vec::new();
                    for i in 0..max_retries {
                        let t = draw(&pool, p.s, &mut rng::stream(cand_seed, i as u64));
                        let sc = self.score(&st, c, &t, &dens, k_size, rng::derive(cand_seed, 1000 + i as u64));
                        values.push(sc.value);
                        if sc.k_hat > 0.0 && sc.rho_hat >= self.theta(c + 1) * sc.k_hat * fl {
                            found = Some((t, sc, i));
                            break;
                        }
                    }
                    let Some((t, sc, i)) = found else {
                        return Err(RoundFail { round: c, failing: vec![format!("b.{}", c + 1), format!("d.{}", c + 1)] });
                    };
                    (t, sc, values, i)
                }
            };
            rounds.push(RoundRecord { round: c + 1, maximize: true, values, chosen: pick, bucket: Some(i0.0) });
            last_value = Some(scored.value);
            let (thr_c, thr_e) = match p.schedule {
                Schedule::Paper => (Some(p.lambda.powi(-(p.s as i32))), Some(p.lambda.powi(-(p.s as i32)))),
                Schedule::Practical => (None, None),
            };
            records.push(below_record(&format!("c.{c}"), "B potential terms of the chosen candidate", scored.eta, thr_c));
            records.push(below_record(&format!("e.{c}"), "A potential terms of the chosen candidate", scored.xi, thr_e));

            let nt = common_neighbors_of(self.g, chosen.iter().copied(), &VertexSet::full(self.g.n()));
            for i in (0..r).filter(|&i| i != c) {
                st.a[i].intersect_with(&nt);
                st.b[i].intersect_with(&nt);
            }
            st.t[c] = chosen;
            st.mask = self.mask_of(&st.b);
        }
        let f_share = st.mask.iter().filter(|&&m| m).count() as f64 / fl;
        Ok(Run { t: st.t, b: st.b, records, rounds, f_share, last_value })
    }

    /// Denominators of the ratio terms, fixed within a round.
    fn denominators(&self, st: &State, c: usize, seed: u64) -> Vec<Den> {
        let (r, s, beta) = (self.r, self.params.s, self.params.beta);
        let cc = r - 1;
        (0..r)
            .map(|i| {
                let xs = rng::derive(seed, i as u64);
                let es = rng::derive(seed, 100 + i as u64);
                if i < c {
                    Den {
                        xi: self.pot(&self.union_except(self.a, i), &st.a[i], (r - c) * s, beta, xs).value(),
                        eta: self.pot(&self.union_except(&st.b, i), &st.b[i], cc * s + (r - c) * s, 2 * beta, es).value(),
                    }
                } else if i > c {
                    Den { xi: self.pot(&self.union_except(self.a, i), &st.a[i], (r - c - 1) * s, beta, xs).value(), eta: 0.0 }
                } else {
                    Den { xi: 0.0, eta: 0.0 }
                }
            })
            .collect()
    }

    /// The round objective for candidate `t`: `ρ(K̂, F(B̂)) − θ_{c+1}|K̂||F|`
    /// minus the weighted potential terms.
    fn score(&self, st: &State, c: usize, t: &[usize], dens: &[Den], k_size: f64, seed: u64) -> Scored {
        let (r, p) = (self.r, self.params);
        let (s, beta, cc) = (p.s, p.beta, r - 1);
        let fl = self.f.len() as f64;
        let nt = common_neighbors_of(self.g, t.iter().copied(), &VertexSet::full(self.g.n()));
        let mut ahat = st.a.clone();
        let mut bhat = st.b.clone();
        for i in (0..r).filter(|&i| i != c) {
            ahat[i].intersect_with(&nt);
            bhat[i].intersect_with(&nt);
        }
        let mask_hat = self.mask_of(&bhat);
        let xs = distinct(t);
        let link = &st.chain[c];
        let kept = |q: &[usize]| {
            xs.iter().all(|&x| {
                let mut qq = Vec::with_capacity(q.len() + 1);
                qq.push(x);
                qq.extend_from_slice(q);
                self.member(st, c, &qq) && Self::bucket(self.degree(c, &qq, &link.mask), link.thr) == Some(link.i0)
            })
        };
        let (k_hat, rho_hat) = if c + 1 == r {
            let k = if kept(&[]) { 1.0 } else { 0.0 };
            (k, k * mask_hat.iter().filter(|&&m| m).count() as f64)
        } else {
            let (got, rate) = self.sample_cliques(&ahat, c + 1, kept, rng::derive(seed, 1));
            let k = rate * ahat[c + 1..].iter().map(|x| x.len() as f64).product::<f64>();
            let mean = if got.is_empty() {
                0.0
            } else {
                got.iter().map(|q| self.degree(c + 1, q, &mask_hat) as f64).sum::<f64>() / got.len() as f64
            };
            (k, k * mean)
        };

        let frac = |pc: &PotentialCount| if pc.tuple_space() > 0.0 { pc.value() / pc.tuple_space() } else { 0.0 };
        let mut xi = 0.0;
        for i in (0..r).filter(|&i| i != c) {
            let q = if i < c { (r - c - 1) * s } else { (r - c - 2) * s };
            let num = self.pot(&self.union_except(self.a, i), &ahat[i], q, beta, rng::derive(seed, 10 + i as u64));
            xi += ratio(num.value(), dens[i].xi);
        }
        let q = cc * s + (r - c - 1) * s;
        let first = self.pot(&self.union_except(&bhat, c), &st.b[c], q, 2 * beta, rng::derive(seed, 50));
        let mut eta = match p.schedule {
            Schedule::Paper => first.value() / p.lambda.powi((cc * s + (r - c) * s) as i32 - 1),
            Schedule::Practical => frac(&first),
        };
        for i in 0..c {
            let num = self.pot(&self.union_except(&st.b, i), &bhat[i], q, 2 * beta, rng::derive(seed, 60 + i as u64));
            eta += ratio(num.value(), dens[i].eta);
        }

        let target = self.theta(c + 1) * k_hat * fl;
        let value = match p.schedule {
            Schedule::Paper => rho_hat - target - p.lambda.powi(s as i32) * self.k_total * fl * (xi + eta),
            Schedule::Practical => {
                let scale = (k_size * fl).max(f64::MIN_POSITIVE);
                (rho_hat - target) / scale - p.penalty * (xi + eta)
            }
        };
        Scored { value, k_hat, rho_hat, xi, eta }
    }
}

struct Den {
    xi: f64,
    eta: f64,
}

fn below_record(id: &str, what: &str, value: f64, threshold: Option<f64>) -> PropertyRecord {
    PropertyRecord {
        id: id.to_string(),
        claim: Claim::Estimate { what: what.to_string() },
        checked: Checked::Sampled,
        pass: threshold.map(|t| value < t),
        value: Some(value),
        threshold,
        se: None,
        witness: None,
        conditional_on: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drc::verify_certificate;
    use crate::graph::consecutive_parts;
    use crate::potentials::{heavy_cliques, sample_family, HeavyRule};

    fn random_tripartite(m: usize, p: f64, seed: u64) -> PartitionedGraph {
        let n = 3 * m;
        let mut rg = rng::stream(seed, 0);
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if u / m != v / m && rg.gen_bool(p) {
                    e.push((u, v));
                }
            }
        }
        PartitionedGraph::from_edges(n, &e).unwrap().with_parts(consecutive_parts(n, &[m, m, m]), true).unwrap()
    }

    #[test]
    fn complete_tripartite_passes_everything() {
        let g = PartitionedGraph::complete_multipartite(&[6, 6, 6]);
        let parts = g.parts().to_vec();
        let k = heavy_cliques(&g, &parts, 0.5, &Budget::default()).unwrap();
        let f = k.clone();
        for mode in [SelectMode::Objective { candidates: 2 }, SelectMode::Rejection { max_retries: 2 }] {
            let p = DrcParams::practical(2, 1, 0.5).with_mode(mode);
            let out = select_rpartite(&g, &parts, &parts, &k, &f, &p, &Budget::default()).unwrap();
            assert_eq!(out.b_sets(), parts);
            assert!(out.failing().is_empty(), "{:?}", out.failing());
            assert!(verify_certificate(&g, &out, &Budget::default()).unwrap().is_empty());
        }
    }

    #[test]
    fn empty_k_is_a_precondition() {
        let g = PartitionedGraph::empty(9).with_parts(consecutive_parts(9, &[3, 3, 3]), true).unwrap();
        let parts = g.parts().to_vec();
        let k = heavy_cliques(&g, &parts, 0.1, &Budget::default()).unwrap();
        let p = DrcParams::practical(1, 1, 0.5);
        let err = select_rpartite(&g, &parts, &parts, &k, &k, &p, &Budget::default()).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolated(_)));
    }

    #[test]
    fn random_tripartite_outcome_is_sound_and_deterministic() {
        let g = random_tripartite(40, 0.6, 11);
        let parts = g.parts().to_vec();
        let rule = HeavyRule { reference: parts.clone(), delta: 0.6f64.powi(2) / 2.0 };
        let k = sample_family(&g, Pattern::Clique, 3, &parts, Some(rule), 200, 20_000, 1);
        let f = sample_family(&g, Pattern::Clique, 3, &parts, None, 64, 20_000, 2);
        let p = DrcParams::practical(1, 1, 0.6).with_seed(5);
        let out = select_rpartite(&g, &parts, &parts, &k, &f, &p, &Budget::default()).unwrap();
        assert!(verify_certificate(&g, &out, &Budget::default()).unwrap().is_empty());
        assert_eq!(out.record("a").unwrap().pass, Some(true));
        assert_eq!(out.t.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 1, 1]);
        for rr in &out.rounds {
            assert!(rr.values.iter().all(|&x| !(x > rr.values[rr.chosen])));
        }
        let again = select_rpartite(&g, &parts, &parts, &k, &f, &p, &Budget::default()).unwrap();
        assert_eq!(out, again);
    }
}
