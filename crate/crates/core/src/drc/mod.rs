//! Dependent random choice.
//!
//! Two selectors: the two-round bipartite selection and the `r`-round
//! selection over crossing families. Each runs in objective mode (best of `R`
//! sampled candidates per round) or rejection mode (redraw until the target
//! properties check out). Every outcome carries a certificate whose entries
//! name the sets they talk about symbolically, so they can be recomputed from
//! the graph, the input sets and `T` alone.

mod bipartite;
mod props;
mod rpartite;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::budget::{Budget, CheckMode};
use crate::error::{Error, Result};
use crate::graph::{common_count, common_neighbors_of, PartitionedGraph, VertexSet};
use crate::potentials::{is_common, negligible_threshold, potential_auto};
use crate::rng;

pub use bipartite::select_bipartite;
pub use props::{is_typical, sample_neighborhood_set, test_negligible_potential_props, ExpectationCheck, NegligibleReport, TypicalCheck};
pub use rpartite::select_rpartite;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectMode {
    /// Evaluate `candidates` draws per round and keep the best objective.
    Objective { candidates: usize },
    /// Redraw until the required properties pass, at most `max_retries` times.
    Rejection { max_retries: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// `s`, `λ`, `β` from the asymptotic formulas; refuses to run below 1.
    Paper,
    /// User-chosen `s`, `λ`, `β` with normalised objectives.
    Practical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrcParams {
    pub s: usize,
    pub lambda: f64,
    pub beta: usize,
    pub d: usize,
    pub delta: f64,
    pub eps: f64,
    pub mode: SelectMode,
    pub schedule: Schedule,
    pub seed: u64,
    /// Weight of the potential terms in practical objectives.
    #[serde(default = "default_penalty")]
    pub penalty: f64,
    /// `δ₁` in the `r`-partite round thresholds.
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Lower bound on `|K(A)| / Π|V_i|` checked before an `r`-partite run.
    #[serde(default)]
    pub delta2: f64,
    /// Accepted members sampled per family estimate in `r`-partite rounds.
    #[serde(default = "default_family_samples")]
    pub family_samples: usize,
    /// Draws per potential estimate inside objectives.
    #[serde(default = "default_estimate_samples")]
    pub estimate_samples: u64,
    /// Certificate entries that must pass; empty means every unconditional
    /// entry with a verdict.
    #[serde(default)]
    pub require: Vec<String>,
}

fn default_penalty() -> f64 {
    1.0
}
fn default_theta() -> f64 {
    0.02
}
fn default_family_samples() -> usize {
    64
}
fn default_estimate_samples() -> u64 {
    800
}

impl DrcParams {
    /// Practical schedule with `s = 1`, `λ = 2` and objective mode over 12
    /// candidates.
    pub fn practical(d: usize, beta: usize, delta: f64) -> Self {
        DrcParams {
            s: 1,
            lambda: 2.0,
            beta,
            d,
            delta,
            eps: 0.0,
            mode: SelectMode::Objective { candidates: 12 },
            schedule: Schedule::Practical,
            seed: 0,
            penalty: default_penalty(),
            theta: default_theta(),
            delta2: 0.0,
            family_samples: default_family_samples(),
            estimate_samples: default_estimate_samples(),
            require: Vec::new(),
        }
    }

    /// Bipartite schedule: `s = ⌊√(d ln n / ln(2/δ))⌋`, `λ = (δ/2)^{5s} n`,
    /// `β = ⌊(λ/n)³ γ n⌋`.
    pub fn paper_bipartite(n: usize, d: usize, delta: f64, eps: f64, gamma: f64) -> Result<Self> {
        let nf = n as f64;
        let s_real = (d as f64 * nf.ln() / (2.0 / delta).ln()).sqrt();
        let s = s_real.floor();
        let lambda = (delta / 2.0).powf(5.0 * s) * nf;
        let beta_real = (lambda / nf).powi(3) * gamma * nf;
        Self::paper_checked(s_real, lambda, beta_real, d, delta, eps)
    }

    /// `r`-partite schedule: `s = ⌊(d ln n / ln ln n)^{1/(2r)}⌋`,
    /// `λ = (δ/ln n)^{5r²(10s)^{2r−1}} ε²γ² n`, `β = ⌊(λ/n)^{2r} n / 2⌋`.
    pub fn paper_rpartite(n: usize, r: usize, d: usize, delta: f64, eps: f64, gamma: f64) -> Result<Self> {
        let nf = n as f64;
        let ln = nf.ln();
        let s_real = (d as f64 * ln / ln.ln()).powf(1.0 / (2.0 * r as f64));
        let s = s_real.floor();
        let expo = 5.0 * (r * r) as f64 * (10.0 * s).powi(2 * r as i32 - 1);
        let lambda = (delta / ln).powf(expo) * eps * eps * gamma * gamma * nf;
        let beta_real = (lambda / nf).powi(2 * r as i32) * nf / 2.0;
        let mut p = Self::paper_checked(s_real, lambda, beta_real, d, delta, eps)?;
        p.theta = (delta * delta / 2.0).powi((r * r) as i32);
        Ok(p)
    }

    fn paper_checked(s_real: f64, lambda: f64, beta_real: f64, d: usize, delta: f64, eps: f64) -> Result<Self> {
        if s_real < 1.0 || beta_real < 1.0 || !(lambda > 0.0) {
            return Err(Error::InfeasibleParams(format!(
                "paper schedule gives s = {s_real:.4}, lambda = {lambda:.4e}, beta = {beta_real:.4e}; need s >= 1 and beta >= 1"
            )));
        }
        let mut p = DrcParams::practical(d, beta_real.floor() as usize, delta);
        p.s = s_real.floor() as usize;
        p.lambda = lambda;
        p.eps = eps;
        p.schedule = Schedule::Paper;
        Ok(p)
    }

    pub fn with_mode(mut self, mode: SelectMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_require(mut self, ids: &[&str]) -> Self {
        self.require = ids.iter().map(|s| s.to_string()).collect();
        self
    }

    fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::PreconditionViolated("s must be at least 1".into()));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::PreconditionViolated(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::PreconditionViolated(format!("delta must lie in [0,1], got {}", self.delta)));
        }
        match self.mode {
            SelectMode::Objective { candidates: 0 } | SelectMode::Rejection { max_retries: 0 } => {
                Err(Error::PreconditionViolated("selection needs at least one candidate".into()))
            }
            _ => Ok(()),
        }
    }
}

/// A named set in the context of one selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetName {
    V(usize),
    A(usize),
    B(usize),
    /// Vertices of `V_part` with at least `⌈frac·|V_within|⌉` neighbours in `V_within`.
    HighDegree { part: usize, within: usize, frac: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tuple {
    A,
    B,
}

/// Union over `terms` of the intersection of each term's names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetExpr(pub Vec<Vec<SetName>>);

impl SetExpr {
    pub fn one(name: SetName) -> Self {
        SetExpr(vec![vec![name]])
    }

    pub fn meet(names: Vec<SetName>) -> Self {
        SetExpr(vec![names])
    }

    /// `⋃_{j ≠ i} name(j)` over `r` parts.
    pub fn others(i: usize, r: usize, name: fn(usize) -> SetName) -> Self {
        SetExpr((0..r).filter(|&j| j != i).map(|j| vec![name(j)]).collect())
    }
}

/// What a certificate entry asserts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// `x` is `(d,β)`-common into `y`.
    Common { x: SetExpr, y: SetExpr, d: usize, beta: usize },
    /// The `(p,d,β)`-potential of `x` in `y` is below `λ^{p−1}`.
    Negligible { x: SetExpr, y: SetExpr, p: usize, d: usize, beta: usize, lambda: f64 },
    /// At least `need` vertices of `x` have `⌈frac·|within|⌉` neighbours in `within`.
    HighDegreeCount { x: SetExpr, within: SetExpr, frac: f64, need: f64 },
    /// For every part `i`, the `(p,d,β)`-potential of `X_{−i}` in `X_i` is
    /// below `λ^{p−1}`, where `X` is the `A` or the `B` tuple.
    NegligibleAll { family: Tuple, p: usize, d: usize, beta: usize, lambda: f64 },
    /// `T` is `(d,β)`-typical for `A`.
    Typical { d: usize, beta: usize },
    /// Vertices of `T_i` and `T_j` are adjacent for all `i ≠ j`.
    CrossAdjacent,
    /// A quantity estimated from samples during selection; not recomputable.
    Estimate { what: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Checked {
    Exact,
    Sampled,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub id: String,
    pub claim: Claim,
    pub checked: Checked,
    pub pass: Option<bool>,
    #[serde(default)]
    pub value: Option<f64>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub se: Option<f64>,
    #[serde(default)]
    pub witness: Option<Vec<usize>>,
    /// Id of a hypothesis entry; this entry only counts when that one passed.
    #[serde(default)]
    pub conditional_on: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrcKind {
    Bipartite,
    Rpartite,
}

/// Candidate objective values of one round, in draw order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub maximize: bool,
    pub values: Vec<f64>,
    pub chosen: usize,
    /// Densest dyadic bucket `i₀` (`r`-partite rounds only).
    #[serde(default)]
    pub bucket: Option<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrcOutcome {
    pub kind: DrcKind,
    pub n: usize,
    pub params: DrcParams,
    pub v: Vec<Vec<usize>>,
    pub a: Vec<Vec<usize>>,
    /// `T_i ⊆ V_i`, as multisets in draw order (empty when unused).
    pub t: Vec<Vec<usize>>,
    /// `B_i = V_i ∩ N(⋃_{j≠i} T_j)`.
    pub b: Vec<Vec<usize>>,
    pub certificate: Vec<PropertyRecord>,
    pub rounds: Vec<RoundRecord>,
    pub objective_value: Option<f64>,
    pub attempts: usize,
}

impl DrcOutcome {
    pub fn b_sets(&self) -> Vec<VertexSet> {
        self.b.iter().map(|b| VertexSet::from_iter(self.n, b.iter().copied())).collect()
    }

    pub fn record(&self, id: &str) -> Option<&PropertyRecord> {
        self.certificate.iter().find(|r| r.id == id)
    }

    /// Ids of entries that failed, skipping conditional entries whose
    /// hypothesis did not pass.
    pub fn failing(&self) -> Vec<String> {
        failing(&self.certificate)
    }

    /// Whether every entry listed in `params.require` passed (or, with an
    /// empty list, nothing failed).
    pub fn meets_requirements(&self) -> bool {
        unmet(&self.certificate, &self.params.require).is_empty()
    }
}

fn failing(cert: &[PropertyRecord]) -> Vec<String> {
    cert.iter()
        .filter(|r| r.pass == Some(false))
        .filter(|r| match &r.conditional_on {
            None => true,
            Some(h) => cert.iter().any(|x| &x.id == h && x.pass == Some(true)),
        })
        .map(|r| r.id.clone())
        .collect()
}

fn unmet(cert: &[PropertyRecord], require: &[String]) -> Vec<String> {
    if require.is_empty() {
        return failing(cert);
    }
    require
        .iter()
        .filter(|id| !cert.iter().any(|r| &&r.id == id && r.pass == Some(true)))
        .cloned()
        .collect()
}

/// `B_i = V_i ∩ N(⋃_{j≠i} T_j)`.
pub fn b_from_t(g: &PartitionedGraph, v: &[VertexSet], t: &[Vec<usize>]) -> Vec<VertexSet> {
    (0..v.len())
        .map(|i| {
            let others = t.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, tj)| tj.iter().copied());
            common_neighbors_of(g, others, &v[i])
        })
        .collect()
}

/// Sets a certificate entry can refer to.
pub(crate) struct Ctx<'a> {
    pub g: &'a PartitionedGraph,
    pub v: Vec<VertexSet>,
    pub a: Vec<VertexSet>,
    pub b: Vec<VertexSet>,
    pub t: Vec<Vec<usize>>,
}

impl Ctx<'_> {
    fn name(&self, name: &SetName) -> VertexSet {
        match name {
            SetName::V(i) => self.v[*i].clone(),
            SetName::A(i) => self.a[*i].clone(),
            SetName::B(i) => self.b[*i].clone(),
            SetName::HighDegree { part, within, frac } => high_degree(self.g, &self.v[*part], &self.v[*within], *frac),
        }
    }

    pub fn eval(&self, e: &SetExpr) -> VertexSet {
        let mut out = VertexSet::new(self.g.n());
        for term in &e.0 {
            let mut acc = VertexSet::full(self.g.n());
            for name in term {
                acc.intersect_with(&self.name(name));
            }
            out.union_with(&acc);
        }
        out
    }
}

/// Vertices of `x` with at least `⌈frac·|within|⌉` neighbours in `within`.
pub fn high_degree(g: &PartitionedGraph, x: &VertexSet, within: &VertexSet, frac: f64) -> VertexSet {
    let need = crate::density::ceil_tol(frac * within.len() as f64);
    VertexSet::from_iter(g.n(), x.iter().filter(|&v| g.degree_in(v, within) >= need))
}

pub(crate) struct Evaluation {
    pub checked: Checked,
    pub pass: Option<bool>,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub se: Option<f64>,
    pub witness: Option<Vec<usize>>,
}

/// Commonness, exact within budget and otherwise a seeded search for a
/// counterexample among random subsets.
pub(crate) fn common_auto(
    g: &PartitionedGraph,
    x: &VertexSet,
    y: &VertexSet,
    d: usize,
    beta: usize,
    budget: &Budget,
    seed: u64,
) -> (Checked, bool, Option<Vec<usize>>) {
    match is_common(g, x, y, d, beta, budget) {
        Ok(c) => (Checked::Exact, c.ok, c.witness),
        Err(_) => {
            let xs = x.to_vec();
            let q = d.min(xs.len());
            let mut r = rng::stream(seed, 0);
            for _ in 0..budget.samples {
                let mut pick: Vec<usize> = Vec::with_capacity(q);
                while pick.len() < q {
                    let v = xs[r.gen_range(0..xs.len())];
                    if !pick.contains(&v) {
                        pick.push(v);
                    }
                }
                if common_count(g, &pick, y) < beta {
                    pick.sort_unstable();
                    return (Checked::Sampled, false, Some(pick));
                }
            }
            (Checked::Sampled, true, None)
        }
    }
}

pub(crate) fn evaluate(ctx: &Ctx, claim: &Claim, budget: &Budget, seed: u64) -> Evaluation {
    let mut ev = Evaluation { checked: Checked::Exact, pass: None, value: None, threshold: None, se: None, witness: None };
    match claim {
        Claim::Common { x, y, d, beta } => {
            let (checked, ok, w) = common_auto(ctx.g, &ctx.eval(x), &ctx.eval(y), *d, *beta, budget, seed);
            ev.checked = checked;
            ev.pass = Some(ok);
            ev.witness = w;
        }
        Claim::Negligible { x, y, p, d, beta, lambda } => {
            let pc = potential_auto(ctx.g, &ctx.eval(x), &ctx.eval(y), *p, *d, *beta, budget, seed);
            let thr = negligible_threshold(*lambda, *p);
            ev.checked = if pc.is_exact() { Checked::Exact } else { Checked::Sampled };
            ev.pass = Some(pc.value() < thr);
            ev.value = Some(pc.value());
            ev.threshold = Some(thr);
            ev.se = Some(pc.se());
        }
        Claim::NegligibleAll { family, p, d, beta, lambda } => {
            let name: fn(usize) -> SetName = match family {
                Tuple::A => SetName::A,
                Tuple::B => SetName::B,
            };
            let r = ctx.v.len();
            let thr = negligible_threshold(*lambda, *p);
            let (mut worst, mut worst_se, mut all_exact, mut ok) = (0.0f64, 0.0f64, true, true);
            for i in 0..r {
                let x = ctx.eval(&SetExpr::others(i, r, name));
                let pc = potential_auto(ctx.g, &x, &ctx.name(&name(i)), *p, *d, *beta, budget, rng::derive(seed, i as u64));
                all_exact &= pc.is_exact();
                ok &= pc.value() < thr;
                if pc.value() >= worst {
                    worst = pc.value();
                    worst_se = pc.se();
                }
            }
            ev.checked = if all_exact { Checked::Exact } else { Checked::Sampled };
            ev.pass = Some(ok);
            ev.value = Some(worst);
            ev.threshold = Some(thr);
            ev.se = Some(worst_se);
        }
        Claim::HighDegreeCount { x, within, frac, need } => {
            let within = ctx.eval(within);
            let count = high_degree(ctx.g, &ctx.eval(x), &within, *frac).len() as f64;
            ev.pass = Some(count >= *need - 1e-9);
            ev.value = Some(count);
            ev.threshold = Some(*need);
        }
        Claim::Typical { d, beta } => {
            let mut all = true;
            let mut any_sampled = false;
            for i in 0..ctx.a.len() {
                let x = ctx.eval(&SetExpr::others(i, ctx.a.len(), SetName::A));
                let others = ctx.t.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, tj)| tj.iter().copied());
                let y = common_neighbors_of(ctx.g, others, &ctx.a[i]);
                let (checked, ok, w) = common_auto(ctx.g, &x, &y, *d, *beta, budget, rng::derive(seed, i as u64));
                any_sampled |= checked == Checked::Sampled;
                if !ok {
                    all = false;
                    ev.witness = w;
                    ev.value = Some(i as f64);
                    break;
                }
            }
            ev.checked = if any_sampled { Checked::Sampled } else { Checked::Exact };
            ev.pass = Some(all);
        }
        Claim::CrossAdjacent => {
            let ok = ctx.t.iter().enumerate().all(|(i, ti)| {
                ctx.t.iter().enumerate().filter(|&(j, _)| j != i).all(|(_, tj)| ti.iter().all(|&u| tj.iter().all(|&w| ctx.g.has_edge(u, w))))
            });
            ev.pass = Some(ok);
        }
        Claim::Estimate { .. } => {
            ev.checked = Checked::Skipped;
        }
    }
    ev
}

pub(crate) fn record(id: &str, claim: Claim, ev: Evaluation) -> PropertyRecord {
    PropertyRecord {
        id: id.to_string(),
        claim,
        checked: ev.checked,
        pass: ev.pass,
        value: ev.value,
        threshold: ev.threshold,
        se: ev.se,
        witness: ev.witness,
        conditional_on: None,
    }
}

pub(crate) fn estimate_record(id: &str, what: &str, value: f64, threshold: Option<f64>, se: Option<f64>) -> PropertyRecord {
    PropertyRecord {
        id: id.to_string(),
        claim: Claim::Estimate { what: what.to_string() },
        checked: Checked::Sampled,
        pass: threshold.map(|t| value >= t),
        value: Some(value),
        threshold,
        se,
        witness: None,
        conditional_on: None,
    }
}

/// Re-checks an outcome against `g`: the `B` sets must equal
/// `V_i ∩ N(T_{−i})` exactly and every entry marked exact must reproduce
/// its verdict. Returns the list of discrepancies (empty when sound).
pub fn verify_certificate(g: &PartitionedGraph, outcome: &DrcOutcome, budget: &Budget) -> Result<Vec<String>> {
    let n = g.n();
    if n != outcome.n {
        return Err(Error::PreconditionViolated(format!("outcome is for {} vertices, graph has {n}", outcome.n)));
    }
    let sets = |lists: &[Vec<usize>]| -> Vec<VertexSet> { lists.iter().map(|l| VertexSet::from_iter(n, l.iter().copied())).collect() };
    let v = sets(&outcome.v);
    let a = sets(&outcome.a);
    let b = b_from_t(g, &v, &outcome.t);
    let mut issues = Vec::new();
    if b != outcome.b_sets() {
        issues.push("B sets differ from V_i ∩ N(T_{-i})".to_string());
    }
    let ctx = Ctx { g, v, a, b, t: outcome.t.clone() };
    for rec in outcome.certificate.iter().filter(|r| r.checked == Checked::Exact) {
        let ev = evaluate(&ctx, &rec.claim, budget, 0);
        if ev.checked != Checked::Exact {
            issues.push(format!("{}: no longer exact within budget", rec.id));
        } else if ev.pass != rec.pass {
            issues.push(format!("{}: recorded {:?}, recomputed {:?}", rec.id, rec.pass, ev.pass));
        }
    }
    Ok(issues)
}

/// Picks the best value: maximum or minimum, ties to the lowest index, NaN
/// never chosen over a number.
pub(crate) fn best_index(values: &[f64], maximize: bool) -> usize {
    let mut best = 0;
    for (i, &x) in values.iter().enumerate().skip(1) {
        let cur = values[best];
        let better = if cur.is_nan() {
            !x.is_nan()
        } else if maximize {
            x > cur
        } else {
            x < cur
        };
        if better {
            best = i;
        }
    }
    best
}

/// `num / den` with `0/0 = 0` and `x/0 = ∞`.
pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Budget for potential estimates inside objectives.
pub(crate) fn objective_budget(budget: &Budget, params: &DrcParams) -> Budget {
    let mut b = *budget;
    b.samples = params.estimate_samples.min(budget.samples).max(1);
    b.tuples = b.tuples.min(2e6);
    b
}

/// Exact or sampled according to the budget.
pub(crate) fn mode_for(size: usize, k: usize, budget: &Budget, seed: u64) -> CheckMode {
    if crate::potentials::exact_cost(size, k) <= budget.tuples {
        CheckMode::Exact
    } else {
        CheckMode::Sampled { trials: budget.samples, seed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_schedule_refuses_small_instances() {
        let err = DrcParams::paper_bipartite(2000, 2, 0.5, 0.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::InfeasibleParams(_)));
        assert!(err.to_string().contains("beta"));
        assert!(DrcParams::paper_rpartite(900, 3, 2, 0.6, 0.1, 0.5).is_err());
    }

    #[test]
    fn best_index_breaks_ties_low() {
        assert_eq!(best_index(&[1.0, 3.0, 3.0], true), 1);
        assert_eq!(best_index(&[2.0, 1.0, 1.0], false), 1);
        assert_eq!(best_index(&[f64::NAN, 1.0], true), 1);
        assert_eq!(best_index(&[f64::NEG_INFINITY, f64::NEG_INFINITY], true), 0);
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio(0.0, 0.0), 0.0);
        assert!(ratio(1.0, 0.0).is_infinite());
        assert_eq!(ratio(1.0, 4.0), 0.25);
    }

    #[test]
    fn failing_respects_hypotheses() {
        let mk = |id: &str, pass, cond: Option<&str>| PropertyRecord {
            id: id.into(),
            claim: Claim::CrossAdjacent,
            checked: Checked::Exact,
            pass: Some(pass),
            value: None,
            threshold: None,
            se: None,
            witness: None,
            conditional_on: cond.map(|c| c.to_string()),
        };
        let cert = vec![mk("h", false, None), mk("c", false, Some("h")), mk("x", true, None)];
        assert_eq!(failing(&cert), vec!["h".to_string()]);
        assert!(unmet(&cert, &["x".to_string(), "c".to_string()]).contains(&"c".to_string()));
    }
}
