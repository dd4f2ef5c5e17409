//! Batch runner: one JSON spec, a range of seeds, one report per seed and a
//! summary folded in seed order.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::budget::Budget;
use crate::drc::DrcParams;
use crate::embed::{embed_bipartite, embed_rpartite, verify_embedding, PipelineParams, RunLog};
use crate::error::{Error, Result};
use crate::gen::{colour_parts, gen_degenerate_bandwidth_h, gen_dense_rpartite_g, gen_planted, GeneratorSpec, PlantedSpec};
use crate::graph::verify_labelling;
use crate::labelling::{locality_bound, relabel_degenerate_local};
use crate::rng;
use crate::structures::{ramsey_pipeline, RamseyParams};

pub const SPEC_SCHEMA: &str = "weave.experiment/1";
pub const REPORT_SCHEMA: &str = "weave.report/1";

/// `H` drawn by [`gen_degenerate_bandwidth_h`] with as many colours as the host has parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HSpec {
    pub m: usize,
    pub d: usize,
    pub beta: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PipelineSpec {
    /// Generate an instance and re-check its certificate.
    Generate { generator: GeneratorSpec },
    /// Relabel a generated `H` and verify the `(5d, β⌈log₂ 4β⌉)` bounds.
    Relabel { n: usize, d: usize, beta: usize, r: usize },
    /// Random bipartite host with the given part sizes.
    EmbedBipartite {
        sizes: Vec<usize>,
        p: f64,
        h: HSpec,
        #[serde(default)]
        pipeline: Option<PipelineParams>,
    },
    /// Random `r`-partite host, `r = sizes.len()`.
    EmbedRpartite {
        sizes: Vec<usize>,
        p: f64,
        h: HSpec,
        #[serde(default)]
        pipeline: Option<PipelineParams>,
    },
    /// Planted red grid, `H` coloured with `r` colours.
    Ramsey {
        planted: PlantedSpec,
        r: usize,
        h: HSpec,
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_balance_eps")]
        balance_eps: f64,
    },
}

fn default_eps() -> f64 {
    0.2
}
fn default_delta() -> f64 {
    0.5
}
fn default_balance_eps() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema: String,
    pub name: String,
    #[serde(default)]
    pub seed_start: u64,
    pub seeds: u64,
    pub pipeline: PipelineSpec,
    /// Overrides the tuple and subset caps of the default budget.
    #[serde(default)]
    pub budget: Option<f64>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if spec.schema != SPEC_SCHEMA {
            return Err(Error::Schema(format!("unknown schema {:?}, expected {SPEC_SCHEMA:?}", spec.schema)));
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("spec serialises"))
    }

    fn budget(&self, base: &Budget) -> Budget {
        match self.budget {
            Some(cap) => Budget { tuples: cap, subsets: cap, ..*base },
            None => *base,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    pub ok: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub spec: ExperimentSpec,
    pub spec_hash: String,
    pub seed: u64,
    pub success: bool,
    pub exit_code: i32,
    pub error: Option<String>,
    pub stages: Vec<StageReport>,
    /// Residual part sizes before each block.
    pub residual: Vec<Vec<usize>>,
    pub wall_ms: f64,
    /// Hash of everything above except `wall_ms`.
    pub outcome_hash: String,
}

impl RunReport {
    fn seal(mut self) -> Self {
        let mut v = serde_json::to_value(&self).expect("report serialises");
        let obj = v.as_object_mut().expect("report is an object");
        obj.remove("wall_ms");
        obj.remove("outcome_hash");
        self.outcome_hash = sha256_hex(&serde_json::to_vec(&v).expect("value serialises"));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: String,
    pub name: String,
    pub spec_hash: String,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_ms: f64,
    pub max_ms: f64,
    pub failures: Vec<(u64, String)>,
}

impl Summary {
    fn fold(spec: &ExperimentSpec, reports: &[RunReport]) -> Self {
        let mut times: Vec<f64> = reports.iter().map(|r| r.wall_ms).collect();
        times.sort_by(f64::total_cmp);
        let successes = reports.iter().filter(|r| r.success).count();
        let median_ms = match times.len() {
            0 => 0.0,
            k if k % 2 == 1 => times[k / 2],
            k => (times[k / 2 - 1] + times[k / 2]) / 2.0,
        };
        Summary {
            schema: REPORT_SCHEMA.into(),
            name: spec.name.clone(),
            spec_hash: spec.hash(),
            runs: reports.len(),
            successes,
            success_rate: if reports.is_empty() { 0.0 } else { successes as f64 / reports.len() as f64 },
            median_ms,
            max_ms: times.last().copied().unwrap_or(0.0),
            failures: reports.iter().filter(|r| !r.success).map(|r| (r.seed, r.error.clone().unwrap_or_default())).collect(),
        }
    }

    /// One-line-per-field text table.
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:<14}{}\n{:<14}{}/{} ({:.1}%)\n{:<14}{:.1} ms\n{:<14}{:.1} ms\n",
            "experiment",
            self.name,
            "success",
            self.successes,
            self.runs,
            100.0 * self.success_rate,
            "median",
            self.median_ms,
            "max",
            self.max_ms
        );
        for (seed, err) in &self.failures {
            s.push_str(&format!("{:<14}{err}\n", format!("seed {seed}")));
        }
        s
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs every seed of `spec`, writing `<name>-<seed>.json` per seed and
/// `<name>-summary.json` into `out` when given. Failures are recorded per
/// seed; only I/O problems abort the batch.
pub fn run_experiment(spec: &ExperimentSpec, base: &Budget, out: Option<&Path>) -> Result<(Vec<RunReport>, Summary)> {
    let seeds: Vec<u64> = (spec.seed_start..spec.seed_start + spec.seeds).collect();
    let reports: Vec<RunReport> = seeds.par_iter().map(|&seed| run_seed(spec, seed, base)).collect();
    let summary = Summary::fold(spec, &reports);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        for r in &reports {
            write_atomic(&dir.join(format!("{}-{}.json", spec.name, r.seed)), &serde_json::to_vec_pretty(r)?)?;
        }
        write_atomic(&dir.join(format!("{}-summary.json", spec.name)), &serde_json::to_vec_pretty(&summary)?)?;
    }
    Ok((reports, summary))
}

/// One seed of `spec`. Never fails; errors end up in the report.
pub fn run_seed(spec: &ExperimentSpec, seed: u64, base: &Budget) -> RunReport {
    let budget = spec.budget(base);
    let start = Instant::now();
    let mut stages = Vec::new();
    let mut residual = Vec::new();
    let outcome = execute(&spec.pipeline, seed, &budget, &mut stages, &mut residual);
    let (success, exit_code, error) = match outcome {
        Ok(true) => (true, 0, None),
        Ok(false) => (false, 2, Some("property refuted".to_string())),
        Err(e) => (false, e.exit_code(), Some(e.to_string())),
    };
    RunReport {
        schema: REPORT_SCHEMA.into(),
        spec: spec.clone(),
        spec_hash: spec.hash(),
        seed,
        success,
        exit_code,
        error,
        stages,
        residual,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        outcome_hash: String::new(),
    }
    .seal()
}

fn stage(stages: &mut Vec<StageReport>, name: &str, ok: bool, detail: Value) -> bool {
    stages.push(StageReport { name: name.into(), ok, detail });
    ok
}

fn log_detail(log: &RunLog) -> Value {
    json!({
        "d": log.d,
        "beta": log.beta,
        "block_len": log.block_len,
        "blocks": log.blocks.len(),
        "fallbacks": log.fallbacks,
        "drc_attempts": log.blocks.iter().map(|b| b.drc_attempts).sum::<usize>(),
        "exact_entries": log.exact_entries,
        "sampled_entries": log.sampled_entries,
    })
}


fn execute(spec: &PipelineSpec, seed: u64, budget: &Budget, stages: &mut Vec<StageReport>, residual: &mut Vec<Vec<usize>>) -> Result<bool> {
    let (s_host, s_h, s_run) = (rng::derive(seed, 1), rng::derive(seed, 2), rng::derive(seed, 3));
    match spec {
        PipelineSpec::Generate { generator } => {
            let g = generator.generate(s_host)?;
            Ok(stage(stages, "generate", true, serde_json::to_value(&g.certificate)?))
        }
        PipelineSpec::Relabel { n, d, beta, r } => {
            let (h, sigma, _) = gen_degenerate_bandwidth_h(*n, *d, *beta, *r, s_h)?;
            stage(stages, "generate", true, json!({ "n": n, "edges": h.edge_count() }));
            let (pi, trace) = relabel_degenerate_local(&h, &sigma, *d, *beta)?;
            let rep = verify_labelling(&h, &pi, 5 * d, locality_bound(*beta));
            let ok = rep.degenerate_ok && rep.local_ok;
            Ok(stage(stages, "relabel", ok, json!({ "report": rep, "claim_range": trace.claim_range() })))
        }
        PipelineSpec::EmbedBipartite { sizes, p, h: hs, pipeline } | PipelineSpec::EmbedRpartite { sizes, p, h: hs, pipeline } => {
            let r = sizes.len();
            let g = gen_dense_rpartite_g(sizes, *p, s_host)?;
            let (h, lab, col) = gen_degenerate_bandwidth_h(hs.m, hs.d, hs.beta, r, s_h)?;
            let h = h.with_parts(colour_parts(&col, r), true)?;
            stage(stages, "generate", true, json!({ "host_n": g.n(), "host_edges": g.edge_count(), "h_n": h.n(), "h_edges": h.edge_count() }));
            let mut params = pipeline.clone().unwrap_or_else(|| PipelineParams::new(DrcParams::practical(hs.d, hs.beta, *p)));
            params.drc.seed = s_run;
            let run = if matches!(spec, PipelineSpec::EmbedBipartite { .. }) { embed_bipartite } else { embed_rpartite };
            let (f, log) = run(&g, &h, &lab, &params, budget)?;
            residual.extend(log.blocks.iter().map(|b| b.residual.clone()));
            stage(stages, "embed", true, log_detail(&log));
            let check = verify_embedding(&g, &h, &f.map);
            Ok(stage(stages, "verify", check.ok, serde_json::to_value(&check)?))
        }
        PipelineSpec::Ramsey { planted, r, h: hs, eps, delta, balance_eps } => {
            let pl = gen_planted(planted, s_host)?;
            let (h, lab, col) = gen_degenerate_bandwidth_h(hs.m, hs.d, hs.beta, *r, s_h)?;
            stage(stages, "generate", true, json!({ "host_n": pl.graph.n(), "worst_high": pl.worst_high, "worst_low": pl.worst_low }));
            let params = RamseyParams {
                partition: None,
                t: planted.rows * planted.cols,
                eps: *eps,
                delta: *delta,
                check_trials: 200,
                blocks: 0,
                balance_eps: *balance_eps,
                balance_trials: 200,
                seed: s_run,
                pipeline: PipelineParams::new(DrcParams::practical(hs.d, hs.beta, *delta).with_seed(s_run)),
            };
            let (f, rep) = ramsey_pipeline(&pl.graph, *r, &h, &lab, &col, &params, budget)?;
            residual.extend(rep.log.blocks.iter().map(|b| b.residual.clone()));
            stage(
                stages,
                "ramsey",
                true,
                json!({
                    "colour": rep.colour,
                    "k": rep.path.k,
                    "backbone_rows": rep.backbone_rows,
                    "refuted_pairs": rep.refuted_pairs,
                    "log": log_detail(&rep.log),
                    "notes": rep.notes,
                }),
            );
            let ok = rep.verified && rep.audit_ok && f.is_total();
            Ok(stage(stages, "verify", ok, json!({ "verified": rep.verified, "audit_ok": rep.audit_ok })))
        }
    }
}

/// Writes `bytes` to `path` through a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relabel_spec(seeds: u64) -> ExperimentSpec {
        ExperimentSpec {
            schema: SPEC_SCHEMA.into(),
            name: "relabel".into(),
            seed_start: 5,
            seeds,
            pipeline: PipelineSpec::Relabel { n: 60, d: 2, beta: 5, r: 3 },
            budget: None,
        }
    }

    #[test]
    fn empty_batch_gives_empty_summary() {
        let (reports, summary) = run_experiment(&relabel_spec(0), &Budget::default(), None).unwrap();
        assert!(reports.is_empty());
        assert_eq!((summary.runs, summary.successes), (0, 0));
    }

    #[test]
    fn reports_are_reproducible() {
        let spec = relabel_spec(3);
        let (a, s) = run_experiment(&spec, &Budget::default(), None).unwrap();
        let (b, _) = run_experiment(&spec, &Budget::default(), None).unwrap();
        assert_eq!(s.successes, 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.outcome_hash, y.outcome_hash);
        }
        assert_ne!(a[0].outcome_hash, a[1].outcome_hash);
    }

    #[test]
    fn malformed_spec_is_a_schema_error() {
        assert!(matches!(ExperimentSpec::from_json("{\"name\": 3}"), Err(Error::Schema(_))));
        let mut v = serde_json::to_value(relabel_spec(1)).unwrap();
        v["schema"] = json!("other/1");
        assert!(matches!(ExperimentSpec::from_json(&v.to_string()), Err(Error::Schema(_))));
    }

    #[test]
    fn failures_are_recorded_not_raised() {
        let mut spec = relabel_spec(2);
        spec.pipeline = PipelineSpec::Relabel { n: 10, d: 0, beta: 3, r: 2 };
        let (reports, summary) = run_experiment(&spec, &Budget::default(), None).unwrap();
        assert_eq!(summary.successes, 0);
        assert!(reports.iter().all(|r| r.exit_code == 4));
    }

    #[test]
    fn writes_reports_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        run_experiment(&relabel_spec(2), &Budget::default(), Some(dir.path())).unwrap();
        for f in ["relabel-5.json", "relabel-6.json", "relabel-summary.json"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }
}
