use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use weave::density::{check_degree_dense_between, check_dense_pair, DensityStatus};
use weave::drc::{select_bipartite, select_rpartite, DrcParams};
use weave::embed::{embed_bipartite, embed_rpartite, embed_via_backbone, verify_embedding, BackboneParams, PipelineParams};
use weave::experiment::{run_experiment, write_atomic, ExperimentSpec};
use weave::gen::GeneratorSpec;
use weave::graph::{read_graph, write_graph, GraphDoc};
use weave::labelling::relabel_degenerate_local;
use weave::potentials::{heavy_cliques, is_common, potential, sample_family, HeavyRule, Pattern};
use weave::structures::{balanced_recolor, find_backbone_min_degree, make_bkr, make_pkr, ramsey_pipeline, RamseyParams};
use weave::{rng, Budget, CheckMode, Error, Labelling, PartitionedGraph, VertexSet};

#[derive(Parser)]
#[command(name = "weave", version, about = "Embed degenerate graphs of small bandwidth into dense hosts")]
struct Cli {
    /// Master seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Cap on exact enumeration work; takes precedence over WEAVE_BUDGET.
    #[arg(long, global = true)]
    budget: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance from a generator spec (JSON file or inline JSON).
    Gen {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relabel a local labelling into a degenerate and local one.
    Relabel {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        beta: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check a density, potential, commonness or heaviness property.
    Check(CheckArgs),
    /// Run one dependent random choice selection.
    Drc {
        kind: DrcKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed H into G.
    Embed(EmbedArgs),
    /// Grid and path-power patterns, backbones and block recolouring.
    Structures(StructArgs),
    /// Monochromatic embedding in a 2-coloured complete graph (red edges in --in).
    Ramsey {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment spec over its seed range.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Dense,
    DegreeDense,
    Potential,
    Common,
    Heavy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Args)]
struct CheckArgs {
    kind: CheckKind,
    #[arg(long = "in")]
    input: PathBuf,
    /// Vertex list `1,4,7` or `part:I`.
    #[arg(long, default_value = "part:0")]
    x: String,
    #[arg(long, default_value = "part:1")]
    y: String,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    beta: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DrcKind {
    Bipartite,
    Rpartite,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedKind {
    Bipartite,
    Rpartite,
    Backbone,
}

#[derive(Args)]
struct EmbedArgs {
    kind: EmbedKind,
    #[arg(long)]
    g: PathBuf,
    /// H with its labelling; parts (colour classes) for bipartite/rpartite,
    /// a `coloring` field for backbone.
    #[arg(long)]
    h: PathBuf,
    /// PipelineParams, or BackboneParams for `backbone`.
    #[arg(long)]
    params: PathBuf,
    /// Backbone file (`parts` as rows of vertex lists) for `backbone`.
    #[arg(long)]
    backbone: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StructKind {
    Bkr,
    Pkr,
    Backbone,
    Recolor,
}

#[derive(Args)]
struct StructArgs {
    kind: StructKind,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A graph file that may carry a colouring next to the graph itself.
#[derive(Deserialize)]
struct ColouredDoc {
    #[serde(flatten)]
    graph: GraphDoc,
    #[serde(default)]
    coloring: Option<Vec<usize>>,
}

#[derive(Deserialize)]
struct BackboneDoc {
    parts: Vec<Vec<Vec<usize>>>,
}

/// Success, or a checked property that came out false.
enum Outcome {
    Done,
    Refuted,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let mut budget = Budget::from_env();
    if let Some(cap) = cli.budget {
        budget.tuples = cap;
        budget.subsets = cap;
    }
    match run(&cli, &budget) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Refuted) => ExitCode::from(2),
        Err(e) => {
            eprintln!("weave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> weave::Result<()> {
    let bytes = serde_json::to_vec_pretty(value)?;
    match out {
        Some(p) => write_atomic(p, &bytes),
        None => {
            println!("{}", String::from_utf8_lossy(&bytes));
            Ok(())
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> weave::Result<T> {
    serde_json::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

fn read_coloured(path: &Path) -> weave::Result<(PartitionedGraph, Labelling, Option<Vec<usize>>)> {
    let doc: ColouredDoc = read_json(path)?;
    let (g, lab) = doc.graph.into_graph(true)?;
    let lab = lab.ok_or_else(|| Error::Schema(format!("{} has no labelling", path.display())))?;
    Ok((g, lab, doc.coloring))
}

fn vertex_set(g: &PartitionedGraph, spec: &str) -> weave::Result<VertexSet> {
    if let Some(i) = spec.strip_prefix("part:") {
        let i: usize = i.parse().map_err(|_| Error::Schema(format!("bad part index in {spec:?}")))?;
        return g.parts().get(i).cloned().ok_or_else(|| Error::PreconditionViolated(format!("graph has no part {i}")));
    }
    let mut s = VertexSet::new(g.n());
    for tok in spec.split(',').filter(|t| !t.is_empty()) {
        let v: usize = tok.trim().parse().map_err(|_| Error::Schema(format!("bad vertex {tok:?}")))?;
        if v >= g.n() {
            return Err(Error::PreconditionViolated(format!("vertex {v} outside the graph")));
        }
        s.insert(v);
    }
    Ok(s)
}

fn run(cli: &Cli, budget: &Budget) -> weave::Result<Outcome> {
    let seed = cli.seed;
    match &cli.cmd {
        Cmd::Gen { spec, out } => {
            let text = if spec.trim_start().starts_with('{') { spec.clone() } else { std::fs::read_to_string(spec)? };
            let gs: GeneratorSpec = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
            emit(out.as_deref(), &gs.generate(seed)?.to_doc())?;
        }
        Cmd::Relabel { input, d, beta, out, trace } => {
            let (h, sigma) = read_graph(input)?;
            let sigma = sigma.ok_or_else(|| Error::Schema("input has no labelling".into()))?;
            let (pi, tr) = relabel_degenerate_local(&h, &sigma, *d, *beta)?;
            match out {
                Some(p) => write_graph(p, &h, h.parts().len() > 1, Some(&pi))?,
                None => emit(None, &GraphDoc::from_graph(&h, h.parts().len() > 1, Some(&pi)))?,
            }
            if let Some(p) = trace {
                emit(Some(p), &tr)?;
            }
        }
        Cmd::Check(a) => return check(a, seed, budget),
        Cmd::Drc { kind, input, params, out } => {
            let (g, _) = read_graph(input)?;
            let p: DrcParams = read_json(params)?;
            let p = p.with_seed(seed);
            let v = g.parts().to_vec();
            let outcome = match kind {
                DrcKind::Bipartite => {
                    if v.len() != 2 {
                        return Err(Error::PreconditionViolated("bipartite selection needs a graph with two parts".into()));
                    }
                    select_bipartite(&g, &v[0], &v[1], &v[0], &v[1], &p, budget)?
                }
                DrcKind::Rpartite => {
                    let r = v.len();
                    let want = p.family_samples.max(1);
                    let k_rule = HeavyRule { reference: v.clone(), delta: (p.delta / 2.0).powi(r as i32) };
                    let k = sample_family(&g, Pattern::Clique, r, &v, Some(k_rule), want * 4, want as u64 * 800, rng::derive(seed, 1));
                    let f_rule = HeavyRule { reference: v.clone(), delta: p.delta.powi(r as i32) };
                    let f = sample_family(&g, Pattern::Clique, r, &v, Some(f_rule), want, want as u64 * 800, rng::derive(seed, 2));
                    select_rpartite(&g, &v, &v, &k, &f, &p, budget)?
                }
            };
            emit(out.as_deref(), &outcome)?;
        }
        Cmd::Embed(a) => embed(a, seed, budget)?,
        Cmd::Structures(a) => structures(a, seed)?,
        Cmd::Ramsey { input, h, r, params, out } => {
            let (red, _) = read_graph(input)?;
            let (hg, lab, col) = read_coloured(h)?;
            let col = col.ok_or_else(|| Error::Schema("H needs a coloring field".into()))?;
            let mut p: RamseyParams = read_json(params)?;
            p.seed = seed;
            let (f, report) = ramsey_pipeline(&red, *r, &hg, &lab, &col, &p, budget)?;
            emit(out.as_deref(), &json!({ "map": f.map, "report": report }))?;
        }
        Cmd::Bench { spec, out } => {
            let spec = ExperimentSpec::load(spec)?;
            let (_, summary) = run_experiment(&spec, budget, out.as_deref())?;
            print!("{}", summary.table());
        }
    }
    Ok(Outcome::Done)
}

fn check(a: &CheckArgs, seed: u64, budget: &Budget) -> weave::Result<Outcome> {
    let (g, _) = read_graph(&a.input)?;
    let mode = match a.mode {
        Mode::Exact => CheckMode::Exact,
        Mode::Sampled => CheckMode::Sampled { trials: a.trials, seed },
    };
    let out = a.out.as_deref();
    match a.kind {
        CheckKind::Dense | CheckKind::DegreeDense => {
            let (x, y) = (vertex_set(&g, &a.x)?, vertex_set(&g, &a.y)?);
            let v = match a.kind {
                CheckKind::Dense => check_dense_pair(&g, &x, &y, a.eps, a.delta, mode)?,
                _ => check_degree_dense_between(&g, &x, &y, a.alpha, a.eps, a.delta, mode)?,
            };
            emit(out, &v)?;
            if v.status == DensityStatus::Refuted {
                return Ok(Outcome::Refuted);
            }
        }
        CheckKind::Potential => {
            let (x, y) = (vertex_set(&g, &a.x)?, vertex_set(&g, &a.y)?);
            let c = potential(&g, &x, &y, a.p, a.d, a.beta, mode, budget)?;
            emit(out, &json!({ "value": c.value(), "se": c.se(), "exact": c.is_exact(), "count": c }))?;
        }
        CheckKind::Common => {
            let (x, y) = (vertex_set(&g, &a.x)?, vertex_set(&g, &a.y)?);
            let c = is_common(&g, &x, &y, a.d, a.beta, budget)?;
            emit(out, &c)?;
            if !c.ok {
                return Ok(Outcome::Refuted);
            }
        }
        CheckKind::Heavy => {
            let fam = heavy_cliques(&g, g.parts(), a.delta, budget)?;
            let members: Vec<&[usize]> = fam.iter().collect();
            emit(out, &json!({ "delta": a.delta, "count": members.len(), "members": members }))?;
        }
    }
    Ok(Outcome::Done)
}

fn embed(a: &EmbedArgs, seed: u64, budget: &Budget) -> weave::Result<()> {
    let (g, _) = read_graph(&a.g)?;
    let (h, lab, col) = read_coloured(&a.h)?;
    let (f, log) = match a.kind {
        EmbedKind::Bipartite | EmbedKind::Rpartite => {
            let mut p: PipelineParams = read_json(&a.params)?;
            p.drc.seed = seed;
            if matches!(a.kind, EmbedKind::Bipartite) {
                embed_bipartite(&g, &h, &lab, &p, budget)?
            } else {
                embed_rpartite(&g, &h, &lab, &p, budget)?
            }
        }
        EmbedKind::Backbone => {
            let mut p: BackboneParams = read_json(&a.params)?;
            p.pipeline.drc.seed = seed;
            let path = a.backbone.as_ref().ok_or_else(|| Error::Schema("--backbone is required".into()))?;
            let bb: BackboneDoc = read_json(path)?;
            let parts: Vec<Vec<VertexSet>> =
                bb.parts.iter().map(|row| row.iter().map(|s| VertexSet::from_iter(g.n(), s.iter().copied())).collect()).collect();
            let col = col.ok_or_else(|| Error::Schema("H needs a coloring field".into()))?;
            embed_via_backbone(&g, &parts, &h, &lab, &col, &p, budget)?
        }
    };
    let check = verify_embedding(&g, &h, &f.map);
    if !check.ok {
        return Err(Error::InternalInvariantBroken(format!("embedding failed verification: {:?}", check.first_violation)));
    }
    // Keyed by label: entry `i` is the image of the vertex with label `i + 1`.
    let by_label: Vec<Option<usize>> = lab.sequence().iter().map(|&v| f.map[v]).collect();
    emit(a.out.as_deref(), &json!({ "by_label": by_label, "map": f.map }))?;
    if let Some(p) = &a.log {
        emit(Some(p), &log)?;
    }
    Ok(())
}

fn structures(a: &StructArgs, seed: u64) -> weave::Result<()> {
    let need = |x: Option<usize>, name: &str| x.ok_or_else(|| Error::Schema(format!("--{name} is required")));
    let out = a.out.as_deref();
    match a.kind {
        StructKind::Bkr | StructKind::Pkr => {
            let (k, r) = (need(a.k, "k")?, need(a.r, "r")?);
            let (g, parts) = match a.kind {
                StructKind::Bkr => (make_bkr(k, r), true),
                _ => (make_pkr(k, r), false),
            };
            emit(out, &GraphDoc::from_graph(&g, parts, None))?;
        }
        StructKind::Backbone => {
            let path = a.input.as_ref().ok_or_else(|| Error::Schema("--in is required".into()))?;
            let (g, _) = read_graph(path)?;
            let r = need(a.r, "r")?;
            let mode = CheckMode::Sampled { trials: a.trials as u64, seed };
            let bb = find_backbone_min_degree(&g, r, a.eps, a.delta, 0, g.parts(), mode, seed)?;
            emit(out, &bb)?;
        }
        StructKind::Recolor => {
            let path = a.input.as_ref().ok_or_else(|| Error::Schema("--in is required".into()))?;
            let (h, lab, col) = read_coloured(path)?;
            let col = col.ok_or_else(|| Error::Schema("H needs a coloring field".into()))?;
            let bc = balanced_recolor(&h, &lab, &col, need(a.k, "k")?, a.eps, seed, a.trials)?;
            emit(out, &bc)?;
        }
    }
    Ok(())
}
