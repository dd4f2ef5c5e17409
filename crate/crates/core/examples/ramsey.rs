//! Monochromatic embedding in a 2-coloured complete graph whose red edges
//! contain a dense planted grid.
//!
//! Usage: `cargo run --release --example ramsey [blob] [seed]`

use std::time::Instant;

use weave::drc::DrcParams;
use weave::embed::PipelineParams;
use weave::gen::{gen_degenerate_bandwidth_h, gen_planted, PlantedSpec};
use weave::structures::{ramsey_pipeline, RamseyParams};
use weave::Budget;

fn main() -> weave::Result<()> {
    let mut args = std::env::args().skip(1);
    let blob: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);

    let spec = PlantedSpec { rows: 6, cols: 3, blob, p_hi: 0.9, p_lo: 0.1, complete_rows: false, shuffle: true };
    let planted = gen_planted(&spec, seed)?;
    let n = planted.graph.n();
    let m = n / 9;
    let (h, lab, col) = gen_degenerate_bandwidth_h(m, 2, 6, 2, seed ^ 0xabc)?;

    let params = RamseyParams {
        partition: None,
        t: spec.rows * spec.cols,
        eps: 0.2,
        delta: 0.5,
        check_trials: 200,
        blocks: 0,
        balance_eps: 0.5,
        balance_trials: 200,
        seed,
        pipeline: PipelineParams::new(DrcParams::practical(2, 6, 0.5).with_seed(seed)),
    };
    let start = Instant::now();
    let (_, report) = ramsey_pipeline(&planted.graph, 2, &h, &lab, &col, &params, &Budget::from_env())?;
    println!(
        "n = {n}, |H| = {m}: colour {:?}, path power k = {}, backbone rows = {}, refuted pairs = {}, audit = {}, {:.2?}",
        report.colour,
        report.path.k,
        report.backbone_rows,
        report.refuted_pairs,
        report.audit_ok,
        start.elapsed()
    );
    for note in &report.notes {
        println!("  note: {note}");
    }
    Ok(())
}
