//! Embeds a 2-degenerate graph of bandwidth 30 into a random bipartite host.
//!
//! Usage: `cargo run --release --example embed_bipartite [side] [seed]`

use std::time::Instant;

use weave::drc::DrcParams;
use weave::embed::{embed_bipartite, verify_embedding, PipelineParams};
use weave::gen::{colour_parts, gen_degenerate_bandwidth_h, gen_dense_rpartite_g};
use weave::Budget;

fn main() -> weave::Result<()> {
    let mut args = std::env::args().skip(1);
    let side: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(1000);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);

    let g = gen_dense_rpartite_g(&[side, side], 0.5, seed)?;
    let m = 2 * side * 4 / 5;
    let (h, lab, col) = gen_degenerate_bandwidth_h(m, 2, 30, 2, seed ^ 0xabc)?;
    let h = h.with_parts(colour_parts(&col, 2), true)?;

    let params = PipelineParams::new(DrcParams::practical(2, 30, 0.5).with_seed(seed));
    let start = Instant::now();
    let (f, log) = embed_bipartite(&g, &h, &lab, &params, &Budget::from_env())?;
    let check = verify_embedding(&g, &h, &f.map);
    println!(
        "host {side}+{side}, H with {m} vertices: verified = {}, blocks = {}, fallbacks = {}, {:.2?}",
        check.ok,
        log.blocks.len(),
        log.fallbacks,
        start.elapsed()
    );
    Ok(())
}
