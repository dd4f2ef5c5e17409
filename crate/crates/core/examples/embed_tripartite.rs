//! Embeds a 3-coloured, 2-degenerate graph of small bandwidth into a random
//! tripartite host with the rolling `r`-partite pipeline.
//!
//! Usage: `cargo run --release --example embed_tripartite [part] [seed]`

use std::time::Instant;

use weave::drc::DrcParams;
use weave::embed::{embed_rpartite, verify_embedding, PipelineParams};
use weave::gen::{colour_parts, gen_degenerate_bandwidth_h, gen_dense_rpartite_g};
use weave::Budget;

fn main() -> weave::Result<()> {
    let mut args = std::env::args().skip(1);
    let part: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(300);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let m: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(3 * part * 4 / 5);
    let beta: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(12);

    let g = gen_dense_rpartite_g(&[part, part, part], 0.6, seed)?;
    let (h, lab, col) = gen_degenerate_bandwidth_h(m, 2, beta, 3, seed ^ 0xabc)?;
    let h = h.with_parts(colour_parts(&col, 3), true)?;

    let params = PipelineParams::new(DrcParams::practical(2, beta, 0.6).with_seed(seed));
    let start = Instant::now();
    let (f, log) = embed_rpartite(&g, &h, &lab, &params, &Budget::from_env())?;
    let check = verify_embedding(&g, &h, &f.map);
    println!(
        "host 3 x {part}, H with {m} vertices: verified = {}, blocks = {}, fallbacks = {}, {:.2?}",
        check.ok,
        log.blocks.len(),
        log.fallbacks,
        start.elapsed()
    );
    Ok(())
}
