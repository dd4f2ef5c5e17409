//! Turns a local labelling of a degenerate graph into one that is both
//! `5d`-degenerate and `⌈β log₂ 4β⌉`-local.
//!
//! Usage: `cargo run --release --example relabel [n] [d] [beta] [seed]`

use weave::gen::gen_degenerate_bandwidth_h;
use weave::graph::verify_labelling;
use weave::labelling::{locality_bound, relabel_degenerate_local};

fn main() -> weave::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().ok());
    let n = args.next().flatten().unwrap_or(300) as usize;
    let d = args.next().flatten().unwrap_or(2) as usize;
    let beta = args.next().flatten().unwrap_or(6) as usize;
    let seed = args.next().flatten().unwrap_or(1);

    let (h, sigma, _) = gen_degenerate_bandwidth_h(n, d, beta, 3, seed)?;
    let (pi, trace) = relabel_degenerate_local(&h, &sigma, d, beta)?;
    let rep = verify_labelling(&h, &pi, 5 * d, locality_bound(beta));
    let (lo, hi) = trace.claim_range();
    println!("H: {n} vertices, {} edges, input {d}-degenerate and {beta}-local", h.edge_count());
    println!(
        "output: worst back-degree {} (bound {}), worst stretch {} (bound {})",
        rep.worst_back_degree,
        5 * d,
        rep.worst_stretch,
        locality_bound(beta)
    );
    println!("label shift sigma - pi ranges over [{lo}, {hi}]");
    Ok(())
}
