//! Exact and sampled density checks on a small random pair, and a reduced
//! graph over a partition with one sparse pair.
//!
//! Usage: `cargo run --release --example density [seed]`

use weave::density::{check_dense_pair, check_degree_dense_between, reduced_graph};
use weave::gen::gen_dense_rpartite_g;
use weave::CheckMode;

fn main() -> weave::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);

    let g = gen_dense_rpartite_g(&[10, 10], 0.8, seed)?;
    let (x, y) = (g.part(0), g.part(1));
    for (eps, delta) in [(0.5, 0.5), (0.1, 0.5)] {
        let v = check_dense_pair(&g, x, y, eps, delta, CheckMode::Exact)?;
        println!("({eps}, {delta})-dense, exact: {:?} after {} subset pairs", v.status, v.trials);
        if let Some(cx) = &v.counterexample {
            println!("  witness {:?} x {:?} with density {:.2}", cx.x, cx.y, cx.achieved);
        }
    }
    let v = check_degree_dense_between(&g, x, y, 0.3, 0.2, 0.5, CheckMode::Exact)?;
    println!("(0.3, 0.2, 0.5)-degree-dense, exact: {:?}", v.status);

    let big = gen_dense_rpartite_g(&[200, 200, 200], 0.6, seed)?;
    let mode = CheckMode::Sampled { trials: 500, seed };
    let reduced = reduced_graph(&big, big.parts(), 0.2, 0.4, mode)?;
    println!("reduced graph on 3 parts: {} edges over {} pair verdicts", reduced.graph.edge_count(), reduced.pairs.len());
    Ok(())
}
