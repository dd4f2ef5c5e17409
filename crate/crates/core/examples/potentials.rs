//! Tuple potentials, commonness and heavy cliques on a random tripartite host.
//!
//! Usage: `cargo run --release --example potentials [seed]`

use weave::gen::gen_dense_rpartite_g;
use weave::potentials::{heavy_cliques, is_common, negligible_threshold, potential};
use weave::{Budget, CheckMode};

fn main() -> weave::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let budget = Budget::from_env();
    let g = gen_dense_rpartite_g(&[20, 20, 20], 0.5, seed)?;
    let (x, y) = (g.part(0), g.part(1));

    let (p, d, beta, lambda) = (2, 2, 4, 4.0);
    let exact = potential(&g, x, y, p, d, beta, CheckMode::Exact, &budget)?;
    let est = potential(&g, x, y, p, d, beta, CheckMode::Sampled { trials: 5000, seed }, &budget)?;
    println!(
        "({p},{d},{beta})-potential of part 0 in part 1: exact {}, sampled {:.1} ± {:.1}; negligible below {}",
        exact.value(),
        est.value(),
        est.se(),
        negligible_threshold(lambda, p)
    );

    for beta in [1, 3, 5] {
        let c = is_common(&g, x, y, 2, beta, &budget)?;
        println!("(2,{beta})-common: {} {:?}", c.ok, c.witness);
    }

    let fam = heavy_cliques(&g, g.parts(), 0.2, &budget)?;
    println!("0.2-heavy triangles across the parts: {}", fam.len());
    Ok(())
}
