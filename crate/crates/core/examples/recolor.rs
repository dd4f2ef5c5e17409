//! Patterns, block recolouring and a planted backbone.
//!
//! Usage: `cargo run --release --example recolor [seed]`

use weave::density::reduced_graph;
use weave::gen::{gen_degenerate_bandwidth_h, gen_planted, PlantedSpec};
use weave::structures::{balanced_recolor, find_bkr, make_bkr, make_pkr, recolor};
use weave::CheckMode;

fn main() -> weave::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);

    let b = make_bkr(4, 3);
    let p = make_pkr(12, 3);
    println!("B_4^3: {} vertices, {} edges; P_12^3: {} vertices, {} edges", b.n(), b.edge_count(), p.n(), p.edge_count());

    let m = 600;
    let (h, lab, col) = gen_degenerate_bandwidth_h(m, 2, 3, 3, seed)?;
    let rec = recolor(&h, &lab, &col, &[2, 0, 1], 0.5)?;
    let buffer = rec.coloring.iter().filter(|&&c| c == 3).count();
    println!("recolour by (2 0 1): {} transpositions, {buffer} buffer vertices", rec.transpositions.len());

    let (h, lab, col) = gen_degenerate_bandwidth_h(2000, 2, 2, 2, seed)?;
    let bc = balanced_recolor(&h, &lab, &col, 4, 0.5, seed, 200)?;
    println!("balanced recolouring into 4 blocks of {} labels (sub-intervals of {}):", bc.xi, bc.sub_len);
    for (i, c) in bc.counts.iter().enumerate() {
        println!("  block {i}: colour counts {c:?}");
    }
    println!("proper {}, sizes {}, buffer small {}, buffer placed {}", bc.proper, bc.sizes_ok, bc.buffer_small, bc.buffer_ok);

    let spec = PlantedSpec { rows: 5, cols: 3, blob: 40, p_hi: 0.9, p_lo: 0.1, complete_rows: true, shuffle: false };
    let planted = gen_planted(&spec, seed)?;
    let mode = CheckMode::Sampled { trials: 300, seed };
    let reduced = reduced_graph(&planted.graph, &planted.parts(), 0.2, 0.5, mode)?;
    let found = find_bkr(&reduced.graph, 2, seed);
    println!("planted 5 x 3 grid: B_k^2 rows found in the reduced graph: {:?}", found.rows);
    Ok(())
}
