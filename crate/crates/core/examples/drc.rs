//! One bipartite dependent random choice selection and the re-check of its
//! certificate.
//!
//! Usage: `cargo run --release --example drc [side] [seed]`

use weave::drc::{select_bipartite, verify_certificate, Checked, DrcParams};
use weave::gen::gen_dense_rpartite_g;
use weave::Budget;

fn main() -> weave::Result<()> {
    let mut args = std::env::args().skip(1);
    let side: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(60);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let budget = Budget::from_env();

    let g = gen_dense_rpartite_g(&[side, side], 0.6, seed)?;
    let (v1, v2) = (g.part(0), g.part(1));
    let params = DrcParams::practical(2, 4, 0.6).with_seed(seed);
    let out = select_bipartite(&g, v1, v2, v1, v2, &params, &budget)?;

    println!("T1 = {:?}, T2 = {:?}", out.t[0], out.t[1]);
    println!("|B1| = {}, |B2| = {}, attempts = {}", out.b[0].len(), out.b[1].len(), out.attempts);
    for rec in &out.certificate {
        let how = match rec.checked {
            Checked::Exact => "exact",
            Checked::Sampled => "sampled",
            Checked::Skipped => "skipped",
        };
        println!("  {:<8} {how:<8} pass = {:?} value = {:?} threshold = {:?}", rec.id, rec.pass, rec.value, rec.threshold);
    }
    let problems = verify_certificate(&g, &out, &budget)?;
    println!("re-verification: {}", if problems.is_empty() { "clean".to_string() } else { problems.join("; ") });
    Ok(())
}
