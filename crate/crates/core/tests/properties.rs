use std::collections::BTreeSet;

use proptest::prelude::*;

use weave::density::{check_dense_pair, DensityStatus};
use weave::gen::{degeneracy, gen_degenerate_bandwidth_h};
use weave::graph::{consecutive_parts, verify_labelling};
use weave::labelling::{locality_bound, relabel_degenerate_local};
use weave::potentials::{is_common, potential};
use weave::{Budget, CheckMode, Labelling, PartitionedGraph, VertexSet};

fn bipartite(n1: usize, n2: usize, bits: &[bool]) -> PartitionedGraph {
    let mut e = Vec::new();
    for u in 0..n1 {
        for v in 0..n2 {
            if bits[(u * n2 + v) % bits.len()] {
                e.push((u, n1 + v));
            }
        }
    }
    let n = n1 + n2;
    PartitionedGraph::from_edges(n, &e).unwrap().with_parts(consecutive_parts(n, &[n1, n2]), true).unwrap()
}

fn common(g: &PartitionedGraph, s: &[usize], y: &[usize]) -> usize {
    y.iter().filter(|&&w| s.iter().all(|&u| g.has_edge(u, w))).count()
}

fn brute_potential(g: &PartitionedGraph, xs: &[usize], ys: &[usize], k: usize, beta: usize) -> u64 {
    let total = xs.len().pow(k as u32);
    (0..total)
        .filter(|&code| {
            let mut c = code;
            let t: Vec<usize> = (0..k)
                .map(|_| {
                    let v = xs[c % xs.len()];
                    c /= xs.len();
                    v
                })
                .collect();
            common(g, &t, ys) < beta
        })
        .count() as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vertex_set_matches_btreeset(n in 1usize..200, a in prop::collection::vec(0usize..200, 0..60), b in prop::collection::vec(0usize..200, 0..60)) {
        let a: Vec<usize> = a.into_iter().map(|x| x % n).collect();
        let b: Vec<usize> = b.into_iter().map(|x| x % n).collect();
        let (sa, sb) = (VertexSet::from_iter(n, a.iter().copied()), VertexSet::from_iter(n, b.iter().copied()));
        let (ta, tb): (BTreeSet<usize>, BTreeSet<usize>) = (a.into_iter().collect(), b.into_iter().collect());
        prop_assert_eq!(sa.to_vec(), ta.iter().copied().collect::<Vec<_>>());
        prop_assert_eq!(sa.len(), ta.len());
        prop_assert_eq!(sa.intersection(&sb).to_vec(), ta.intersection(&tb).copied().collect::<Vec<_>>());
        prop_assert_eq!(sa.union(&sb).to_vec(), ta.union(&tb).copied().collect::<Vec<_>>());
        prop_assert_eq!(sa.difference(&sb).to_vec(), ta.difference(&tb).copied().collect::<Vec<_>>());
        prop_assert_eq!(sa.intersection_len(&sb), ta.intersection(&tb).count());
        prop_assert_eq!(sa.is_subset(&sb), ta.is_subset(&tb));
        prop_assert_eq!(sa.is_disjoint(&sb), ta.is_disjoint(&tb));
        prop_assert_eq!(sa.first(), ta.first().copied());
        for k in 0..ta.len() {
            prop_assert_eq!(sa.nth(k), ta.iter().nth(k).copied());
        }
    }

    #[test]
    fn generator_is_honest(n in 2usize..300, d in 1usize..4, beta in 1usize..9, r in 2usize..5, seed in any::<u64>()) {
        let (h, lab, col) = gen_degenerate_bandwidth_h(n, d, beta, r, seed).unwrap();
        prop_assert_eq!(h.n(), n);
        for (u, v) in h.edges() {
            prop_assert!(col[u] != col[v]);
            prop_assert!(lab.label(u).abs_diff(lab.label(v)) <= beta);
        }
        for v in 0..n {
            let back = h.neighbors(v).iter().filter(|&u| lab.label(u) < lab.label(v)).count();
            prop_assert!(back <= d);
        }
        prop_assert!(degeneracy(&h) <= d);
    }

    #[test]
    fn relabel_meets_bounds(n in 2usize..250, d in 1usize..4, beta in 1usize..9, seed in any::<u64>()) {
        let (h, sigma, _) = gen_degenerate_bandwidth_h(n, d, beta, 2, seed).unwrap();
        let (pi, trace) = relabel_degenerate_local(&h, &sigma, d, beta).unwrap();
        let rep = verify_labelling(&h, &pi, 5 * d, locality_bound(beta));
        prop_assert!(rep.degenerate_ok && rep.local_ok, "{:?}", rep);
        prop_assert_eq!(trace.steps.len(), n);
        let labels: BTreeSet<usize> = (0..n).map(|v| pi.label(v)).collect();
        prop_assert_eq!(labels.len(), n);
        prop_assert_eq!(labels.iter().next_back().copied(), Some(n));
    }

    #[test]
    fn exact_potential_matches_brute_force(
        n1 in 1usize..7,
        n2 in 1usize..8,
        bits in prop::collection::vec(any::<bool>(), 1..56),
        p in 0usize..3,
        d in 1usize..3,
        beta in 0usize..5,
    ) {
        let g = bipartite(n1, n2, &bits);
        let (x, y) = (g.part(0).clone(), g.part(1).clone());
        let c = potential(&g, &x, &y, p, d, beta, CheckMode::Exact, &Budget::default()).unwrap();
        prop_assert_eq!(c.exact(), Some(brute_potential(&g, &x.to_vec(), &y.to_vec(), p + d, beta)));
    }

    #[test]
    fn commonness_matches_brute_force(
        n1 in 1usize..8,
        n2 in 1usize..8,
        bits in prop::collection::vec(any::<bool>(), 1..64),
        d in 0usize..4,
        beta in 0usize..6,
    ) {
        let g = bipartite(n1, n2, &bits);
        let (xs, ys) = (g.part(0).to_vec(), g.part(1).to_vec());
        let q = d.min(xs.len());
        let mut want = true;
        for mask in 0u32..(1 << xs.len()) {
            if mask.count_ones() as usize == q {
                let s: Vec<usize> = (0..xs.len()).filter(|i| mask >> i & 1 == 1).map(|i| xs[i]).collect();
                want &= common(&g, &s, &ys) >= beta;
            }
        }
        let got = is_common(&g, g.part(0), g.part(1), d, beta, &Budget::default()).unwrap();
        prop_assert_eq!(got.ok, want);
        if let Some(w) = got.witness {
            prop_assert!(common(&g, &w, &ys) < beta);
        }
    }

    #[test]
    fn dense_pair_exact_matches_brute_force(
        n1 in 1usize..6,
        n2 in 1usize..6,
        bits in prop::collection::vec(any::<bool>(), 1..36),
        eps in 0.05f64..1.0,
        delta in 0.0f64..1.0,
    ) {
        let g = bipartite(n1, n2, &bits);
        let (xs, ys) = (g.part(0).to_vec(), g.part(1).to_vec());
        let kx = ((eps * n1 as f64) - 1e-9).ceil().max(1.0) as u32;
        let ky = ((eps * n2 as f64) - 1e-9).ceil().max(1.0) as u32;
        let mut dense = true;
        for mx in 1u32..(1 << n1) {
            for my in 1u32..(1 << n2) {
                if mx.count_ones() < kx || my.count_ones() < ky {
                    continue;
                }
                let e = (0..n1).filter(|i| mx >> i & 1 == 1).flat_map(|i| (0..n2).filter(move |j| my >> j & 1 == 1).map(move |j| (i, j)))
                    .filter(|&(i, j)| g.has_edge(xs[i], ys[j])).count();
                if (e as f64) < delta * (mx.count_ones() * my.count_ones()) as f64 - 1e-9 {
                    dense = false;
                }
            }
        }
        let v = check_dense_pair(&g, g.part(0), g.part(1), eps, delta, CheckMode::Exact).unwrap();
        prop_assert_eq!(v.status == DensityStatus::Certified, dense);
        prop_assert_eq!(v.status == DensityStatus::Refuted, !dense);
    }

    #[test]
    fn labelling_rejects_non_bijections(labels in prop::collection::vec(0usize..12, 1..10)) {
        let m = labels.len();
        let distinct: BTreeSet<usize> = labels.iter().copied().collect();
        let valid = distinct.len() == m && labels.iter().all(|&l| (1..=m).contains(&l));
        prop_assert_eq!(Labelling::from_labels(labels).is_ok(), valid);
    }
}
