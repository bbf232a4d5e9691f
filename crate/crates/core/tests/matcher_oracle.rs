mod common;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlattice::matcher::{match_pattern, MatchOptions};
use qlattice::testkit::{random_graph, random_pattern};

fn case(seed: u64) -> (qlattice::pattern::PatternGraph, qlattice::graph::PropertyGraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let directed = rng.gen_bool(0.5);
    let n = rng.gen_range(1..=7);
    let density = rng.gen_range(0.2..0.7);
    let g = random_graph(&mut rng, n, density, directed, 0.2);
    let mut p = random_pattern(&mut rng, 4, directed);
    if directed {
        for e in &mut p.edges {
            e.directed = !rng.gen_bool(0.2);
        }
    }
    (p, g)
}

#[test]
fn unlimited_matching_equals_exhaustive_enumeration() {
    for seed in 0..150 {
        let (p, g) = case(seed);
        let want = common::all_matches(&p, &g);
        let out = match_pattern(&p, &g, &MatchOptions::default());
        let got: BTreeSet<_> = out.results.iter().map(|r| (r.node_map.clone(), r.edge_map.clone())).collect();
        assert!(out.complete, "seed {seed}");
        assert_eq!(out.results.len(), got.len(), "seed {seed}: duplicate results");
        assert_eq!(got, want, "seed {seed}");
    }
}

#[test]
fn limited_runs_return_a_prefix() {
    for seed in 200..260 {
        let (p, g) = case(seed);
        let all = match_pattern(&p, &g, &MatchOptions::default()).results;
        let k = all.len() / 2 + 1;
        let some = match_pattern(&p, &g, &MatchOptions::limit(k));
        assert_eq!(some.results[..], all[..k.min(all.len())], "seed {seed}");
        assert_eq!(some.complete, all.len() < k || all.is_empty(), "seed {seed}");
    }
}

#[test]
fn symmetry_breaking_keeps_one_mapping_per_automorphism_class() {
    let mut symmetric_hits = 0;
    for seed in 300..420 {
        let (p, g) = case(seed);
        let auts = common::automorphisms(&p);
        let full = match_pattern(&p, &g, &MatchOptions::default());
        let broken = match_pattern(
            &p,
            &g,
            &MatchOptions {
                break_symmetry: true,
                ..Default::default()
            },
        );
        assert_eq!(broken.count * auts.len(), full.count, "seed {seed}");
        // closing the reduced set under automorphisms gives every node map
        let full_maps: BTreeSet<_> = full.results.iter().map(|r| r.node_map.clone()).collect();
        let mut closed = BTreeSet::new();
        for r in &broken.results {
            for a in &auts {
                let m: std::collections::BTreeMap<String, String> = (0..p.nodes.len())
                    .map(|v| (p.nodes[a[v]].id.clone(), r.node_map[&p.nodes[v].id].clone()))
                    .collect();
                closed.insert(m);
            }
        }
        assert_eq!(closed, full_maps, "seed {seed}");
        symmetric_hits += usize::from(auts.len() > 1 && broken.count > 0);
    }
    assert!(symmetric_hits >= 10, "only {symmetric_hits} cases exercised a non-trivial group");
}
