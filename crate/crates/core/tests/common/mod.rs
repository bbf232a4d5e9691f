//! Brute-force references shared by the integration and acceptance tests.
//! Deliberately naive: no candidate filtering, no variable ordering.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qlattice::graph::PropertyGraph;
use qlattice::instantiate::InstantiationLattice;
use qlattice::pattern::{natural_cmp, PEdge, PatternGraph};

pub type Mapping = (BTreeMap<String, String>, BTreeMap<String, String>);

fn node_fits(p: &PatternGraph, g: &PropertyGraph, v: usize, t: usize) -> bool {
    let attrs = &g.node(t).attrs;
    p.nodes[v].predicates.iter().all(|pr| pr.eval(attrs.get(&pr.attr)))
}

fn edge_fits(g: &PropertyGraph, pe: &PEdge, s: usize, t: usize, x: usize) -> bool {
    let (a, b) = g.endpoints(x);
    let oriented = if pe.directed && g.is_directed() {
        (a, b) == (s, t)
    } else {
        (a, b) == (s, t) || (a, b) == (t, s)
    };
    oriented && pe.predicates.iter().all(|pr| pr.eval(g.edge(x).attr(&pr.attr).as_ref()))
}

fn ends(p: &PatternGraph) -> Vec<(usize, usize)> {
    let pos = p.node_positions();
    p.edges
        .iter()
        .map(|e| (pos[e.source.as_str()], pos[e.target.as_str()]))
        .collect()
}

/// Every injective node map admitting an injective edge assignment, each
/// paired with the lexicographically smallest assignment (pattern edges in
/// natural id order, data edges by index).
pub fn all_matches(p: &PatternGraph, g: &PropertyGraph) -> BTreeSet<Mapping> {
    let ends = ends(p);
    let mut edge_order: Vec<usize> = (0..p.edges.len()).collect();
    edge_order.sort_by(|&a, &b| natural_cmp(&p.edges[a].id, &p.edges[b].id));
    let mut out = BTreeSet::new();
    let mut map = Vec::new();
    injective_maps(p.nodes.len(), g.node_count(), &mut map, &mut |map| {
        if !(0..map.len()).all(|v| node_fits(p, g, v, map[v])) {
            return;
        }
        let mut best: Option<Vec<usize>> = None;
        let mut chosen = Vec::new();
        all_edge_choices(p, g, &ends, &edge_order, map, &mut chosen, &mut |c| {
            if best.as_ref().is_none_or(|b| c < b.as_slice()) {
                best = Some(c.to_vec());
            }
        });
        if let Some(best) = best {
            let nodes = (0..map.len()).map(|v| (p.nodes[v].id.clone(), g.node(map[v]).id.clone())).collect();
            let edges = edge_order
                .iter()
                .zip(&best)
                .map(|(&e, &x)| (p.edges[e].id.clone(), g.edge(x).id.clone()))
                .collect();
            out.insert((nodes, edges));
        }
    });
    out
}

fn injective_maps(k: usize, n: usize, map: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if map.len() == k {
        f(map);
        return;
    }
    for t in 0..n {
        if map.contains(&t) {
            continue;
        }
        map.push(t);
        injective_maps(k, n, map, f);
        map.pop();
    }
}

fn all_edge_choices(
    p: &PatternGraph,
    g: &PropertyGraph,
    ends: &[(usize, usize)],
    order: &[usize],
    map: &[usize],
    chosen: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    let Some(&e) = order.get(chosen.len()) else {
        f(chosen);
        return;
    };
    let (s, t) = ends[e];
    for x in 0..g.edge_count() {
        if chosen.contains(&x) || !edge_fits(g, &p.edges[e], map[s], map[t], x) {
            continue;
        }
        chosen.push(x);
        all_edge_choices(p, g, ends, order, map, chosen, f);
        chosen.pop();
    }
}

/// Whether any embedding exists; nodes in declaration order, each checked
/// against the pattern edges it closes.
pub fn exists(p: &PatternGraph, g: &PropertyGraph) -> bool {
    let ends = ends(p);
    let order: Vec<usize> = (0..p.edges.len()).collect();
    let mut map = Vec::new();
    exists_from(p, g, &ends, &order, &mut map)
}

fn exists_from(p: &PatternGraph, g: &PropertyGraph, ends: &[(usize, usize)], order: &[usize], map: &mut Vec<usize>) -> bool {
    let i = map.len();
    if i == p.nodes.len() {
        let mut any = false;
        all_edge_choices(p, g, ends, order, map, &mut Vec::new(), &mut |_| any = true);
        return any;
    }
    for t in 0..g.node_count() {
        if map.contains(&t) || !node_fits(p, g, i, t) {
            continue;
        }
        map.push(t);
        let closed = ends.iter().zip(&p.edges).all(|(&(s, u), pe)| {
            s.max(u) != i || (0..g.edge_count()).any(|x| edge_fits(g, pe, map[s], map[u], x))
        });
        if closed && exists_from(p, g, ends, order, map) {
            return true;
        }
        map.pop();
    }
    false
}

/// Node permutations of `p` preserving every edge with its direction and
/// predicates, with multiplicity.
pub fn automorphisms(p: &PatternGraph) -> Vec<Vec<usize>> {
    let ends = ends(p);
    let key = |e: usize, map: &[usize]| {
        let (s, t) = (map[ends[e].0], map[ends[e].1]);
        let (s, t) = if p.edges[e].directed { (s, t) } else { (s.min(t), s.max(t)) };
        let mut preds: Vec<String> = p.edges[e].predicates.iter().map(|x| x.to_string()).collect();
        preds.sort();
        (s, t, p.edges[e].directed, preds)
    };
    let identity: Vec<usize> = (0..p.nodes.len()).collect();
    let mut base: Vec<_> = (0..p.edges.len()).map(|e| key(e, &identity)).collect();
    base.sort();
    let node_key = |v: usize| {
        let mut preds: Vec<String> = p.nodes[v].predicates.iter().map(|x| x.to_string()).collect();
        preds.sort();
        preds
    };
    let mut out = Vec::new();
    let mut map = Vec::new();
    injective_maps(p.nodes.len(), p.nodes.len(), &mut map, &mut |m| {
        if !(0..m.len()).all(|v| node_key(v) == node_key(m[v])) {
            return;
        }
        let mut img: Vec<_> = (0..p.edges.len()).map(|e| key(e, m)).collect();
        img.sort();
        if img == base {
            out.push(m.to_vec());
        }
    });
    out
}

/// A small query with one to three underspecified rules over attribute
/// domains the random graphs actually use.
pub fn random_source(rng: &mut ChaCha8Rng, directed: bool) -> String {
    let arrow = if directed { "->" } else { "--" };
    let mut lines = Vec::new();
    let n = rng.gen_range(1..=3);
    for i in 0..n {
        lines.push(format!("node n{i};"));
    }
    for i in 1..n {
        lines.push(format!("edge e{i} = n{} {arrow} n{i};", i - 1));
    }
    let motif = rng.gen_bool(0.6);
    if motif {
        let decl = [
            "clique(nodes=2..3)",
            "clique(nodes=3)",
            "loop(nodes=3..4)",
            "path(nodes=2..3)",
            "tree(nodes=2..4)",
        ]
        .choose(rng)
        .unwrap();
        lines.push(format!("motif M = {decl};"));
        let end = if decl.starts_with("path") { "M.head" } else { "M" };
        lines.push(format!("edge em = n0 {arrow} {end};"));
    }
    for i in 0..n {
        match rng.gen_range(0..4) {
            0 => lines.push(format!("rule attr node n{i} : label == \"{}\";", ["a", "b", "c"].choose(rng).unwrap())),
            1 => lines.push(format!("rule attr node n{i} : value >= {};", rng.gen_range(1..4))),
            _ => {}
        }
    }
    if rng.gen_bool(0.4) {
        let target = if motif && rng.gen() { "edges in M".to_string() } else if n > 1 { "edge e1".into() } else { String::new() };
        if !target.is_empty() {
            lines.push(format!("rule attr {target} : value >= {};", rng.gen_range(1..4)));
        }
    }
    let mut growable: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    if motif {
        growable.push("M".into());
    }
    if n > 1 {
        growable.push("e1".into());
    }
    growable.shuffle(rng);
    let k = rng.gen_range(1..=growable.len().min(3));
    for t in &growable[..k] {
        lines.push(format!("rule repeat {t} : count=0..{};", rng.gen_range(1..=2)));
    }
    format!("query \"p\" {{\n  {}\n}}", lines.join("\n  "))
}

pub fn witness_reaches(l: &InstantiationLattice, from: &str, to: &str) -> bool {
    let mut seen = BTreeSet::from([from.to_string()]);
    let mut queue = VecDeque::from([from.to_string()]);
    while let Some(cur) = queue.pop_front() {
        if cur == to {
            return true;
        }
        for w in l.witnesses.iter().filter(|w| w.from == cur) {
            if seen.insert(w.to.clone()) {
                queue.push_back(w.to.clone());
            }
        }
    }
    false
}
