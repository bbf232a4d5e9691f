//! Attribute-aware subgraph matching.
//!
//! Semantics are node-injective and edge-injective: distinct pattern nodes
//! map to distinct data nodes and parallel pattern edges to distinct data
//! edges. Each result is one node mapping; when several edge assignments
//! realise it, the result records the first one in edge-index order.
//!
//! The same backtracking engine embeds patterns into patterns (predicate
//! sets must be contained), which the lattice uses to certify witnesses.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::graph::{Degree, PropertyGraph};
use crate::pattern::{natural_cmp, PEdge, PNode, PatternGraph};
use crate::query::Predicate;

#[derive(Debug, Clone, Default)]
pub struct MatchOptions {
    pub limit: Option<usize>,
    pub time_budget: Option<Duration>,
    pub count_only: bool,
    /// Cap on candidate extensions tried; unlike the time budget this
    /// gives reproducible cut-offs.
    pub step_budget: Option<u64>,
    /// Report one mapping per occurrence instead of one per automorphic
    /// image; see [`symmetry_constraints`].
    pub break_symmetry: bool,
}

impl MatchOptions {
    pub fn limit(n: usize) -> Self {
        MatchOptions {
            limit: Some(n),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatchResult {
    pub node_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchOutcome {
    pub results: Vec<MatchResult>,
    pub count: usize,
    pub complete: bool,
}

/// Runs `pattern` against `g`. Results come in a fixed order determined by
/// the variable ordering and ascending data-node index.
pub fn match_pattern(pattern: &PatternGraph, g: &PropertyGraph, opts: &MatchOptions) -> MatchOutcome {
    let target = GraphTarget::new(g);
    let mut results = Vec::new();
    let order = symmetry_for(pattern, opts);
    let (count, complete) = search(pattern, &target, opts, &[], &order, |nodes, edges| {
        if !opts.count_only {
            results.push(MatchResult {
                node_map: pattern
                    .nodes
                    .iter()
                    .zip(nodes)
                    .map(|(p, &t)| (p.id.clone(), g.node(t).id.clone()))
                    .collect(),
                edge_map: pattern
                    .edges
                    .iter()
                    .zip(edges)
                    .map(|(p, &t)| (p.id.clone(), g.edge(t).id.clone()))
                    .collect(),
            });
        }
    });
    MatchOutcome {
        results,
        count,
        complete,
    }
}

/// Number of results (up to the limit) and whether the search finished.
pub fn count(pattern: &PatternGraph, g: &PropertyGraph, opts: &MatchOptions) -> (usize, bool) {
    let target = GraphTarget::new(g);
    let order = symmetry_for(pattern, opts);
    search(pattern, &target, opts, &[], &order, |_, _| {})
}

const SYMMETRY_BUDGET: u64 = 20_000;

fn symmetry_for(p: &PatternGraph, opts: &MatchOptions) -> Vec<(usize, usize)> {
    if opts.break_symmetry {
        symmetry_constraints(p, SYMMETRY_BUDGET)
    } else {
        Vec::new()
    }
}

/// Ordering constraints `(a, b)`, read as "the image of node `a` has a
/// smaller index than the image of node `b`", that keep exactly one
/// mapping out of every class of mappings differing by a pattern
/// automorphism.
///
/// Built along a stabiliser chain: take the largest orbit of the
/// automorphisms fixing the nodes chosen so far, require its first member
/// to map below all others, fix that member and repeat. Orbits are found by
/// self-embedding searches of at most `budget` steps each; when one runs
/// out the chain stops early, which leaves fewer constraints but never
/// wrong ones.
pub fn symmetry_constraints(p: &PatternGraph, budget: u64) -> Vec<(usize, usize)> {
    let n = p.nodes.len();
    let target = PatternTarget::new(p);
    let mut by_id: Vec<usize> = (0..n).collect();
    by_id.sort_by(|&a, &b| natural_cmp(&p.nodes[a].id, &p.nodes[b].id));
    let mut fixed: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    loop {
        // orbits of the pointwise stabiliser of `fixed`, members in id order
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for &v in by_id.iter().filter(|v| !fixed.contains(v)) {
            let mut home = None;
            for (k, orbit) in orbits.iter().enumerate() {
                let mut pins: Vec<(usize, usize)> = fixed.iter().map(|&f| (f, f)).collect();
                pins.push((orbit[0], v));
                let opts = MatchOptions {
                    limit: Some(1),
                    step_budget: Some(budget),
                    ..Default::default()
                };
                let (found, complete) = search(p, &target, &opts, &pins, &[], |_, _| {});
                if found == 0 && !complete {
                    return out;
                }
                if found > 0 {
                    home = Some(k);
                    break;
                }
            }
            match home {
                Some(k) => orbits[k].push(v),
                None => orbits.push(vec![v]),
            }
        }
        let Some(orbit) = orbits.into_iter().filter(|o| o.len() > 1).max_by_key(|o| (o.len(), std::cmp::Reverse(o[0]))) else {
            return out;
        };
        out.extend(orbit[1..].iter().map(|&u| (orbit[0], u)));
        fixed.push(orbit[0]);
    }
}

/// An embedding of pattern `p` into pattern `q`: node and edge index maps.
/// Predicates of every `p` element must be contained in its image's.
pub fn embed_pattern(p: &PatternGraph, q: &PatternGraph, step_budget: u64) -> Option<(Vec<usize>, Vec<usize>)> {
    if p.nodes.len() > q.nodes.len() || p.edges.len() > q.edges.len() {
        return None;
    }
    let target = PatternTarget::new(q);
    let mut found = None;
    let opts = MatchOptions {
        limit: Some(1),
        step_budget: Some(step_budget),
        ..Default::default()
    };
    search(p, &target, &opts, &[], &[], |n, e| found = Some((n.to_vec(), e.to_vec())));
    found
}

/// Checks a proposed embedding of `p` into `q` given as index maps.
pub fn verify_embedding(p: &PatternGraph, q: &PatternGraph, nodes: &[usize], edges: &[usize]) -> bool {
    if nodes.len() != p.nodes.len() || edges.len() != p.edges.len() {
        return false;
    }
    let target = PatternTarget::new(q);
    let mut used = vec![false; q.nodes.len()];
    for (pn, &t) in p.nodes.iter().zip(nodes) {
        if t >= q.nodes.len() || used[t] || !target.node_ok(pn, t) {
            return false;
        }
        used[t] = true;
    }
    let pos = p.node_positions();
    let mut used_e = vec![false; q.edges.len()];
    let mut buf = Vec::new();
    for (pe, &t) in p.edges.iter().zip(edges) {
        if t >= q.edges.len() || used_e[t] {
            return false;
        }
        used_e[t] = true;
        let a = nodes[pos[pe.source.as_str()]];
        let b = nodes[pos[pe.target.as_str()]];
        buf.clear();
        target.candidate_edges(pe, a, b, &mut buf);
        if !buf.contains(&t) {
            return false;
        }
    }
    true
}

/// What the engine searches in.
pub trait Target {
    fn node_count(&self) -> usize;
    fn node_ok(&self, p: &PNode, t: usize) -> bool;
    fn degree(&self, t: usize) -> Degree;
    /// Sorted, deduplicated neighbours in either direction.
    fn neighbors(&self, t: usize) -> &[usize];
    /// Target edges, ascending, that `p` may map to when its source maps to
    /// `a` and its target to `b`.
    fn candidate_edges(&self, p: &PEdge, a: usize, b: usize, out: &mut Vec<usize>);
}

pub struct GraphTarget<'g> {
    g: &'g PropertyGraph,
    neighbors: Vec<Vec<usize>>,
}

impl<'g> GraphTarget<'g> {
    pub fn new(g: &'g PropertyGraph) -> Self {
        let neighbors = (0..g.node_count())
            .map(|v| {
                let mut n: Vec<usize> = g.out_adj(v).iter().chain(g.in_adj(v)).map(|&(u, _)| u).collect();
                n.sort_unstable();
                n.dedup();
                n
            })
            .collect();
        GraphTarget { g, neighbors }
    }
}

fn all_hold(preds: &[Predicate], mut get: impl FnMut(&str) -> Option<crate::graph::AttrValue>) -> bool {
    preds.iter().all(|p| p.eval(get(&p.attr).as_ref()))
}

impl Target for GraphTarget<'_> {
    fn node_count(&self) -> usize {
        self.g.node_count()
    }

    fn node_ok(&self, p: &PNode, t: usize) -> bool {
        let attrs = &self.g.node(t).attrs;
        p.predicates.iter().all(|pr| pr.eval(attrs.get(&pr.attr)))
    }

    fn degree(&self, t: usize) -> Degree {
        self.g.degree(t)
    }

    fn neighbors(&self, t: usize) -> &[usize] {
        &self.neighbors[t]
    }

    fn candidate_edges(&self, p: &PEdge, a: usize, b: usize, out: &mut Vec<usize>) {
        let start = out.len();
        out.extend_from_slice(self.g.edges_between(a, b));
        if self.g.is_directed() && !p.directed && a != b {
            out.extend_from_slice(self.g.edges_between(b, a));
            out[start..].sort_unstable();
        }
        if !p.predicates.is_empty() {
            let mut i = start;
            while i < out.len() {
                let edge = self.g.edge(out[i]);
                if all_hold(&p.predicates, |name| edge.attr(name)) {
                    i += 1;
                } else {
                    out.remove(i);
                }
            }
        }
    }
}

pub struct PatternTarget<'q> {
    q: &'q PatternGraph,
    ends: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    pairs: BTreeMap<(usize, usize), Vec<usize>>,
    degrees: Vec<Degree>,
}

impl<'q> PatternTarget<'q> {
    pub fn new(q: &'q PatternGraph) -> Self {
        let pos = q.node_positions();
        let ends: Vec<(usize, usize)> = q
            .edges
            .iter()
            .map(|e| (pos[e.source.as_str()], pos[e.target.as_str()]))
            .collect();
        let mut neighbors = vec![Vec::new(); q.nodes.len()];
        let mut pairs: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, &(s, t)) in ends.iter().enumerate() {
            neighbors[s].push(t);
            neighbors[t].push(s);
            pairs.entry((s.min(t), s.max(t))).or_default().push(i);
        }
        for n in &mut neighbors {
            n.sort_unstable();
            n.dedup();
        }
        let degrees = pattern_degrees(q, &ends);
        PatternTarget {
            q,
            ends,
            neighbors,
            pairs,
            degrees,
        }
    }
}

fn contains_all(small: &[Predicate], big: &[Predicate]) -> bool {
    small.iter().all(|p| big.contains(p))
}

impl Target for PatternTarget<'_> {
    fn node_count(&self) -> usize {
        self.q.nodes.len()
    }

    fn node_ok(&self, p: &PNode, t: usize) -> bool {
        contains_all(&p.predicates, &self.q.nodes[t].predicates)
    }

    fn degree(&self, t: usize) -> Degree {
        self.degrees[t]
    }

    fn neighbors(&self, t: usize) -> &[usize] {
        &self.neighbors[t]
    }

    fn candidate_edges(&self, p: &PEdge, a: usize, b: usize, out: &mut Vec<usize>) {
        let Some(list) = self.pairs.get(&(a.min(b), a.max(b))) else {
            return;
        };
        for &e in list {
            let qe = &self.q.edges[e];
            let oriented = if p.directed {
                qe.directed && self.ends[e] == (a, b)
            } else {
                !qe.directed
            };
            if oriented && contains_all(&p.predicates, &qe.predicates) {
                out.push(e);
            }
        }
    }
}

/// Degrees as the matcher's filter uses them: `total` counts every
/// incident edge end, `in`/`out` only directed edges.
fn pattern_degrees(p: &PatternGraph, ends: &[(usize, usize)]) -> Vec<Degree> {
    let mut d = vec![
        Degree {
            in_degree: 0,
            out_degree: 0,
            total: 0,
        };
        p.nodes.len()
    ];
    for (e, &(s, t)) in p.edges.iter().zip(ends) {
        d[s].total += 1;
        d[t].total += 1;
        if e.directed {
            d[s].out_degree += 1;
            d[t].in_degree += 1;
        }
    }
    d
}

struct Plan {
    order: Vec<usize>,
    /// Per order position: earlier-placed pattern neighbours and, for each,
    /// the pattern edges joining them (self-loops use the node itself).
    groups: Vec<Vec<(usize, Vec<usize>)>>,
    candidates: Vec<Vec<bool>>,
    /// Per order position: `(a, b)` ordering constraints completed there.
    checks: Vec<Vec<(usize, usize)>>,
}

fn plan<T: Target>(p: &PatternGraph, target: &T, ends: &[(usize, usize)], pins: &[(usize, usize)]) -> Option<Plan> {
    let n = p.nodes.len();
    let pdeg = pattern_degrees(p, ends);
    let tdeg: Vec<Degree> = (0..target.node_count()).map(|t| target.degree(t)).collect();
    let mut candidates = Vec::with_capacity(n);
    let mut sizes = Vec::with_capacity(n);
    for (v, pn) in p.nodes.iter().enumerate() {
        let d = pdeg[v];
        let pin = pins.iter().find(|&&(a, _)| a == v).map(|&(_, t)| t);
        let c: Vec<bool> = (0..target.node_count())
            .map(|t| {
                let td = tdeg[t];
                pin.is_none_or(|x| x == t)
                    && td.total >= d.total
                    && td.out_degree >= d.out_degree
                    && td.in_degree >= d.in_degree
                    && target.node_ok(pn, t)
            })
            .collect();
        let size = c.iter().filter(|&&b| b).count();
        if size == 0 {
            return None;
        }
        sizes.push(size);
        candidates.push(c);
    }
    let mut adj = vec![Vec::new(); n];
    for &(s, t) in ends {
        adj[s].push(t);
        adj[t].push(s);
    }
    let mut by_id: Vec<usize> = (0..n).collect();
    by_id.sort_by(|&a, &b| natural_cmp(&p.nodes[a].id, &p.nodes[b].id));
    let rank: Vec<usize> = {
        let mut r = vec![0; n];
        for (i, &v) in by_id.iter().enumerate() {
            r[v] = i;
        }
        r
    };
    let mut placed = vec![false; n];
    let mut touching = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let pick = |connected: bool| {
            (0..n)
                .filter(|&v| !placed[v] && (!connected || touching[v]))
                .min_by_key(|&v| (sizes[v], rank[v]))
        };
        let v = pick(true).or_else(|| pick(false)).expect("unplaced node remains");
        placed[v] = true;
        for &u in &adj[v] {
            touching[u] = true;
        }
        order.push(v);
    }
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut groups: Vec<BTreeMap<usize, Vec<usize>>> = vec![BTreeMap::new(); n];
    let mut edge_ids: Vec<usize> = (0..p.edges.len()).collect();
    edge_ids.sort_by(|&a, &b| natural_cmp(&p.edges[a].id, &p.edges[b].id));
    for e in edge_ids {
        let (s, t) = ends[e];
        let (later, other) = if position[s] >= position[t] { (s, t) } else { (t, s) };
        groups[position[later]].entry(other).or_default().push(e);
    }
    Some(Plan {
        order,
        groups: groups.into_iter().map(|g| g.into_iter().collect()).collect(),
        candidates,
        checks: vec![Vec::new(); n],
    })
}

enum Stop {
    Limit,
    Budget,
}

struct Search<'a, T: Target, F: FnMut(&[usize], &[usize])> {
    p: &'a PatternGraph,
    target: &'a T,
    plan: Plan,
    ends: Vec<(usize, usize)>,
    img: Vec<usize>,
    edge_img: Vec<usize>,
    used: Vec<bool>,
    found: usize,
    limit: usize,
    steps: u64,
    step_budget: u64,
    deadline: Option<Instant>,
    emit: F,
    buf: Vec<Vec<usize>>,
}

/// Core backtracking; returns (count, complete).
/// `pins` fix pattern nodes to target nodes; `less` are ordering
/// constraints on images.
fn search<T: Target>(
    p: &PatternGraph,
    target: &T,
    opts: &MatchOptions,
    pins: &[(usize, usize)],
    less: &[(usize, usize)],
    emit: impl FnMut(&[usize], &[usize]),
) -> (usize, bool) {
    let mut emit = emit;
    if p.nodes.is_empty() {
        emit(&[], &[]);
        return (1, true);
    }
    let pos = p.node_positions();
    let ends: Vec<(usize, usize)> = p
        .edges
        .iter()
        .map(|e| (pos[e.source.as_str()], pos[e.target.as_str()]))
        .collect();
    let Some(mut plan) = plan(p, target, &ends, pins) else {
        return (0, true);
    };
    let mut position = vec![0; p.nodes.len()];
    for (i, &v) in plan.order.iter().enumerate() {
        position[v] = i;
    }
    for &(a, b) in less {
        plan.checks[position[a].max(position[b])].push((a, b));
    }
    let mut s = Search {
        p,
        target,
        plan,
        ends,
        img: vec![usize::MAX; p.nodes.len()],
        edge_img: vec![usize::MAX; p.edges.len()],
        used: vec![false; target.node_count()],
        found: 0,
        limit: opts.limit.unwrap_or(usize::MAX).max(1),
        steps: 0,
        step_budget: opts.step_budget.unwrap_or(u64::MAX),
        deadline: opts.time_budget.map(|d| Instant::now() + d),
        emit,
        buf: Vec::new(),
    };
    let stopped = s.descend(0);
    (s.found, stopped.is_none())
}

impl<T: Target, F: FnMut(&[usize], &[usize])> Search<'_, T, F> {
    fn descend(&mut self, depth: usize) -> Option<Stop> {
        if depth == self.plan.order.len() {
            (self.emit)(&self.img, &self.edge_img);
            self.found += 1;
            return (self.found >= self.limit).then_some(Stop::Limit);
        }
        let v = self.plan.order[depth];
        // generate candidates from the placed neighbour with the fewest
        // target neighbours, or from every candidate if none is placed
        let anchor = self.plan.groups[depth]
            .iter()
            .map(|(w, _)| *w)
            .filter(|&w| w != v)
            .min_by_key(|&w| self.target.neighbors(self.img[w]).len());
        let options: Vec<usize> = match anchor {
            Some(w) => self
                .target
                .neighbors(self.img[w])
                .iter()
                .copied()
                .filter(|&t| self.plan.candidates[v][t] && !self.used[t])
                .collect(),
            None => (0..self.target.node_count())
                .filter(|&t| self.plan.candidates[v][t] && !self.used[t])
                .collect(),
        };
        for t in options {
            self.steps += 1;
            if self.steps > self.step_budget {
                return Some(Stop::Budget);
            }
            if self.steps % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d) {
                return Some(Stop::Budget);
            }
            self.img[v] = t;
            if !self.plan.checks[depth].iter().all(|&(a, b)| self.img[a] < self.img[b]) || !self.assign_edges(depth) {
                continue;
            }
            self.used[t] = true;
            let stop = self.descend(depth + 1);
            self.used[t] = false;
            if stop.is_some() {
                return stop;
            }
        }
        self.img[v] = usize::MAX;
        None
    }

    /// Assigns edges between the node at `depth` and earlier nodes; fails
    /// when some group of parallel edges has no injective assignment.
    fn assign_edges(&mut self, depth: usize) -> bool {
        let groups = std::mem::take(&mut self.plan.groups[depth]);
        let mut ok = true;
        for (_, group) in &groups {
            if !self.assign_group(group) {
                ok = false;
                break;
            }
        }
        self.plan.groups[depth] = groups;
        ok
    }

    fn assign_group(&mut self, group: &[usize]) -> bool {
        while self.buf.len() < group.len() {
            self.buf.push(Vec::new());
        }
        for (i, &e) in group.iter().enumerate() {
            let (s, t) = self.ends[e];
            let list = &mut self.buf[i];
            list.clear();
            self.target
                .candidate_edges(&self.p.edges[e], self.img[s], self.img[t], list);
            if list.is_empty() {
                return false;
            }
        }
        if group.len() == 1 {
            self.edge_img[group[0]] = self.buf[0][0];
            return true;
        }
        let mut chosen = Vec::with_capacity(group.len());
        if distinct_pick(&self.buf[..group.len()], &mut chosen) {
            for (&e, &t) in group.iter().zip(&chosen) {
                self.edge_img[e] = t;
            }
            true
        } else {
            false
        }
    }
}

/// First (lexicographic) system of distinct representatives.
fn distinct_pick(lists: &[Vec<usize>], chosen: &mut Vec<usize>) -> bool {
    let i = chosen.len();
    if i == lists.len() {
        return true;
    }
    for &c in &lists[i] {
        if chosen.contains(&c) {
            continue;
        }
        chosen.push(c);
        if distinct_pick(lists, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Node};
    use crate::pattern::Origin;
    use crate::query::CmpOp;

    fn node(id: &str) -> PNode {
        PNode {
            id: id.into(),
            predicates: vec![],
            origin: Origin::root(id, 0),
        }
    }

    fn edge(id: &str, s: &str, t: &str, directed: bool) -> PEdge {
        PEdge {
            id: id.into(),
            source: s.into(),
            target: t.into(),
            directed,
            predicates: vec![],
            origin: Origin::root(id, 0),
            path_marker: None,
        }
    }

    fn complete_graph(k: usize) -> PropertyGraph {
        let nodes = (0..k)
            .map(|i| Node {
                id: format!("v{i}"),
                attrs: Default::default(),
            })
            .collect();
        let mut edges = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                edges.push(Edge {
                    id: format!("x{a}_{b}"),
                    source: format!("v{a}"),
                    target: format!("v{b}"),
                    label: None,
                    attrs: Default::default(),
                });
            }
        }
        PropertyGraph::new(false, nodes, edges).unwrap()
    }

    fn clique_pattern(k: usize) -> PatternGraph {
        let mut p = PatternGraph::default();
        for i in 0..k {
            p.nodes.push(node(&format!("p{i}")));
        }
        for a in 0..k {
            for b in a + 1..k {
                p.edges.push(edge(&format!("q{a}_{b}"), &format!("p{a}"), &format!("p{b}"), false));
            }
        }
        p
    }

    #[test]
    fn triangle_has_six_embeddings() {
        let out = match_pattern(&clique_pattern(3), &complete_graph(3), &MatchOptions::default());
        assert_eq!(out.count, 6);
        assert!(out.complete);
        let distinct: std::collections::BTreeSet<_> = out.results.iter().collect();
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn k4_into_k5() {
        assert_eq!(count(&clique_pattern(4), &complete_graph(5), &MatchOptions::default()), (120, true));
    }

    #[test]
    fn empty_pattern_matches_once() {
        assert_eq!(count(&PatternGraph::default(), &complete_graph(2), &MatchOptions::default()), (1, true));
    }

    #[test]
    fn limit_stops_early() {
        let out = match_pattern(&clique_pattern(3), &complete_graph(4), &MatchOptions::limit(5));
        assert_eq!(out.results.len(), 5);
        assert!(!out.complete);
        let full = match_pattern(&clique_pattern(3), &complete_graph(4), &MatchOptions::default());
        assert_eq!(&full.results[..5], &out.results[..]);
    }

    #[test]
    fn parallel_pattern_edges_need_parallel_data_edges() {
        let mut p = PatternGraph::default();
        p.nodes = vec![node("a"), node("b")];
        p.edges = vec![edge("e0", "a", "b", true), edge("e1", "a", "b", true)];
        let g = complete_graph(3);
        assert_eq!(count(&p, &g, &MatchOptions::default()).0, 0);
        let g = PropertyGraph::new(
            true,
            vec![
                Node {
                    id: "x".into(),
                    attrs: Default::default(),
                },
                Node {
                    id: "y".into(),
                    attrs: Default::default(),
                },
            ],
            ["d0", "d1"]
                .iter()
                .map(|id| Edge {
                    id: id.to_string(),
                    source: "x".into(),
                    target: "y".into(),
                    label: None,
                    attrs: Default::default(),
                })
                .collect(),
        )
        .unwrap();
        let out = match_pattern(&p, &g, &MatchOptions::default());
        assert_eq!(out.count, 1);
        assert_eq!(out.results[0].edge_map["e0"], "d0");
        assert_eq!(out.results[0].edge_map["e1"], "d1");
    }

    #[test]
    fn predicate_excluding_everything_is_empty_and_complete() {
        let mut p = clique_pattern(1);
        p.nodes[0].predicates.push(Predicate::new("name", CmpOp::Eq, "nobody"));
        assert_eq!(count(&p, &complete_graph(3), &MatchOptions::default()), (0, true));
    }

    #[test]
    fn pattern_embedding_respects_predicates() {
        let small = clique_pattern(3);
        let mut big = clique_pattern(4);
        let found = embed_pattern(&small, &big, 10_000).unwrap();
        assert!(verify_embedding(&small, &big, &found.0, &found.1));
        let mut picky = small.clone();
        picky.nodes[0].predicates.push(Predicate::new("x", CmpOp::Eq, 1i64));
        assert!(embed_pattern(&picky, &big, 10_000).is_none());
        big.nodes[3].predicates.push(Predicate::new("x", CmpOp::Eq, 1i64));
        assert!(embed_pattern(&picky, &big, 10_000).is_some());
    }
}
